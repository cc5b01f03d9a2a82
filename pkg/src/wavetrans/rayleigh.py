"""Shooting solver for the vertical structure of linear wave modes.

The vertical velocity amplitude ``phi(y)`` of a small-amplitude mode with
wavenumber ``k`` and phase speed ``c`` over a background current ``U(y)``
satisfies the Rayleigh equation

    (U - c) (phi'' - k^2 phi) - U'' phi = 0,      0 < y < h0,

with ``phi(0) = 0`` at the bed. Solutions here are normalized kinematically
at the surface, ``phi(h0) = k (c - U(h0))``, which pins the free constant to
a unit-amplitude surface elevation. Which pairs (c, k) the free surface
actually admits is decided by :func:`bifurcation_residual`: its roots in c
at fixed k are the selected wave speeds.

Over still water and constant-vorticity slabs, ``U'' == 0``, so the interior
equation is regular even when c lies inside the range of U; such sub-surface
["sub-critical"] speeds are legal there as long as c clears U at the surface
and at any vorticity breakpoint, where it appears in a denominator.
Tabulated shear and stratified columns get no such cancellation and require
c outside the whole range of U.

Stratified columns are integrated in the variables (varphi, w) with
``varphi = phi / (c - U)`` and ``w = R (c - U)^2 varphi'``. That system is
free of U' and absorbs vorticity breakpoints on its own: varphi and w stay
continuous across one, and the jump ``(gamma_plus - gamma_minus) phi(h1) /
(U(h1) - c)`` in phi' is recovered when phi' is reassembled from one-sided
values of U'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _ivp
from .errors import (CriticalLayerError, DegenerateModeError, DomainError,
                     VacuumLayerError)
from .profiles import GRAVITY, DensityProfile, ShearProfile

_MARGIN = 1e-8      # relative clearance required from singular speeds
_DEGENERATE = 1e-10  # |end value| below this fraction of the sup is a node
_NPTS = 201          # default output nodes per smooth segment


def _margin(c):
    return _MARGIN * (1.0 + abs(c))


def check_admissible(shear, c, k, *, stratified=False):
    """Raise unless (c, k) keeps the mode problem regular for this column."""
    if not (math.isfinite(c) and math.isfinite(k) and k > 0.0):
        raise DomainError(f"need finite c and k > 0, got c={c!r} k={k!r}")
    m = _margin(c)
    if stratified or shear.kind == "table":
        hi = shear.max_U()
        lo = shear.min_U()
        if not (c > hi + m or c < lo - m):
            raise CriticalLayerError(
                f"wave speed c={c!r} lies inside the range of the current "
                f"[{lo!r}, {hi!r}]; the critical layer U(y) = c makes the "
                "mode equation singular for this column")
        return
    if abs(c - shear.U(shear.h0)) <= m:
        raise CriticalLayerError(
            f"wave speed c={c!r} coincides with the surface current")
    if shear.kind == "piecewise" and abs(c - shear._u_interface) <= m:
        raise CriticalLayerError(
            f"wave speed c={c!r} coincides with the current at the "
            "vorticity breakpoint")


def _segment_bounds(shear):
    if shear.kind == "piecewise":
        return [(0.0, shear.h1), (shear.h1, shear.h0)]
    return [(0.0, shear.h0)]


def _scalar_U(shear):
    if shear.kind == "zero":
        return lambda y: 0.0
    if shear.kind == "linear":
        g0, h0 = shear.gamma, shear.h0
        return lambda y: g0 * (y - h0)
    if shear.kind == "piecewise":
        gm, gp, h1, h0 = (shear.gamma_minus, shear.gamma_plus,
                          shear.h1, shear.h0)
        u1 = gm * (h1 - h0)

        def u(y):
            if y <= h1:
                return gm * (y - h0)
            return u1 + gp * (y - h1)
        return u
    fast = shear._fast
    return lambda y: fast.eval(y)


def _phi_rhs(shear, c, k):
    k2 = k * k
    if shear.kind == "table":
        fast = shear._fast

        def f(y, phi, dphi):
            return dphi, (k2 + fast.eval(y, 2) / (fast.eval(y) - c)) * phi
        return f

    # U'' vanishes identically on each smooth segment of the other kinds.
    def f(y, phi, dphi):
        return dphi, k2 * phi
    return f


def _varphi_rhs(shear, density, c, k):
    k2 = k * k
    u = _scalar_U(shear)
    if density.kind == "constant":
        r0 = density.value

        def f(y, q, w):
            cu = c - u(y)
            cc = cu * cu
            return w / (r0 * cc), k2 * cc * r0 * q
        return f
    if density.kind == "exponential":
        b2 = 2.0 * density.beta
        scale = density.scale

        def f(y, q, w):
            r = scale * math.exp(-b2 * y)
            cu = c - u(y)
            cc = cu * cu
            return w / (r * cc), (k2 * cc * r - b2 * r) * q
        return f
    fast = density._fast
    # The guard needs a positive floor: a spline diving through zero blows
    # up the right-hand side and shrinks steps to underflow before any stage
    # lands exactly on a nonpositive value.
    r_floor = 1e-9 * max(p[1] for p in density.samples)

    def f(y, q, w):
        r = fast.eval(y)
        if r <= r_floor:
            raise VacuumLayerError(
                f"interpolated density reaches {r!r} at y={y!r}; the "
                "tabulated profile undershoots zero between samples")
        cu = c - u(y)
        cc = cu * cu
        return w / (r * cc), (k2 * cc * r + fast.eval(y, 1)) * q
    return f


@dataclass(frozen=True, eq=False)
class ModeSolution:
    """Vertical structure of one linear mode on nodes spanning [0, h0].

    ``phi`` carries the normalization phi(h0) = k (c - U(h0)). A vorticity
    breakpoint duplicates its node so ``phi_prime`` can hold both one-sided
    values; ``breaks`` lists the index at which each new smooth segment
    starts (empty for a single segment). ``varphi`` and ``varphi_prime``
    hold phi/(c-U) and its derivative for stratified modes and are None for
    homogeneous ones, where c may legally cross U inside the column.
    """

    y: np.ndarray
    phi: np.ndarray
    phi_prime: np.ndarray
    c: float
    k: float
    kind: str
    shear: ShearProfile
    density: DensityProfile | None = None
    varphi: np.ndarray | None = None
    varphi_prime: np.ndarray | None = None
    breaks: tuple = ()

    def segments(self):
        """Slices of the node arrays covering each smooth segment."""
        starts = (0,) + self.breaks
        ends = self.breaks + (len(self.y),)
        return [slice(a, b) for a, b in zip(starts, ends)]

    def segment_sides(self):
        """Side flags (-1 below a breakpoint, +1 above) per segment."""
        return [-1 if i == 0 else 1 for i in range(len(self.breaks) + 1)]


# Legitimate shots finish in a few thousand steps; the cap exists so that
# residual scans probing near-singular speeds (stratified c -> 0 makes the
# interior wavelength O(c)) fail fast and get skipped as NaN cells instead
# of grinding through millions of steps.
_SHOT_MAX_STEPS = 100_000


def _shoot_homogeneous(shear, c, k, rtol, atol, seed=1.0):
    """Terminal (phi, phi') at h0 of the shot from (0, seed) at the bed."""
    f = _phi_rhs(shear, c, k)
    state = (0.0, seed)
    # atol tracks the scale the seed sets, so the accepted step sequence is
    # identical for every seed and the shot is exactly linear in it.
    atol = atol * abs(seed)
    bounds = _segment_bounds(shear)
    for i, (a, b) in enumerate(bounds):
        state = _ivp.terminal(f, a, b, state, rtol=rtol, atol=atol,
                              max_steps=_SHOT_MAX_STEPS)
        if i < len(bounds) - 1:
            jump = (shear.gamma_plus - shear.gamma_minus) * state[0] \
                / (shear._u_interface - c)
            state = (state[0], state[1] + jump)
    return state


def _shoot_stratified(shear, density, c, k, rtol, atol, seed=1.0):
    """Terminal (varphi, varphi') at h0 of the shot from (0, seed)."""
    f = _varphi_rhs(shear, density, c, k)
    state = (0.0, seed)
    atol = atol * abs(seed)
    for a, b in _segment_bounds(shear):
        state = _ivp.terminal(f, a, b, state, rtol=rtol, atol=atol,
                              max_steps=_SHOT_MAX_STEPS)
    q, w = state
    cu = c - shear.U(shear.h0)
    return q, w / (density.R(shear.h0) * cu * cu)


def shoot(shear, c, k, *, density=None, rtol=1e-10, atol=1e-12,
          seed_slope=1.0):
    """End values at y = h0 of the unscaled shot from the bed.

    Returns (phi, phi') for a homogeneous column or (varphi, varphi') for a
    stratified one. Everything downstream of the interior equation (surface
    residuals, bed gains) needs only these two numbers, so this skips the
    output grid entirely. ``seed_slope`` scales the shot's bed slope; by
    linearity of the mode equation it rescales the outputs and nothing
    else, which the hygiene tests exercise.
    """
    if not (math.isfinite(seed_slope) and seed_slope != 0.0):
        raise DomainError("seed_slope must be finite and nonzero")
    check_admissible(shear, c, k, stratified=density is not None)
    if density is None:
        return _shoot_homogeneous(shear, c, k, rtol, atol, seed_slope)
    return _shoot_stratified(shear, density, c, k, rtol, atol, seed_slope)


def bifurcation_residual(shear, c, k, *, density=None, g=GRAVITY,
                         rtol=1e-10, atol=1e-12):
    """Signed, scale-free misfit of the dynamic free-surface condition.

    Zero exactly when the shot mode satisfies the surface condition, i.e.
    when (c, k) lies on a dispersion branch. The raw misfit is divided by
    max(|phi|, |phi'|) at the surface and by (1 + g / (c - U(h0))^2), so
    values are comparable across c and stay O(1) near the poles where
    c approaches the surface current.
    """
    end, endp = shoot(shear, c, k, density=density, rtol=rtol, atol=atol)
    cu = c - shear.U(shear.h0)
    gcc = g / (cu * cu)
    if density is None:
        up, _ = shear.U_derivs(shear.h0)
        res = endp - (gcc - up / cu) * end
    else:
        res = endp - gcc * end
    scale = max(abs(end), abs(endp)) * (1.0 + gcc)
    return res / max(scale, 1e-300)


def _solve_homogeneous(shear, c, k, npts, rtol, atol, *,
                       surface_value=None, kind="homogeneous"):
    f = _phi_rhs(shear, c, k)
    bounds = _segment_bounds(shear)
    state = (0.0, 1.0)
    ys = []
    phis = []
    dphis = []
    breaks = []
    for i, (a, b) in enumerate(bounds):
        nodes = np.linspace(a, b, npts)
        p, q = _ivp.solve_on_grid(f, nodes, state, rtol=rtol, atol=atol)
        if i:
            breaks.append(len(ys))
        ys.extend(nodes)
        phis.extend(p)
        dphis.extend(q)
        state = (p[-1], q[-1])
        if i < len(bounds) - 1:
            jump = (shear.gamma_plus - shear.gamma_minus) * state[0] \
                / (shear._u_interface - c)
            state = (state[0], state[1] + jump)

    phi = np.array(phis)
    dphi = np.array(dphis)
    end = phi[-1]
    if abs(end) <= _DEGENERATE * np.max(np.abs(phi)):
        raise DegenerateModeError(
            f"phi(h0) vanishes for c={c!r}, k={k!r}; the shot mode has a "
            "node at the surface and cannot be surface-normalized")
    if surface_value is None:
        surface_value = k * (c - shear.U(shear.h0))
    s = surface_value / end
    return ModeSolution(
        y=np.array(ys), phi=s * phi, phi_prime=s * dphi, c=c, k=k,
        kind=kind, shear=shear, breaks=tuple(breaks))


def _solve_stratified(shear, density, c, k, npts, rtol, atol):
    f = _varphi_rhs(shear, density, c, k)
    bounds = _segment_bounds(shear)
    state = (0.0, 1.0)
    ys = []
    qs = []
    ws = []
    breaks = []
    for i, (a, b) in enumerate(bounds):
        nodes = np.linspace(a, b, npts)
        q, w = _ivp.solve_on_grid(f, nodes, state, rtol=rtol, atol=atol)
        if i:
            breaks.append(len(ys))
        ys.extend(nodes)
        qs.extend(q)
        ws.extend(w)
        # varphi and w are continuous across a vorticity breakpoint.
        state = (q[-1], w[-1])

    y = np.array(ys)
    varphi = np.array(qs)
    w = np.array(ws)
    end = varphi[-1]
    if abs(end) <= _DEGENERATE * np.max(np.abs(varphi)):
        raise DegenerateModeError(
            f"the mode amplitude vanishes at the surface for c={c!r}, "
            f"k={k!r} and cannot be surface-normalized")
    s = k / end
    varphi *= s
    w *= s

    cu = c - shear.U(y)
    varphi_prime = w / (density.R(y) * cu * cu)
    phi = cu * varphi
    phi_prime = np.empty_like(phi)
    breaks_t = tuple(breaks)
    sol = ModeSolution(
        y=y, phi=phi, phi_prime=phi_prime, c=c, k=k, kind="stratified",
        shear=shear, density=density, varphi=varphi,
        varphi_prime=varphi_prime, breaks=breaks_t)
    for seg, side in zip(sol.segments(), sol.segment_sides()):
        up, _ = shear.U_derivs(y[seg], side=side)
        phi_prime[seg] = -up * varphi[seg] + cu[seg] * varphi_prime[seg]
    return sol


def solve_mode(shear, c, k, *, density=None, npts=_NPTS,
               rtol=1e-10, atol=1e-12):
    """Solve the interior mode problem on the full column.

    ``npts`` nodes are placed uniformly on each smooth segment (two
    segments for piecewise-linear shear, one otherwise), and the integrator
    lands on each node exactly rather than interpolating. Passing a density
    switches to the stratified formulation even if the density is constant;
    results then agree with the homogeneous path to solver tolerance.
    """
    if npts < 5:
        raise DomainError("need at least 5 output nodes per segment")
    check_admissible(shear, c, k, stratified=density is not None)
    if density is None:
        return _solve_homogeneous(shear, c, k, npts, rtol, atol)
    return _solve_stratified(shear, density, c, k, npts, rtol, atol)
