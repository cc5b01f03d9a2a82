"""Pressure transfer functions and assembled linear wave fields.

The transfer function T(y) maps surface (or interface) elevation amplitude
to dynamic pressure amplitude at height y: a wave eta = a cos(k(x - ct))
carries pressure p = a T(y) cos(k(x - ct)). For a homogeneous column

    T(y) = ((c - U) phi' + U' phi) / k,

working in scaled variables with the density folded to one, so T has units
m/s^2 and the surface dynamic condition reads T(h0) = g at a selected wave
speed. The stratified form is T(y) = R (c - U)^2 varphi' / k with units set
by the density convention, and T(h0) = g R(h0) at a root. Two-fluid layers
use the per-density convention

    T_pm(y) = (c - U_pm(h0)) ((c - U_pm) phi_pm' + U_pm' phi_pm) / k

with the layer modes normalized to phi_pm(h0) = k; with rho_plus = 0 this
collapses to the single-fluid T(y) of the lower layer.

Bed-to-surface amplification is the scalar 1/T(0): multiplying the bed
pressure trace by it recovers the elevation, which is the inversion rule
the reconstruction module applies mode by mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (ConsistencyError, DegenerateModeError, DomainError,
                     IllConditionedError)
from .profiles import GRAVITY
from .rayleigh import ModeSolution, shoot  # noqa: F401  (context type)
from .dispersion import (closed_form_c_const_vorticity, closed_form_c_zero)


@dataclass(frozen=True, eq=False)
class TransferFunction:
    """Sampled pressure transfer function on the mode grid.

    ``kind`` is one of homogeneous, stratified, two_fluid_lower,
    two_fluid_upper. ``breaks`` mirrors the mode grid's segment structure:
    T may jump at a vorticity breakpoint through its U' phi term, and the
    duplicated node then carries both one-sided values.
    """

    y: np.ndarray
    T: np.ndarray
    T0: float
    c: float
    k: float
    kind: str
    g: float
    h0: float
    breaks: tuple = ()

    def segments(self):
        starts = (0,) + self.breaks
        ends = self.breaks + (len(self.y),)
        return [slice(a, b) for a, b in zip(starts, ends)]


def transfer_from_mode(mode, shear=None, density=None, *, g=GRAVITY):
    """Evaluate T(y) on a solved mode's grid.

    ``shear`` and ``density`` are optional cross-checks: passing a profile
    other than the one the mode was solved on raises a consistency error
    instead of silently producing numbers for the wrong column.
    """
    if shear is not None and shear != mode.shear:
        raise ConsistencyError(
            "transfer requested against a different shear profile than "
            "the mode was solved on")
    if density is not None and density != mode.density:
        raise ConsistencyError(
            "transfer requested against a different density profile than "
            "the mode was solved on")
    if mode.kind not in ("homogeneous", "stratified"):
        raise DomainError(
            "two-fluid layer modes take their transfer functions from "
            "transfer_from_two_layer_modes")

    y = mode.y
    c = mode.c
    k = mode.k
    T = np.empty_like(mode.phi)
    if mode.kind == "stratified":
        cu = c - mode.shear.U(y)
        T[:] = mode.density.R(y) * cu * cu * mode.varphi_prime / k
    else:
        for seg, side in zip(mode.segments(), mode.segment_sides()):
            up, _ = mode.shear.U_derivs(y[seg], side=side)
            cu = c - mode.shear.U(y[seg])
            T[seg] = (cu * mode.phi_prime[seg] + up * mode.phi[seg]) / k
    return TransferFunction(y=y, T=T, T0=float(T[0]), c=c, k=k,
                            kind=mode.kind, g=g, h0=mode.shear.h0,
                            breaks=mode.breaks)


def transfer_from_two_layer_modes(env, lower, upper):
    """Per-density transfer functions (lower, upper) of a two-fluid pair.

    The lower function is sampled on its native column grid; the upper
    mode's layer-local grid is shifted to column coordinates y = h0 + s.
    Surface tension never enters T directly, only through the solved c.
    """
    if lower.kind != "two_fluid_lower" or upper.kind != "two_fluid_upper":
        raise ConsistencyError(
            "expected the (lower, upper) pair from solve_two_layer_modes")
    if lower.shear != env.U_minus or upper.shear != env.U_plus:
        raise ConsistencyError(
            "layer modes were solved on different shear profiles than "
            "this environment declares")
    if lower.c != upper.c or lower.k != upper.k:
        raise ConsistencyError("layer modes disagree on (c, k)")
    c = lower.c
    k = lower.k

    out = []
    for mode, iface_u, offset in (
            (lower, env.U_minus.U(env.h0), 0.0),
            (upper, env.U_plus.U(0.0), env.h0)):
        T = np.empty_like(mode.phi)
        for seg, side in zip(mode.segments(), mode.segment_sides()):
            up, _ = mode.shear.U_derivs(mode.y[seg], side=side)
            cu = c - mode.shear.U(mode.y[seg])
            T[seg] = (c - iface_u) * (cu * mode.phi_prime[seg]
                                      + up * mode.phi[seg]) / k
        out.append(TransferFunction(
            y=mode.y + offset, T=T, T0=float(T[0]), c=c, k=k,
            kind=mode.kind, g=env.g, h0=env.h0, breaks=mode.breaks))
    return tuple(out)


def bed_gain(tf):
    """Bed-pressure-to-elevation gain 1/T(0).

    T(0) cannot vanish at a selected wave speed, so a tiny |T(0)| signals
    an inconsistent or degenerate input rather than physics; it is refused
    instead of returning a huge amplification.
    """
    if abs(tf.T0) <= 1e-14 * tf.g:
        raise IllConditionedError(
            f"T(0) = {tf.T0!r} is vanishingly small against g; the "
            "bed-to-surface gain is not meaningful")
    return 1.0 / tf.T0


def bed_transfer(shear, c, k, *, density=None, rtol=1e-10, atol=1e-12):
    """T(0) at a selected wave speed from a single terminal shot.

    The bed value follows from the shot's endpoint alone: rescaling the
    unit-slope shot to the surface normalization gives
    T(0) = (c - U(0)) (c - U(h0)) / phi_end for a homogeneous column and
    1/varphi_end for a stratified one. The spectral reconstruction calls
    this once per frequency bin, where building the full profile would
    dominate the run time.
    """
    end, _ = shoot(shear, c, k, density=density, rtol=rtol, atol=atol)
    if end == 0.0 or not math.isfinite(end):
        raise DegenerateModeError(
            "shot endpoint vanished; (c, k) sits on a degenerate mode")
    if density is None:
        return (c - shear.U(0.0)) * (c - shear.U(shear.h0)) / end
    return 1.0 / end


def _deriv5(y, f):
    """Fourth-order first derivative on a uniform grid (5-point stencils)."""
    h = y[1] - y[0]
    n = len(f)
    d = np.empty(n)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3]
            - 3 * f[4]) / (12 * h)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    d[2:n - 2] = (f[0:n - 4] - 8 * f[1:n - 3] + 8 * f[3:n - 1]
                  - f[4:n]) / (12 * h)
    d[n - 2] = (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3]
                + 6 * f[n - 4] - f[n - 5]) / (12 * h)
    d[n - 1] = (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3]
                - 16 * f[n - 4] + 3 * f[n - 5]) / (12 * h)
    return d


def nonmonotonicity_profile(tf):
    """Sampled sign pattern of dT/dy on the transfer grid.

    Returns (y, sign) pairs with sign in {-1, 0, +1}; a mix of signs means
    the pressure disturbance is non-monotone in depth. Derivatives are
    finite differences per smooth segment (the grid is uniform there), with
    a relative deadband so roundoff at genuine extrema reads as 0.
    """
    out = []
    for seg in tf.segments():
        y = tf.y[seg]
        d = _deriv5(y, tf.T[seg])
        tol = 1e-8 * np.max(np.abs(d))
        sign = np.where(np.abs(d) <= tol, 0.0, np.sign(d))
        out.extend(zip(y.tolist(), (int(s) for s in sign)))
    return out


def _uniform_grid(h0, npts):
    if npts < 5:
        raise DomainError("need at least 5 output nodes")
    return np.linspace(0.0, h0, npts)


def transfer_zero_vorticity(k, h0, g=GRAVITY, npts=201):
    """Closed-form still-water transfer g cosh(ky)/cosh(kh0) at the root."""
    y = _uniform_grid(h0, npts)
    c = closed_form_c_zero(k, h0, g)
    T = g * np.cosh(k * y) / math.cosh(k * h0)
    return TransferFunction(y=y, T=T, T0=float(T[0]), c=c, k=k,
                            kind="homogeneous", g=g, h0=h0)


def transfer_constant_vorticity(gamma, k, h0, g=GRAVITY, npts=201):
    """Closed-form constant-vorticity transfer at its positive-branch root.

    T(y) = c ((c - gamma (y - h0)) k cosh(ky) + gamma sinh(ky)) / sinh(kh0);
    gamma = 0 collapses to the still-water form.
    """
    y = _uniform_grid(h0, npts)
    c = closed_form_c_const_vorticity(gamma, k, h0, g)
    T = c * ((c - gamma * (y - h0)) * k * np.cosh(k * y)
             + gamma * np.sinh(k * y)) / math.sinh(k * h0)
    return TransferFunction(y=y, T=T, T0=float(T[0]), c=c, k=k,
                            kind="homogeneous", g=g, h0=h0)


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Linear wave field sampled over one wavelength at t = 0.

    Arrays are indexed [iy, ix]. ``rho`` is the density perturbation and is
    None for homogeneous columns.
    """

    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    p: np.ndarray
    rho: np.ndarray | None
    amplitude: float
    phase: float
    c: float
    k: float


def linear_field(mode, amplitude, *, phase=0.0, nx=256, g=GRAVITY):
    """Assemble (u, v, p[, rho]) of the wave eta = a cos(kx + phase) at t=0.

    With theta = kx + phase: u = (a/k) phi' cos(theta), v = a phi
    sin(theta), p = a T(y) cos(theta). Stratified columns also carry the
    advected density perturbation rho = -(a/k) R' phi / (c - U) cos(theta):
    lifting denser fluid from below makes the perturbation positive under a
    crest. Incompressibility holds identically, and v vanishes on the bed.
    """
    if amplitude < 0.0:
        raise DomainError("amplitude must be nonnegative")
    if nx < 4:
        raise DomainError("need at least 4 horizontal samples")
    tf = transfer_from_mode(mode, g=g)
    k = mode.k
    x = np.linspace(0.0, 2.0 * math.pi / k, nx, endpoint=False)
    theta = k * x + phase
    cos = np.cos(theta)
    sin = np.sin(theta)
    u = np.outer(mode.phi_prime, cos) * (amplitude / k)
    v = np.outer(mode.phi, sin) * amplitude
    p = np.outer(tf.T, cos) * amplitude
    rho = None
    if mode.kind == "stratified":
        cu = mode.c - mode.shear.U(mode.y)
        rho_hat = -(amplitude / k) * mode.density.R_deriv(mode.y) \
            * mode.phi / cu
        rho = np.outer(rho_hat, cos)
    return FieldGrid(x=x, y=mode.y, u=u, v=v, p=p, rho=rho,
                     amplitude=amplitude, phase=phase, c=mode.c, k=k)
