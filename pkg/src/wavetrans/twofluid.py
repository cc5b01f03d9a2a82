"""Two-layer columns: an interface at h0 between fluids of constant density.

The lower fluid occupies 0 <= y <= h0 over the bed, the upper fluid
h0 <= y <= H under a flat rigid lid; each carries its own shear profile and
constant density, and the interface supports surface tension. ``H`` may be
``math.inf``, in which case the upper problem is truncated at

    y_trunc = h0 + max(10/k, 5*h0)

and closed with the decaying far-field relation phi' = -k phi, which is
exact once the upper current has become constant (the closure error is
O(exp(-2 k (y_trunc - h0))) otherwise).

Upper-layer shear profiles are declared in layer-local coordinates
``s = y - h0`` running from 0 at the interface to ``H - h0`` at the lid, so
a ShearProfile's own domain [0, h0'] carries over unchanged. For infinite H
the declared profile covers [0, y* - h0] for some finite y*, must be flat at
its top, and is extended above y* by its top value.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _ivp, rayleigh
from .errors import (CriticalLayerError, DegenerateModeError, DomainError,
                     FormatError)
from .profiles import GRAVITY, ShearProfile


@dataclass(frozen=True)
class TwoFluidEnv:
    """Two constant-density layers separated by an interface at h0."""

    U_minus: ShearProfile
    U_plus: ShearProfile
    rho_minus: float
    rho_plus: float
    h0: float
    H: float
    sigma: float = 0.0
    g: float = GRAVITY

    def __post_init__(self):
        if not (0.0 < self.h0 < self.H):
            raise DomainError("need 0 < h0 < H")
        if not (self.rho_minus > 0.0 and self.rho_plus >= 0.0):
            raise DomainError("need rho_minus > 0 and rho_plus >= 0")
        if self.sigma < 0.0:
            raise DomainError("surface tension must be nonnegative")
        if not (self.g > 0.0 and math.isfinite(self.g)):
            raise DomainError("g must be finite and positive")
        tol = 1e-12 * (1.0 + self.h0)
        if abs(self.U_minus.h0 - self.h0) > tol:
            raise DomainError("lower shear profile depth disagrees with h0")
        if math.isinf(self.H):
            up, _ = self.U_plus.U_derivs(self.U_plus.h0)
            scale = 1.0 + max(abs(self.U_plus.max_U()),
                              abs(self.U_plus.min_U()))
            if abs(up) > 1e-8 * scale:
                raise DomainError(
                    "H is infinite but the upper current is not flat at the "
                    "top of its declared range; the far-field closure needs "
                    "an asymptotically constant current")
        elif abs(self.U_plus.h0 - (self.H - self.h0)) > tol:
            raise DomainError(
                "upper shear profile must span the layer [0, H - h0] "
                "in layer-local coordinates")
        if self.rho_plus > self.rho_minus:
            warnings.warn(
                "rho_plus exceeds rho_minus: the heavy fluid sits on top, "
                "so this configuration is statically unstable",
                stacklevel=2)

    @property
    def depth_upper(self):
        """Upper layer thickness (may be inf)."""
        return self.H - self.h0

    def default_y_trunc(self, k):
        """Truncation height used for solves when H is infinite."""
        cut = self.h0 + max(10.0 / k, 5.0 * self.h0)
        # The closure is only valid above the declared varying region.
        return max(cut, self.h0 + self.U_plus.h0)

    def to_json(self):
        d = {
            "shear": self.U_minus.to_json(),
            "upper": self.U_plus.to_json(),
            "rho_minus": self.rho_minus,
            "rho_plus": self.rho_plus,
            "h0": self.h0,
            "H": "inf" if math.isinf(self.H) else self.H,
            "sigma": self.sigma,
            "g": self.g,
        }
        if math.isinf(self.H):
            d["upper_span"] = self.U_plus.h0
        return d

    @classmethod
    def from_json(cls, d):
        try:
            h0 = float(d["h0"])
            raw_h = d["H"]
        except (TypeError, KeyError):
            raise FormatError("two-fluid environment needs 'h0' and 'H'")
        H = math.inf if raw_h in ("inf", None) else float(raw_h)
        lower = ShearProfile.from_json(d.get("shear", {"kind": "zero"}), h0)
        upper_json = d.get("upper", {"kind": "zero"})
        if not math.isinf(H):
            span = H - h0
        elif "upper_span" in d:
            span = float(d["upper_span"])
        elif isinstance(upper_json, dict) and upper_json.get("kind") == "table":
            span = float(upper_json["samples"][-1][0])
        else:
            span = h0  # flat upper currents carry no scale of their own
        upper = ShearProfile.from_json(upper_json, span)
        return cls(U_minus=lower, U_plus=upper,
                   rho_minus=float(d["rho_minus"]),
                   rho_plus=float(d["rho_plus"]),
                   h0=h0, H=H, sigma=float(d.get("sigma", 0.0)),
                   g=float(d.get("g", GRAVITY)))


def _check_supercritical(env, c, k):
    if not (math.isfinite(c) and math.isfinite(k) and k > 0.0):
        raise DomainError(f"need finite c and k > 0, got c={c!r} k={k!r}")
    hi = max(env.U_minus.max_U(), env.U_plus.max_U())
    if c <= hi + rayleigh._margin(c):
        raise CriticalLayerError(
            f"wave speed c={c!r} does not clear the current maximum {hi!r} "
            "over both layers; a critical layer would form")


def _upper_rhs(env, c, k):
    """Upper-layer RHS in local coordinates, constant-extended above."""
    base = rayleigh._phi_rhs(env.U_plus, c, k)
    top = env.U_plus.h0
    k2 = k * k

    def f(s, phi, dphi):
        if s > top:
            return dphi, k2 * phi
        return base(s, phi, dphi)
    return f


def _upper_descents(env, y_trunc):
    """Downward segment bounds in local coordinates, plus jump flags."""
    shear = env.U_plus
    top = y_trunc - env.h0 if math.isinf(env.H) else shear.h0
    cuts = [top]
    if math.isinf(env.H) and top > shear.h0:
        cuts.append(shear.h0)
    if shear.kind == "piecewise":
        cuts.append(shear.h1)
    cuts.append(0.0)
    cuts = sorted(set(cuts), reverse=True)
    segs = list(zip(cuts[:-1], cuts[1:]))
    jump_at = shear.h1 if shear.kind == "piecewise" else None
    return segs, jump_at


def _solve_upper(env, c, k, npts, rtol, atol, y_trunc):
    """Downward shot through the upper layer, scaled so phi(interface) = k.

    Returns a ModeSolution on the ascending local grid [0, top].
    """
    shear = env.U_plus
    f = _upper_rhs(env, c, k)
    segs, jump_at = _upper_descents(env, y_trunc)
    if math.isinf(env.H):
        state = (1.0, -k)  # decaying far-field closure at the truncation
    else:
        state = (0.0, -1.0)  # rigid lid

    ys = []
    phis = []
    dphis = []
    for i, (a, b) in enumerate(segs):
        nodes = np.linspace(a, b, npts)
        p, q = _ivp.solve_on_grid(f, nodes, state, rtol=rtol, atol=atol)
        ys.extend(nodes)
        phis.extend(p)
        dphis.extend(q)
        state = (p[-1], q[-1])
        if b == jump_at and i < len(segs) - 1:
            # Crossing the breakpoint downward removes the upward jump.
            jump = (shear.gamma_plus - shear.gamma_minus) * state[0] \
                / (shear._u_interface - c)
            state = (state[0], state[1] - jump)

    phi = np.array(phis[::-1])
    dphi = np.array(dphis[::-1])
    y = np.array(ys[::-1])
    end = phi[0]
    if abs(end) <= rayleigh._DEGENERATE * np.max(np.abs(phi)):
        raise DegenerateModeError(
            f"the upper mode vanishes at the interface for c={c!r}, "
            f"k={k!r} and cannot be interface-normalized")
    s = k / end
    breaks = tuple(npts * j for j in range(1, len(segs)))
    return rayleigh.ModeSolution(
        y=y, phi=s * phi, phi_prime=s * dphi, c=c, k=k,
        kind="two_fluid_upper", shear=shear, breaks=breaks)


def solve_two_layer_modes(env, c, k, *, npts=rayleigh._NPTS,
                          rtol=1e-10, atol=1e-12, y_trunc=None):
    """Solve both layers' mode problems at (c, k).

    The lower mode is shot upward from the bed, the upper downward from the
    lid (or from ``y_trunc`` with the decay closure when H is infinite);
    both are scaled so phi(interface) = k exactly. The upper solution's grid
    is layer-local: add ``env.h0`` to its y to place it in the column.
    """
    if npts < 5:
        raise DomainError("need at least 5 output nodes per segment")
    _check_supercritical(env, c, k)
    if y_trunc is None:
        y_trunc = env.default_y_trunc(k) if math.isinf(env.H) else env.H
    elif not math.isinf(env.H):
        raise DomainError("y_trunc only applies when H is infinite")
    elif y_trunc < env.h0 + env.U_plus.h0:
        raise DomainError(
            "y_trunc must sit above the declared upper current range")
    lower = rayleigh._solve_homogeneous(
        env.U_minus, c, k, npts, rtol, atol,
        surface_value=k, kind="two_fluid_lower")
    upper = _solve_upper(env, c, k, npts, rtol, atol, y_trunc)
    return lower, upper


def interface_shot(env, c, k, *, rtol=1e-10, atol=1e-12, y_trunc=None):
    """Interface values (phi-, phi-', phi+, phi+') scaled to phi(h0) = k.

    Terminal shots only, no output grid; this is all the dispersion
    residual needs, and it is what makes root scans affordable.
    """
    _check_supercritical(env, c, k)
    end_m, endp_m = rayleigh._shoot_homogeneous(env.U_minus, c, k, rtol, atol)
    if end_m == 0.0:
        raise DegenerateModeError("lower mode vanishes at the interface")
    s = k / end_m
    if y_trunc is None:
        y_trunc = env.default_y_trunc(k) if math.isinf(env.H) else env.H
    f = _upper_rhs(env, c, k)
    segs, jump_at = _upper_descents(env, y_trunc)
    state = (1.0, -k) if math.isinf(env.H) else (0.0, -1.0)
    for i, (a, b) in enumerate(segs):
        state = _ivp.terminal(f, a, b, state, rtol=rtol, atol=atol)
        if b == jump_at and i < len(segs) - 1:
            jump = (env.U_plus.gamma_plus - env.U_plus.gamma_minus) \
                * state[0] / (env.U_plus._u_interface - c)
            state = (state[0], state[1] - jump)
    end_p, endp_p = state
    if end_p == 0.0:
        raise DegenerateModeError("upper mode vanishes at the interface")
    t = k / end_p
    return k, s * endp_m, k, t * endp_p


def interface_hydrostatic(p_bed_minus, p_lid_plus, env):
    """Interface elevation from per-density pressures, hydrostatically.

    When vertical accelerations are negligible each layer's dynamic
    pressure is depth-independent, so the bed gauge reads the lower-layer
    interface pressure and the lid gauge the upper-layer one; eliminating
    the shared interface pressure jump gives

        eta = (p- - (rho+/rho-) p+) / ((1 - rho+/rho-) g).

    Inputs are per-density ('kinematic') pressures, i.e. gauge pressure
    over the layer density. For infinite H there is no lid and the
    far-field upper pressure vanishes, so p+ is forced to zero.
    """
    if env.rho_plus >= env.rho_minus:
        raise DomainError(
            "interface_hydrostatic needs rho_plus < rho_minus; the "
            "hydrostatic coefficient degenerates otherwise")
    ratio = env.rho_plus / env.rho_minus
    p_minus = np.asarray(p_bed_minus, dtype=float)
    if math.isinf(env.H):
        p_plus = np.zeros_like(p_minus)
    else:
        p_plus = np.asarray(p_lid_plus, dtype=float)
    eta = (p_minus - ratio * p_plus) / ((1.0 - ratio) * env.g)
    return float(eta) if eta.ndim == 0 else eta
