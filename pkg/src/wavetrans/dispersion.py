"""Wave speed selection: bifurcation roots, closed forms, long-wave speeds.

Numerical roots all follow the same recipe: evaluate a dimensionless
residual on a uniform speed grid, bracket its sign changes, polish each
bracket with Brent's method, and keep only roots whose re-evaluated residual
is below 1e-10 (a sign flip across a pole of the residual brackets no root,
and the re-check weeds those out). The largest surviving c is the canonical
(fastest, surface-gravity) branch; every located root is reported.

Scan ranges depend on the column. Currents with vanishing U'' (still water,
constant vorticity, piecewise vorticity) keep the mode equation regular for
speeds inside the range of U, so their scan starts just above zero and may
legitimately return sub-surface-maximum speeds; strongly negative vorticity
does exactly that. Tabulated shear and stratified columns scan strictly
above max U.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import twofluid as _tf
from .errors import (ConvergenceError, CriticalLayerError,
                     DegenerateModeError, DomainError, IntegrabilityError,
                     NoRootError)
from .profiles import GRAVITY
from .rayleigh import _scalar_U, bifurcation_residual

_BRENT_XTOL = 1e-12
_BRENT_RTOL = 1e-12   # combined Brent tolerance 1e-12 * (1 + |c|)
_MAX_ITER = 200
_RESIDUAL_OK = 1e-10  # acceptance bar for a polished root
_SOLVER_FAILURES = (CriticalLayerError, ConvergenceError, DegenerateModeError)


@dataclass(frozen=True)
class DispersionResult:
    """One selected wave speed, plus how it was found.

    ``roots`` lists every speed that survived the residual re-check on the
    scanned range, ascending; ``c`` is the largest of them.
    """

    c: float
    k: float
    residual_at_root: float
    bracket_used: tuple
    iterations: int
    roots: tuple = ()


def closed_form_c_zero(k, h0, g=GRAVITY):
    """Still-water gravity wave speed, sqrt(g tanh(k h0) / k)."""
    _require_positive(k=k, h0=h0, g=g)
    return math.sqrt(g * math.tanh(k * h0) / k)


def closed_form_c_const_vorticity(gamma, k, h0, g=GRAVITY):
    """Wave speed over constant vorticity gamma (positive branch).

    The quadratic for c has a second, negative root; it is discarded since
    only rightward-propagating waves are modelled.
    """
    _require_positive(k=k, h0=h0, g=g)
    t = math.tanh(k * h0)
    half = gamma * t / (2.0 * k)
    return -half + math.sqrt(half * half + g * t / k)


def stagnation_threshold(k, h0, g=GRAVITY):
    """Squared-vorticity level above which the flow stalls under a crest."""
    _require_positive(k=k, h0=h0, g=g)
    t = math.tanh(k * h0)
    denom = k * h0 * h0 - h0 * t
    if denom <= 0.0:
        raise DomainError(
            "degenerate geometry: k h0^2 must exceed h0 tanh(k h0)")
    return g * t / denom


def stagnation_condition(gamma, k, h0, g=GRAVITY):
    """True when the shear is adverse and strong enough to stall the crest.

    Only negative vorticity qualifies, and only beyond the threshold
    gamma^2 > g tanh(k h0) / (k h0^2 - h0 tanh(k h0)).
    """
    return gamma < 0.0 and gamma * gamma > stagnation_threshold(k, h0, g)


def _require_positive(**named):
    for name, v in named.items():
        if not (math.isfinite(v) and v > 0.0):
            raise DomainError(f"{name} must be finite and positive, got {v!r}")


def _polish_brackets(fun, cs, vals):
    """Brent-polish every sign change of the scanned residual.

    Returns (roots, any_diverged): roots as (c, residual, bracket,
    iterations) tuples that pass the re-check, ascending in c.
    """
    roots = []
    diverged = False
    for a, b, fa, fb in zip(cs, cs[1:], vals, vals[1:]):
        if math.isnan(fa) or math.isnan(fb):
            continue
        if fa == 0.0:
            roots.append((a, 0.0, (a, a), 0))
            continue
        if fa * fb >= 0.0:
            continue
        try:
            c_root, info = brentq(fun, a, b, xtol=_BRENT_XTOL,
                                  rtol=_BRENT_RTOL, maxiter=_MAX_ITER,
                                  full_output=True, disp=False)
        except _SOLVER_FAILURES:
            continue
        if not info.converged:
            diverged = True
            continue
        try:
            res = fun(c_root)
        except _SOLVER_FAILURES:
            continue
        if abs(res) <= _RESIDUAL_OK:
            roots.append((float(c_root), res, (a, b), info.iterations))
    return roots, diverged


def _scan_for_roots(fun, lo, hi, nscan, what):
    cs = np.linspace(lo, hi, nscan)
    vals = []
    for ci in cs:
        try:
            vals.append(fun(ci))
        except _SOLVER_FAILURES:
            vals.append(math.nan)
    roots, diverged = _polish_brackets(fun, cs, vals)
    if not roots:
        if diverged:
            raise ConvergenceError(
                f"root polishing for {what} failed to converge within "
                f"{_MAX_ITER} iterations")
        raise NoRootError(
            f"no {what} root on [{lo!r}, {hi!r}]; the scanned residuals "
            "are attached",
            scan=tuple(zip((float(c) for c in cs), vals)))
    return roots


def _try_hint(fun, bracket_hint):
    """Polish a caller-supplied bracket; None if it holds no usable root."""
    a, b = float(bracket_hint[0]), float(bracket_hint[1])
    if not a < b:
        raise DomainError("bracket_hint must be an increasing pair")
    try:
        fa, fb = fun(a), fun(b)
    except _SOLVER_FAILURES:
        return None
    if math.isnan(fa) or math.isnan(fb) or fa * fb > 0.0:
        return None
    try:
        c_root, info = brentq(fun, a, b, xtol=_BRENT_XTOL, rtol=_BRENT_RTOL,
                              maxiter=_MAX_ITER, full_output=True, disp=False)
        res = fun(c_root)
    except _SOLVER_FAILURES:
        return None
    if not info.converged or abs(res) > _RESIDUAL_OK:
        return None
    return float(c_root), res, (a, b), info.iterations


def find_wave_speed(shear, k, *, density=None, g=GRAVITY, bracket_hint=None,
                    nscan=64, rtol=1e-10, atol=1e-12):
    """Wave speeds selected by the free surface at wavenumber k.

    Scans the bifurcation residual in c, polishes sign changes, and returns
    the largest verified root as canonical with all of them in ``roots``. A
    ``bracket_hint`` that straddles a root skips the scan (warm starts for
    k-sweeps); a hint that does not is quietly ignored.
    """
    _require_positive(k=k, g=g)

    def fun(c):
        return bifurcation_residual(shear, c, k, density=density, g=g,
                                    rtol=rtol, atol=atol)

    if bracket_hint is not None:
        hit = _try_hint(fun, bracket_hint)
        if hit is not None:
            c_root, res, bracket, its = hit
            return DispersionResult(c=c_root, k=k, residual_at_root=res,
                                    bracket_used=bracket, iterations=its,
                                    roots=(c_root,))

    mx = shear.max_U()
    speed = math.sqrt(g * shear.h0)
    strict = density is not None or shear.kind == "table"
    lo = mx + 1e-6 * (1.0 + abs(mx)) if strict else 1e-6 * speed
    hi = mx + 10.0 * speed
    roots = _scan_for_roots(fun, lo, hi, nscan, "wave speed")
    c_root, res, bracket, its = roots[-1]
    return DispersionResult(c=c_root, k=k, residual_at_root=res,
                            bracket_used=bracket, iterations=its,
                            roots=tuple(r[0] for r in roots))


def sweep(shear, ks, *, density=None, g=GRAVITY, nscan=64,
          rtol=1e-10, atol=1e-12):
    """Canonical dispersion roots over a wavenumber grid, warm-started.

    Each solve seeds the next with a bracket around the previous root;
    when the branch moves out of the bracket the full scan quietly runs
    instead, so warm starting never changes which root is found, only how
    fast it is found.
    """
    out = []
    hint = None
    for k in ks:
        r = find_wave_speed(shear, k, density=density, g=g,
                            bracket_hint=hint, nscan=nscan,
                            rtol=rtol, atol=atol)
        out.append(r)
        pad = 0.05 * abs(r.c) + 0.01 * math.sqrt(g * shear.h0)
        hint = (r.c - pad, r.c + pad)
    return out


class DispersionCurve:
    """Tabulated canonical branch c(k), invertible from wave frequency.

    The table is built once per column by a warm-started sweep; inversion
    then needs a single short ODE shot per Brent iterate, because the trial
    speed at wavenumber k is pinned to omega/k.
    """

    def __init__(self, shear, density, g, k, c):
        self.shear = shear
        self.density = density
        self.g = g
        self.k = np.asarray(k, dtype=float)
        self.c = np.asarray(c, dtype=float)
        self.omega = self.k * self.c
        self.monotone = bool(np.all(np.diff(self.omega) > 0.0))

    @classmethod
    def build(cls, shear, k_min, k_max, *, density=None, g=GRAVITY,
              n=48, nscan=64, rtol=1e-10, atol=1e-12):
        if not (0.0 < k_min < k_max):
            raise DomainError("need 0 < k_min < k_max")
        ks = np.geomspace(k_min, k_max, n)
        results = sweep(shear, ks, density=density, g=g, nscan=nscan,
                        rtol=rtol, atol=atol)
        return cls(shear, density, g, ks, [r.c for r in results])

    def invert(self, omega, *, rtol=1e-10, atol=1e-12):
        """Wavenumber and speed on the branch at angular frequency omega.

        Raises NoRootError when omega leaves the tabulated range, when the
        tabulated branch is not monotone (no unique inverse), or when the
        bracketed residual fails to produce a verified root.
        """
        if not (math.isfinite(omega) and omega > 0.0):
            raise DomainError(f"need a positive frequency, got {omega!r}")
        if not self.monotone:
            raise NoRootError(
                "tabulated branch frequency is not monotone in k; "
                "frequency inversion is ambiguous")
        if omega > self.omega[-1] or omega < self.omega[0]:
            raise NoRootError(
                f"frequency {omega!r} outside the tabulated range "
                f"[{self.omega[0]!r}, {self.omega[-1]!r}]")
        i = int(np.searchsorted(self.omega, omega))
        if i == 0:
            return float(self.k[0]), float(self.c[0])
        a = float(self.k[i - 1])
        b = float(self.k[i])

        def S(kk):
            return bifurcation_residual(self.shear, omega / kk, kk,
                                        density=self.density, g=self.g,
                                        rtol=rtol, atol=atol)

        strict = self.density is not None or self.shear.kind == "table"
        if strict:
            mx = self.shear.max_U()
            cap = omega / (mx + 1e-6 * (1.0 + abs(mx))) if mx > 0 else b
            b = min(b, cap)
            if not a < b:
                raise NoRootError(
                    f"frequency {omega!r} has no admissible wavenumber "
                    "bracket above the current maximum")
        try:
            fa, fb = S(a), S(b)
            if fa == 0.0:
                return a, omega / a
            if fb == 0.0:
                return b, omega / b
            if fa * fb > 0.0:
                raise NoRootError(
                    f"no sign change on the bracket for omega={omega!r}")
            k_root, info = brentq(S, a, b, xtol=_BRENT_XTOL,
                                  rtol=_BRENT_RTOL, maxiter=_MAX_ITER,
                                  full_output=True, disp=False)
            res = S(float(k_root))
        except _SOLVER_FAILURES as exc:
            raise NoRootError(
                f"frequency inversion failed at omega={omega!r}: {exc}")
        if not info.converged or abs(res) > _RESIDUAL_OK:
            raise NoRootError(
                f"frequency inversion did not verify at omega={omega!r}")
        return float(k_root), omega / float(k_root)


def _quad_layer(u, c, lo, hi, kinks, epsrel):
    val, err = quad(lambda y: (u(y) - c) ** -2, lo, hi,
                    points=kinks or None, epsabs=0.0, epsrel=epsrel,
                    limit=200)
    if not math.isfinite(val):
        raise IntegrabilityError(
            "long-wave integrand failed to integrate; the current "
            "approaches the trial speed")
    return val


def burns_speed(shear, *, g=GRAVITY, epsrel=1e-12):
    """Long-wave speeds: roots above max U of integral dy/(U-c)^2 = 1/g.

    The integral decreases strictly in c above max U and blows up at
    max U itself, so exactly one root exists there; it is returned as a
    one-element list (sub-maximum branches are not computed).
    """
    _require_positive(g=g)
    mx = shear.max_U()
    h0 = shear.h0
    u = _scalar_U(shear)
    kinks = [shear.h1] if shear.kind == "piecewise" else []

    def F(c):
        return _quad_layer(u, c, 0.0, h0, kinks, epsrel) - 1.0 / g

    d = math.sqrt(g * h0)
    hi = mx + 10.0 * d
    lo = mx + d
    for _ in range(200):
        if F(lo) > 0.0:
            break
        d *= 0.5
        lo = mx + d
    else:
        raise IntegrabilityError(
            "failed to bracket the long-wave speed above max U")
    c_root = brentq(F, lo, hi, xtol=_BRENT_XTOL, rtol=_BRENT_RTOL,
                    maxiter=_MAX_ITER)
    return [float(c_root)]


def generalized_burns_speed(env, *, epsrel=1e-12):
    """Two-layer long-wave speed from the weighted long-wave condition.

    Solves integral of rho+/(U+ - c)^2 over the upper layer plus the same
    rho-/(U- - c)^2 integral over the lower layer equal to 1.

    The densities act as weights with gravity folded in (a zero-weight
    layer drops out entirely, including its admissibility constraint on c);
    with rho_plus = 0 and rho_minus = g this is the single-fluid long-wave
    condition. An infinite upper layer with positive weight makes the upper
    integral diverge, since its integrand tends to a positive constant.
    """
    if math.isinf(env.H) and env.rho_plus > 0.0:
        raise IntegrabilityError(
            "the upper long-wave integral diverges for infinite H with "
            "positive rho_plus: the far-field integrand is constant")
    layers = []
    total = 0.0
    if env.rho_minus > 0.0:
        u = _scalar_U(env.U_minus)
        kinks = [env.U_minus.h1] if env.U_minus.kind == "piecewise" else []
        layers.append((env.rho_minus, u, env.h0, kinks, env.U_minus.max_U()))
        total += env.rho_minus * env.h0
    if env.rho_plus > 0.0:
        u = _scalar_U(env.U_plus)
        kinks = [env.U_plus.h1] if env.U_plus.kind == "piecewise" else []
        span = env.H - env.h0
        layers.append((env.rho_plus, u, span, kinks, env.U_plus.max_U()))
        total += env.rho_plus * span

    mx = max(entry[4] for entry in layers)

    def F(c):
        acc = -1.0
        for w, u, span, kinks, _ in layers:
            acc += w * _quad_layer(u, c, 0.0, span, kinks, epsrel)
        return acc

    d = math.sqrt(total)
    hi = mx + 10.0 * d
    lo = mx + d
    for _ in range(200):
        if F(lo) > 0.0:
            break
        d *= 0.5
        lo = mx + d
    else:
        raise IntegrabilityError(
            "failed to bracket the two-layer long-wave speed above max U")
    c_root = brentq(F, lo, hi, xtol=_BRENT_XTOL, rtol=_BRENT_RTOL,
                    maxiter=_MAX_ITER)
    return float(c_root)


def two_fluid_dispersion(env, k, *, bracket_hint=None, nscan=64,
                         rtol=1e-10, atol=1e-12):
    """Interfacial dispersion root above the currents of both layers.

    The residual balances the buoyancy jump, surface tension, and the two
    layers' interface pressures (R+ T+ - R- T-), normalized so values stay
    O(1); the T terms are assembled from interface shots of the layer modes
    scaled to phi(h0) = k.
    """
    _require_positive(k=k)
    um = env.U_minus.U(env.h0)
    up = env.U_plus.U(0.0)
    dum, _ = env.U_minus.U_derivs(env.h0)
    dup, _ = env.U_plus.U_derivs(0.0)
    norm = (env.rho_minus + env.rho_plus) * env.g + k * k * env.sigma

    def fun(c):
        pm, dpm, pp, dpp = _tf.interface_shot(env, c, k, rtol=rtol, atol=atol)
        t_minus = (c - um) * ((c - um) * dpm + dum * pm) / k
        t_plus = (c - up) * ((c - up) * dpp + dup * pp) / k
        return ((env.rho_plus - env.rho_minus) * env.g - k * k * env.sigma
                - (env.rho_plus * t_plus - env.rho_minus * t_minus)) / norm

    if bracket_hint is not None:
        hit = _try_hint(fun, bracket_hint)
        if hit is not None:
            c_root, res, bracket, its = hit
            return DispersionResult(c=c_root, k=k, residual_at_root=res,
                                    bracket_used=bracket, iterations=its,
                                    roots=(c_root,))

    mx = max(env.U_minus.max_U(), env.U_plus.max_U())
    depth = env.h0 if math.isinf(env.H) else max(env.h0, env.H - env.h0)
    speed = math.sqrt(env.g * depth) + math.sqrt(
        env.sigma * k / (env.rho_minus + env.rho_plus))
    lo = mx + 1e-6 * (1.0 + abs(mx))
    hi = mx + 10.0 * speed
    roots = _scan_for_roots(fun, lo, hi, nscan, "interfacial wave speed")
    c_root, res, bracket, its = roots[-1]
    return DispersionResult(c=c_root, k=k, residual_at_root=res,
                            bracket_used=bracket, iterations=its,
                            roots=tuple(r[0] for r in roots))
