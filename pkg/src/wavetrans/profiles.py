"""Background shear-current and density profiles.

All profiles live on the undisturbed column ``0 <= y <= h0`` with ``y = 0``
the flat bed and ``y = h0`` the undisturbed free surface (or, for a lower
fluid layer, the undisturbed interface). Units are SI throughout: velocities
in m/s, the vorticity parameter ``gamma`` in 1/s, densities in kg/m^3.

Shear currents ``U(y)`` come in four flavours:

``zero``
    Still water, ``U == 0``.
``linear``
    Constant vorticity, ``U(y) = gamma * (y - h0)`` (zero at the surface).
``piecewise``
    Two constant-vorticity slabs meeting at ``0 < h1 < h0`` with slopes
    ``gamma_minus`` below and ``gamma_plus`` above; continuous, with a
    vorticity jump at ``h1``.
``table``
    Natural cubic spline through measured samples. The interior mode
    equation needs U'', so at least four samples are required and the
    spline is C^2 by construction.

Densities ``R(y)`` are ``constant``, ``exponential`` (``scale *
exp(-2*beta*y)``), or ``table`` (non-increasing samples, again a natural
cubic spline). Increasing density with height is rejected: such columns are
statically unstable and outside the modelled regime.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, FormatError, SideAmbiguityError

GRAVITY = 9.81
"""Default gravitational acceleration, m/s^2. Solvers take g explicitly."""

_SHEAR_KINDS = ("zero", "linear", "piecewise", "table")
_DENSITY_KINDS = ("constant", "exponential", "table")


def _check_domain(y, h0):
    """Validate 0 <= y <= h0 (with float-rounding slack) and clip."""
    arr = np.asarray(y, dtype=float)
    slack = 1e-12 * (1.0 + h0)
    if np.any(arr < -slack) or np.any(arr > h0 + slack):
        bad = arr[(arr < -slack) | (arr > h0 + slack)]
        raise DomainError(
            f"y={np.atleast_1d(bad)[0]!r} outside the column [0, {h0}]")
    return np.clip(arr, 0.0, h0), arr.ndim == 0


class _CubicScalar:
    """Scalar-fast piecewise-cubic evaluation (searchsorted plus Horner).

    The ODE right-hand sides evaluate splines one float at a time, thousands
    of times per shot; going through CubicSpline.__call__ there costs more
    than the rest of the step arithmetic.
    """

    __slots__ = ("x", "a0", "a1", "a2", "a3", "imax")

    def __init__(self, spl):
        self.x = spl.x
        self.a3 = spl.c[0].tolist()
        self.a2 = spl.c[1].tolist()
        self.a1 = spl.c[2].tolist()
        self.a0 = spl.c[3].tolist()
        self.imax = len(spl.x) - 2

    def eval(self, y, der=0):
        i = int(np.searchsorted(self.x, y, side="right")) - 1
        if i < 0:
            i = 0
        elif i > self.imax:
            i = self.imax
        d = y - self.x[i]
        if der == 0:
            return self.a0[i] + d * (self.a1[i]
                                     + d * (self.a2[i] + d * self.a3[i]))
        if der == 1:
            return self.a1[i] + d * (2.0 * self.a2[i] + 3.0 * d * self.a3[i])
        return 2.0 * self.a2[i] + 6.0 * d * self.a3[i]


def _spline_samples(samples, h0, what):
    pts = tuple((float(a), float(b)) for a, b in samples)
    if len(pts) < 4:
        raise DomainError(f"{what} table needs at least 4 samples")
    ys = np.array([p[0] for p in pts])
    if np.any(np.diff(ys) <= 0):
        raise DomainError(f"{what} table y values must be strictly increasing")
    tol = 1e-9 * (1.0 + h0)
    if abs(ys[0]) > tol or abs(ys[-1] - h0) > tol:
        raise DomainError(
            f"{what} table must cover [0, {h0}] (got [{ys[0]}, {ys[-1]}])")
    return pts


@dataclass(frozen=True)
class ShearProfile:
    """Background horizontal current U(y) on the column [0, h0]."""

    kind: str
    h0: float
    gamma: float = 0.0
    gamma_minus: float = 0.0
    gamma_plus: float = 0.0
    h1: float = math.nan
    samples: tuple = ()

    def __post_init__(self):
        if self.kind not in _SHEAR_KINDS:
            raise DomainError(f"unknown shear kind {self.kind!r}")
        if not (self.h0 > 0.0 and math.isfinite(self.h0)):
            raise DomainError("h0 must be finite and positive")
        if self.kind == "piecewise" and not (0.0 < self.h1 < self.h0):
            raise DomainError("piecewise breakpoint must satisfy 0 < h1 < h0")
        if self.kind == "table":
            object.__setattr__(
                self, "samples",
                _spline_samples(self.samples, self.h0, "shear"))

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, h0):
        """Still water."""
        return cls(kind="zero", h0=float(h0))

    @classmethod
    def linear(cls, gamma, h0):
        """Constant vorticity: U(y) = gamma * (y - h0)."""
        return cls(kind="linear", h0=float(h0), gamma=float(gamma))

    @classmethod
    def piecewise(cls, gamma_minus, gamma_plus, h1, h0):
        """Two constant-vorticity slabs meeting at h1 (continuous U)."""
        return cls(kind="piecewise", h0=float(h0),
                   gamma_minus=float(gamma_minus),
                   gamma_plus=float(gamma_plus), h1=float(h1))

    @classmethod
    def tabulated(cls, samples, h0):
        """Natural cubic spline through (y, U) samples covering [0, h0]."""
        return cls(kind="table", h0=float(h0), samples=tuple(samples))

    # -- evaluation --------------------------------------------------------

    @cached_property
    def _spline(self):
        from scipy.interpolate import CubicSpline
        ys = [p[0] for p in self.samples]
        us = [p[1] for p in self.samples]
        return CubicSpline(ys, us, bc_type="natural")

    @cached_property
    def _fast(self):
        return _CubicScalar(self._spline)

    @cached_property
    def _u_interface(self):
        """U at the piecewise breakpoint."""
        return self.gamma_minus * (self.h1 - self.h0)

    def U(self, y):
        """Current speed at height y (scalar or array)."""
        yy, scalar = _check_domain(y, self.h0)
        if self.kind == "zero":
            out = np.zeros_like(yy)
        elif self.kind == "linear":
            out = self.gamma * (yy - self.h0)
        elif self.kind == "piecewise":
            below = self.gamma_minus * (yy - self.h0)
            above = self._u_interface + self.gamma_plus * (yy - self.h1)
            out = np.where(yy <= self.h1, below, above)
        else:
            out = self._spline(yy)
        return float(out) if scalar else out

    def U_derivs(self, y, side=None):
        """(U', U'') at height y.

        ``side`` (-1 below, +1 above) disambiguates the one-sided slope of a
        piecewise profile exactly at its breakpoint; elsewhere it is ignored.
        The vorticity jump of a piecewise profile is a point mass at ``h1``
        and is applied by the mode solver, never returned here, so U'' is 0
        for all the analytic kinds.
        """
        yy, scalar = _check_domain(y, self.h0)
        if self.kind == "zero":
            du = np.zeros_like(yy)
            d2u = np.zeros_like(yy)
        elif self.kind == "linear":
            du = np.full_like(yy, self.gamma)
            d2u = np.zeros_like(yy)
        elif self.kind == "piecewise":
            at_break = yy == self.h1
            if np.any(at_break) and side is None:
                raise SideAmbiguityError(
                    f"U' is two-valued at the breakpoint y={self.h1}; "
                    "pass side=-1 (below) or side=+1 (above)")
            if side is not None and np.any(at_break):
                lo = yy < self.h1 if side > 0 else yy <= self.h1
            else:
                lo = yy <= self.h1
            du = np.where(lo, self.gamma_minus, self.gamma_plus)
            d2u = np.zeros_like(yy)
        else:
            du = self._spline(yy, 1)
            d2u = self._spline(yy, 2)
        if scalar:
            return float(du), float(d2u)
        return du, d2u

    # -- extrema -----------------------------------------------------------

    def _breakpoint_values(self):
        if self.kind == "zero":
            return [0.0]
        if self.kind == "linear":
            return [self.U(0.0), 0.0]
        if self.kind == "piecewise":
            return [self.U(0.0), self._u_interface, self.U(self.h0)]
        return None

    def _extreme(self, sign):
        vals = self._breakpoint_values()
        if vals is not None:
            return max(v * sign for v in vals) * sign
        # Tabulated: dense scan then golden-section refinement.
        ys = np.linspace(0.0, self.h0, 2049)
        us = sign * self._spline(ys)
        i = int(np.argmax(us))
        a = ys[max(i - 1, 0)]
        b = ys[min(i + 1, len(ys) - 1)]
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc = sign * float(self._spline(c))
        fd = sign * float(self._spline(d))
        for _ in range(80):
            if fc > fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = sign * float(self._spline(c))
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = sign * float(self._spline(d))
        best = max(us[i], fc, fd)
        return sign * best

    def max_U(self):
        """Largest current speed on the column (exact for analytic kinds)."""
        return self._extreme(1.0)

    def min_U(self):
        """Smallest current speed on the column."""
        return self._extreme(-1.0)

    # -- serialization -----------------------------------------------------

    def to_json(self):
        d = {"kind": self.kind}
        if self.kind == "linear":
            d["gamma"] = self.gamma
        elif self.kind == "piecewise":
            d.update(gamma_minus=self.gamma_minus, gamma_plus=self.gamma_plus,
                     h1=self.h1)
        elif self.kind == "table":
            d["samples"] = [list(p) for p in self.samples]
        return d

    @classmethod
    def from_json(cls, d, h0):
        try:
            kind = d["kind"]
        except (TypeError, KeyError):
            raise FormatError("shear entry must be an object with a 'kind'")
        if kind == "zero":
            return cls.zero(h0)
        if kind == "linear":
            return cls.linear(d["gamma"], h0)
        if kind == "piecewise":
            return cls.piecewise(d["gamma_minus"], d["gamma_plus"],
                                 d["h1"], h0)
        if kind == "table":
            return cls.tabulated(d["samples"], h0)
        raise FormatError(f"unknown shear kind {kind!r}")


@dataclass(frozen=True)
class DensityProfile:
    """Background density R(y) on the column [0, h0], non-increasing in y."""

    kind: str
    h0: float
    value: float = 1.0
    beta: float = 0.0
    scale: float = 1.0
    samples: tuple = ()

    def __post_init__(self):
        if self.kind not in _DENSITY_KINDS:
            raise DomainError(f"unknown density kind {self.kind!r}")
        if not (self.h0 > 0.0 and math.isfinite(self.h0)):
            raise DomainError("h0 must be finite and positive")
        if self.kind == "constant" and not self.value > 0.0:
            raise DomainError("constant density must be positive")
        if self.kind == "exponential":
            if self.beta < 0.0:
                raise DomainError(
                    "exponential density with beta < 0 increases with height")
            if not self.scale > 0.0:
                raise DomainError("density scale must be positive")
        if self.kind == "table":
            pts = _spline_samples(self.samples, self.h0, "density")
            rs = [p[1] for p in pts]
            if min(rs) <= 0.0:
                raise DomainError("density samples must be positive")
            for lo, hi in zip(rs, rs[1:]):
                if hi > lo * (1.0 + 1e-12):
                    raise DomainError(
                        "density increases with height between samples; "
                        "statically unstable columns are not supported")
            object.__setattr__(self, "samples", pts)

    @classmethod
    def constant(cls, value, h0):
        return cls(kind="constant", h0=float(h0), value=float(value))

    @classmethod
    def exponential(cls, beta, h0, scale=1.0):
        """R(y) = scale * exp(-2*beta*y)."""
        return cls(kind="exponential", h0=float(h0), beta=float(beta),
                   scale=float(scale))

    @classmethod
    def tabulated(cls, samples, h0):
        return cls(kind="table", h0=float(h0), samples=tuple(samples))

    @cached_property
    def _spline(self):
        from scipy.interpolate import CubicSpline
        ys = [p[0] for p in self.samples]
        rs = [p[1] for p in self.samples]
        return CubicSpline(ys, rs, bc_type="natural")

    @cached_property
    def _fast(self):
        return _CubicScalar(self._spline)

    def R(self, y):
        """Density at height y."""
        yy, scalar = _check_domain(y, self.h0)
        if self.kind == "constant":
            out = np.full_like(yy, self.value)
        elif self.kind == "exponential":
            out = self.scale * np.exp(-2.0 * self.beta * yy)
        else:
            out = self._spline(yy)
        return float(out) if scalar else out

    def R_deriv(self, y):
        """dR/dy at height y."""
        yy, scalar = _check_domain(y, self.h0)
        if self.kind == "constant":
            out = np.zeros_like(yy)
        elif self.kind == "exponential":
            out = -2.0 * self.beta * self.scale * np.exp(-2.0 * self.beta * yy)
        else:
            out = self._spline(yy, 1)
        return float(out) if scalar else out

    @property
    def is_constant(self):
        return self.kind == "constant" or (
            self.kind == "exponential" and self.beta == 0.0)

    def to_json(self):
        d = {"kind": self.kind}
        if self.kind == "constant":
            d["value"] = self.value
        elif self.kind == "exponential":
            d.update(beta=self.beta, scale=self.scale)
        else:
            d["samples"] = [list(p) for p in self.samples]
        return d

    @classmethod
    def from_json(cls, d, h0):
        try:
            kind = d["kind"]
        except (TypeError, KeyError):
            raise FormatError("density entry must be an object with a 'kind'")
        if kind == "constant":
            return cls.constant(d["value"], h0)
        if kind == "exponential":
            return cls.exponential(d["beta"], h0, d.get("scale", 1.0))
        if kind == "table":
            return cls.tabulated(d["samples"], h0)
        raise FormatError(f"unknown density kind {kind!r}")


@dataclass(frozen=True)
class Environment:
    """A water column: shear profile, optional stratification, depth, gravity."""

    shear: ShearProfile
    density: DensityProfile | None
    h0: float
    g: float = GRAVITY

    def __post_init__(self):
        if not (self.g > 0.0 and math.isfinite(self.g)):
            raise DomainError("g must be finite and positive")
        if abs(self.shear.h0 - self.h0) > 1e-12 * (1.0 + self.h0):
            raise DomainError("shear profile depth disagrees with h0")
        if self.density is not None and abs(
                self.density.h0 - self.h0) > 1e-12 * (1.0 + self.h0):
            raise DomainError("density profile depth disagrees with h0")

    def to_json(self):
        return {
            "shear": self.shear.to_json(),
            "density": None if self.density is None
            else self.density.to_json(),
            "h0": self.h0,
            "g": self.g,
        }

    @classmethod
    def from_json(cls, d):
        try:
            h0 = float(d["h0"])
        except (TypeError, KeyError):
            raise FormatError("environment must carry a numeric 'h0'")
        g = float(d.get("g", GRAVITY))
        shear = ShearProfile.from_json(d.get("shear", {"kind": "zero"}), h0)
        dens = d.get("density")
        density = None if dens is None else DensityProfile.from_json(dens, h0)
        return cls(shear=shear, density=density, h0=h0, g=g)


def environment_hash(env):
    """Stable digest of an environment for output metadata."""
    blob = json.dumps(env.to_json(), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
