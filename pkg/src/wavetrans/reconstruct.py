"""Bed-pressure record inversion and the matching forward synthesizer.

A stationary gauge at position x sees each free wave mode as a cosine in
time, theta = k x - omega t + psi with omega = k c(k). Per temporal
frequency, elevation and per-density bed pressure are related by the bed
transfer value T_k(0): the spectral reconstruction divides each retained
FFT bin by T_k(0) after solving omega = k c(k) for k on the single branch
above the current maximum. The hydrostatic route is the shear-independent
shortcut eta = p / g, exact only in the long-wave limit.

Division by T_k(0) amplifies like cosh(k h0), so the inversion is
ill-conditioned at depth: bins whose amplification g/T_k(0) exceeds a cap
are dropped (and reported), which is the module's only regularization.

The synthesizer exists to close the loop: it builds the exact bed-pressure
trace of a set of free modes, snapping each frequency to an FFT bin of the
record (and re-solving k for the snapped frequency) so that round trips
through the spectral path are exact to solver tolerance rather than
window-leakage limited.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .errors import (ConsistencyError, ConvergenceError, DomainError,
                     FormatError, NoRootError)
from .profiles import GRAVITY
from .dispersion import DispersionCurve, find_wave_speed
from .transfer import bed_transfer

_META_KEYS = ("rho_ref", "h0", "g", "pressure_kind")
_PRESSURE_KINDS = ("absolute", "dynamic")


@dataclass(frozen=True, eq=False)
class GaugeRecord:
    """Uniformly sampled pressure trace from a single bottom gauge.

    ``meta`` must carry rho_ref (kg/m^3), h0 (m), g (m/s^2) and
    pressure_kind ("absolute" or "dynamic"); extra keys pass through
    untouched. Dynamic pressure means the deviation from the time-mean
    hydrostatic load, in Pa unless rho_ref is 1.
    """

    t: np.ndarray
    p: np.ndarray
    meta: dict

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        p = np.asarray(self.p, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "p", p)
        if t.ndim != 1 or p.shape != t.shape:
            raise FormatError("t and p must be 1-d arrays of equal length")
        if len(t) < 16:
            raise FormatError("record too short: need at least 16 samples")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(p))):
            raise FormatError("record contains non-finite values")
        dt = (t[-1] - t[0]) / (len(t) - 1)
        if dt <= 0.0:
            raise FormatError("time must be strictly increasing")
        if np.max(np.abs(np.diff(t) - dt)) > 1e-9 * dt:
            raise FormatError("non-uniform sampling interval")
        for key in _META_KEYS:
            if key not in self.meta:
                raise FormatError(f"record meta is missing {key!r}")
        if self.meta["pressure_kind"] not in _PRESSURE_KINDS:
            raise FormatError(
                f"pressure_kind must be one of {_PRESSURE_KINDS}")
        for key in ("rho_ref", "h0", "g"):
            v = float(self.meta[key])
            if not (v > 0.0 and math.isfinite(v)):
                raise FormatError(f"meta {key!r} must be finite and positive")

    @property
    def dt(self):
        return float((self.t[-1] - self.t[0]) / (len(self.t) - 1))

    @property
    def n(self):
        return len(self.t)


@dataclass(frozen=True)
class ModeGain:
    """One spectral bin's inversion bookkeeping entry."""

    omega: float
    k: float
    gain: float
    kept: bool


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    """Elevation trace plus the per-mode audit trail behind it."""

    t: np.ndarray
    eta: np.ndarray
    per_mode: tuple
    method: str
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ReconstructOptions:
    """Knobs of the spectral inversion.

    ``max_amplification`` caps the dimensionless blow-up g/T_k(0) a bin may
    receive; ``k_max`` bounds the scanned wavenumber branch (default
    10/h0); ``spectral_floor`` declares bins below this fraction of the
    peak spectral amplitude to be roundoff, skipping their (pointless and
    expensive) dispersion inversion.
    """

    max_amplification: float = 100.0
    k_min: float | None = None
    k_max: float | None = None
    curve_n: int = 48
    nscan: int = 64
    spectral_floor: float = 1e-12
    rtol: float = 1e-10
    atol: float = 1e-12


def preprocess(record):
    """Normalize a record to per-density dynamic pressure (m^2/s^2).

    Absolute records lose their mean (the P_atm plus hydrostatic load
    estimate, exact for zero-mean waves over whole periods) and a linear
    trend, then are divided by rho_ref; dynamic records are only divided.
    The result is idempotent under further preprocessing.
    """
    rho = float(record.meta["rho_ref"])
    p = record.p
    if record.meta["pressure_kind"] == "absolute":
        p = p - np.mean(p)
        coef = np.polynomial.polynomial.polyfit(record.t, p, 1)
        p = p - (coef[0] + coef[1] * record.t)
    meta = dict(record.meta)
    meta["rho_ref"] = 1.0
    meta["pressure_kind"] = "dynamic"
    return GaugeRecord(t=record.t, p=p / rho, meta=meta)


def reconstruct_hydrostatic(record):
    """eta = p/g, the shear-independent long-wave approximation."""
    rec = preprocess(record)
    g = float(rec.meta["g"])
    return ReconstructionResult(
        t=rec.t, eta=rec.p / g, per_mode=(), method="hydrostatic",
        meta={"g": g, "h0": float(rec.meta["h0"])})


def _check_column(record, shear):
    h0 = float(record.meta["h0"])
    if abs(shear.h0 - h0) > 1e-9 * (1.0 + h0):
        raise ConsistencyError(
            f"record was taken in depth {h0} but the profile declares "
            f"h0={shear.h0}")


def reconstruct_spectral(record, shear, density=None,
                         options=ReconstructOptions()):
    """Invert a bed record to elevation through per-bin transfer gains.

    Each retained FFT bin's frequency is mapped to its wavenumber on the
    monotone branch omega = k c(k), then divided by the bed transfer value
    of that mode. Bins whose frequency leaves the scanned branch, or whose
    amplification would exceed the cap, contribute zero and are flagged
    kept=false in per_mode. The DC bin is always zero after preprocessing.
    """
    rec = preprocess(record)
    _check_column(rec, shear)
    g = float(rec.meta["g"])
    n = rec.n
    dt = rec.dt

    k_min = options.k_min if options.k_min is not None else 1e-3 / shear.h0
    k_max = options.k_max if options.k_max is not None else 10.0 / shear.h0
    if not 0.0 < k_min < k_max:
        raise DomainError("need 0 < k_min < k_max")
    curve = DispersionCurve.build(
        shear, k_min, k_max, density=density, g=g, n=options.curve_n,
        nscan=options.nscan, rtol=options.rtol, atol=options.atol)

    p_hat = np.fft.rfft(rec.p)
    amp = np.abs(p_hat)
    floor = options.spectral_floor * (np.max(amp[1:]) if n > 1 else 0.0)

    eta_hat = np.zeros_like(p_hat)
    per_mode = []
    for m in range(1, len(p_hat)):
        if amp[m] <= floor:
            continue
        omega = 2.0 * math.pi * m / (n * dt)
        try:
            k_m, c_m = curve.invert(omega, rtol=options.rtol,
                                    atol=options.atol)
        except NoRootError:
            per_mode.append(ModeGain(omega, math.nan, math.nan, False))
            continue
        t0 = bed_transfer(shear, c_m, k_m, density=density,
                          rtol=options.rtol, atol=options.atol)
        gain = 1.0 / t0
        if abs(gain) * g > options.max_amplification:
            per_mode.append(ModeGain(omega, k_m, gain, False))
            continue
        eta_hat[m] = p_hat[m] * gain
        per_mode.append(ModeGain(omega, k_m, gain, True))

    eta = np.fft.irfft(eta_hat, n=n)
    return ReconstructionResult(
        t=rec.t, eta=eta, per_mode=tuple(per_mode), method="spectral",
        meta={"g": g, "h0": float(rec.meta["h0"]), "n_fft": n,
              "k_range": (k_min, k_max),
              "max_amplification": options.max_amplification,
              "spectral_floor": options.spectral_floor})


def _solve_k_near(shear, density, g, omega, k_guess, c_guess, *,
                  nscan, rtol, atol):
    """Solve omega = k c(k) for k near a known (k_guess, c_guess)."""
    pad = 0.05 * abs(c_guess) + 0.01 * math.sqrt(g * shear.h0)
    hint = (c_guess - pad, c_guess + pad)

    def fun(k):
        r = find_wave_speed(shear, k, density=density, g=g,
                            bracket_hint=hint, nscan=nscan,
                            rtol=rtol, atol=atol)
        return k * r.c - omega

    rad = 1e-3
    for _ in range(40):
        lo = max(k_guess * (1.0 - rad), k_guess * 1e-6)
        hi = k_guess * (1.0 + rad)
        flo, fhi = fun(lo), fun(hi)
        if flo == 0.0:
            return lo
        if fhi == 0.0:
            return hi
        if flo < 0.0 < fhi:
            return brentq(fun, lo, hi, xtol=1e-13, rtol=1e-14, maxiter=200)
        if rad > 0.9:
            break
        rad *= 2.0
    raise ConvergenceError(
        f"could not bracket the wavenumber of omega={omega} near "
        f"k={k_guess}")


def synthesize_record(modes, shear, duration, dt, *, density=None,
                      x_gauge=0.0, rho_ref=1.0, g=GRAVITY, nscan=64,
                      rtol=1e-10, atol=1e-12):
    """Bed pressure trace of a sum of free modes at a stationary gauge.

    ``modes`` is a list of (k, amplitude_m, phase_rad). Each mode's
    frequency omega = k c(k) is snapped to the nearest FFT bin of the
    record (the record is lengthened so every mode fits at least one full
    period), and k is re-solved for the snapped frequency, so every
    synthesized mode is periodic over the record and still sits exactly on
    the dispersion branch. The exact modes used are listed in meta.
    """
    if not (dt > 0.0 and math.isfinite(dt)):
        raise DomainError("dt must be finite and positive")
    if not (duration > 0.0 and math.isfinite(duration)):
        raise DomainError("duration must be finite and positive")
    n = max(int(math.ceil(duration / dt)), 16)

    solved = []
    for k, a, psi in modes:
        if not (k > 0.0 and math.isfinite(k)):
            raise DomainError("mode wavenumbers must be finite and positive")
        if a < 0.0:
            raise DomainError("mode amplitudes must be nonnegative")
        c = find_wave_speed(shear, k, density=density, g=g, nscan=nscan,
                            rtol=rtol, atol=atol).c
        solved.append((k, float(a), float(psi), c, k * c))

    # Lengthen the record until every mode completes at least one period.
    for _, _, _, _, omega in solved:
        if omega * dt >= math.pi:
            raise DomainError(
                f"dt={dt} undersamples a mode of frequency {omega} rad/s")
        n = max(n, int(math.ceil(2.0 * math.pi / (omega * dt))))

    t = np.arange(n) * dt
    p = np.zeros(n)
    used = []
    bins = set()
    for k, a, psi, c, omega in solved:
        m = int(round(omega * n * dt / (2.0 * math.pi)))
        m = min(max(m, 1), (n - 1) // 2)
        if m in bins:
            raise DomainError(
                "two modes snapped to the same frequency bin; lengthen "
                "the record or separate the wavenumbers")
        bins.add(m)
        omega_hat = 2.0 * math.pi * m / (n * dt)
        k_hat = _solve_k_near(shear, density, g, omega_hat, k, c,
                              nscan=nscan, rtol=rtol, atol=atol)
        c_hat = omega_hat / k_hat
        t0 = bed_transfer(shear, c_hat, k_hat, density=density,
                          rtol=rtol, atol=atol)
        p += a * t0 * np.cos(k_hat * x_gauge - omega_hat * t + psi)
        used.append({"k": k_hat, "omega": omega_hat, "c": c_hat,
                     "amplitude": a, "phase": psi, "T0": t0})

    meta = {"rho_ref": float(rho_ref), "h0": shear.h0, "g": float(g),
            "pressure_kind": "dynamic", "x_gauge": float(x_gauge),
            "modes": used}
    return GaugeRecord(t=t, p=rho_ref * p, meta=meta)


def read_gauge_csv(path):
    """Load a `t,p` CSV and its `<stem>.meta.json` sidecar."""
    path = Path(path)
    side = path.with_name(path.stem + ".meta.json")
    if not side.exists():
        raise FormatError(f"missing metadata sidecar {side}")
    try:
        meta = json.loads(side.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"unreadable metadata sidecar {side}: {exc}")
    lines = path.read_text().splitlines()
    if not lines or [s.strip() for s in lines[0].split(",")] != ["t", "p"]:
        raise FormatError(f"{path} must start with a `t,p` header")
    ts, ps = [], []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise FormatError(f"{path}:{i}: expected two columns")
        try:
            ts.append(float(parts[0]))
            ps.append(float(parts[1]))
        except ValueError:
            raise FormatError(f"{path}:{i}: non-numeric row")
    return GaugeRecord(t=np.array(ts), p=np.array(ps), meta=meta)


def write_gauge_csv(record, path):
    """Write a record as a `t,p` CSV with its metadata sidecar."""
    path = Path(path)
    rows = ["t,p"]
    rows.extend(f"{ti!r},{pi!r}"
                for ti, pi in zip(record.t.tolist(), record.p.tolist()))
    path.write_text("\n".join(rows) + "\n")
    side = path.with_name(path.stem + ".meta.json")
    meta = {k: record.meta[k] for k in _META_KEYS}
    side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return side
