"""Release gate: one test per shipped guarantee, tolerances pinned.

Each test is a self-contained statement of a contract the package makes:
closed-form agreement for the solvable shear families, structural
invariants of the transfer function, limiting-case reductions, round-trip
reconstruction accuracy, and numerical hygiene. Module test files probe
edge cases; this file is the pass/fail summary of the advertised behavior.
"""

import math

import numpy as np

from wavetrans import (
    DensityProfile,
    ShearProfile,
    burns_speed,
    find_wave_speed,
    generalized_burns_speed,
    reconstruct_hydrostatic,
    reconstruct_spectral,
    solve_mode,
    stagnation_condition,
    synthesize_record,
    transfer_from_mode,
    two_fluid_dispersion,
)
from wavetrans.cli import main
from wavetrans.rayleigh import shoot
from wavetrans.twofluid import TwoFluidEnv

G = 9.81
GRID_K = np.linspace(0.2, 5.0, 5)
GRID_H0 = np.linspace(0.5, 4.0, 5)
GAMMAS = (-5.0, -1.0, 0.0, 1.0, 5.0)


def _shear(gamma, h0):
    return ShearProfile.zero(h0) if gamma == 0.0 else \
        ShearProfile.linear(gamma, h0)


def _closed_c(gamma, k, h0):
    t = math.tanh(k * h0)
    half = -gamma * t / (2.0 * k)
    return half + math.sqrt(half * half + G * t / k)


def _closed_T(y, gamma, k, h0, c):
    if gamma == 0.0:
        return G * np.cosh(k * y) / math.cosh(k * h0)
    return c * ((c - gamma * (y - h0)) * k * np.cosh(k * y)
                + gamma * np.sinh(k * y)) / math.sinh(k * h0)


_cache = {}


def _grid_transfers():
    # Modes are solved at the closed-form speed so the transfer comparison
    # isolates the boundary-value solve from the root find.
    if "grid" not in _cache:
        entries = []
        for gamma in GAMMAS:
            for h0 in GRID_H0:
                sh = _shear(gamma, h0)
                for k in GRID_K:
                    c = _closed_c(gamma, k, h0)
                    tf = transfer_from_mode(solve_mode(sh, c, k), g=G)
                    entries.append((gamma, k, h0, c, tf))
        _cache["grid"] = entries
    return _cache["grid"]


def test_criterion_01_dispersion_matches_closed_forms():
    worst = 0.0
    for gamma in GAMMAS:
        for h0 in GRID_H0:
            sh = _shear(gamma, h0)
            for k in GRID_K:
                want = _closed_c(gamma, k, h0)
                got = find_wave_speed(sh, k, g=G).c
                worst = max(worst, abs(got - want) / want)
    assert worst <= 1e-8, f"worst relative error {worst:.3e}"


def test_criterion_02_transfer_matches_closed_forms():
    worst = 0.0
    for gamma, k, h0, c, tf in _grid_transfers():
        want = _closed_T(tf.y, gamma, k, h0, c)
        err = np.max(np.abs(tf.T - want)) / np.max(np.abs(want))
        worst = max(worst, err)
    assert worst <= 1e-9, f"worst sup-norm relative error {worst:.3e}"


def test_criterion_03_surface_condition_at_every_root():
    for gamma, k, h0, c, tf in _grid_transfers():
        assert abs(tf.T[-1] - G) <= 1e-8 * G
    # Stratified columns pin the surface value to g times surface density.
    sh = ShearProfile.zero(2.0)
    for dn in (DensityProfile.constant(1025.0, 2.0),
               DensityProfile.exponential(0.3, 2.0)):
        root = find_wave_speed(sh, 1.0, density=dn, g=G)
        tf = transfer_from_mode(solve_mode(sh, root.c, 1.0, density=dn), g=G)
        want = G * dn.R(2.0)
        assert abs(tf.T[-1] - want) <= 1e-8 * abs(want)


def _piecewise_closed(gm, gp, h1, h0, c, k):
    u1 = gm * (h1 - h0)
    J = (gp - gm) / (k * (u1 - c))
    s1, c1 = math.sinh(k * h1), math.cosh(k * h1)
    u_surf = (gp - gm) * (h0 - h1)
    a_minus = k * (c - u_surf) / (math.sinh(k * h0)
                                  + J * s1 * math.sinh(k * (h0 - h1)))
    a_plus = a_minus * (1.0 + J * s1 * c1)
    b = -a_minus * J * s1 * s1
    return a_minus, a_plus, b


def test_criterion_04_piecewise_vorticity_coefficients():
    gm, gp, h1, h0, k = 1.0, 3.0, 1.0, 2.0, 1.0
    sh = ShearProfile.piecewise(gm, gp, h1, h0)
    c = find_wave_speed(sh, k, g=G).c
    a_minus, a_plus, b = _piecewise_closed(gm, gp, h1, h0, c, k)
    mode = solve_mode(sh, c, k)
    lower = mode.y <= h1
    want = np.where(lower, a_minus * np.sinh(k * mode.y),
                    a_plus * np.sinh(k * mode.y) + b * np.cosh(k * mode.y))
    scale = np.max(np.abs(want))
    assert np.max(np.abs(mode.phi - want)) <= 1e-8 * scale
    t0 = transfer_from_mode(mode, g=G).T0
    assert abs(t0 - a_minus * (c + gm * h0)) <= 1e-8 * abs(t0)
    # Equal slopes collapse the two-segment mode onto constant vorticity.
    c_pw = find_wave_speed(ShearProfile.piecewise(2.0, 2.0, 1.0, 2.0),
                           k, g=G).c
    c_lin = find_wave_speed(ShearProfile.linear(2.0, 2.0), k, g=G).c
    assert abs(c_pw - c_lin) <= 1e-10 * c_lin


def test_criterion_05_long_wave_limit_meets_burns():
    for sh in (ShearProfile.zero(2.0), ShearProfile.linear(1.0, 2.0),
               ShearProfile.linear(-1.0, 2.0)):
        c_lw = find_wave_speed(sh, 1e-4, g=G).c
        c_burns = max(burns_speed(sh, g=G))
        assert abs(c_lw - c_burns) / c_burns <= 1e-3
    still = burns_speed(ShearProfile.zero(2.0), g=G)
    assert abs(max(still) - math.sqrt(G * 2.0)) <= 1e-12 * math.sqrt(G * 2.0)


def test_criterion_06_stagnation_criterion_and_transfer_slope():
    assert stagnation_condition(-5.0, 1.0, 2.0, G) is True
    assert stagnation_condition(5.0, 1.0, 2.0, G) is False
    for gamma in (-5.0, 0.0, 5.0):
        sh = _shear(gamma, 2.0)
        c = find_wave_speed(sh, 1.0, g=G).c
        tf = transfer_from_mode(solve_mode(sh, c, 1.0), g=G)
        slopes = set(np.sign(np.diff(tf.T)).tolist()) - {0.0}
        has_sign_change = slopes == {-1.0, 1.0}
        assert has_sign_change == stagnation_condition(gamma, 1.0, 2.0, G)


def test_criterion_07_stratified_reductions():
    sh = ShearProfile.zero(2.0)
    for k in (0.5, 2.6):
        plain = find_wave_speed(sh, k, g=G).c
        dense = find_wave_speed(sh, k,
                                density=DensityProfile.constant(1025.0, 2.0),
                                g=G).c
        assert abs(dense - plain) <= 1e-9 * plain
    # Exponential density over still water has a constant-coefficient mode
    # phi = exp(beta y) sinh(mu y) with mu^2 = beta^2 + k^2 - 2 beta / c^2
    # and a closed dispersion relation to root-find directly.
    beta, k, h0 = 0.3, 1.0, 2.0
    from scipy.optimize import brentq

    def closed_disp(c):
        mu = math.sqrt(beta * beta + k * k - 2.0 * beta / (c * c))
        return (c * c * (beta * math.sinh(mu * h0)
                         + mu * math.cosh(mu * h0))
                - G * math.sinh(mu * h0))

    c_closed = brentq(closed_disp, 2.0, 5.0, xtol=1e-15, rtol=8.9e-16)
    assert abs(c_closed - 2.7048602521081784) < 1e-12
    dn = DensityProfile.exponential(beta, h0)
    root = find_wave_speed(sh, k, density=dn, g=G)
    assert abs(root.c - c_closed) <= 1e-9 * c_closed
    mode = solve_mode(sh, root.c, k, density=dn)
    mu = math.sqrt(beta * beta + k * k - 2.0 * beta / (root.c * root.c))
    want = np.exp(beta * mode.y) * np.sinh(mu * mode.y)
    want *= mode.phi[-1] / want[-1]
    assert np.max(np.abs(mode.phi - want)) <= 1e-9 * np.max(np.abs(want))


def test_criterion_08_two_fluid_reductions():
    # A vanishing upper density recovers the free-surface wave. Cases keep
    # the wave supercritical relative to the lower current, since the
    # interface solver refuses speeds inside either layer's velocity range.
    panel = [(0.0, (0.5, 1.0, 2.6)), (1.0, (0.5, 1.0, 2.6)),
             (5.0, (0.5, 1.0, 2.6)), (-1.0, (0.5, 1.0))]
    h0 = 2.0
    for gamma, ks in panel:
        lower = _shear(gamma, h0)
        env = TwoFluidEnv(U_minus=lower, U_plus=ShearProfile.zero(h0),
                          rho_minus=1000.0, rho_plus=1e-8 * 1000.0,
                          h0=h0, H=2.0 * h0, sigma=0.0, g=G)
        for k in ks:
            want = _closed_c(gamma, k, h0)
            got = two_fluid_dispersion(env, k).c
            assert abs(got - want) <= 1e-6 * want, (gamma, k)
    # Still two-layer column against the textbook closed form.
    rm, rp, H = 1000.0, 600.0, 3.0
    env = TwoFluidEnv(U_minus=ShearProfile.zero(h0),
                      U_plus=ShearProfile.zero(H - h0),
                      rho_minus=rm, rho_plus=rp, h0=h0, H=H, sigma=0.07, g=G)
    k = 1.4
    want = math.sqrt(((rm - rp) * G + 0.07 * k * k)
                     / (k * (rm / math.tanh(k * h0)
                             + rp / math.tanh(k * (H - h0)))))
    got = two_fluid_dispersion(env, k).c
    assert abs(got - want) <= 1e-8 * want
    # Long-wave condition with a weightless upper layer is single-fluid.
    sh = ShearProfile.linear(1.0, h0)
    env0 = TwoFluidEnv(U_minus=sh, U_plus=ShearProfile.zero(h0),
                       rho_minus=G, rho_plus=0.0, h0=h0, H=2.0 * h0, g=G)
    got = generalized_burns_speed(env0)
    want = burns_speed(sh, g=G)[0]
    assert abs(got - want) <= 1e-10 * want


def test_criterion_09_reconstruction_round_trip():
    modes = [(0.5, 1.0, 0.3), (1.2, 0.4, 1.1), (2.0, 0.15, -0.7)]
    for sh in (ShearProfile.zero(2.0), ShearProfile.linear(-5.0, 2.0),
               ShearProfile.piecewise(1.0, 3.0, 1.0, 2.0)):
        rec = synthesize_record(modes, sh, 120.0, 0.05)
        res = reconstruct_spectral(rec, sh)
        n, dt = rec.n, rec.dt
        hat = np.fft.rfft(res.eta)
        for mode in rec.meta["modes"]:
            m = int(round(mode["omega"] * n * dt / (2.0 * math.pi)))
            amp = 2.0 * abs(hat[m]) / n
            phase = -np.angle(hat[m])
            assert abs(amp - mode["amplitude"]) <= 1e-6 * mode["amplitude"]
            dphi = (phase - mode["phase"] + math.pi) % (2.0 * math.pi) \
                - math.pi
            assert abs(dphi) <= 1e-6
    # Hydrostatic readout: equal to spectral in the long-wave regime, low
    # by 1/cosh(k h0) beyond it.
    sh = ShearProfile.zero(2.0)
    rec = synthesize_record([(0.02, 1.0, 0.4)], sh, 420.0, 0.5)
    assert rec.meta["modes"][0]["k"] * 2.0 <= 0.05
    spectral = reconstruct_spectral(rec, sh)
    hydro = reconstruct_hydrostatic(rec)
    scale = np.max(np.abs(spectral.eta))
    assert np.max(np.abs(spectral.eta - hydro.eta)) <= 5e-3 * scale
    omega = find_wave_speed(sh, 1.0, g=G).c
    n, m = 1024, 50
    dt = 2.0 * math.pi * m / (omega * n)
    rec = synthesize_record([(1.0, 0.8, 0.0)], sh, (n - 0.5) * dt, dt)
    spectral = reconstruct_spectral(rec, sh)
    hydro = reconstruct_hydrostatic(rec)
    amp_s = 2.0 * abs(np.fft.rfft(spectral.eta)[m]) / n
    amp_h = 2.0 * abs(np.fft.rfft(hydro.eta)[m]) / n
    assert abs(amp_h / amp_s - 0.2658) <= 1e-4


def test_criterion_10_numerical_hygiene(tmp_path):
    sh = ShearProfile.linear(-1.0, 2.0)
    base = find_wave_speed(sh, 1.0, g=G, rtol=1e-10, atol=1e-12).c
    halved = find_wave_speed(sh, 1.0, g=G, rtol=5e-11, atol=5e-13).c
    assert abs(base - halved) <= 10.0 * 1e-10 * base
    dn = DensityProfile.exponential(0.3, 2.0)
    sb = find_wave_speed(ShearProfile.zero(2.0), 1.0, density=dn, g=G,
                         rtol=1e-10, atol=1e-12).c
    sv = find_wave_speed(ShearProfile.zero(2.0), 1.0, density=dn, g=G,
                         rtol=5e-11, atol=5e-13).c
    assert abs(sb - sv) <= 10.0 * 1e-10 * sb
    # The shot is linear in its seed slope, so scaled shots must agree.
    ref = shoot(sh, 3.0, 1.0, seed_slope=1.0)[0]
    for seed in (1e-3, 7.0, 1e3):
        scaled = shoot(sh, 3.0, 1.0, seed_slope=seed)[0] / seed
        assert abs(scaled - ref) <= 1e-12 * abs(ref)
    argv = ["dispersion", "--shear", "linear", "--gamma", "-1", "--h0", "2",
            "--k-min", "0.3", "--k-max", "3.0", "--count", "6", "--no-plot"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert (a / "dispersion.csv").read_bytes() == \
        (b / "dispersion.csv").read_bytes()
