"""Profile constructors, evaluation, extrema, and JSON round trips."""

import math

import numpy as np
import pytest

from wavetrans import (
    DensityProfile,
    DomainError,
    Environment,
    ShearProfile,
    SideAmbiguityError,
    environment_hash,
)


def test_zero_profile_is_flat():
    sh = ShearProfile.zero(2.0)
    y = np.linspace(0.0, 2.0, 7)
    assert np.all(sh.U(y) == 0.0)
    du, d2u = sh.U_derivs(1.0)
    assert du == 0.0 and d2u == 0.0
    assert sh.max_U() == 0.0 and sh.min_U() == 0.0


def test_linear_profile_vanishes_at_surface():
    sh = ShearProfile.linear(-5.0, 2.0)
    assert sh.U(2.0) == 0.0
    assert sh.U(0.0) == 10.0
    du, d2u = sh.U_derivs(0.7)
    assert du == -5.0 and d2u == 0.0
    assert sh.max_U() == 10.0
    assert sh.min_U() == 0.0


def test_piecewise_anchored_through_surface_zero_of_lower_branch():
    # The lower branch is gamma_minus*(y - h0); the upper branch continues
    # from its value at h1 with slope gamma_plus, so U(h0) is generally
    # nonzero: U(h0) = (gamma_plus - gamma_minus)*(h0 - h1).
    sh = ShearProfile.piecewise(1.0, 3.0, 1.0, 2.0)
    assert sh.U(0.0) == -2.0
    assert sh.U(1.0) == -1.0
    assert math.isclose(sh.U(2.0), 2.0, rel_tol=1e-15)
    lo = sh.U(1.0 - 1e-12)
    hi = sh.U(1.0 + 1e-12)
    assert abs(hi - lo) < 1e-10  # continuous across the breakpoint


def test_piecewise_slope_is_two_valued_at_breakpoint():
    sh = ShearProfile.piecewise(1.0, 3.0, 1.0, 2.0)
    with pytest.raises(SideAmbiguityError):
        sh.U_derivs(1.0)
    du_lo, _ = sh.U_derivs(1.0, side=-1)
    du_hi, _ = sh.U_derivs(1.0, side=+1)
    assert du_lo == 1.0 and du_hi == 3.0
    # Away from the breakpoint the side flag is ignored.
    du, _ = sh.U_derivs(0.5, side=+1)
    assert du == 1.0


def test_piecewise_needs_interior_breakpoint():
    with pytest.raises(DomainError):
        ShearProfile.piecewise(1.0, 3.0, 2.0, 2.0)
    with pytest.raises(DomainError):
        ShearProfile.piecewise(1.0, 3.0, 0.0, 2.0)


def test_tabulated_profile_interpolates_samples():
    ys = np.linspace(0.0, 2.0, 9)
    us = np.sin(ys)
    sh = ShearProfile.tabulated(list(zip(ys, us)), 2.0)
    assert np.max(np.abs(sh.U(ys) - us)) < 1e-14
    # Natural boundary conditions cost ~3e-3 near the ends where sin has
    # curvature; the interior is far better.
    yy = np.linspace(0.0, 2.0, 101)
    assert np.max(np.abs(sh.U(yy) - np.sin(yy))) < 5e-3
    mid = (yy > 0.5) & (yy < 1.5)
    assert np.max(np.abs(sh.U(yy[mid]) - np.sin(yy[mid]))) < 5e-4
    du, _ = sh.U_derivs(1.0)
    assert abs(du - math.cos(1.0)) < 1e-2


def test_tabulated_extrema_found_between_samples():
    # U = y*(2 - y) peaks at y = 1 with value 1, between sample points.
    ys = np.linspace(0.0, 2.0, 21)
    sh = ShearProfile.tabulated([(y, y * (2.0 - y)) for y in ys], 2.0)
    assert abs(sh.max_U() - 1.0) < 1e-8
    assert abs(sh.min_U() - 0.0) < 1e-12


def test_tabulated_rejects_bad_samples():
    with pytest.raises(DomainError):
        ShearProfile.tabulated([(0.0, 1.0), (1.0, 2.0)], 2.0)  # too few
    with pytest.raises(DomainError):
        ShearProfile.tabulated(
            [(0.0, 1.0), (1.0, 2.0), (1.0, 3.0), (2.0, 4.0)], 2.0)
    with pytest.raises(DomainError):
        ShearProfile.tabulated(
            [(0.0, 1.0), (0.5, 2.0), (1.0, 3.0), (2.5, 4.0)], 2.0)


def test_domain_guard_allows_rounding_slack_only():
    sh = ShearProfile.linear(1.0, 2.0)
    sh.U(-1e-14)
    sh.U(2.0 + 1e-14)
    with pytest.raises(DomainError):
        sh.U(-0.1)
    with pytest.raises(DomainError):
        sh.U(2.1)


def test_constant_density():
    dn = DensityProfile.constant(2.5, 2.0)
    assert dn.R(1.3) == 2.5
    assert dn.R_deriv(0.7) == 0.0
    assert dn.is_constant


def test_exponential_density_decays_upward():
    dn = DensityProfile.exponential(0.1, 2.0)
    assert dn.R(0.0) == 1.0
    assert abs(dn.R(2.0) - 0.6703200460356393) < 1e-15  # exp(-0.4)
    # R' = -2 beta R everywhere.
    y = np.linspace(0.0, 2.0, 11)
    assert np.max(np.abs(dn.R_deriv(y) + 0.2 * dn.R(y))) < 1e-15
    assert not dn.is_constant


def test_density_rejects_unstable_configurations():
    with pytest.raises(DomainError):
        DensityProfile.exponential(-0.1, 2.0)
    with pytest.raises(DomainError):
        DensityProfile.tabulated(
            [(0.0, 1.0), (0.7, 1.1), (1.4, 0.9), (2.0, 0.8)], 2.0)
    with pytest.raises(DomainError):
        DensityProfile.constant(0.0, 2.0)
    with pytest.raises(DomainError):
        DensityProfile.constant(-1.0, 2.0)


def test_shear_json_round_trip_all_kinds():
    profiles = [
        ShearProfile.zero(2.0),
        ShearProfile.linear(-5.0, 2.0),
        ShearProfile.piecewise(1.0, 3.0, 1.0, 2.0),
        ShearProfile.tabulated(
            [(0.0, 0.1), (0.7, 0.4), (1.4, 0.2), (2.0, 0.0)], 2.0),
    ]
    y = np.linspace(0.0, 2.0, 33)
    for sh in profiles:
        back = ShearProfile.from_json(sh.to_json(), 2.0)
        assert back.kind == sh.kind
        assert np.max(np.abs(back.U(y) - sh.U(y))) == 0.0


def test_density_json_round_trip_all_kinds():
    profiles = [
        DensityProfile.constant(1000.0, 2.0),
        DensityProfile.exponential(0.3, 2.0, scale=2.0),
        DensityProfile.tabulated(
            [(0.0, 1.2), (0.7, 1.1), (1.4, 1.05), (2.0, 1.0)], 2.0),
    ]
    y = np.linspace(0.0, 2.0, 33)
    for dn in profiles:
        back = DensityProfile.from_json(dn.to_json(), 2.0)
        assert back.kind == dn.kind
        assert np.max(np.abs(back.R(y) - dn.R(y))) == 0.0


def test_environment_checks_depth_agreement():
    sh = ShearProfile.linear(1.0, 2.0)
    with pytest.raises(DomainError):
        Environment(shear=sh, density=None, h0=3.0)
    with pytest.raises(DomainError):
        Environment(shear=sh, density=DensityProfile.constant(1.0, 1.5),
                    h0=2.0)
    with pytest.raises(DomainError):
        Environment(shear=sh, density=None, h0=2.0, g=-9.81)


def test_environment_hash_is_stable_and_discriminating():
    env_a = Environment(shear=ShearProfile.linear(1.0, 2.0), density=None,
                        h0=2.0)
    env_b = Environment(shear=ShearProfile.linear(1.0, 2.0), density=None,
                        h0=2.0)
    env_c = Environment(shear=ShearProfile.linear(1.5, 2.0), density=None,
                        h0=2.0)
    assert environment_hash(env_a) == environment_hash(env_b)
    assert environment_hash(env_a) != environment_hash(env_c)
    back = Environment.from_json(env_a.to_json())
    assert environment_hash(back) == environment_hash(env_a)
