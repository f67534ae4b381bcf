import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crosswind.errors import ConfigError, DegeneratePathError, ParameterError
from crosswind.path import PathParams, PathPoint, left_mask, sample_path
from crosswind.traction import (
    AeroParams,
    SweepAxis,
    SweepSpec,
    analysis_path,
    average_force,
    delta_force,
    delta_force_estimate,
    derive_constants,
    elevation_factor,
    half_forces,
    optimal_location,
    point_force,
    sweep,
)
from crosswind.wind import ShearParams

from conftest import THETA_STAR


def test_derived_constants(const):
    # oracle: oracles/quasistatic.py
    assert const.a_line == pytest.approx(0.27, abs=1e-12)
    assert const.c_d_eq == pytest.approx(0.143, abs=1e-12)
    assert const.e_eq == pytest.approx(5.594405594, abs=1e-9)
    assert const.c_big == pytest.approx(144.688980969, abs=1e-8)


def test_no_line_drag_gives_wing_efficiency():
    c = derive_constants(AeroParams(c_d_line=0.0))
    assert c.c_d_eq == 0.134
    assert c.e_eq == pytest.approx(0.8 / 0.134)


@pytest.mark.parametrize("kwargs", [dict(area=0), dict(c_l=0.1, c_d=0.2), dict(c_d_line=-1)])
def test_aero_domain(kwargs):
    with pytest.raises(ParameterError):
        AeroParams(**kwargs)


def test_point_force_at_optimum(const, shear):
    # oracle: oracles/quasistatic.py, F* = 3871.290534
    assert point_force(const, shear, 0.0, THETA_STAR, 0.0) == pytest.approx(3871.290534, abs=1e-5)


def test_point_force_quarter_misalignment_halves(const, shear):
    f0 = point_force(const, shear, 0.2, THETA_STAR, 0.2)
    assert point_force(const, shear, 0.2 + math.pi / 4, THETA_STAR, 0.2) == pytest.approx(f0 / 2, rel=1e-12)


def test_point_force_linear_in_constant(const, shear):
    doubled = replace(const, c_big=2 * const.c_big)
    assert point_force(doubled, shear, 0.1, 0.4, 0.0) == pytest.approx(2 * point_force(const, shear, 0.1, 0.4, 0.0))


@pytest.mark.parametrize("phi,theta", [(0.0, 0.0), (0.0, math.pi / 2), (math.pi / 2, 0.3), (0.0, -0.1)])
def test_point_force_outside_window(const, shear, phi, theta):
    with pytest.raises(ParameterError):
        point_force(const, shear, phi, theta, 0.0)


def test_average_force_single_point(const, shear):
    pts = [PathPoint(0.0, THETA_STAR, 0.0)]
    assert average_force(const, shear, pts, 0.0) == point_force(const, shear, 0.0, THETA_STAR, 0.0)


def test_average_force_below_center(const, shear, small_path):
    f_bar = average_force(const, shear, analysis_path(small_path), 0.0)
    assert f_bar < point_force(const, shear, 0.0, THETA_STAR, 0.0)


def test_misalignment_losses_match_quadrature(const, shear, small_path):
    # oracle: oracles/quasistatic.py (continuous-path quadrature)
    base = average_force(const, shear, analysis_path(small_path), 0.0)

    def loss(**changes):
        return 1 - average_force(const, shear, analysis_path(small_path.replace(**changes)), 0.0) / base

    assert loss(phi_c=math.radians(20)) == pytest.approx(0.111594415, abs=1e-6)
    assert loss(phi_c=math.radians(45)) == pytest.approx(0.476989804, abs=1e-6)
    assert loss(phi_c=math.radians(20), theta_c=THETA_STAR + math.radians(20)) == pytest.approx(0.288639554, abs=1e-6)


def test_phi_span_quintupled(const, shear):
    # oracle: oracles/quasistatic.py, loss 0.112954
    p = PathParams(0.0, 0.2, 0.1, 0.1)
    f1 = average_force(const, shear, analysis_path(p), 0.0)
    f5 = average_force(const, shear, analysis_path(p.replace(phi_span=0.5)), 0.0)
    assert 1 - f5 / f1 == pytest.approx(0.112954012, abs=1e-6)
    assert 0.05 <= 1 - f5 / f1 <= 0.15


def test_half_forces_symmetric(const, shear, small_path):
    f_l, f_r = half_forces(const, shear, analysis_path(small_path), 0.0, 0.0)
    assert f_l == pytest.approx(f_r, abs=1e-9)
    assert delta_force(const, shear, analysis_path(small_path), 0.0, 0.0) == pytest.approx(0.0, abs=1e-9)


def test_half_forces_offset(const, shear, small_path):
    p = small_path.replace(phi_c=0.2)
    f_l, f_r = half_forces(const, shear, analysis_path(p), 0.0, 0.2)
    assert f_l < f_r
    # oracle: oracles/quasistatic.py, -546.525388
    assert f_l - f_r == pytest.approx(-546.525388, rel=1e-4)


def test_half_partition(small_path):
    path = analysis_path(small_path.replace(phi_c=0.1), 401)
    left = left_mask(path.phi, 0.1)
    assert left.sum() + (~left).sum() == 401


def test_empty_half_raises(const, shear):
    pts = [PathPoint(0.1, 0.3, 0.0), PathPoint(0.2, 0.3, 0.5)]
    with pytest.raises(DegeneratePathError):
        half_forces(const, shear, pts, 0.0, 0.0)


def test_delta_force_odd(const, shear, small_path):
    plus = delta_force(const, shear, analysis_path(small_path.replace(phi_c=0.3)), 0.0, 0.3)
    minus = delta_force(const, shear, analysis_path(small_path.replace(phi_c=-0.3)), 0.0, -0.3)
    assert plus < 0 < minus
    assert plus == pytest.approx(-minus, abs=1e-6)


@pytest.mark.parametrize("span,expected", [(0.1, -273.786460), (0.3, -792.441991), (0.5, -1228.006772)])
def test_delta_force_quadrature(const, shear, small_path, span, expected):
    # oracle: oracles/quasistatic.py
    p = small_path.replace(phi_c=0.3, phi_span=span)
    assert delta_force(const, shear, analysis_path(p), 0.0, 0.3) == pytest.approx(expected, rel=1e-4)


@pytest.mark.parametrize("offset", [-0.6, -0.3, -0.05, 0.1, 0.4, 0.7])
def test_delta_force_closed_form(const, shear, small_path, offset):
    path = analysis_path(small_path.replace(phi_c=offset), 2000)
    num = delta_force(const, shear, path, 0.0, offset)
    est = delta_force_estimate(const, shear, path, 0.0, offset)
    assert num == pytest.approx(est, rel=0.02)


def test_optimal_location(shear):
    assert optimal_location(shear) == (0.0, pytest.approx(0.306277369, abs=1e-9))
    assert optimal_location(ShearParams(5, 4, 0.999999), 0.3)[1] == pytest.approx(math.pi / 4, abs=1e-6)
    # oracle: oracles/quasistatic.py, 1e-4 grid search gives 0.3063
    grid = np.arange(1, 15707) * 1e-4
    assert grid[np.argmax(elevation_factor(shear, 30.0, grid))] == pytest.approx(0.3063, abs=1e-9)


def test_grid_argmax_matches_optimum(const, shear):
    spec = SweepSpec(
        PathParams(0.0, 0.3, 0.05, 0.03),
        [SweepAxis("phi_offset", -0.2, 0.2, 41), SweepAxis("theta_c", 0.2, 0.4, 21)],
        n_samples=64,
    )
    t = sweep(const, shear, spec)
    k = np.argmax(t["f_bar"])
    assert abs(t["phi_offset"][k]) <= 0.01 + 1e-12
    assert abs(t["theta_c"][k] - THETA_STAR) <= 0.01


@given(st.floats(0.02, 0.9), st.floats(1.0, 20.0), st.floats(1.0, 20.0), st.floats(10.0, 200.0))
def test_elevation_factor_unimodal(alpha, w0, z0, r):
    s = ShearParams(w0, z0, alpha)
    grid = np.arange(1, int((math.pi / 2) / 1e-3)) * 1e-3
    d = np.diff(elevation_factor(s, r, grid))
    signs = np.sign(d[d != 0])
    assert np.count_nonzero(np.diff(signs)) == 1


@given(st.floats(0.05, 0.3), st.floats(0.02, 0.1))
def test_delta_force_monotone_and_signed(const, shear, phi_span, theta_span):
    base = PathParams(0.0, THETA_STAR, phi_span, theta_span)
    offsets = np.arange(-39, 40) * 0.02
    values = [delta_force(const, shear, analysis_path(base.replace(phi_c=o), 200), 0.0, o) for o in offsets]
    assert np.all(np.diff(values) < 0)
    nz = np.abs(offsets) > 1e-12
    assert np.all(np.sign(values)[nz] == -np.sign(offsets[nz]))


@given(st.floats(1.0, 15.0))
def test_argmax_invariant_to_wind_scale(const, w0):
    spec = SweepSpec(
        PathParams(0.0, 0.3, 0.1, 0.05),
        [SweepAxis("phi_offset", -0.3, 0.3, 13), SweepAxis("theta_c", 0.15, 0.6, 10)],
        n_samples=64,
    )
    ref = sweep(const, ShearParams(), spec)
    t = sweep(const, ShearParams(w0=w0), spec)
    assert np.argmax(t["f_bar"]) == np.argmax(ref["f_bar"])


def test_argmax_force_is_argmin_abs_delta(const, shear):
    t = sweep(const, shear, SweepSpec(PathParams(0.0, THETA_STAR, 0.3, 0.1),
                                      [SweepAxis("phi_offset", -0.5, 0.5, 51)]))
    assert np.argmax(t["f_bar"]) == np.argmin(np.abs(t["delta_f"]))


def test_sweep_symmetric(const, shear, small_path):
    t = sweep(const, shear, SweepSpec(small_path, [SweepAxis("phi_offset", -1, 1, 3)]))
    assert t["f_bar"][0] == pytest.approx(t["f_bar"][2], rel=1e-12)
    assert t["f_bar_norm"].max() == 1.0


def test_sweep_theta_unimodal(const, shear):
    t = sweep(const, shear, SweepSpec(PathParams(0.0, 0.3, 0.2, 0.05),
                                      [SweepAxis("theta_c", 0.06, 1.5, 60)]))
    assert np.count_nonzero(np.diff(np.sign(np.diff(t["f_bar"])))) == 1


def test_sweep_grid_size_and_order(const, shear, small_path):
    t = sweep(const, shear, SweepSpec(small_path, [SweepAxis("phi_offset", -0.5, 0.5, 11),
                                                   SweepAxis("phi_span", 0.1, 0.5, 11)]))
    assert t["f_bar"].size == 121
    assert np.all(t["phi_offset"][:11] == -0.5)


def test_sweep_deterministic(const, shear, small_path):
    spec = SweepSpec(small_path, [SweepAxis("beta", -0.3, 0.3, 7)])
    a, b = sweep(const, shear, spec), sweep(const, shear, spec)
    assert all(np.array_equal(a[k], b[k]) for k in a)


def test_sweep_config_errors(small_path):
    with pytest.raises(ConfigError):
        SweepAxis("phi_c", 0, 1, 3)
    with pytest.raises(ConfigError):
        SweepAxis("theta_c", 0.2, 0.4, 0)
    with pytest.raises(ConfigError):
        SweepSpec(small_path, [])


def test_sample_path_used_for_analysis(small_path):
    a = analysis_path(small_path, 100)
    b = sample_path(small_path, 100, offset=0.5)
    assert np.array_equal(a.phi, b.phi)
