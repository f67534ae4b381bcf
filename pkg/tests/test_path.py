import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crosswind.errors import ParameterError
from crosswind.path import (
    Half,
    PathParams,
    classify_half,
    figure_eight,
    figure_eight_point,
    left_mask,
    sample_path,
)

P = PathParams(0.1, 0.4, 0.3, 0.1)


@st.composite
def paths(draw, beta=None):
    theta_c = draw(st.floats(0.05, 1.5))
    theta_span = draw(st.floats(0.01, 1.0)) * min(theta_c, math.pi / 2 - theta_c)
    b = draw(st.floats(-math.pi / 2, math.pi / 2)) if beta is None else beta
    return PathParams(draw(st.floats(-1.0, 1.0)), theta_c, draw(st.floats(0.01, 0.8)), theta_span, b)


def test_point_examples():
    assert figure_eight_point(P, 0.0)[:2] == pytest.approx((0.1, 0.4), abs=1e-15)
    assert figure_eight_point(P, 0.25)[:2] == pytest.approx((0.4, 0.4), abs=1e-15)
    assert figure_eight_point(P.replace(beta=math.pi / 2), 0.25)[:2] == pytest.approx((0.1, 0.7), abs=1e-15)


@pytest.mark.parametrize("s", [-0.1, 1.0, 1.5])
def test_point_rejects_phase(s):
    with pytest.raises(ParameterError):
        figure_eight_point(P, s)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(theta_c=0.0), dict(theta_c=math.pi / 2), dict(phi_span=0.0), dict(theta_span=-0.1),
        dict(theta_c=0.2, theta_span=0.3), dict(theta_c=1.4, theta_span=0.3), dict(beta=2.0),
    ],
)
def test_params_domain(kwargs):
    with pytest.raises(ParameterError):
        P.replace(**kwargs)


def test_sample_quarter_phases():
    path = sample_path(P, 4)
    assert path.phase.tolist() == [0.0, 0.25, 0.5, 0.75]
    assert path.phi == pytest.approx([0.1, 0.4, 0.1, -0.2], abs=1e-15)


def test_sample_too_few():
    with pytest.raises(ParameterError):
        sample_path(P, 3)


def test_sample_path_is_closed():
    # the point at s=0 equals the limit s -> 1
    phi0, theta0 = figure_eight(P, 0.0)
    phi1, theta1 = figure_eight(P, 1.0 - 1e-12)
    assert (phi1, theta1) == pytest.approx((phi0, theta0), abs=1e-10)


@given(paths())
def test_sample_means_are_center(params):
    path = sample_path(params, 1000)
    assert np.mean(path.phi) == pytest.approx(params.phi_c, abs=1e-12)
    assert np.mean(path.theta) == pytest.approx(params.theta_c, abs=1e-12)


@given(paths(beta=0.0))
def test_theta_range_is_twice_span(params):
    path = sample_path(params, 1000)
    assert np.ptp(path.theta) == pytest.approx(2 * params.theta_span, abs=1e-9)


@given(paths(beta=0.0))
def test_up_loop(params):
    h = 1e-6
    for s in (0.25, 0.75):
        _, lo = figure_eight(params, s - h)
        _, hi = figure_eight(params, s + h)
        assert hi > lo


@given(paths())
def test_points_stay_within_spans(params):
    path = sample_path(params, 257)
    dp, dq = path.phi - params.phi_c, path.theta - params.theta_c
    cb, sb = math.cos(params.beta), math.sin(params.beta)
    u, v = cb * dp + sb * dq, -sb * dp + cb * dq
    assert np.all(np.abs(u) <= params.phi_span + 1e-12)
    assert np.all(np.abs(v) <= params.theta_span + 1e-12)


@given(paths(beta=0.0))
def test_mirror_symmetry(params):
    path = sample_path(params, 1000)
    pts = np.column_stack([np.abs(path.phi - params.phi_c), path.theta - params.theta_c])
    mirrored = np.column_stack([np.abs(-(path.phi - params.phi_c)), path.theta - params.theta_c])
    key = np.lexsort(pts.T)
    assert np.allclose(pts[key], mirrored[np.lexsort(mirrored.T)], atol=1e-12)


@given(paths(beta=0.0), st.floats(-math.pi / 2, math.pi / 2))
def test_rotation_consistency(params, beta):
    flat = sample_path(params, 500)
    rot = sample_path(params.replace(beta=beta), 500)
    dp, dq = rot.phi - params.phi_c, rot.theta - params.theta_c
    cb, sb = math.cos(beta), math.sin(beta)
    assert np.allclose(cb * dp + sb * dq, flat.phi - params.phi_c, atol=1e-12)
    assert np.allclose(-sb * dp + cb * dq, flat.theta - params.theta_c, atol=1e-12)


def test_classify_examples():
    assert classify_half((0.3, 0.4, 0.0), 0.3) is Half.LEFT
    assert classify_half((0.5, 0.4, 0.0), 0.3) is Half.LEFT
    assert classify_half((0.299, 0.4, 0.0), 0.3) is Half.RIGHT


@given(paths(beta=0.0), st.integers(2, 500))
def test_midpoint_halves_balance(params, half_n):
    n = 2 * half_n
    left = left_mask(sample_path(params, n, offset=0.5).phi, params.phi_c)
    assert abs(int(left.sum()) - (n - int(left.sum()))) <= 1


@given(paths(beta=0.0), st.integers(2, 500))
def test_grid_sampling_puts_both_crossings_left(params, half_n):
    # s = k/n hits phi_delta = 0 twice per loop; both go left
    n = 2 * half_n
    left = left_mask(sample_path(params, n).phi, params.phi_c)
    assert int(left.sum()) - (n - int(left.sum())) == 2
