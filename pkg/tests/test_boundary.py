"""Trigonometric boundary profiles: evaluation, extrema, classification."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critcount.boundary import (
    BoundaryProfile,
    ScenarioClass,
    classify_scenario,
    count_extrema,
)
from critcount.errors import DegenerateClassError, DegenerateProfileError

coeff = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


def sin_lists(max_size: int):
    # sin(0*theta) contributes nothing, so the leading coefficient is pinned
    return st.lists(coeff, min_size=0, max_size=max_size - 1).map(lambda xs: [0.0] + xs)


def direct_value(cos_c, sin_c, theta):
    return sum(c * math.cos(k * theta) for k, c in enumerate(cos_c)) + sum(
        s * math.sin(k * theta) for k, s in enumerate(sin_c)
    )


@settings(max_examples=30, deadline=None)
@given(
    cos_c=st.lists(coeff, min_size=1, max_size=5),
    sin_c=sin_lists(5),
    theta=st.floats(min_value=-10.0, max_value=10.0),
)
def test_value_matches_direct_sum(cos_c, sin_c, theta):
    prof = BoundaryProfile(tuple(cos_c), tuple(sin_c))
    want = direct_value(cos_c, sin_c, theta)
    assert math.isclose(prof.value(theta), want, rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=30, deadline=None)
@given(
    cos_c=st.lists(coeff, min_size=2, max_size=5),
    sin_c=sin_lists(5),
    theta=st.floats(min_value=0.0, max_value=2 * math.pi),
)
def test_derivative_matches_finite_difference(cos_c, sin_c, theta):
    prof = BoundaryProfile(tuple(cos_c), tuple(sin_c))
    eps = 1e-6
    fd = (prof.value(theta + eps) - prof.value(theta - eps)) / (2 * eps)
    assert math.isclose(prof.derivative(theta), fd, rel_tol=1e-5, abs_tol=1e-5)


@settings(max_examples=20, deadline=None)
@given(
    cos_c=st.lists(coeff, min_size=1, max_size=4),
    sin_c=sin_lists(4),
    phi=st.floats(min_value=-7.0, max_value=7.0),
    theta=st.floats(min_value=-7.0, max_value=7.0),
)
def test_rotation_shifts_argument(cos_c, sin_c, phi, theta):
    prof = BoundaryProfile(tuple(cos_c), tuple(sin_c))
    rotated = prof.rotated(phi)
    assert math.isclose(
        rotated.value(theta), prof.value(theta - phi), rel_tol=1e-10, abs_tol=1e-10
    )


def test_json_round_trip():
    prof = BoundaryProfile((1.0, 0.5), (0.0, -0.25, 2.0))
    again = BoundaryProfile.from_json(prof.to_json())
    assert again.cos_coeffs == prof.cos_coeffs
    assert again.sin_coeffs == prof.sin_coeffs


def test_count_extrema_pure_mode():
    summary = count_extrema(BoundaryProfile((0.0, 0.0, 1.0), (0.0, 0.0, 0.0)))
    assert summary.n_local_max == 2
    assert summary.n_local_min == 2
    assert summary.n_global_max == 2
    assert summary.n_global_min == 2
    assert summary.all_extrema_global
    assert math.isclose(summary.z_max, 1.0, abs_tol=1e-9)
    assert math.isclose(summary.z_min, -1.0, abs_tol=1e-9)


def test_count_extrema_mixed_profile():
    # cos t + 0.3 cos 2t: two local maxima, only one global
    summary = count_extrema(BoundaryProfile((0.0, 1.0, 0.3), (0.0, 0.0, 0.0)))
    assert summary.n_local_max == 2
    assert summary.n_local_min == 2
    assert summary.n_global_max == 1
    assert not summary.all_extrema_global
    assert math.isclose(summary.z_max, 1.3, abs_tol=1e-9)


def test_count_extrema_single_mode():
    summary = count_extrema(BoundaryProfile((1.0, 1.0), (0.0, 0.0)))
    assert summary.n_local_max == 1
    assert summary.n_local_min == 1
    assert math.isclose(summary.z_max, 2.0, abs_tol=1e-9)
    assert math.isclose(summary.z_min, 0.0, abs_tol=1e-9)


def test_maxima_minima_alternate():
    summary = count_extrema(BoundaryProfile((0.0, 1.0, 0.0, 0.4), (0.0, 0.0, 0.5)))
    assert summary.n_local_max == summary.n_local_min
    tagged = [(e.theta, "max") for e in summary.maxima] + [
        (e.theta, "min") for e in summary.minima
    ]
    kinds = [k for _, k in sorted(tagged)]
    assert all(a != b for a, b in zip(kinds, kinds[1:]))


def test_constant_profile_degenerate():
    with pytest.raises(DegenerateProfileError):
        count_extrema(BoundaryProfile((1.0,), (0.0,)))


@settings(max_examples=15, deadline=None)
@given(
    cos_c=st.lists(coeff, min_size=2, max_size=4),
    sin_c=sin_lists(4),
    phi=st.floats(min_value=0.0, max_value=2 * math.pi),
)
def test_extrema_counts_rotation_invariant(cos_c, sin_c, phi):
    prof = BoundaryProfile(tuple(cos_c), tuple(sin_c))
    try:
        base = count_extrema(prof)
    except DegenerateProfileError:
        return
    try:
        rot = count_extrema(prof.rotated(phi))
    except DegenerateProfileError:
        return
    assert rot.n_local_max == base.n_local_max
    assert rot.n_global_max == base.n_global_max


def test_classify_disk():
    summary = count_extrema(BoundaryProfile((0.0, 0.0, 1.0), (0.0, 0.0, 0.0)))
    assert classify_scenario("disk", summary) is ScenarioClass.SIMPLY_CONNECTED


def test_classify_annulus_sides():
    summary = count_extrema(BoundaryProfile((2.0, 0.0, 1.0), (0.0, 0.0, 0.0)))
    # psi in [1, 3]
    assert classify_scenario("annulus", summary, 0.0) is ScenarioClass.PSI_GE_H
    assert classify_scenario("annulus", summary, 4.0) is ScenarioClass.PSI_LE_H
    assert classify_scenario("annulus", summary, 2.0) is ScenarioClass.H_BETWEEN


def test_classify_annulus_touching_value_degenerate():
    summary = count_extrema(BoundaryProfile((2.0, 0.0, 1.0), (0.0, 0.0, 0.0)))
    with pytest.raises(DegenerateClassError):
        classify_scenario("annulus", summary, 1.0)


def test_classify_annulus_requires_inner_value():
    summary = count_extrema(BoundaryProfile((2.0, 0.0, 1.0), (0.0, 0.0, 0.0)))
    with pytest.raises(ValueError):
        classify_scenario("annulus", summary, None)
