"""Box counting, ladders, and the scaling-exponent fits."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spiraldim.boxcount import (
    ScaleCounts,
    ScaleLadder,
    WindowPolicy,
    box_count,
    box_count_brute,
    fit_dimension,
    fit_dimension_drift,
    graph_ladder,
    ladder_from_turn_positions,
)
from spiraldim.curve import Curve
from spiraldim.errors import ValidationError


def segment_curve(n=4097, length=1.0, y=0.0):
    x = np.linspace(0.0, length, n)
    pts = np.column_stack([x, np.full(n, y)])
    return Curve(params=x, points=pts, max_chord=length / (n - 1) * 1.0000001)


def cloud_curve(pts):
    pts = np.asarray(pts, dtype=float)
    params = np.arange(len(pts), dtype=float)
    chord = float(np.linalg.norm(np.diff(pts, axis=0), axis=1).max()) + 1e-9
    return Curve(params=params, points=pts, max_chord=chord)


def test_ladder_invariants():
    lad = ScaleLadder.geometric(1.0, count=10)
    assert lad.count == 10
    assert lad.eps_max == 1.0
    assert np.allclose(lad.epsilons[1:] / lad.epsilons[:-1], lad.ratio)
    with pytest.raises(ValidationError):
        ScaleLadder.geometric(1.0, count=4)
    with pytest.raises(ValidationError):
        ScaleLadder(epsilons=np.linspace(1.0, 0.1, 10), ratio=0.9)
    with pytest.raises(ValidationError):
        ScaleLadder.from_bounds(1.0, 0.5)


def test_unit_segment_quarter_scale():
    # unit segment, eps = 1/4: four cells, five permitted at the boundary;
    # the brute-force enumeration is the oracle and must agree exactly
    cur = segment_curve()
    lad = ScaleLadder(epsilons=0.25 * (0.5 ** np.arange(8.0)), ratio=0.5)
    counts = box_count(cur, lad)
    brute = box_count_brute(cur, lad)
    assert np.array_equal(counts.counts, brute.counts)
    assert counts.counts[0] in (4, 5)


def test_single_point_counts_one_cell():
    pts = np.array([[0.3, 0.4], [0.3 + 1e-12, 0.4]])
    cur = Curve(params=np.array([0.0, 1.0]), points=pts, max_chord=1e-9)
    lad = ScaleLadder.geometric(1.0, count=8)
    counts = box_count(cur, lad)
    assert np.all(counts.counts == 1)


def test_precondition_names_minimum_epsilon():
    cur = segment_curve(n=101)
    lad = ScaleLadder.geometric(0.02, count=8)
    with pytest.raises(ValidationError, match="minimum admissible epsilon"):
        box_count(cur, lad)


@settings(max_examples=25, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.floats(-2.0, 2.0, allow_nan=False, width=32),
            st.floats(-2.0, 2.0, allow_nan=False, width=32),
        ),
        min_size=2,
        max_size=300,
    )
)
def test_halving_never_decreases_counts(points):
    cur = cloud_curve(points)
    eps0 = 8.0
    lad = ScaleLadder(epsilons=eps0 * (0.5 ** np.arange(8.0)), ratio=0.5)
    if lad.eps_min < 2 * cur.max_chord:
        return
    counts = box_count(cur, lad).counts
    assert np.all(np.diff(counts) >= 0)


@settings(max_examples=25, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.floats(-1.0, 1.0, allow_nan=False, width=32),
            st.floats(-1.0, 1.0, allow_nan=False, width=32),
            st.floats(-1.0, 1.0, allow_nan=False, width=32),
        ),
        min_size=2,
        max_size=200,
    ),
    st.floats(0.05, 0.9),
)
def test_brute_force_equality(points, ratio):
    cur = cloud_curve(points)
    eps0 = 16.0
    lad = ScaleLadder(epsilons=eps0 * (ratio ** np.arange(10.0)), ratio=ratio)
    if lad.eps_min < 2 * cur.max_chord:
        return
    fast = box_count(cur, lad)
    slow = box_count_brute(cur, lad)
    assert np.array_equal(fast.counts, slow.counts)


def test_scaling_covariance_power_of_two_is_exact():
    t = np.linspace(0.0, 6.0, 3000)
    pts = np.column_stack([t, np.sin(3 * t)])
    cur = Curve(params=t, points=pts, max_chord=0.009)
    lad = ScaleLadder.geometric(1.0, count=10)
    scaled = cur.rescale(4.0)
    lad_scaled = ScaleLadder.geometric(4.0, count=10)
    a = box_count(cur, lad).counts
    b = box_count(scaled, lad_scaled).counts
    assert np.array_equal(a, b)


def test_counts_validation():
    lad = ScaleLadder.geometric(1.0, count=8)
    with pytest.raises(ValidationError):
        ScaleCounts(ladder=lad, counts=np.array([5, 4, 6, 7, 8, 9, 10, 11]), ambient=2)
    with pytest.raises(ValidationError):
        ScaleCounts(ladder=lad, counts=np.arange(1, 8), ambient=2)


def test_fit_dimension_exact_power_law():
    lad = ScaleLadder.geometric(1.0, count=16)
    counts = np.maximum(1, np.round(10.0 * lad.epsilons**-1.5)).astype(np.int64)
    sc = ScaleCounts(ladder=lad, counts=counts, ambient=2)
    est = fit_dimension(sc)
    assert est.value == pytest.approx(1.5, abs=0.01)
    assert est.window == (2, 14)
    assert not est.sub_resolved


def test_fit_dimension_sub_resolved():
    lad = ScaleLadder.geometric(1.0, count=8)
    sc = ScaleCounts(ladder=lad, counts=np.full(8, 7, dtype=np.int64), ambient=2)
    est = fit_dimension(sc)
    assert est.sub_resolved
    assert est.value == 1.0


def test_fit_dimension_drift_recovers_power_with_log_factor():
    lad = ScaleLadder.geometric(1.0, count=20)
    eps = lad.epsilons
    u = np.log(eps[0] / eps)
    n = np.round(30.0 * eps**-1.25 * (1.0 + u) ** 1.2).astype(np.int64)
    sc = ScaleCounts(ladder=lad, counts=n, ambient=2)
    plain = fit_dimension(sc)
    drift = fit_dimension_drift(sc, WindowPolicy(trim_coarse=0, trim_fine=0), offset=1.0)
    assert abs(plain.value - 1.25) > 0.1  # the log factor fools the plain fit
    assert drift.value == pytest.approx(1.25, abs=0.02)
    assert drift.kappa == pytest.approx(1.2, abs=0.1)


def test_window_policy():
    assert WindowPolicy().resolve(20) == (2, 18)
    assert WindowPolicy().resolve(8) == (2, 7)
    assert WindowPolicy(window=(3, 9)).resolve(20) == (3, 9)
    with pytest.raises(ValidationError):
        WindowPolicy(window=(3, 6)).resolve(20)
    counts = np.array([2, 5, 10, 80, 200, 400, 900, 1500, 3000, 6000])
    assert WindowPolicy(min_count=64, trim_fine=0).resolve(10, counts) == (3, 10)


def test_ladder_from_turn_positions():
    # power-spiral turn radii, alpha = 1/2
    phis = 1.5 + 2 * np.pi * np.arange(400)
    positions = phis**-0.5
    lad = ladder_from_turn_positions(positions, max_chord=1e-5, diameter=1.6)
    gaps = -np.diff(positions)
    assert lad.eps_max <= max(gaps.max(), 0.4)
    assert lad.eps_min >= 4e-5
    with pytest.raises(ValidationError, match="too shallow"):
        ladder_from_turn_positions(positions[:10], max_chord=1e-6, diameter=1.6)


def test_graph_ladder_requires_oscillation():
    cur = segment_curve(y=0.5)
    with pytest.raises(ValidationError, match="sign changes"):
        graph_ladder(cur)
