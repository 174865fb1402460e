"""Generators: sampling contracts and closed-form oracles."""

import math

import numpy as np
import pytest

from spiraldim.errors import BudgetError, PartialCurveError, ValidationError
from spiraldim.generators import (
    gen_chirp_graph,
    gen_chirp_phase_curve,
    gen_phase_trajectory,
    gen_power_spiral,
    gen_reflected_graph,
)
from spiraldim.specs import ChirpSpec, PowerSpiralSpec, TrajectoryFamilySpec


def test_chirp_chord_invariant_and_budget():
    spec = ChirpSpec(alpha=0.5, beta=1.0)
    cur = gen_chirp_graph(spec, 1.0, budget=50_000, chord_target=1e-3)
    assert len(cur) <= 50_000
    assert cur.chords().max() <= cur.max_chord * 1.0000001
    assert cur.max_chord <= 1.1e-3


def test_chirp_budget_refusal_names_minimum():
    spec = ChirpSpec(alpha=0.5, beta=1.0)
    with pytest.raises(ValidationError):
        gen_chirp_graph(spec, 1.0, budget=999)
    with pytest.raises(BudgetError) as exc:
        gen_chirp_graph(spec, 1.0, budget=1000, chord_target=1e-6)
    assert exc.value.required_minimum > 1000


def test_chirp_zeros_match_oracle():
    # sign changes of X enumerate the zeros tau_k = 1/(k*pi)
    spec = ChirpSpec(alpha=0.5, beta=1.0)
    cur = gen_chirp_graph(spec, 1.0, budget=200_000, chord_target=1e-3)
    x, y = cur.points[:, 0], cur.points[:, 1]
    s = np.sign(y)
    flips = np.flatnonzero(s[:-1] * s[1:] < 0)
    crossings = x[flips]
    k = np.round(1.0 / (np.pi * crossings))
    assert np.all(np.abs(crossings - 1.0 / (k * np.pi)) < 2e-3 * crossings)
    # every integer k in range appears exactly once
    assert np.array_equal(np.sort(k), np.arange(k.min(), k.max() + 1))


def test_chirp_at_quarter_period_value():
    spec = ChirpSpec(alpha=0.5, beta=1.0)
    cur = gen_chirp_graph(spec, 1.0, budget=100_000, chord_target=5e-3)
    tau = 2.0 / math.pi
    i = np.argmin(np.abs(cur.params - tau))
    # a sample near the quarter period evaluates the closed form exactly
    assert abs(cur.points[i, 1] - cur.points[i, 0] ** 0.5) < 5e-3


def test_power_spiral_points_and_monotone_radius():
    spec = PowerSpiralSpec(alpha=1.0, phi_min=2.0)
    cur = gen_power_spiral(spec, r_min=0.01, budget=500_000, chord_target=1e-3)
    i = np.argmin(np.abs(cur.params - 2 * np.pi))
    pt = cur.points[i]
    assert np.linalg.norm(pt - [1.0 / (2 * np.pi), 0.0]) < 1e-4
    # successive turns: radius strictly decreases at every sampled angle
    spec2 = PowerSpiralSpec(alpha=0.5)
    cur2 = gen_power_spiral(spec2, r_min=0.05, budget=500_000, chord_target=1e-3)
    r = np.linalg.norm(cur2.points, axis=1)
    phi = cur2.params
    r_next = np.interp(phi + 2 * np.pi, phi, r, right=np.nan)
    ok = ~np.isnan(r_next)
    assert np.all(r_next[ok] < r[ok])


def test_power_spiral_log_factor_value():
    spec = PowerSpiralSpec(alpha=0.5, log_exponent=1.0, phi_min=2.0)
    assert spec.radius(math.e) == pytest.approx(math.e**-0.5)


def test_power_spiral_partial_budget_error():
    spec = PowerSpiralSpec(alpha=0.25)
    with pytest.raises(PartialCurveError) as exc:
        gen_power_spiral(spec, r_min=1e-4, budget=10_000, chord_target=1e-4)
    assert 1e-4 < exc.value.reached_radius < 1.0


def test_power_spiral_mirror():
    spec = PowerSpiralSpec(alpha=0.5, mirror=True)
    cur = gen_power_spiral(spec, r_min=0.1, budget=100_000)
    plain = gen_power_spiral(PowerSpiralSpec(alpha=0.5), r_min=0.1, budget=100_000)
    assert np.allclose(cur.points[:, 1], -plain.points[:, 1])


def test_trajectory_samples_per_turn_and_z():
    spec = TrajectoryFamilySpec(alpha=0.5, gamma=1.0, t0=3.0)
    cur = gen_phase_trajectory(spec, 300.0, budget=1_000_000, samples_per_turn=32, chord_target=1e-3)
    # at least 32 samples in every phase turn
    edges = np.arange(spec.t0, 300.0, 2 * np.pi)
    hist = np.histogram(cur.params, bins=edges)[0]
    assert hist.min() >= 32
    assert np.allclose(cur.points[:, 2], cur.params**-1.0)
    i = np.argmin(np.abs(cur.params - math.pi))
    assert abs(cur.points[i, 0]) < 5e-3


def test_trajectory_y_is_xdot():
    # projection to (x, y) agrees with (x, xdot), xdot by central differences
    spec = TrajectoryFamilySpec(alpha=0.5, gamma=1.0, t0=6.0)
    cur = gen_phase_trajectory(spec, 500.0, budget=2_000_000, chord_target=1e-3)
    t = cur.params
    from spiraldim.families import trajectory_state

    h = 1e-6 * t
    xp, _, _ = trajectory_state(spec, t + h, order=0)
    xm, _, _ = trajectory_state(spec, t - h, order=0)
    fd = (xp - xm) / (2 * h)
    rel = np.abs(fd - cur.points[:, 1]) / np.abs(cur.points[:, 1]).max()
    assert rel.max() < 1e-6


def test_trajectory_budget_truncation_flag():
    spec = TrajectoryFamilySpec(alpha=0.5, gamma=1.0, t0=6.0)
    cur = gen_phase_trajectory(spec, 5000.0, budget=10_000)
    assert "truncated_at_t" in cur.provenance
    assert cur.params[-1] < 5000.0


def test_reflected_graph_matches_reflection():
    spec = TrajectoryFamilySpec(alpha=0.5, gamma=1.0, t0=6.0)
    cur = gen_reflected_graph(spec, 600.0, budget=300_000)
    assert np.all(np.diff(cur.params) > 0)
    from spiraldim.families import reflected_value

    assert np.allclose(cur.points[:, 1], reflected_value(spec, cur.params), atol=1e-14)


def test_chirp_phase_curve_is_phase_pair():
    cur = gen_chirp_phase_curve(0.5, 0.75, t0=5.0, t_max=100.0, budget=300_000, chord_target=1e-3)
    t = cur.params
    x = t**-0.5 * np.sin(t**0.75)
    assert np.allclose(cur.points[:, 0], x, atol=1e-14)
