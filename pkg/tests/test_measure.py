"""Epsilon-neighborhood measures and content diagnostics."""

import numpy as np
import pytest

from spiraldim.boxcount import ScaleLadder
from spiraldim.curve import Curve
from spiraldim.errors import MemoryBudgetError, ValidationError
from spiraldim.generators import gen_power_spiral
from spiraldim.measure import content_profile, epsilon_measure
from spiraldim.specs import PowerSpiralSpec


def point_curve():
    pts = np.array([[0.0, 0.0], [1e-10, 0.0]])
    return Curve(params=np.array([0.0, 1.0]), points=pts, max_chord=1e-9)


def segment_curve(length=1.0, n=4001):
    x = np.linspace(0.0, length, n)
    pts = np.column_stack([x, np.zeros(n)])
    return Curve(params=x, points=pts, max_chord=length / (n - 1) * 1.01)


def test_point_neighborhood_is_disc():
    lad = ScaleLadder.geometric(0.4, count=8)
    prof = epsilon_measure(point_curve(), lad, raster_cell=lad.eps_min / 16)
    ideal = np.pi * lad.epsilons**2
    assert np.all(np.abs(prof.measures / ideal - 1.0) < 0.03)


def test_segment_neighborhood_is_stadium():
    lad = ScaleLadder.geometric(0.08, count=8)
    prof = epsilon_measure(segment_curve(), lad, raster_cell=lad.eps_min / 16)
    ideal = 2.0 * lad.epsilons + np.pi * lad.epsilons**2
    assert np.all(np.abs(prof.measures / ideal - 1.0) < 0.03)


def test_raster_precondition():
    lad = ScaleLadder.geometric(0.4, count=8)
    with pytest.raises(ValidationError, match="eps_min/8"):
        epsilon_measure(point_curve(), lad, raster_cell=lad.eps_min / 2)


def test_memory_budget_refusal_suggests_raster():
    lad = ScaleLadder.geometric(0.4, count=8)
    with pytest.raises(MemoryBudgetError) as exc:
        epsilon_measure(segment_curve(), lad, raster_cell=lad.eps_min / 16,
                        memory_budget_bytes=1e4)
    assert exc.value.suggested_raster_cell > lad.eps_min / 16


def test_measures_nonincreasing_toward_zero():
    lad = ScaleLadder.geometric(0.2, count=10)
    prof = epsilon_measure(segment_curve(), lad, raster_cell=lad.eps_min / 8)
    assert np.all(np.diff(prof.measures) <= 1e-12)
    assert prof.error_bounds[0] < prof.error_bounds[-1]


def test_spiral_content_nondegenerate_at_its_dimension():
    # |A_eps| / eps^(2 - 4/3) stays within bounded ratio for the pure spiral
    spec = PowerSpiralSpec(alpha=0.5)
    curve = gen_power_spiral(spec, r_min=0.036, budget=2_000_000, chord_target=4e-4)
    lad = ScaleLadder.from_bounds(0.25, 4e-3)
    prof = epsilon_measure(curve, lad, raster_cell=4e-3 / 8)
    quotients, verdict = content_profile(prof, 4.0 / 3.0)
    vals = np.array([q for _, q in quotients])
    assert verdict.label == "nondegenerate"
    assert vals.max() / vals.min() <= 4.0


def test_content_quotient_at_ambient_equals_measure():
    lad = ScaleLadder.geometric(0.2, count=10)
    prof = epsilon_measure(segment_curve(), lad, raster_cell=lad.eps_min / 8)
    quotients, _ = content_profile(prof, 2.0 - 1e-12)
    vals = np.array([q for _, q in quotients])
    assert np.allclose(vals, prof.measures, rtol=1e-6)
    assert np.all(np.diff(vals) <= 1e-9)


def test_content_degenerate_drift_synthetic():
    lad = ScaleLadder.geometric(1.0, count=12)
    measures = 4.0 * lad.epsilons ** (2.0 / 3.0) * (1 + np.log(1.0 / lad.epsilons) * 3) ** 2
    from spiraldim.measure import MeasureProfile

    prof = MeasureProfile(ladder=lad, measures=measures, raster_cell=1e-4, ambient=2)
    _, verdict = content_profile(prof, 4.0 / 3.0)
    assert verdict.label == "degenerate-drift"
    assert verdict.monotone
    assert verdict.ratio > 4.0


def test_content_s_domain():
    lad = ScaleLadder.geometric(0.2, count=10)
    prof = epsilon_measure(segment_curve(), lad, raster_cell=lad.eps_min / 8)
    with pytest.raises(ValidationError):
        content_profile(prof, 2.5)
