"""Spec-record validation."""

import math

import pytest

from spiraldim.errors import ValidationError
from spiraldim.specs import (
    ChirpSpec,
    NormalFormSpec,
    PowerSpiralSpec,
    SurfaceSpec,
    TrajectoryFamilySpec,
    snapshot,
)


def test_chirp_spec_invariants():
    with pytest.raises(ValidationError):
        ChirpSpec(alpha=-0.1, beta=1.0)
    with pytest.raises(ValidationError):
        ChirpSpec(alpha=0.5, beta=0.0)
    with pytest.raises(ValidationError):
        ChirpSpec(alpha=0.5, beta=1.0, trig="tan")
    assert ChirpSpec(alpha=0.5, beta=1.0).graph_dimension_prediction == pytest.approx(1.25)
    assert ChirpSpec(alpha=1.5, beta=1.0).graph_dimension_prediction == 1.0


def test_power_spiral_spec():
    with pytest.raises(ValidationError):
        PowerSpiralSpec(alpha=0.5, phi_min=0.9)
    s = PowerSpiralSpec(alpha=1.0, phi_min=2.0)
    assert s.radius(2 * math.pi) == pytest.approx(1.0 / (2 * math.pi))
    s2 = PowerSpiralSpec(alpha=0.5, log_exponent=1.0, phi_min=2.0)
    assert s2.radius(math.e) == pytest.approx(math.e**-0.5)
    assert PowerSpiralSpec(alpha=0.5).dimension_prediction == pytest.approx(4.0 / 3.0)
    assert PowerSpiralSpec(alpha=2.0).dimension_prediction == 1.0


def test_trajectory_family_spec_validation():
    with pytest.raises(ValidationError):
        TrajectoryFamilySpec(alpha=0.5, t0=2.0)  # t0 <= e
    with pytest.raises(ValidationError):
        TrajectoryFamilySpec(alpha=0.5, C1=0.0, C2=0.0)
    with pytest.raises(ValidationError):
        # log amplitude with a start time before the derivative signs settle
        TrajectoryFamilySpec(alpha=0.5, log_p_exponent=2, t0=8.0)
    spec = TrajectoryFamilySpec(alpha=0.5, gamma=2.0)
    assert spec.t0 == 20.0
    assert spec.delta == pytest.approx(1.5)
    assert spec.z0 == pytest.approx(20.0**-2)
    spec_log = TrajectoryFamilySpec(alpha=0.5, log_q_exponent=1)
    assert spec_log.t0 == pytest.approx(math.e**2)


def test_trajectory_family_amplitude_phase():
    spec = TrajectoryFamilySpec(alpha=0.5, C1=3.0, C2=4.0)
    assert spec.amplitude == pytest.approx(5.0)
    assert spec.phase == pytest.approx(math.atan2(4.0, 3.0))


def test_normal_form_spec():
    nf = NormalFormSpec(l=1, a=(0.0,), b=(0.0, -2.0))
    assert nf.p_index == 3
    assert nf.b_p == -2.0
    with pytest.raises(ValidationError):
        NormalFormSpec(l=2, a=(0.0,), b=(-1.0,))  # a must list a_0..a_{l-1}
    with pytest.raises(ValidationError):
        NormalFormSpec(l=1, a=(0.0,), b=(0.0,))
    with pytest.raises(ValidationError):
        NormalFormSpec(l=1, a=(0.0,), b=(-1.0,), p_index=3)
    good = NormalFormSpec(l=1, a=(0.0,), b=(-1.0,))
    good.require_limit_cycle_form()
    bad = NormalFormSpec(l=1, a=(0.1,), b=(-1.0,))
    with pytest.raises(ValidationError):
        bad.require_limit_cycle_form()


def test_normal_form_dimension_prediction():
    assert NormalFormSpec(l=1, a=(0.0,), b=(-1.0,)).dimension_prediction() == pytest.approx(4 / 3)
    p4 = NormalFormSpec(l=1, a=(0.0,), b=(0.0, 0.0, -1.0))
    assert p4.dimension_prediction() == pytest.approx(1.375)
    p6 = NormalFormSpec(l=1, a=(0.0,), b=(0.0, 0.0, 0.0, 0.0, -1.0))
    assert p6.dimension_prediction() == pytest.approx(1.5 - 1.0 / 12.0)
    # Lipschitz case p = 3 reproduces the planar value through the same formula
    p3 = NormalFormSpec(l=1, a=(0.0,), b=(0.0, -1.0,))
    assert ((4 * 1 - 1) * 3 - 2 * 1 + 1) / (2.0 * 1 * 3) == pytest.approx(4.0 / 3.0)
    assert p3.dimension_prediction() == pytest.approx(4.0 / 3.0)
    l2p6 = NormalFormSpec(l=2, a=(0.0, 0.0), b=(0.0, 0.0, 0.0, 0.0, -1.0))
    assert l2p6.dimension_prediction() == pytest.approx((7 * 6 - 3) / 24.0)


def test_surface_spec():
    s = SurfaceSpec(beta=0.25, coefficient=2.0)
    assert s.derivative_bound == pytest.approx(0.5)
    assert s.height(4.0) == pytest.approx(2.0 * 4.0**0.25)
    with pytest.raises(ValidationError):
        SurfaceSpec(beta=1.0, coefficient=2.0, derivative_bound=1.0)


def test_snapshot_is_flat():
    snap = snapshot(ChirpSpec(alpha=0.5, beta=1.0))
    assert snap["type"] == "ChirpSpec"
    assert snap["alpha"] == 0.5
