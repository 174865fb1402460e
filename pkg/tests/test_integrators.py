"""Integration contracts against the closed-form solutions."""

import math

import numpy as np
import pytest

from spiraldim.errors import ValidationError
from spiraldim.families import trajectory_state
from spiraldim.integrators import (
    attracted_branch_z0,
    gen_hopf_trajectory,
    integrate_cubic_system,
    integrate_normal_form,
)
from spiraldim.specs import NormalFormSpec, TrajectoryFamilySpec


def eq4_init(spec, t0):
    x, y, z = trajectory_state(spec, t0, order=0)
    return float(x), float(y), float(z)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0])
@pytest.mark.parametrize("gamma", [0.25, 1.0, 2.0])
def test_oracle_equivalence_against_closed_form(alpha, gamma):
    # the closed-form solution is the oracle; error stays below
    # 10 * rel_tol * diameter over a decade of time
    rel_tol = 1e-9
    spec = TrajectoryFamilySpec(alpha=alpha, gamma=gamma, t0=6.0)
    cur = integrate_cubic_system(spec, eq4_init(spec, 6.0), (6.0, 60.0), rel_tol, 1e-12)
    ref = np.column_stack(trajectory_state(spec, cur.params, order=0))
    dist = np.linalg.norm(cur.points - ref, axis=1)
    assert dist.max() < 10.0 * rel_tol * cur.bbox_diameter()


def test_amplitude_phase_form_of_constants():
    # C1, C2 enter through the amplitude/phase form; the integrator follows
    spec = TrajectoryFamilySpec(alpha=0.5, gamma=1.0, C1=2.0, C2=-1.0, t0=6.0)
    cur = integrate_cubic_system(spec, eq4_init(spec, 6.0), (6.0, 30.0), 1e-10, 1e-12)
    ref = np.column_stack(trajectory_state(spec, cur.params, order=0))
    assert np.linalg.norm(cur.points - ref, axis=1).max() < 1e-8


def test_vertical_equation_gamma_one():
    # gamma = 1: dz/dt = -z**2 exactly, i.e. 1/z advances at unit rate
    spec = TrajectoryFamilySpec(alpha=0.5, gamma=1.0, t0=6.0)
    cur = integrate_cubic_system(spec, eq4_init(spec, 6.0), (6.0, 40.0), 1e-10, 1e-12)
    z = cur.points[:, 2]
    t = cur.params
    assert np.allclose(np.diff(1.0 / z) / np.diff(t), 1.0, atol=1e-9)
    mid_z = 0.5 * (z[1:] + z[:-1])
    zdot = np.diff(z) / np.diff(t)
    assert np.abs(zdot / mid_z**2 + 1.0).max() < 1e-3


def test_tolerance_and_domain_validation():
    spec = TrajectoryFamilySpec(alpha=0.5, gamma=1.0, t0=6.0)
    init = eq4_init(spec, 6.0)
    with pytest.raises(ValidationError, match="tolerances"):
        integrate_cubic_system(spec, init, (6.0, 20.0), 1e-2, 1e-12)
    with pytest.raises(ValidationError, match="z0"):
        integrate_cubic_system(spec, (0.1, 0.0, 0.5), (6.0, 20.0), 1e-9, 1e-12)
    with pytest.raises(ValidationError, match="increasing"):
        integrate_cubic_system(spec, init, (20.0, 6.0), 1e-9, 1e-12)


def test_normal_form_backward_radial_decay():
    # backward time on the invariant plane z = 0: r(t) ~ |t|**-1/2
    nf = NormalFormSpec(l=1, a=(0.0,), b=(-1.0,))
    cur = integrate_normal_form(nf, (0.5, 0.0, 0.0), (0.0, -4000.0))
    r = np.linalg.norm(cur.points[:, :2], axis=1)
    t = np.abs(cur.params)
    m = t > 100
    slope = np.polyfit(np.log(t[m]), np.log(r[m]), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.02)


def test_normal_form_vertical_closed_form():
    # single b_2 = -1: z(t) = 1/(t + 1/z0)
    nf = NormalFormSpec(l=1, a=(0.0,), b=(-1.0,))
    cur = integrate_normal_form(nf, (0.5, 0.0, 0.2), (0.0, 50.0))
    z = cur.points[:, 2]
    assert np.abs(z - 1.0 / (cur.params + 5.0)).max() < 1e-10


def test_normal_form_forward_blowup_truncates():
    nf = NormalFormSpec(l=1, a=(0.0,), b=(-1.0,))
    cur = integrate_normal_form(nf, (0.5, 0.0, 0.1), (0.0, 10.0))
    assert "truncated_at_t" in cur.provenance
    assert cur.params[-1] < 10.0


def test_attracted_branch_surface_relation():
    # z ~ r**(2/(p-1)) along the branch, exact for the zero-constant start
    for p in (2, 4, 6):
        b = tuple(0.0 if i + 2 != p else -1.0 for i in range(p - 1))
        nf = NormalFormSpec(l=1, a=(0.0,), b=b)
        cur = gen_hopf_trajectory(nf, r_start=4.0, turns=500.0, chord_target=2e-3)
        r = np.linalg.norm(cur.points[:, :2], axis=1)
        z = cur.points[:, 2]
        slope = np.polyfit(np.log(r), np.log(z), 1)[0]
        assert slope == pytest.approx(2.0 / (p - 1), abs=0.05)


def test_attracted_branch_radial_exponent():
    nf = NormalFormSpec(l=1, a=(0.0,), b=(-1.0,))
    cur = gen_hopf_trajectory(nf, r_start=4.0, turns=800.0, chord_target=2e-3)
    r = np.linalg.norm(cur.points[:, :2], axis=1)
    phi = cur.params
    slope = np.polyfit(np.log(phi), np.log(r), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.02)


def test_attracted_branch_z0_matches_invariant():
    nf = NormalFormSpec(l=1, a=(0.0,), b=(0.0, 0.0, -2.0))  # p = 4, b_p = -2
    z0 = attracted_branch_z0(nf, 0.7)
    p, l = 4, 1
    c = (2.0 * l / ((p - 1) * 2.0)) ** (1.0 / (p - 1))
    assert z0 == pytest.approx(c * 0.7 ** (2.0 * l / (p - 1)), rel=1e-12)


def test_hopf_requires_limit_cycle_form():
    nf = NormalFormSpec(l=1, a=(0.5,), b=(-1.0,))
    with pytest.raises(ValidationError):
        gen_hopf_trajectory(nf, r_start=1.0, turns=100.0)
