"""Closed-form evaluation against independent finite-difference oracles."""

import math

import numpy as np
import pytest

from spiraldim.errors import ValidationError
from spiraldim.families import (
    chirp_phase_state,
    chirp_value,
    eval_family,
    ode_coefficients_at_time,
    ode_coefficients_of_z,
    pq_derivatives,
    reflected_value,
    trajectory_state,
)
from spiraldim.specs import ChirpSpec, TrajectoryFamilySpec


def central_diff(fn, t, h):
    return (fn(t + h) - fn(t - h)) / (2.0 * h)


def test_eval_family_power_values():
    spec = TrajectoryFamilySpec(alpha=0.5, gamma=1.0, K=1.0, t0=3.0)
    vals = eval_family(spec, 4.0, derivative_order=0)
    assert vals.p[0] == pytest.approx(0.5, abs=1e-15)
    assert vals.q[0] == pytest.approx(4.0, abs=1e-15)


def test_eval_family_first_derivative_alpha_one():
    spec = TrajectoryFamilySpec(alpha=1.0, gamma=1.0, t0=5.0)
    vals = eval_family(spec, 10.0, derivative_order=1)
    assert vals.p[1] == pytest.approx(-0.01, abs=1e-15)


def test_log_factor_derivative_matches_central_difference():
    # oracle: central difference of the closed-form p at t = e^2
    t = math.e**2

    def p(u):
        return u**-0.5 * math.log(u)

    exact = pq_derivatives(t, 0.5, 1, 1.0, 0, order=1)[0][1]
    approx = central_diff(p, t, 1e-5 * t)
    scale = max(abs(exact), abs(p(t) / t))
    assert abs(approx - exact) < 1e-8 * scale
    # the derivative genuinely vanishes there: k - alpha*log t = 0
    assert abs(exact) < 1e-15


@pytest.mark.parametrize("k,l", [(0, 0), (1, 0), (0, 1), (1, 1)])
def test_derivatives_match_oracle_at_many_points(k, l):
    alpha, K = 0.75, 2.0
    rng = np.random.default_rng(42)
    t = np.exp(rng.uniform(np.log(60.0), np.log(5000.0), size=100))
    p, q = pq_derivatives(t, alpha, k, K, l, order=3)

    def pf(u):
        return u**-alpha * np.log(u) ** k

    def qf(u):
        return K * u * np.log(u) ** l

    h = 1e-5 * t
    for j, (vals, fn) in enumerate([(p, pf), (q, qf)]):
        fd1 = (fn(t + h) - fn(t - h)) / (2 * h)
        rel = np.abs(fd1 - vals[1]) / np.maximum(np.abs(vals[1]), 1e-30)
        assert rel.max() < 1e-6
        fd2 = (fn(t + h) - 2 * fn(t) + fn(t - h)) / h**2
        denom = np.maximum(np.abs(vals[2]), np.abs(vals[0] / t**2))
        assert (np.abs(fd2 - vals[2]) / denom).max() < 1e-4


def test_comparability_is_exact_for_closed_forms():
    t = np.geomspace(25.0, 1e5, 50)
    p, q = pq_derivatives(t, 0.5, 0, 3.0, 0, order=0)
    assert np.allclose(p[0] * t**0.5, 1.0, rtol=1e-14)
    assert np.allclose(q[0] / (3.0 * t), 1.0, rtol=1e-14)
    p, q = pq_derivatives(t, 0.5, 2, 1.0, 1, order=0)
    assert np.allclose(p[0] / (t**-0.5 * np.log(t) ** 2), 1.0, rtol=1e-14)
    assert np.allclose(q[0] / (t * np.log(t)), 1.0, rtol=1e-14)


def test_eval_family_domain_guard():
    spec = TrajectoryFamilySpec(alpha=0.5, gamma=1.0, t0=20.0)
    with pytest.raises(ValidationError):
        eval_family(spec, 10.0)


def test_trajectory_state_at_special_angles():
    # x = p sin q vanishes at t = pi; y reduces to p' at t = pi/2
    x, y, z = trajectory_state(
        TrajectoryFamilySpec(alpha=0.5, gamma=1.0, t0=3.0), math.pi, order=0
    )
    assert abs(x) < 1e-15
    assert z == pytest.approx(1.0 / math.pi, rel=1e-15)
    # below the admissible t0 the closed forms still evaluate; use them raw
    from spiraldim.families import pq_derivatives as pq

    t = math.pi / 2
    p, q = pq(t, 0.5, 0, 1.0, 0, order=1)
    y_formula = p[1] * math.sin(q[0]) + p[0] * q[1] * math.cos(q[0])
    assert y_formula == pytest.approx(-(0.5) * (math.pi / 2) ** -1.5, rel=1e-14)


def test_trajectory_velocity_matches_central_difference():
    spec = TrajectoryFamilySpec(alpha=0.5, gamma=1.0, t0=6.0)
    rng = np.random.default_rng(7)
    t = rng.uniform(8.0, 500.0, size=60)
    (x, y, z), (xd, yd, zd) = trajectory_state(spec, t, order=1)
    h = 1e-6 * t
    for comp, dcomp in ((0, xd), (1, yd), (2, zd)):
        plus = np.column_stack(trajectory_state(spec, t + h, order=0))[:, comp]
        minus = np.column_stack(trajectory_state(spec, t - h, order=0))[:, comp]
        fd = (plus - minus) / (2 * h)
        rel = np.abs(fd - dcomp) / np.maximum(np.abs(dcomp), 1e-12)
        assert rel.max() < 1e-6


def test_ode_coefficients_special_case():
    # gamma=1, alpha=1/2, q=t: V = 2 p'/p = -1/t = -z (the q'' term vanishes)
    spec = TrajectoryFamilySpec(alpha=0.5, gamma=1.0, t0=5.0)
    z = np.array([0.05, 0.1, 0.2])
    U, V = ode_coefficients_of_z(spec, z)
    assert np.allclose(V, -z, rtol=1e-13)
    s = 1.0 / z
    U2, V2 = ode_coefficients_at_time(spec, s)
    assert np.allclose(U, U2) and np.allclose(V, V2)


def test_chirp_value_at_quarter_period():
    spec = ChirpSpec(alpha=0.5, beta=1.0)
    tau = 2.0 / math.pi
    assert abs(chirp_value(spec, tau) - tau**0.5) < 1e-12


def test_reflected_value_is_time_reflection():
    spec = TrajectoryFamilySpec(alpha=0.5, gamma=1.0, t0=6.0)
    tau = 1.0 / 50.0
    x, _, _ = trajectory_state(spec, 50.0, order=0)
    assert reflected_value(spec, tau) == pytest.approx(x, rel=1e-14)


def test_chirp_phase_state_derivative_oracle():
    rng = np.random.default_rng(3)
    t = rng.uniform(5.0, 200.0, size=50)
    x, xd, xdd = chirp_phase_state(0.5, 0.75, t, order=1)
    h = 1e-6 * t
    fd = (chirp_phase_state(0.5, 0.75, t + h, order=0)[0] - chirp_phase_state(0.5, 0.75, t - h, order=0)[0]) / (2 * h)
    assert (np.abs(fd - xd) / np.maximum(np.abs(xd), 1e-12)).max() < 1e-6
