"""Closed-form evaluation of the amplitude/phase family and derived objects.

Everything here is exact arithmetic on the closed forms; no finite
differences.  The module-level functions accept scalars or arrays and are
the single source of truth for ``p``, ``q``, the trajectory coordinates,
and the coefficient functions of the equivalent first-order system.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ValidationError
from .specs import ChirpSpec, TrajectoryFamilySpec


class FamilyValues(NamedTuple):
    """Values and derivatives of p and q, index j = j-th derivative."""

    p: tuple
    q: tuple


def pq_derivatives(t, alpha, k, K, l, order=0):
    """Exact derivatives of ``p = t**-a * log(t)**k`` and ``q = K t log(t)**l``.

    Returns two tuples of arrays, orders ``0..order`` (``order <= 3``).
    Log-factor derivatives are closed forms, valid for ``t > 1``.
    """
    if order < 0 or order > 3:
        raise ValidationError("derivative order must be in 0..3")
    t = np.asarray(t, dtype=float)
    lg = np.log(t)

    def Lp(m):
        return lg ** (k + m) if k + m >= 0 else lg ** float(k + m)

    a = alpha
    p_list = [t**-a * lg**k]
    if order >= 1:
        p_list.append(t ** (-a - 1) * Lp(-1) * (k - a * lg))
    if order >= 2:
        p_list.append(
            t ** (-a - 2) * Lp(-2) * (a * (a + 1) * lg**2 - k * (2 * a + 1) * lg + k * (k - 1))
        )
    if order >= 3:
        p_list.append(
            t ** (-a - 3)
            * Lp(-3)
            * (
                -a * (a + 1) * (a + 2) * lg**3
                + k * (3 * a**2 + 6 * a + 2) * lg**2
                - 3 * k * (k - 1) * (a + 1) * lg
                + k * (k - 1) * (k - 2)
            )
        )

    q_list = [K * t * lg**l]
    if order >= 1:
        q_list.append(K * lg ** (l - 1.0) * (lg + l) if l else K * np.ones_like(t))
    if order >= 2:
        q_list.append((K * l / t) * lg ** (l - 2.0) * (lg + l - 1) if l else np.zeros_like(t))
    if order >= 3:
        q_list.append(
            (K * l / t**2) * lg ** (l - 3.0) * ((l - 1) * (l - 2) - lg**2)
            if l
            else np.zeros_like(t)
        )
    return tuple(p_list), tuple(q_list)


def eval_family(spec: TrajectoryFamilySpec, t, derivative_order: int = 0) -> FamilyValues:
    """Evaluate p, q and their derivatives at ``t >= spec.t0``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < spec.t0 * (1 - 1e-12)):
        raise ValidationError(f"t={t} below the spec's start time t0={spec.t0:g}")
    p, q = pq_derivatives(
        t_arr, spec.alpha, spec.log_p_exponent, spec.K, spec.log_q_exponent, derivative_order
    )
    if np.isscalar(t) or np.ndim(t) == 0:
        p = tuple(float(v) for v in p)
        q = tuple(float(v) for v in q)
    return FamilyValues(p=p, q=q)


def trajectory_state(spec: TrajectoryFamilySpec, s, order: int = 1):
    """Coordinates of the space trajectory at family time ``s``.

    Returns ``(x, y, z)`` for ``order=0`` and additionally
    ``(xdot, ydot, zdot)`` for ``order=1``, where

        x = A p(s) sin(q(s) + theta)
        y = x' = A (p' sin + p q' cos)
        z = s**-gamma

    with ``A, theta`` the amplitude/phase form of ``(C1, C2)``.  No domain
    guard: callers are responsible for ``s > 1``.
    """
    s = np.asarray(s, dtype=float)
    need = 2 if order >= 1 else 1
    p, q = pq_derivatives(
        s, spec.alpha, spec.log_p_exponent, spec.K, spec.log_q_exponent, order=need
    )
    A, theta = spec.amplitude, spec.phase
    sin_q = np.sin(q[0] + theta)
    cos_q = np.cos(q[0] + theta)
    x = A * p[0] * sin_q
    y = A * (p[1] * sin_q + p[0] * q[1] * cos_q)
    z = s ** (-spec.gamma)
    if order == 0:
        return x, y, z
    ydot = A * (
        p[2] * sin_q
        + 2 * p[1] * q[1] * cos_q
        + p[0] * q[2] * cos_q
        - p[0] * q[1] ** 2 * sin_q
    )
    zdot = -spec.gamma * s ** (-spec.gamma - 1)
    return (x, y, z), (y, ydot, zdot)


def ode_coefficients_at_time(spec: TrajectoryFamilySpec, s):
    """Damping/stiffness coefficients of the first-order system at time s.

        U = q'^2 + 2 p'^2/p^2 - p''/p + p' q'' / (p q')
        V = 2 p'/p + q''/q'
    """
    s = np.asarray(s, dtype=float)
    p, q = pq_derivatives(
        s, spec.alpha, spec.log_p_exponent, spec.K, spec.log_q_exponent, order=2
    )
    U = q[1] ** 2 + 2 * p[1] ** 2 / p[0] ** 2 - p[2] / p[0] + p[1] * q[2] / (p[0] * q[1])
    V = 2 * p[1] / p[0] + q[2] / q[1]
    return U, V


def ode_coefficients_of_z(spec: TrajectoryFamilySpec, z):
    """U, V as functions of the vertical coordinate, via ``s = z**(-1/gamma)``."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise ValidationError("z must be positive")
    return ode_coefficients_at_time(spec, z ** (-1.0 / spec.gamma))


def chirp_value(spec: ChirpSpec, tau):
    """X(tau) = tau**alpha * trig(tau**-beta + phase_shift)."""
    tau = np.asarray(tau, dtype=float)
    trig = np.sin if spec.trig == "sin" else np.cos
    return tau**spec.alpha * trig(tau**-spec.beta + spec.phase_shift)


def chirp_phase(spec: ChirpSpec, tau):
    """The oscillation phase ``tau**-beta + phase_shift`` (radians)."""
    return np.asarray(tau, dtype=float) ** -spec.beta + spec.phase_shift


def reflected_value(spec: TrajectoryFamilySpec, tau):
    """Reflected solution ``X(tau) = x(1/tau)`` near the origin."""
    tau = np.asarray(tau, dtype=float)
    x, _, _ = trajectory_state(spec, 1.0 / tau, order=0)
    return x


def chirp_phase_state(alpha: float, beta: float, t, order: int = 1):
    """Solution/velocity pair of the power-frequency oscillation.

    ``x(t) = t**-alpha * sin(t**beta)`` is the reflected form of
    ``X(tau) = tau**alpha * sin(tau**-beta)``; the planar phase curve is
    ``(x, xdot)``.  Returns ``(x, xdot)`` and, for ``order >= 1``, also
    ``xddot`` for sampling control.
    """
    t = np.asarray(t, dtype=float)
    s = np.sin(t**beta)
    c = np.cos(t**beta)
    x = t**-alpha * s
    xdot = -alpha * t ** (-alpha - 1) * s + beta * t ** (beta - alpha - 1) * c
    if order == 0:
        return x, xdot
    xddot = (
        alpha * (alpha + 1) * t ** (-alpha - 2) - beta**2 * t ** (2 * beta - alpha - 2)
    ) * s + beta * (beta - 2 * alpha - 1) * t ** (beta - alpha - 2) * c
    return x, xdot, xddot
