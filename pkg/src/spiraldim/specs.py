"""Parameter records for every curve family the package can generate.

All records are frozen dataclasses validated at construction.  Invalid
parameters raise :class:`~spiraldim.errors.ValidationError` with a message
naming the violated condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ValidationError

_E = math.e


def _require(cond, message):
    if not cond:
        raise ValidationError(message)


def snapshot(spec) -> dict:
    """Flat dict of a spec's fields, suitable for provenance records."""
    out = {"type": type(spec).__name__}
    for f in fields(spec):
        out[f.name] = getattr(spec, f.name)
    return out


@dataclass(frozen=True)
class ChirpSpec:
    """Oscillation ``X(tau) = tau**alpha * trig(tau**-beta + phase_shift)``.

    The graph near ``tau = 0`` accumulates oscillations; it is the basic
    chirp object whose box dimension the estimators target.
    """

    alpha: float
    beta: float
    phase_shift: float = 0.0
    trig: str = "sin"

    def __post_init__(self):
        _require(self.alpha > 0, "ChirpSpec.alpha must be > 0")
        _require(self.beta > 0, "ChirpSpec.beta must be > 0")
        _require(self.trig in ("sin", "cos"), "ChirpSpec.trig must be 'sin' or 'cos'")

    @property
    def graph_dimension_prediction(self) -> float:
        """Closed-form box dimension of the graph, ``2-(alpha+1)/(beta+1)``.

        Valid as stated for ``0 < alpha < beta``; outside that range the
        graph is rectifiable and the dimension is 1.
        """
        if 0 < self.alpha < self.beta:
            return 2.0 - (self.alpha + 1.0) / (self.beta + 1.0)
        return 1.0


@dataclass(frozen=True)
class PowerSpiralSpec:
    """Polar curve ``r = phi**(-alpha) * log(phi)**log_exponent``."""

    alpha: float
    log_exponent: float = 0.0
    phi_min: float = 1.5
    mirror: bool = False

    def __post_init__(self):
        _require(self.alpha > 0, "PowerSpiralSpec.alpha must be > 0")
        _require(self.phi_min > 1.0, "PowerSpiralSpec.phi_min must be > 1 so log(phi) > 0")

    def radius(self, phi):
        phi = np.asarray(phi, dtype=float)
        r = phi ** (-self.alpha)
        if self.log_exponent != 0.0:
            r = r * np.log(phi) ** self.log_exponent
        return r

    def radius_derivative(self, phi):
        phi = np.asarray(phi, dtype=float)
        b = self.log_exponent
        core = phi ** (-self.alpha - 1.0)
        if b == 0.0:
            return -self.alpha * core
        lg = np.log(phi)
        return core * lg ** (b - 1.0) * (b - self.alpha * lg)

    @property
    def dimension_prediction(self) -> float:
        """Box dimension ``2/(1+alpha)`` for ``0 < alpha <= 1``, else 1."""
        if self.alpha <= 1.0:
            return 2.0 / (1.0 + self.alpha)
        return 1.0


def _default_family_t0(alpha: float, k: int, l: int) -> float:
    if k == 0 and l == 0:
        return 20.0
    if k == 0:
        return _E**2
    # With a log factor on the amplitude the sign/comparability of the
    # derivatives only stabilises once log t clears k/alpha and friends.
    bounds = [
        2.0,
        (4.0 / 3.0) * k / alpha,
        (4.0 / 3.0) * k * (2 * alpha + 1) / (alpha * (alpha + 1)),
        (4.0 / 3.0) * k * (3 * alpha**2 + 6 * alpha + 2) / (alpha * (alpha + 1) * (alpha + 2)),
        l / 3.0,
    ]
    return 1.15 * math.exp(max(bounds))


@dataclass(frozen=True)
class TrajectoryFamilySpec:
    """Parameters of the oscillator family with amplitude ``p`` and phase ``q``.

    ``p(t) = t**-alpha * log(t)**log_p_exponent`` decays toward zero while
    ``q(t) = K * t * log(t)**log_q_exponent`` winds; the solution
    ``x = C1*p*sin(q) + C2*p*cos(q)`` of the associated second-order
    equation produces the spiral/chirp geometry everything downstream
    analyses.  ``gamma`` controls the vertical coordinate ``z = t**-gamma``
    of the space trajectory, ``C3`` shifts the time labels.

    Construction checks numerically, over ``[t0, 100*t0]``, that the
    amplitude and phase keep the required signs and stay comparable to
    their leading power laws; ``t0`` must be large enough for that.
    """

    alpha: float
    gamma: float = 1.0
    K: float = 1.0
    log_p_exponent: int = 0
    log_q_exponent: int = 0
    C1: float = 1.0
    C2: float = 0.0
    C3: float = 0.0
    t0: float | None = None

    def __post_init__(self):
        _require(self.alpha > 0, "TrajectoryFamilySpec.alpha must be > 0")
        _require(self.gamma > 0, "TrajectoryFamilySpec.gamma must be > 0")
        _require(self.K > 0, "TrajectoryFamilySpec.K must be > 0")
        k, l = self.log_p_exponent, self.log_q_exponent
        _require(int(k) == k and k >= 0, "log_p_exponent must be an integer >= 0")
        _require(int(l) == l and l >= 0, "log_q_exponent must be an integer >= 0")
        object.__setattr__(self, "log_p_exponent", int(k))
        object.__setattr__(self, "log_q_exponent", int(l))
        _require(
            self.C1 != 0.0 or self.C2 != 0.0,
            "TrajectoryFamilySpec requires (C1, C2) != (0, 0)",
        )
        if self.t0 is None:
            object.__setattr__(
                self, "t0", _default_family_t0(self.alpha, self.log_p_exponent, self.log_q_exponent)
            )
        _require(self.t0 > _E, "TrajectoryFamilySpec.t0 must be > e")
        self._validate_comparability()

    # -- derived quantities ------------------------------------------------

    @property
    def delta(self) -> float:
        """Exponent of the z-equation, ``(gamma+1)/gamma > 1``."""
        return (self.gamma + 1.0) / self.gamma

    @property
    def amplitude(self) -> float:
        return math.hypot(self.C1, self.C2)

    @property
    def phase(self) -> float:
        return math.atan2(self.C2, self.C1)

    @property
    def z0(self) -> float:
        """Largest admissible z for the cubic-system integrator."""
        return self.t0 ** (-self.gamma)

    def _validate_comparability(self):
        from .families import pq_derivatives  # local import to avoid a cycle

        t = np.geomspace(self.t0 * (1 + 1e-9), self.t0 * 100.0, 128)
        lg = np.log(t)
        k, l = self.log_p_exponent, self.log_q_exponent
        p, q = pq_derivatives(
            t, self.alpha, k, self.K, l, order=3
        )
        lead_p = [
            t ** (-self.alpha) * lg**k,
            -self.alpha * t ** (-self.alpha - 1) * lg**k,
            self.alpha * (self.alpha + 1) * t ** (-self.alpha - 2) * lg**k,
        ]
        names = ["p", "p'", "p''"]
        for val, lead, name in zip(p[:3], lead_p, names):
            ratio = val / lead
            if not np.all((ratio > 0.25) & (ratio < 4.0)):
                raise ValidationError(
                    f"t0={self.t0:g} too small: {name} is not sign-stable/comparable to its "
                    f"leading power on [t0, 100*t0]; increase t0"
                )
        ratio_q1 = q[1] / (self.K * lg**l)
        if not np.all((ratio_q1 > 0.25) & (ratio_q1 < 4.0)):
            raise ValidationError(
                f"t0={self.t0:g} too small: q' is not comparable to K*log(t)**l on [t0, 100*t0]"
            )
        if l > 0 and not np.all(q[2] > 0):
            raise ValidationError(f"t0={self.t0:g} too small: q'' changes sign on [t0, 100*t0]")


@dataclass(frozen=True)
class NormalFormSpec:
    """Limit-cycle normal form in cylindrical coordinates.

    dr/dt   = r * (r**(2l) + sum_i a[i] * r**(2i)),   i = 0..l-1
    dphi/dt = omega
    dz/dt   = b[0]*z**2 + b[1]*z**3 + ... + b[n-2]*z**n

    ``p_index`` is the exponent of the first nonzero z-coefficient
    (``p_index = 2`` means ``b[0] != 0``).  If omitted it is computed.
    """

    l: int = 1
    a: tuple = (0.0,)
    b: tuple = (-1.0,)
    p_index: int | None = None
    omega: float = 1.0

    def __post_init__(self):
        _require(int(self.l) == self.l and self.l >= 1, "NormalFormSpec.l must be an integer >= 1")
        object.__setattr__(self, "l", int(self.l))
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        _require(len(self.a) == self.l, "NormalFormSpec.a must list a_0..a_{l-1}")
        _require(len(self.b) >= 1, "NormalFormSpec.b must list b_2..b_n")
        _require(self.omega > 0, "NormalFormSpec.omega must be > 0")
        nonzero = [i + 2 for i, v in enumerate(self.b) if v != 0.0]
        _require(nonzero, "NormalFormSpec.b must contain a nonzero coefficient")
        if self.p_index is None:
            object.__setattr__(self, "p_index", nonzero[0])
        _require(
            self.p_index == nonzero[0],
            f"NormalFormSpec.p_index={self.p_index} does not match first nonzero b (index {nonzero[0]})",
        )

    @property
    def b_p(self) -> float:
        return self.b[self.p_index - 2]

    def radial_rate(self, r):
        r = np.asarray(r, dtype=float)
        s = r ** (2 * self.l)
        for i, ai in enumerate(self.a):
            if ai != 0.0:
                s = s + ai * r ** (2 * i)
        return r * s

    def vertical_rate(self, z):
        z = np.asarray(z, dtype=float)
        out = np.zeros_like(z)
        for i, bi in enumerate(self.b):
            if bi != 0.0:
                out = out + bi * z ** (i + 2)
        return out

    def require_limit_cycle_form(self):
        """Check the configuration used by the bifurcation-moment analysis."""
        _require(self.a[0] == 0.0, "limit-cycle runs need a_0 = 0 (bifurcation moment)")
        _require(self.b_p < 0.0, "limit-cycle runs need the first nonzero b coefficient < 0")

    def dimension_prediction(self) -> float:
        """Box dimension of the attracted-branch trajectory near the origin.

        ``4l/(2l+1)`` while the supporting surface is Lipschitz
        (``p <= 2l+1``), else ``((4l-1)p - 2l + 1) / (2lp)``.
        """
        p, l = self.p_index, self.l
        if p <= 2 * l + 1:
            return 4.0 * l / (2.0 * l + 1.0)
        return ((4 * l - 1) * p - 2 * l + 1) / (2.0 * l * p)


@dataclass(frozen=True)
class SurfaceSpec:
    """Rotationally symmetric surface ``z = coefficient * r**beta``.

    ``derivative_bound`` dominates ``|g'(r)| = coefficient*beta*r**(beta-1)``
    on the working range, i.e. ``coefficient*beta <= derivative_bound``.
    """

    beta: float
    coefficient: float = 1.0
    derivative_bound: float | None = None

    def __post_init__(self):
        _require(self.beta > 0, "SurfaceSpec.beta must be > 0")
        _require(self.coefficient > 0, "SurfaceSpec.coefficient must be > 0")
        if self.derivative_bound is None:
            object.__setattr__(self, "derivative_bound", self.coefficient * self.beta)
        _require(
            self.coefficient * self.beta <= self.derivative_bound * (1 + 1e-12),
            "SurfaceSpec.derivative_bound must dominate coefficient*beta",
        )

    def height(self, r):
        return self.coefficient * np.asarray(r, dtype=float) ** self.beta
