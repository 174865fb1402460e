"""Error-controlled integration of the cubic system and the limit-cycle normal form.

The contract everywhere is the error bound, not a named scheme: embedded
adaptive Runge-Kutta (order 8 with dense output) with both relative and
absolute tolerances.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

from .curve import Curve
from .errors import NumericalError, StiffnessError, ValidationError
from .families import ode_coefficients_at_time, trajectory_state
from .generators import _phase_turn_edges, _ragged_grid, _refine_chords
from .specs import NormalFormSpec, TrajectoryFamilySpec, snapshot

TWO_PI = 2.0 * math.pi


def _check_tolerances(rel_tol, abs_tol):
    if not (0 < rel_tol <= 1e-3 and 0 < abs_tol <= 1e-3):
        raise ValidationError("tolerances must lie in (0, 1e-3]")


def _solve(rhs, span, y0, rel_tol, abs_tol, events=None):
    sol = solve_ivp(
        rhs,
        span,
        y0,
        method="DOP853",
        rtol=rel_tol,
        atol=abs_tol,
        dense_output=True,
        events=events,
    )
    if not sol.success and sol.status == -1:
        msg = sol.message or "integration failed"
        if "step size" in msg.lower() or "too small" in msg.lower():
            raise StiffnessError(f"step-size underflow: {msg}")
        raise NumericalError(msg)
    return sol


def integrate_cubic_system(
    spec: TrajectoryFamilySpec,
    init,
    t_range,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    chord_target=None,
    samples_per_turn: int = 32,
) -> Curve:
    """Integrate the first-order system equivalent to the oscillator equation.

    State (x, y, z) with x' = y, y' = -U(z) x + V(z) y, and the vertical
    coordinate handled through the substitution s = z**(-1/gamma), which
    advances at unit rate and keeps the vector field regular as z -> 0.
    Coefficients are evaluated through the closed forms at family time s.

    ``init`` is (x0, y0, z0) with z0 in (0, t0**-gamma]; integration runs
    forward over ``t_range = (ta, tb)``.
    """
    _check_tolerances(rel_tol, abs_tol)
    x0, y0, z0 = (float(v) for v in init)
    if not 0 < z0 <= spec.z0 * (1 + 1e-12):
        raise ValidationError(
            f"init z={z0:g} outside (0, z0] with z0 = t0**-gamma = {spec.z0:g}"
        )
    ta, tb = (float(v) for v in t_range)
    if tb <= ta:
        raise ValidationError("t_range must be increasing")
    s0 = z0 ** (-1.0 / spec.gamma)
    if not math.isfinite(s0):
        raise ValidationError(f"init z={z0:g} too small: family time overflows")

    def rhs(t, state):
        x, y = state
        s = s0 + (t - ta)
        U, V = ode_coefficients_at_time(spec, s)
        return (y, -U * x + V * y)

    sol = _solve(rhs, (ta, tb), (x0, y0), rel_tol, abs_tol)

    s_edges = _phase_turn_edges(spec, s0, s0 + (tb - ta))
    t_edges = s_edges - s0 + ta
    widths = np.diff(t_edges)
    counts = np.full(len(widths), samples_per_turn, dtype=np.int64)
    t_eval = _ragged_grid(t_edges[:-1], widths, counts)

    def point_fn(ts):
        xy = sol.sol(ts)
        s = s0 + (ts - ta)
        return np.column_stack([xy[0], xy[1], s ** (-spec.gamma)])

    if chord_target is not None:
        t_eval, pts = _refine_chords(t_eval, point_fn, chord_target)
    else:
        pts = point_fn(t_eval)

    chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    prov = {
        "generator": "integrate_cubic_system",
        **snapshot(spec),
        "rel_tol": rel_tol,
        "abs_tol": abs_tol,
        "init_x": x0,
        "init_y": y0,
        "init_z": z0,
    }
    return Curve(params=t_eval, points=pts, max_chord=float(chords.max()), provenance=prov)


def integrate_normal_form(
    spec: NormalFormSpec,
    init,
    t_range,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    chord_target=None,
    samples_per_turn: int = 32,
    r_floor: float = 1e-12,
    blowup_cap: float = 1e6,
) -> Curve:
    """Integrate the normal form in cylindrical coordinates, output Cartesian.

    ``t_range`` may decrease for backward-time runs.  If the radial or
    vertical coordinate escapes past ``blowup_cap`` (finite-time blow-up)
    or r collapses below ``r_floor``, the result is truncated there and
    flagged in the provenance.
    """
    _check_tolerances(rel_tol, abs_tol)
    r0, phi0, z0 = (float(v) for v in init)
    if r0 <= 0:
        raise ValidationError("init r must be positive")
    ta, tb = (float(v) for v in t_range)
    if tb == ta:
        raise ValidationError("empty t_range")

    def rhs(t, state):
        r, phi, z = state
        return (float(spec.radial_rate(r)), spec.omega, float(spec.vertical_rate(z)))

    def hit_floor(t, state):
        return state[0] - r_floor

    def hit_cap(t, state):
        return max(abs(state[0]), abs(state[2])) - blowup_cap

    hit_floor.terminal = True
    hit_cap.terminal = True
    sol = _solve(rhs, (ta, tb), (r0, phi0, z0), rel_tol, abs_tol, events=(hit_floor, hit_cap))
    t_end = float(sol.t[-1])
    truncated = sol.status == 1

    n = max(2, int(abs(t_end - ta) * spec.omega / TWO_PI * samples_per_turn))
    t_eval = np.linspace(ta, t_end, n + 1)

    def point_fn(ts):
        r, phi, z = sol.sol(ts)
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])

    if chord_target is not None:
        t_eval, pts = _refine_chords(t_eval, point_fn, chord_target)
    else:
        pts = point_fn(t_eval)

    chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    prov = {
        "generator": "integrate_normal_form",
        **snapshot(spec),
        "rel_tol": rel_tol,
        "abs_tol": abs_tol,
        "init_r": r0,
        "init_phi": phi0,
        "init_z": z0,
    }
    if truncated:
        prov["truncated_at_t"] = t_end
    if t_eval[0] > t_eval[-1]:
        t_eval, pts = t_eval[::-1], pts[::-1]
    return Curve(
        params=t_eval.copy(), points=pts, max_chord=float(chords.max()), provenance=prov
    )


def attracted_branch_z0(spec: NormalFormSpec, r0: float) -> float:
    """Height placing (r0, z0) exactly on the invariant power relation.

    For the pure bifurcation-moment form (a = 0, single b_p < 0) the
    quantity ``z**(1-p) - (p-1)|b_p|/(2l) * r**(-2l)`` is conserved along
    the attracted branch; the zero-constant trajectory is the exact power
    surface ``z = c * r**(2l/(p-1))``.
    """
    p, l = spec.p_index, spec.l
    c = (2.0 * l / ((p - 1) * abs(spec.b_p))) ** (1.0 / (p - 1))
    return c * r0 ** (2.0 * l / (p - 1))


def gen_hopf_trajectory(
    spec: NormalFormSpec,
    r_start: float,
    turns: float,
    z_start: float | None = None,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-13,
    chord_target=None,
    samples_per_turn: int = 32,
    trim_transient: bool = True,
) -> Curve:
    """Attracted-branch trajectory of the normal form, spiralling into the origin.

    The winding angle is the independent variable: with a_0 = 0 and the
    first nonzero vertical coefficient negative, the branch that reaches
    the origin has the radial equation traversed toward the focus
    (dr/dphi = -radial_rate/omega) while the vertical equation keeps its
    sign (dz/dphi = vertical_rate/omega); both coordinates then decay
    jointly and the trajectory lies on the surface z ~ r**(2l/(p-1)).

    The initial arc is discarded (``trim_transient``) once the local radial
    decay exponent settles within 1% of its limit -1/(2l).
    """
    spec.require_limit_cycle_form()
    if r_start <= 0:
        raise ValidationError("r_start must be positive")
    if z_start is None:
        z_start = attracted_branch_z0(spec, r_start)
    if z_start <= 0:
        raise ValidationError("z_start must be positive")
    _check_tolerances(rel_tol, abs_tol)
    phi_end = TWO_PI * float(turns)

    def rhs(phi, state):
        r, z = state
        return (
            -float(spec.radial_rate(r)) / spec.omega,
            float(spec.vertical_rate(z)) / spec.omega,
        )

    sol = _solve(rhs, (0.0, phi_end), (r_start, z_start), rel_tol, abs_tol)

    n = max(2, int(turns * samples_per_turn))
    phi_eval = np.linspace(0.0, phi_end, n + 1)

    def point_fn(phis):
        r, z = sol.sol(phis)
        return np.column_stack([r * np.cos(phis), r * np.sin(phis), z])

    if chord_target is not None:
        phi_eval, pts = _refine_chords(phi_eval, point_fn, chord_target)
    else:
        pts = point_fn(phi_eval)

    start = 0
    if trim_transient:
        r = np.linalg.norm(pts[:, :2], axis=1)
        rate = spec.radial_rate(r) / spec.omega
        local_exp = phi_eval * rate / r  # = -dlog r/dlog phi along the branch
        target = 1.0 / (2 * spec.l)
        settled = np.abs(local_exp / target - 1.0) <= 0.01
        idx = np.flatnonzero(settled)
        if idx.size == 0 or idx[0] > 0.5 * len(pts):
            raise NumericalError(
                "radial decay exponent did not settle within 1%; extend the turn count"
            )
        start = int(idx[0])

    pts = pts[start:]
    phi_eval = phi_eval[start:]
    chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    prov = {
        "generator": "hopf_attracted_branch",
        **snapshot(spec),
        "r_start": r_start,
        "z_start": z_start,
        "turns": turns,
        "rel_tol": rel_tol,
        "abs_tol": abs_tol,
        "transient_trimmed_to_phi": float(phi_eval[0]),
    }
    return Curve(
        params=phi_eval.copy(), points=pts, max_chord=float(chords.max()), provenance=prov
    )
