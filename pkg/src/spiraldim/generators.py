"""Adaptive sampling of the closed-form curve families.

Sampling is adaptive in the oscillation phase: each turn receives at least
``samples_per_turn`` points and, when a chord target is given, enough extra
points that no consecutive chord exceeds it.  Uniform-in-parameter grids
under-resolve the accumulation region of chirps and spirals, which is why
everything here is phase-first.
"""

from __future__ import annotations

import math

import numpy as np

from .curve import Curve
from .errors import BudgetError, PartialCurveError, ValidationError
from .families import chirp_phase_state, chirp_value, pq_derivatives, trajectory_state
from .specs import ChirpSpec, PowerSpiralSpec, TrajectoryFamilySpec, snapshot

TWO_PI = 2.0 * math.pi


def _ragged_grid(starts, widths, counts):
    """Concatenation of ``counts[i]`` left-closed uniform steps per segment.

    Appends the final right endpoint, so consecutive segments share no
    duplicate nodes and the overall grid is strictly monotone.
    """
    starts = np.asarray(starts, dtype=float)
    widths = np.asarray(widths, dtype=float)
    counts = np.asarray(counts, dtype=np.int64)
    offsets = np.cumsum(counts) - counts
    seg = np.repeat(np.arange(len(counts)), counts)
    intra = np.arange(counts.sum(), dtype=np.int64) - offsets[seg]
    vals = starts[seg] + widths[seg] * (intra / counts[seg])
    return np.append(vals, starts[-1] + widths[-1])


def _refine_chords(params, point_fn, chord_target, rounds=16):
    """Insert parameter midpoints until every chord is below the target."""
    pts = point_fn(params)
    for _ in range(rounds):
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        bad = np.flatnonzero(seg > chord_target)
        if bad.size == 0:
            break
        mids = 0.5 * (params[bad] + params[bad + 1])
        params = np.sort(np.concatenate([params, mids]))
        pts = point_fn(params)
    return params, pts


def _max_chord(pts) -> float:
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).max())


def _cap_budget(params, pts, budget, keep="head"):
    """Hard sample-count cap; drops the far end of the accumulation."""
    if len(params) <= budget:
        return params, pts, False
    if keep == "head":
        return params[:budget], pts[:budget], True
    return params[-budget:], pts[-budget:], True


def gen_chirp_graph(spec: ChirpSpec, tau_max: float, budget: int, chord_target=None) -> Curve:
    """Graph of the chirp on ``(0, tau_max]``, densest near the origin.

    Works through the oscillations from ``tau_max`` downward and stops at
    the smallest tau the sample budget can resolve; each full oscillation
    gets at least 32 points.  Refuses budgets too small for one full
    oscillation.
    """
    if not 0 < tau_max <= 1.0:
        raise ValidationError("gen_chirp_graph requires 0 < tau_max <= 1")
    if budget < 1000:
        raise ValidationError("gen_chirp_graph requires budget >= 1000")

    # Work in w = tau**-beta; the trig argument is w + phase_shift, so
    # half-period boundaries sit at w = k*pi - phase_shift.
    w_start = tau_max**-spec.beta
    n_half_cap = budget // 8 + 4
    k0 = math.ceil((w_start + spec.phase_shift) / math.pi + 1e-12)
    w_edges = (k0 + np.arange(n_half_cap, dtype=float)) * math.pi - spec.phase_shift
    tau_edges = w_edges ** (-1.0 / spec.beta)
    amp = tau_edges[:-1] ** spec.alpha
    widths = np.diff(w_edges)
    travel = 2.0 * amp + (tau_edges[:-1] - tau_edges[1:])
    if chord_target is None:
        counts = np.full(len(widths), 16, dtype=np.int64)
    else:
        counts = np.maximum(16, np.ceil(1.3 * travel / chord_target)).astype(np.int64)

    need_first = int(counts[:2].sum()) + max(4, int((w_edges[0] - w_start) / (math.pi / 16))) + 1
    if budget < need_first:
        raise BudgetError(
            f"budget {budget} cannot resolve one full oscillation; need at least {need_first}",
            required_minimum=need_first,
        )
    cum = np.cumsum(counts)
    n_half = max(2, int(np.searchsorted(cum, budget - need_first, side="right")))
    n_half = min(n_half, len(widths))

    w = _ragged_grid(w_edges[:n_half], widths[:n_half], counts[:n_half])
    if w_edges[0] - w_start > 1e-12 * max(1.0, w_start):
        dw = w_edges[0] - w_start
        head_n = max(4, int(np.ceil(dw / (math.pi / 16))))
        if chord_target is not None:
            tau_head_end = w_edges[0] ** (-1.0 / spec.beta)
            head_travel = (tau_max - tau_head_end) + 2.0 * tau_max**spec.alpha * dw / math.pi
            head_n = max(head_n, int(np.ceil(1.3 * head_travel / chord_target)))
        head = np.linspace(w_start, w_edges[0], head_n, endpoint=False)
        w = np.concatenate([head, w])

    def point_fn(w_vals):
        tau = w_vals ** (-1.0 / spec.beta)
        return np.column_stack([tau, chirp_value(spec, tau)])

    if chord_target is not None:
        w, pts = _refine_chords(w, point_fn, chord_target)
    else:
        pts = point_fn(w)
    w, pts, capped = _cap_budget(w, pts, budget, keep="head")

    pts = pts[::-1]  # ascending tau
    prov = {"generator": "chirp_graph", **snapshot(spec), "tau_max": tau_max, "budget": budget}
    if capped:
        prov["truncated_at_tau"] = float(pts[0, 0])
    if chord_target is not None:
        prov["chord_target"] = chord_target
    return Curve(params=pts[:, 0].copy(), points=pts, max_chord=_max_chord(pts), provenance=prov)


def _spiral_phi_max(spec: PowerSpiralSpec, r_min: float) -> float:
    """Smallest phi past the radius peak with r(phi) <= r_min."""
    lo = spec.phi_min
    if spec.log_exponent > 0:
        lo = max(lo, math.exp(spec.log_exponent / spec.alpha))
    hi = lo * 2.0
    for _ in range(200):
        if spec.radius(hi) <= r_min:
            break
        hi *= 2.0
    else:
        raise ValidationError(f"radius {r_min:g} not reached for any representable phi")
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if spec.radius(mid) <= r_min:
            hi = mid
        else:
            lo = mid
        if hi / lo < 1 + 1e-12:
            break
    return hi


def gen_power_spiral(
    spec: PowerSpiralSpec,
    r_min: float,
    budget: int,
    chord_target=None,
    samples_per_turn: int = 32,
) -> Curve:
    """Polar spiral sampled with bounded chords until the radius drops to r_min."""
    r_start = float(spec.radius(spec.phi_min))
    if not 0 < r_min < r_start:
        raise ValidationError("gen_power_spiral requires 0 < r_min < r(phi_min)")
    phi_max = _spiral_phi_max(spec, r_min)

    n_turns_needed = (phi_max - spec.phi_min) / TWO_PI
    if n_turns_needed * samples_per_turn > 4.0 * budget:
        reached_phi = spec.phi_min + TWO_PI * budget / samples_per_turn
        raise PartialCurveError(
            f"budget {budget} exhausted near radius {float(spec.radius(reached_phi)):.6g} "
            f"before reaching r_min={r_min:g} ({n_turns_needed:.3g} turns needed)",
            reached_radius=float(spec.radius(reached_phi)),
        )
    n_turns = int(np.ceil(n_turns_needed))
    edges = spec.phi_min + TWO_PI * np.arange(n_turns + 1)
    edges[-1] = phi_max
    if len(edges) >= 3 and edges[-1] - edges[-2] < 1e-9:
        edges = edges[:-1]
    widths = np.diff(edges)
    r_edge = spec.radius(edges[:-1])
    speed = np.sqrt(r_edge**2 + spec.radius_derivative(edges[:-1]) ** 2)
    counts = np.full(len(widths), samples_per_turn, dtype=np.int64)
    if chord_target is not None:
        counts = np.maximum(counts, np.ceil(1.2 * widths * speed / chord_target).astype(np.int64))
    total = counts.sum() + 1
    if total > budget:
        n_ok = int(np.searchsorted(np.cumsum(counts), budget - 1, side="right"))
        reached_radius = float(spec.radius(edges[max(n_ok, 1)]))
        raise PartialCurveError(
            f"budget {budget} exhausted at radius {reached_radius:.6g} before reaching "
            f"r_min={r_min:g} (need about {int(total)} samples)",
            reached_radius=reached_radius,
        )

    phi = _ragged_grid(edges[:-1], widths, counts)

    def point_fn(phi_vals):
        r = spec.radius(phi_vals)
        y = r * np.sin(phi_vals)
        if spec.mirror:
            y = -y
        return np.column_stack([r * np.cos(phi_vals), y])

    if chord_target is not None:
        phi, pts = _refine_chords(phi, point_fn, chord_target)
    else:
        pts = point_fn(phi)

    prov = {"generator": "power_spiral", **snapshot(spec), "r_min": r_min, "budget": budget}
    if chord_target is not None:
        prov["chord_target"] = chord_target
    return Curve(params=phi, points=pts, max_chord=_max_chord(pts), provenance=prov)


def _phase_turn_edges(spec: TrajectoryFamilySpec, s0: float, s1: float):
    """Family times where the oscillation phase q crosses multiples of 2*pi."""
    l = spec.log_q_exponent
    if l == 0:
        step = TWO_PI / spec.K
        n = int(np.floor((s1 - s0) / step))
        edges = s0 + step * np.arange(n + 1)
    else:
        ref = np.geomspace(s0, s1, 4096)
        qv = spec.K * ref * np.log(ref) ** l
        targets = np.arange(np.ceil(qv[0] / TWO_PI), np.floor(qv[-1] / TWO_PI) + 1) * TWO_PI
        inner = np.interp(targets, qv, ref)
        edges = np.concatenate([[s0], inner[(inner > s0 * (1 + 1e-12)) & (inner < s1)]])
    if edges[-1] < s1 - 1e-12 * s1:
        edges = np.append(edges, s1)
    return edges


def gen_phase_trajectory(
    spec: TrajectoryFamilySpec,
    t_max: float,
    budget: int,
    chord_target=None,
    samples_per_turn: int = 32,
) -> Curve:
    """Space trajectory ``(x, y, z) = (A p sin, d/dt(A p sin), t**-gamma)``.

    At least ``samples_per_turn`` samples per turn of the phase; truncates
    at the largest time the budget can resolve.
    """
    s_max = t_max - spec.C3
    if s_max <= spec.t0:
        raise ValidationError("gen_phase_trajectory requires t_max - C3 > t0")
    edges = _phase_turn_edges(spec, spec.t0, s_max)
    widths = np.diff(edges)
    counts = np.full(len(widths), samples_per_turn, dtype=np.int64)
    if chord_target is not None:
        (x, y, z), (xd, yd, zd) = trajectory_state(spec, edges[:-1], order=1)
        speed = np.sqrt(xd**2 + yd**2 + zd**2)
        # turn-start closed form slightly underestimates mid-turn peaks;
        # pad and let the refinement pass mop up.
        counts = np.maximum(counts, np.ceil(1.4 * widths * speed / chord_target).astype(np.int64))
    cum = np.cumsum(counts)
    truncated = None
    if cum[-1] + 1 > budget:
        n_keep = int(np.searchsorted(cum, budget - 1, side="right"))
        if n_keep < 2:
            need = int(cum[min(1, len(cum) - 1)]) + 1
            raise BudgetError(
                f"budget {budget} cannot resolve one full oscillation; need at least {need}",
                required_minimum=need,
            )
        truncated = float(edges[n_keep] + spec.C3)
        edges, widths, counts = edges[: n_keep + 1], widths[:n_keep], counts[:n_keep]

    s = _ragged_grid(edges[:-1], widths, counts)

    def point_fn(s_vals):
        x, y, z = trajectory_state(spec, s_vals, order=0)
        return np.column_stack([x, y, z])

    if chord_target is not None:
        s, pts = _refine_chords(s, point_fn, chord_target)
    else:
        pts = point_fn(s)
    s, pts, capped = _cap_budget(s, pts, budget, keep="head")
    if capped:
        truncated = float(s[-1] + spec.C3)

    prov = {"generator": "phase_trajectory", **snapshot(spec), "t_max": t_max, "budget": budget}
    if chord_target is not None:
        prov["chord_target"] = chord_target
    if truncated is not None:
        prov["truncated_at_t"] = truncated
    return Curve(params=s + spec.C3, points=pts, max_chord=_max_chord(pts), provenance=prov)


def gen_reflected_graph(
    spec: TrajectoryFamilySpec,
    t_max: float,
    budget: int,
    chord_target=None,
    samples_per_turn: int = 32,
) -> Curve:
    """Graph of the reflected solution ``X(tau) = x(1/tau)`` near tau = 0."""
    s_max = t_max - spec.C3
    if s_max <= spec.t0:
        raise ValidationError("gen_reflected_graph requires t_max - C3 > t0")
    edges = _phase_turn_edges(spec, spec.t0, s_max)
    widths = np.diff(edges)
    counts = np.full(len(widths), samples_per_turn, dtype=np.int64)
    if chord_target is not None:
        p, _ = pq_derivatives(
            edges[:-1], spec.alpha, spec.log_p_exponent, spec.K, spec.log_q_exponent, order=0
        )
        amp = spec.amplitude * p[0]
        counts = np.maximum(counts, np.ceil(4.0 * amp / chord_target).astype(np.int64))
    cum = np.cumsum(counts)
    if cum[-1] + 1 > budget:
        n_keep = max(2, int(np.searchsorted(cum, budget - 1, side="right")))
        edges, widths, counts = edges[: n_keep + 1], widths[:n_keep], counts[:n_keep]

    s = _ragged_grid(edges[:-1], widths, counts)

    def point_fn(s_vals):
        x, _, _ = trajectory_state(spec, s_vals, order=0)
        return np.column_stack([1.0 / s_vals, x])

    if chord_target is not None:
        s, pts = _refine_chords(s, point_fn, chord_target)
    else:
        pts = point_fn(s)
    pts = pts[::-1]  # ascending tau

    prov = {"generator": "reflected_graph", **snapshot(spec), "t_max": t_max, "budget": budget}
    if chord_target is not None:
        prov["chord_target"] = chord_target
    return Curve(params=pts[:, 0].copy(), points=pts, max_chord=_max_chord(pts), provenance=prov)


def gen_chirp_phase_curve(
    alpha: float,
    beta: float,
    t0: float,
    t_max: float,
    budget: int,
    chord_target=None,
    samples_per_turn: int = 64,
) -> Curve:
    """Planar phase curve ``(x, xdot)`` of ``x(t) = t**-alpha sin(t**beta)``.

    This is the phase pair of the chirp ``X(tau) = tau**alpha sin(tau**-beta)``
    under the reflection ``t = 1/tau``; depending on ``beta`` it spirals,
    waves, or escapes.
    """
    if t_max <= t0 or t0 <= 0:
        raise ValidationError("gen_chirp_phase_curve requires 0 < t0 < t_max")
    u0, u1 = t0**beta, t_max**beta
    n_turns = int(np.floor((u1 - u0) / TWO_PI))
    edges_u = u0 + TWO_PI * np.arange(n_turns + 1)
    if edges_u[-1] < u1 - 1e-12 * u1:
        edges_u = np.append(edges_u, u1)
    edges = edges_u ** (1.0 / beta)
    widths = np.diff(edges)
    counts = np.full(len(widths), samples_per_turn, dtype=np.int64)
    if chord_target is not None:
        x, xd, xdd = chirp_phase_state(alpha, beta, edges[:-1], order=1)
        speed = np.sqrt(xd**2 + xdd**2)
        counts = np.maximum(counts, np.ceil(1.4 * widths * speed / chord_target).astype(np.int64))
    cum = np.cumsum(counts)
    if cum[-1] + 1 > budget:
        n_keep = max(2, int(np.searchsorted(cum, budget - 1, side="right")))
        edges, widths, counts = edges[: n_keep + 1], widths[:n_keep], counts[:n_keep]

    t = _ragged_grid(edges[:-1], widths, counts)

    def point_fn(t_vals):
        x, xd = chirp_phase_state(alpha, beta, t_vals, order=0)
        return np.column_stack([x, xd])

    if chord_target is not None:
        t, pts = _refine_chords(t, point_fn, chord_target)
    else:
        pts = point_fn(t)
    t, pts, capped = _cap_budget(t, pts, budget, keep="head")

    prov = {
        "generator": "chirp_phase_curve",
        "alpha": alpha,
        "beta": beta,
        "t0": t0,
        "t_max": t_max,
        "budget": budget,
    }
    return Curve(params=t, points=pts, max_chord=_max_chord(pts), provenance=prov)
