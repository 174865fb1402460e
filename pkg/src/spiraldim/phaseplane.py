"""Planar phase-curve geometry.

Angle unwrapping, radial-profile diagnostics (wavy-spiral detection),
Poincare return sequences with exponent fits, rectifiability from arc-length
tails, surface lifting, projections, and the bi-Lipschitz ratio scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from .curve import Curve
from .errors import (
    InsufficientTurnsError,
    MixedSignError,
    NumericalError,
    UnderSampledError,
    ValidationError,
)
from .specs import SurfaceSpec

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PolarProfile:
    """Unwrapped angle/radius sequence of a planar curve around the origin."""

    phis: np.ndarray
    radii: np.ndarray
    source: Curve | None = None

    def __post_init__(self):
        phis = np.ascontiguousarray(self.phis, dtype=float)
        radii = np.ascontiguousarray(self.radii, dtype=float)
        phis.setflags(write=False)
        radii.setflags(write=False)
        object.__setattr__(self, "phis", phis)
        object.__setattr__(self, "radii", radii)
        if len(phis) != len(radii):
            raise ValidationError("phis and radii must have equal length")
        if np.any(radii <= 0):
            raise ValidationError("radii must be positive")
        steps = np.diff(phis)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValidationError("unwrapped angles must be monotone")
        if np.any(np.abs(steps) >= math.pi):
            raise UnderSampledError("angular step >= pi between consecutive samples")

    def __len__(self) -> int:
        return len(self.phis)

    @property
    def winding_sign(self) -> int:
        return 1 if self.phis[-1] >= self.phis[0] else -1

    @cached_property
    def winding(self) -> np.ndarray:
        """Angle measured from the first sample, increasing, in radians."""
        return (self.phis - self.phis[0]) * self.winding_sign

    @property
    def total_turns(self) -> float:
        return float(self.winding[-1] / TWO_PI)

    def points(self) -> np.ndarray:
        return np.column_stack(
            [self.radii * np.cos(self.phis), self.radii * np.sin(self.phis)]
        )

    def to_csv(self, path) -> None:
        data = np.column_stack([self.phis, self.radii])
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header="phi,r", comments="")


def unwrap_phase(curve: Curve) -> PolarProfile:
    """Continuous polar angle along a planar curve via atan2 plus unwrapping.

    Requires the curve to avoid the exact origin and consecutive samples to
    subtend angular steps below pi (the generators guarantee both).
    """
    if curve.ambient != 2:
        raise ValidationError("unwrap_phase needs a planar curve")
    x, y = curve.points[:, 0], curve.points[:, 1]
    radii = np.hypot(x, y)
    if np.any(radii == 0):
        raise ValidationError("curve passes through the exact origin")
    raw = np.arctan2(y, x)
    steps = np.diff(raw)
    steps = (steps + math.pi) % TWO_PI - math.pi
    if np.any(np.abs(steps) >= math.pi * (1 - 1e-12)):
        raise UnderSampledError("angular step >= pi between consecutive samples")
    phis = np.concatenate([[raw[0]], raw[0] + np.cumsum(steps)])
    return PolarProfile(phis=phis, radii=radii, source=curve)


@dataclass(frozen=True)
class WavyReport:
    """Radial-monotonicity diagnostics of a polar profile.

    ``violation_count`` counts the significant waves: maximal runs where
    the radius rises along the curve by more than ``relative_threshold``
    of the local radius.  A pure spiral has none; the wave families dip
    and rise by order one each turn.  ``turn_violation_count`` reports the
    stricter spiral-definition check (radius compared across turns at a
    dense grid of base angles), which every spiral, wavy or not, passes.
    """

    violation_count: int
    violation_intervals: tuple
    max_rise: float
    relative_threshold: float
    turn_violation_count: int
    max_turn_rise: float
    base_angles_per_turn: int

    def __post_init__(self):
        if self.violation_count != len(self.violation_intervals):
            raise ValidationError("violation_count must match the interval list")


def check_radially_decreasing(
    profile: PolarProfile,
    base_angles_per_turn: int = 512,
    relative_threshold: float = 0.05,
) -> WavyReport:
    """Detect waves (significant radial rises along the curve) and, separately,
    any failure of radial decrease across turns.

    The across-turn comparison evaluates r at every base angle of a dense
    per-turn grid and records increases from one turn to the next; the
    along-curve scan records every maximal rising run whose cumulative rise
    exceeds ``relative_threshold`` times the radius at the run start (the
    threshold suppresses the O(1/t**4)-relative wobble that even proper
    spirals of this family carry near the start time).
    """
    if profile.total_turns < 3:
        raise ValidationError("radial-decrease check needs at least 3 full turns")
    psi = profile.winding
    r = profile.radii
    sign = profile.winding_sign

    # along-curve waves
    up = np.diff(r) > 0
    intervals = []
    max_rise = 0.0
    if up.any():
        edges = np.flatnonzero(np.diff(np.concatenate([[0], up.view(np.int8), [0]])))
        starts, stops = edges[::2], edges[1::2]
        rises = r[stops] - r[starts]
        keep = rises > relative_threshold * r[starts]
        max_rise = float(rises.max())
        for a, b in zip(starts[keep], stops[keep]):
            intervals.append(
                (profile.phis[0] + sign * psi[a], profile.phis[0] + sign * psi[b])
            )

    # across-turn radial decrease (the spiral-definition requirement)
    n_turns = int(profile.total_turns)
    base = np.linspace(0.0, TWO_PI, base_angles_per_turn, endpoint=False)
    grid = base[None, :] + TWO_PI * np.arange(n_turns)[:, None]
    vals = np.interp(grid, psi, r)
    turn_rises = vals[1:] - vals[:-1]
    tol = 1e-12 * float(r.max())
    turn_bad = int((turn_rises > tol).sum())
    max_turn_rise = float(turn_rises.max()) if turn_rises.size else 0.0

    return WavyReport(
        violation_count=len(intervals),
        violation_intervals=tuple(intervals),
        max_rise=max_rise,
        relative_threshold=relative_threshold,
        turn_violation_count=turn_bad,
        max_turn_rise=max(max_turn_rise, 0.0),
        base_angles_per_turn=base_angles_per_turn,
    )


@dataclass(frozen=True)
class ReturnSequence:
    """Section-crossing radii of a spiral, ordered toward the origin."""

    section_angle: float
    radii: np.ndarray
    interpolation_error: float
    violations: tuple = ()

    def __post_init__(self):
        radii = np.ascontiguousarray(self.radii, dtype=float)
        radii.setflags(write=False)
        object.__setattr__(self, "radii", radii)
        if len(radii) < 2:
            raise ValidationError("a return sequence needs at least 2 crossings")
        if np.any(radii <= 0):
            raise ValidationError("crossing radii must be positive")

    def __len__(self) -> int:
        return len(self.radii)

    def differences(self) -> np.ndarray:
        """d(r_n) = r_{n+1} - r_n; negative for contracting spirals."""
        return np.diff(self.radii)

    def to_csv(self, path) -> None:
        d = np.append(self.differences(), np.nan)
        data = np.column_stack([np.arange(len(self.radii), dtype=float), self.radii, d])
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header="n,r,d", comments="")


def poincare_sequence(profile: PolarProfile, section_angle: float = 0.0) -> ReturnSequence:
    """Crossing radii of the ray at ``section_angle`` through the origin.

    Crossings are located on the unwrapped angle and refined by monotone
    cubic interpolation of r against the winding angle; the stored
    interpolation error bound is the largest local fourth difference of r
    near any crossing.
    """
    psi = profile.winding
    r = profile.radii
    sign = profile.winding_sign
    first = ((section_angle - profile.phis[0]) * sign) % TWO_PI
    n_cross = int(np.floor((psi[-1] - first) / TWO_PI)) + 1 if psi[-1] >= first else 0
    if n_cross < 10:
        raise InsufficientTurnsError(
            f"only {max(n_cross, 0)} section crossings; need at least 10"
        )
    targets = first + TWO_PI * np.arange(n_cross)
    interp = PchipInterpolator(psi, r, extrapolate=False)
    radii = interp(targets)
    if np.any(~np.isfinite(radii)):
        keep = np.isfinite(radii)
        targets, radii = targets[keep], radii[keep]

    idx = np.searchsorted(psi, targets)
    err = 0.0
    for i in idx:
        j = min(max(i - 2, 0), len(r) - 5)
        window = r[j : j + 5]
        if len(window) == 5:
            err = max(err, abs(float(np.diff(window, n=4)[0])))
    violations = tuple(int(i) for i in np.flatnonzero(np.diff(radii) >= 0))
    return ReturnSequence(
        section_angle=section_angle,
        radii=radii,
        interpolation_error=err,
        violations=violations,
    )


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares power-law exponent with a 2-standard-error band."""

    value: float
    band: float
    n_points: int
    max_residual: float


def _power_fit(x: np.ndarray, y: np.ndarray) -> ExponentFit:
    lx, ly = np.log(x), np.log(y)
    n = len(lx)
    xm, ym = lx.mean(), ly.mean()
    sxx = float(((lx - xm) ** 2).sum())
    slope = float(((lx - xm) * (ly - ym)).sum() / sxx)
    resid = ly - (ym + slope * (lx - xm))
    stderr = math.sqrt(float((resid**2).sum()) / max(n - 2, 1) / sxx)
    return ExponentFit(
        value=slope,
        band=max(2.0 * stderr, 1e-9),
        n_points=n,
        max_residual=float(np.abs(resid).max()),
    )


def fit_return_exponent(seq: ReturnSequence) -> ExponentFit:
    """Exponent of -d(r) against r from the return sequence.

    Requires at least 10 strictly decreasing returns; a sign change in the
    differences (waves reaching the section) is an error, never silently
    filtered.
    """
    if len(seq) < 10:
        raise InsufficientTurnsError(f"need >= 10 returns, got {len(seq)}")
    d = seq.differences()
    if np.any(d >= 0):
        raise MixedSignError(
            f"{int((d >= 0).sum())} return difference(s) are nonnegative "
            "(wavy interference at the section)"
        )
    return _power_fit(seq.radii[:-1], -d)


@dataclass(frozen=True)
class ArcLengthProfile:
    """Cumulative polyline length with a rectifiability verdict.

    ``verdict`` is ``rectifiable``, ``nonrectifiable``, or ``borderline``.
    For rectifiable curves ``tail_exponent`` is the decay rate eta of the
    remaining length (L_inf - L(T) ~ T**-eta) and ``total_length`` the
    extrapolated limit, stable to ``stability`` relative error.  For
    nonrectifiable curves ``tail_exponent`` is the growth exponent of L(T).
    """

    params: np.ndarray
    lengths: np.ndarray
    verdict: str
    tail_exponent: float | None
    total_length: float | None
    stability: float | None
    sampled_length: float


def arc_length_profile(curve: Curve, windows: int = 8) -> ArcLengthProfile:
    """Cumulative chordal length and a tail-based rectifiability verdict.

    The fit uses the last 30% of the parameter range split into geometric
    windows toward ``params[-1]`` (the accumulation end for every curve
    family here).  When the curve is not accumulating at all (remaining
    length tracks the distance to the endpoint), it is rectifiable with
    the sampled length taken exactly.
    """
    if len(curve) < 10**4:
        raise ValidationError("arc_length_profile needs at least 1e4 samples")
    if curve.breaks:
        raise ValidationError("arc_length_profile needs an unbroken curve")
    chords = np.linalg.norm(np.diff(curve.points, axis=0), axis=1)
    L = np.concatenate([[0.0], np.cumsum(chords)])
    T = curve.params
    total = float(L[-1])

    # Non-accumulating curves: remaining length approximately equals the
    # straight-line distance to the final point.
    probe = np.linspace(0.6, 0.95, 8)
    idxp = (probe * (len(T) - 1)).astype(int)
    rem = total - L[idxp]
    dist = np.linalg.norm(curve.points[idxp] - curve.points[-1], axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        straightness = np.where(rem > 0, dist / rem, 1.0)
    if float(straightness.min()) > 0.9:
        return ArcLengthProfile(
            params=T,
            lengths=L,
            verdict="rectifiable",
            tail_exponent=None,
            total_length=total,
            stability=0.0,
            sampled_length=total,
        )

    t_lo = T[-1] - 0.3 * (T[-1] - T[0])
    if t_lo <= 0 or T[-1] <= 0:
        ratio_grid = np.linspace(t_lo, T[-1], windows + 1)
    else:
        ratio_grid = t_lo * (T[-1] / t_lo) ** (np.arange(windows + 1) / windows)
    Lw = np.interp(ratio_grid, T, L)
    inc = np.diff(Lw)
    if np.any(inc <= 0):
        raise NumericalError("degenerate tail windows: zero length increments")
    rho = float(ratio_grid[1] / ratio_grid[0])
    qs = inc[1:] / inc[:-1]
    etas = -np.log(qs) / math.log(rho)
    eta = float(etas.mean())
    band = 2.0 * float(etas.std(ddof=1)) / math.sqrt(len(etas)) if len(etas) > 1 else 0.1

    if eta > max(band, 0.05):
        q = rho**-eta
        tail = float(inc[-1]) * q / (1.0 - q)

        def limit_from(sub):
            e = float(sub.mean())
            qq = rho**-e
            return float(Lw[-1] + inc[-1] * qq / (1.0 - qq)) if qq < 1 else float("inf")

        half = len(etas) // 2
        l1, l2 = limit_from(etas[:half]), limit_from(etas[half:])
        stability = abs(l1 - l2) / max(abs(l1), abs(l2))
        verdict = "rectifiable" if stability < 0.01 else "borderline"
        return ArcLengthProfile(
            params=T,
            lengths=L,
            verdict=verdict,
            tail_exponent=eta,
            total_length=total + tail,
            stability=float(stability),
            sampled_length=total,
        )
    if eta < -max(band, 0.05):
        growth = _power_fit(ratio_grid[1:], Lw[1:])
        return ArcLengthProfile(
            params=T,
            lengths=L,
            verdict="nonrectifiable",
            tail_exponent=growth.value,
            total_length=None,
            stability=None,
            sampled_length=total,
        )
    return ArcLengthProfile(
        params=T,
        lengths=L,
        verdict="borderline",
        tail_exponent=eta,
        total_length=None,
        stability=None,
        sampled_length=total,
    )


def lift_to_surface(profile: PolarProfile, surface: SurfaceSpec) -> Curve:
    """Append ``z = g(r)`` to every sample of the planar spiral."""
    pts2 = profile.points()
    z = surface.height(profile.radii)
    pts = np.column_stack([pts2, z])
    chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    prov = {"generator": "surface_lift", "beta": surface.beta, "coefficient": surface.coefficient}
    if profile.source is not None:
        prov["planar_source"] = profile.source.provenance.get("generator", "unknown")
    return Curve(
        params=profile.phis.copy(),
        points=pts,
        max_chord=float(chords.max()),
        provenance=prov,
    )


def project(curve: Curve, plane: str) -> Curve:
    """Coordinate-plane projection of a space curve (max_chord inherited)."""
    cols = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}.get(plane)
    if cols is None:
        raise ValidationError("plane must be one of xy, xz, yz")
    if curve.ambient != 3:
        raise ValidationError("projection needs a space curve")
    prov = dict(curve.provenance)
    prov["projection"] = plane
    return Curve(
        params=curve.params,
        points=curve.points[:, cols],
        max_chord=curve.max_chord,
        provenance=prov,
        breaks=curve.breaks,
    )


@dataclass(frozen=True)
class BiLipschitzReport:
    """Max |dz| / planar-distance ratios of sampled pairs, bucketed by depth."""

    max_ratio: float
    bucket_times: tuple
    bucket_ratios: tuple
    trend_slope: float
    verdict: str


def bilipschitz_ratio_scan(curve: Curve, pairs_budget: int = 20000) -> BiLipschitzReport:
    """Scan |dz| / planar-distance over pairs at near/mid/far angular separations.

    Pairs are stratified over geometric depth buckets; the trend of the
    per-bucket maxima as the pair depth grows distinguishes a bounded
    vertical-to-planar ratio (Lipschitz behaviour, ratio decaying) from an
    unbounded one.
    """
    if curve.ambient != 3:
        raise ValidationError("bilipschitz_ratio_scan needs a space curve")
    prof = unwrap_phase(project(curve, "xy"))
    psi = prof.winding
    pts = curve.points
    if prof.total_turns < 12:
        raise ValidationError("ratio scan needs at least 12 turns")

    n_buckets = 8
    t = curve.params
    # geometric depth buckets over the first 2/3 of the winding
    marks = np.geomspace(max(psi[1], TWO_PI), psi[-1] / 3.0, n_buckets)
    offsets = np.array([math.pi / 6, math.pi / 2, math.pi, TWO_PI + math.pi / 2,
                        4 * TWO_PI, 16 * TWO_PI])
    per_bucket = max(8, pairs_budget // (n_buckets * len(offsets) * 2))
    bucket_times, bucket_ratios = [], []
    for mark in marks:
        i0 = int(np.searchsorted(psi, mark))
        ii = np.unique(np.linspace(i0, min(i0 + 5000, len(psi) - 2), per_bucket).astype(int))
        best = 0.0
        for off in offsets:
            jj = np.searchsorted(psi, psi[ii] + off)
            ok = jj < len(psi)
            if not ok.any():
                continue
            a, b = ii[ok], jj[ok]
            planar = np.linalg.norm(pts[a, :2] - pts[b, :2], axis=1)
            dz = np.abs(pts[a, 2] - pts[b, 2])
            good = planar > 0
            if good.any():
                best = max(best, float((dz[good] / planar[good]).max()))
        # pairs spanning to the deep end
        jj = np.searchsorted(psi, (psi[ii] + psi[-1]) / 2.0)
        a, b = ii, np.minimum(jj, len(psi) - 1)
        planar = np.linalg.norm(pts[a, :2] - pts[b, :2], axis=1)
        dz = np.abs(pts[a, 2] - pts[b, 2])
        good = planar > 0
        if good.any():
            best = max(best, float((dz[good] / planar[good]).max()))
        bucket_times.append(float(t[i0]))
        bucket_ratios.append(best)

    bt = np.array(bucket_times)
    br = np.array(bucket_ratios)
    if np.all(br == 0.0):
        return BiLipschitzReport(0.0, tuple(bucket_times), tuple(bucket_ratios), 0.0, "degenerate-flat")
    slope = _power_fit(bt, np.maximum(br, 1e-300)).value
    verdict = "unbounded-growth" if slope > 0.05 else "bounded"
    return BiLipschitzReport(
        max_ratio=float(br.max()),
        bucket_times=tuple(bucket_times),
        bucket_ratios=tuple(bucket_ratios),
        trend_slope=slope,
        verdict=verdict,
    )


@dataclass(frozen=True)
class CurveRegime:
    """Classification of a chirp-generated phase curve."""

    label: str  # non-accumulating | wavy-spiral | spiral | inconclusive
    alpha: float
    beta: float
    inf_radius_trend: float
    sup_radius_trend: float
    violation_count: int


def classify_curve(curve: Curve, alpha: float, beta: float) -> CurveRegime:
    """Sort a phase curve into non-accumulating / wavy-spiral / spiral.

    Works on the per-turn radius envelope of the final turns: a curve whose
    per-turn extremal radii stop decreasing does not accumulate at the
    origin; an accumulating curve with radial-decrease violations is a wavy
    spiral; otherwise it is a spiral.
    """
    prof = unwrap_phase(curve)
    if prof.total_turns < 12:
        return CurveRegime("inconclusive", alpha, beta, 0.0, 0.0, -1)
    psi, r = prof.winding, prof.radii
    n_turns = int(prof.total_turns)
    lo = np.searchsorted(psi, TWO_PI * np.arange(n_turns))
    mins = np.minimum.reduceat(r, lo[:-1])
    maxs = np.maximum.reduceat(r, lo[:-1])
    take = min(10, len(mins) - 1)
    inf_tr = float(np.mean(np.diff(np.log(mins[-take:]))))
    sup_tr = float(np.mean(np.diff(np.log(maxs[-take:]))))
    if inf_tr >= -1e-9 or sup_tr >= -1e-9:
        return CurveRegime("non-accumulating", alpha, beta, inf_tr, sup_tr, -1)
    report = check_radially_decreasing(prof)
    label = "wavy-spiral" if report.violation_count > 0 else "spiral"
    return CurveRegime(label, alpha, beta, inf_tr, sup_tr, report.violation_count)


def envelope_exponent(curve: Curve, ordinate: int = 1, abscissa: int = 0) -> ExponentFit:
    """Exponent of the oscillation envelope |y| ~ x**a of a graph-like curve.

    Fits the local maxima of |ordinate| against the abscissa; used to check
    the amplitude comparability of chirp-like projections.
    """
    y = np.abs(curve.points[:, ordinate])
    x = np.abs(curve.points[:, abscissa])
    i = np.flatnonzero((y[1:-1] >= y[:-2]) & (y[1:-1] > y[2:]))+ 1
    if len(i) < 8:
        raise ValidationError("fewer than 8 envelope peaks")
    # one peak per oscillation: keep strict local maxima above the median
    keep = y[i] > np.median(y[i]) * 0.5
    i = i[keep]
    return _power_fit(x[i], y[i])
