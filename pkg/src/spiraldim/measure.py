"""Epsilon-neighborhood measure profiles and Minkowski-content diagnostics.

The measure |A_eps| is computed by rasterizing the sample points on a fine
grid, taking a Euclidean distance transform, and summing the measure of
cells within eps of the set.  The relative discretization error is
O(raster_cell/eps) and is recorded on the profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boxcount import ScaleLadder
from .curve import Curve
from .errors import MemoryBudgetError, ValidationError

try:  # pragma: no cover - import guard
    import cv2

    _HAVE_CV2 = True
except Exception:  # pragma: no cover
    _HAVE_CV2 = False

_UNIT_BALL = {2: math.pi, 3: 4.0 * math.pi / 3.0}


@dataclass(frozen=True)
class MeasureProfile:
    """Per-scale epsilon-neighborhood measures along a ladder."""

    ladder: ScaleLadder
    measures: np.ndarray
    raster_cell: float
    ambient: int

    def __post_init__(self):
        m = np.ascontiguousarray(self.measures, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "measures", m)
        if len(m) != self.ladder.count:
            raise ValidationError("measures length must match the ladder")
        if self.ambient not in (2, 3):
            raise ValidationError("ambient must be 2 or 3")
        if np.any(m <= 0):
            raise ValidationError("every |A_eps| must be positive")
        if np.any(np.diff(m) > 1e-12):
            raise ValidationError("measures must be nonincreasing as eps decreases")
        ball = _UNIT_BALL[self.ambient] * self.ladder.epsilons**self.ambient
        if np.any(m < 0.5 * ball):
            raise ValidationError("|A_eps| fell below half an eps-ball; raster too coarse")

    @property
    def error_bounds(self) -> np.ndarray:
        """Relative discretization error bound, about 3*raster_cell/eps per scale."""
        return 3.0 * self.raster_cell / self.ladder.epsilons

    def to_csv(self, path) -> None:
        data = np.column_stack([self.ladder.epsilons, self.measures])
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header="epsilon,measure", comments="")


def _distance_field(occupied: np.ndarray, raster_cell: float) -> np.ndarray:
    """Distance (in physical units) from every cell to the nearest occupied cell."""
    if occupied.ndim == 2 and _HAVE_CV2:
        src = np.where(occupied, 0, 255).astype(np.uint8)
        dist = cv2.distanceTransform(src, cv2.DIST_L2, cv2.DIST_MASK_PRECISE)
        return dist * raster_cell
    from scipy import ndimage

    return ndimage.distance_transform_edt(~occupied, sampling=raster_cell)


def epsilon_measure(
    curve: Curve,
    ladder: ScaleLadder,
    raster_cell: float,
    memory_budget_bytes: float = 8e8,
) -> MeasureProfile:
    """|A_eps| for every ladder scale, by rasterize-and-dilate.

    Requires ``raster_cell <= eps_min / 8``.  Refuses rasters whose grid
    would exceed the memory budget, suggesting a coarser cell.
    """
    if raster_cell > ladder.eps_min / 8.0 * (1 + 1e-12):
        raise ValidationError(
            f"raster_cell {raster_cell:g} too coarse: must be <= eps_min/8 = {ladder.eps_min / 8:g}"
        )
    pts = curve.points
    pad = ladder.eps_max + 2 * raster_cell
    lo = pts.min(axis=0) - pad
    hi = pts.max(axis=0) + pad
    shape = tuple(int(math.ceil((h - l) / raster_cell)) + 1 for l, h in zip(lo, hi))
    cells = float(np.prod([float(s) for s in shape]))
    bytes_needed = cells * 5.0  # uint8 source grid + float32 distance field
    if bytes_needed > memory_budget_bytes:
        suggested = raster_cell * math.sqrt(bytes_needed / memory_budget_bytes) * 1.05
        raise MemoryBudgetError(
            f"raster grid {shape} needs about {bytes_needed / 1e6:.0f} MB "
            f"(budget {memory_budget_bytes / 1e6:.0f} MB); use raster_cell >= {suggested:g}",
            suggested_raster_cell=suggested,
        )
    idx = np.floor((pts - lo) / raster_cell).astype(np.int64)
    occupied = np.zeros(shape, dtype=bool)
    occupied[tuple(idx.T)] = True
    dist = _distance_field(occupied, raster_cell)
    cell_measure = raster_cell**curve.ambient
    measures = [float(np.count_nonzero(dist < eps) * cell_measure) for eps in ladder.epsilons]
    return MeasureProfile(
        ladder=ladder,
        measures=np.array(measures),
        raster_cell=raster_cell,
        ambient=curve.ambient,
    )


@dataclass(frozen=True)
class ContentVerdict:
    """Degeneracy verdict for a content-quotient profile.

    ``nondegenerate``    quotient max/min stays within ``ratio_threshold``
    ``degenerate-drift`` quotient drifts monotonically beyond the threshold
    ``irregular``        large but non-monotone variation
    """

    label: str
    ratio: float
    monotone: bool
    drift_sign: int
    ratio_threshold: float
    monotone_tolerance: float


def content_profile(profile: MeasureProfile, s: float, ratio_threshold: float = 4.0):
    """Content quotients ``|A_eps| / eps**(N-s)`` per scale, plus a verdict.

    The quotient sequence discretizes the s-dimensional Minkowski content;
    a bounded quotient across the window indicates nondegeneracy at s, a
    monotone drift beyond ``ratio_threshold`` indicates a degenerate
    content.  Thresholds are recorded in the verdict.
    """
    if not 0 < s < profile.ambient:
        raise ValidationError(f"content exponent s must be in (0, {profile.ambient})")
    eps = profile.ladder.epsilons
    quotients = profile.measures / eps ** (profile.ambient - s)
    ratio = float(quotients.max() / quotients.min())
    logq = np.log(quotients)
    steps = np.diff(logq)  # ordered toward decreasing eps
    total = float(logq[-1] - logq[0])
    monotone_tol = 0.05
    if total == 0.0:
        monotone = bool(np.all(steps == 0.0))
    else:
        counter = float(np.abs(steps[np.sign(steps) == -np.sign(total)]).sum())
        monotone = counter <= monotone_tol * abs(total)
    if ratio <= ratio_threshold:
        label = "nondegenerate"
    elif monotone:
        label = "degenerate-drift"
    else:
        label = "irregular"
    verdict = ContentVerdict(
        label=label,
        ratio=ratio,
        monotone=monotone,
        drift_sign=int(np.sign(total)),
        ratio_threshold=ratio_threshold,
        monotone_tolerance=monotone_tol,
    )
    return list(zip(eps.tolist(), quotients.tolist())), verdict
