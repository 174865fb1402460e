"""Sampled-curve container and its serialization.

A :class:`Curve` is an ordered, chord-bounded polyline sample of a planar or
spatial parametric curve.  Instances are immutable; every transformation
returns a new curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError

_CHORD_SLACK = 1 + 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Curve:
    """Ordered finite sample of a parametric curve.

    params     strictly monotone parameter values, shape (N,)
    points     coordinates, shape (N, 2) or (N, 3)
    max_chord  upper bound on the Euclidean distance between consecutive
               samples (seam segments listed in ``breaks`` excluded)
    provenance generator identifier and spec snapshot
    breaks     indices i where the segment (i, i+1) is not part of the
               curve (produced by clipping)
    """

    params: np.ndarray
    points: np.ndarray
    max_chord: float
    provenance: dict = field(default_factory=dict)
    breaks: tuple = ()

    def __post_init__(self):
        params = _frozen(self.params).reshape(-1)
        points = _frozen(self.points)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "points", points)
        if points.ndim != 2 or points.shape[1] not in (2, 3):
            raise ValidationError("points must have shape (N, 2) or (N, 3)")
        if len(params) != len(points):
            raise ValidationError("params and points must have equal length")
        if len(params) < 2:
            raise ValidationError("a curve needs at least 2 samples")
        d = np.diff(params)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ValidationError("params must be strictly monotone")
        if self.max_chord <= 0:
            raise ValidationError("max_chord must be positive")
        chords = self.chords()
        if chords.size and chords.max() > self.max_chord * _CHORD_SLACK:
            raise ValidationError(
                f"consecutive chord {chords.max():.6g} exceeds max_chord {self.max_chord:.6g}"
            )

    # -- geometry ------------------------------------------------------------

    @property
    def ambient(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.params)

    def chords(self) -> np.ndarray:
        c = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        if self.breaks:
            c = np.delete(c, np.asarray(self.breaks, dtype=int))
        return c

    def length(self) -> float:
        """Total polyline length (seam segments excluded)."""
        return float(self.chords().sum())

    def extent(self) -> np.ndarray:
        return self.points.max(axis=0) - self.points.min(axis=0)

    def bbox_diameter(self) -> float:
        return float(np.linalg.norm(self.extent()))

    def radii(self) -> np.ndarray:
        """Distance of each sample from the origin."""
        return np.linalg.norm(self.points, axis=1)

    # -- transforms ----------------------------------------------------------

    def _with_points(self, points, note, max_chord=None, breaks=None):
        prov = dict(self.provenance)
        prov.setdefault("transforms", ())
        prov["transforms"] = prov["transforms"] + (note,)
        return Curve(
            params=self.params,
            points=points,
            max_chord=self.max_chord if max_chord is None else max_chord,
            provenance=prov,
            breaks=self.breaks if breaks is None else breaks,
        )

    def rescale(self, factor: float) -> "Curve":
        """Uniform rescale about the origin (bi-Lipschitz; dimension invariant)."""
        if factor <= 0:
            raise ValidationError("rescale factor must be positive")
        return self._with_points(
            self.points * factor, f"rescale:{factor:g}", max_chord=self.max_chord * factor
        )

    def normalize_axes(self) -> "Curve":
        """Scale each axis by its extent (origin fixed).

        A diagonal linear map is bi-Lipschitz, so box dimension is
        unchanged, while severely anisotropic graphs become counting
        friendly.
        """
        ext = self.extent()
        scales = np.where(ext > 0, ext, 1.0)
        pts = self.points / scales
        chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if self.breaks:
            chords = np.delete(chords, np.asarray(self.breaks, dtype=int))
        return self._with_points(
            pts, "normalize_axes", max_chord=float(chords.max()) if chords.size else self.max_chord
        )

    def clip_to_ball(self, rho: float, center=None) -> "Curve":
        """Restrict to samples within distance ``rho`` of ``center`` (origin).

        Keeps the original ordering; gaps between the retained arcs are
        recorded in ``breaks`` so the chord bound still refers to genuine
        curve segments only.
        """
        if rho <= 0:
            raise ValidationError("clip radius must be positive")
        pts = self.points if center is None else self.points - np.asarray(center, dtype=float)
        keep = np.linalg.norm(pts, axis=1) <= rho
        if keep.sum() < 2:
            raise ValidationError(f"clip to rho={rho:g} keeps fewer than 2 samples")
        idx = np.flatnonzero(keep)
        breaks = tuple(int(i) for i in np.flatnonzero(np.diff(idx) > 1))
        prov = dict(self.provenance)
        prov["transforms"] = prov.get("transforms", ()) + (f"clip_to_ball:{rho:g}",)
        return Curve(
            params=self.params[idx],
            points=self.points[idx],
            max_chord=self.max_chord,
            provenance=prov,
            breaks=breaks,
        )

    def reversed(self) -> "Curve":
        return Curve(
            params=self.params[::-1],
            points=self.points[::-1],
            max_chord=self.max_chord,
            provenance=dict(self.provenance),
            breaks=tuple(len(self) - 2 - i for i in self.breaks),
        )

    # -- serialization ---------------------------------------------------

    def to_csv(self, path) -> None:
        """Columnar CSV ``t,x,y[,z]``, one row per sample, 17 significant digits."""
        header = "t,x,y" if self.ambient == 2 else "t,x,y,z"
        data = np.column_stack([self.params, self.points])
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header=header, comments="")

    def write_metadata(self, path) -> None:
        """Key-value sidecar with the spec snapshot and sampling metadata."""
        from .config import write_kv

        meta = {}
        for key, val in sorted(self.provenance.items()):
            meta[key] = val
        meta["ambient"] = self.ambient
        meta["samples"] = len(self)
        meta["max_chord"] = self.max_chord
        meta["param_start"] = self.params[0]
        meta["param_end"] = self.params[-1]
        if self.breaks:
            meta["breaks"] = ",".join(str(i) for i in self.breaks)
        write_kv(path, meta)
