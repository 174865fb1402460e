"""Curve container: invariants, transforms, serialization."""

import numpy as np
import pytest

from spiraldim.curve import Curve
from spiraldim.errors import ValidationError


def make_curve(n=64):
    t = np.linspace(0.0, 1.0, n)
    pts = np.column_stack([np.cos(t), np.sin(t)])
    return Curve(params=t, points=pts, max_chord=1.0 / (n - 1) * 1.01)


def test_invariants():
    t = np.array([0.0, 1.0, 2.0])
    pts = np.zeros((3, 2))
    pts[:, 0] = [0.0, 1.0, 2.0]
    with pytest.raises(ValidationError, match="max_chord"):
        Curve(params=t, points=pts, max_chord=0.5)
    with pytest.raises(ValidationError, match="monotone"):
        Curve(params=np.array([0.0, 2.0, 1.0]), points=pts, max_chord=2.0)
    with pytest.raises(ValidationError):
        Curve(params=t[:2], points=pts, max_chord=2.0)
    decreasing = Curve(params=t[::-1].copy(), points=pts, max_chord=1.1)
    assert len(decreasing) == 3


def test_points_are_immutable():
    cur = make_curve()
    with pytest.raises(ValueError):
        cur.points[0, 0] = 99.0


def test_rescale_and_normalize():
    cur = make_curve()
    big = cur.rescale(4.0)
    assert np.allclose(big.points, 4.0 * cur.points)
    assert big.max_chord == pytest.approx(4.0 * cur.max_chord)
    t = np.linspace(0.0, 1.0, 100)
    pts = np.column_stack([t, 0.01 * np.sin(40 * t)])
    flat = Curve(params=t, points=pts, max_chord=0.02)
    norm = flat.normalize_axes()
    ext = norm.extent()
    assert ext[0] == pytest.approx(1.0)
    assert ext[1] == pytest.approx(1.0)


def test_clip_to_ball_records_breaks():
    t = np.linspace(0.0, 4 * np.pi, 400)
    r = 1.0 + 0.5 * np.cos(t)
    pts = np.column_stack([r * np.cos(t), r * np.sin(t)])
    cur = Curve(params=t, points=pts, max_chord=0.08)
    clipped = cur.clip_to_ball(1.0)
    assert clipped.breaks  # passes in and out of the ball
    assert np.all(np.linalg.norm(clipped.points, axis=1) <= 1.0 + 1e-12)
    # chords across the seams are excluded from the bound
    assert clipped.chords().max() <= clipped.max_chord * 1.0000001


def test_reversed():
    cur = make_curve()
    rev = cur.reversed()
    assert np.allclose(rev.points, cur.points[::-1])
    assert np.all(np.diff(rev.params) < 0)


def test_csv_roundtrip_format(tmp_path):
    cur = make_curve(8)
    path = tmp_path / "curve.csv"
    cur.to_csv(path)
    text = path.read_text().splitlines()
    assert text[0] == "t,x,y"
    assert len(text) == 9
    # 17 significant digits survive a parse round trip
    vals = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.array_equal(vals[:, 0], cur.params)
    assert np.array_equal(vals[:, 1:], cur.points)
    meta = tmp_path / "curve.meta.txt"
    cur.write_metadata(meta)
    body = meta.read_text()
    assert "max_chord = " in body and "samples = 8" in body


def test_csv_3d_header(tmp_path):
    t = np.linspace(0.0, 1.0, 4)
    pts = np.column_stack([t, t, t])
    cur = Curve(params=t, points=pts, max_chord=0.6)
    path = tmp_path / "c3.csv"
    cur.to_csv(path)
    assert path.read_text().splitlines()[0] == "t,x,y,z"
