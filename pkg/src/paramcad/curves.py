"""Cubic Bezier primitives shared by the geometry kernel and the stroke fitter."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRangeT

# Lathe profiles may not touch the revolution axis; acts as the minimal-size
# constraint on sketched curves as well.
R_MIN = 0.002

# C0 continuity tolerance between adjacent segments (meters).
C0_TOL = 1e-9

Point2 = tuple[float, float]


@dataclass(frozen=True)
class CubicBezier:
    p0: Point2
    p1: Point2
    p2: Point2
    p3: Point2

    def control_array(self) -> np.ndarray:
        return np.array([self.p0, self.p1, self.p2, self.p3], dtype=float)


@dataclass(frozen=True)
class BezierPath:
    segments: tuple[CubicBezier, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("BezierPath requires at least one segment")
        for a, b in zip(self.segments, self.segments[1:]):
            if abs(a.p3[0] - b.p0[0]) > C0_TOL or abs(a.p3[1] - b.p0[1]) > C0_TOL:
                raise ValueError("BezierPath segments are not C0 continuous")

    def control_points(self) -> np.ndarray:
        return np.vstack([s.control_array() for s in self.segments])

    def sample(self, per_segment: int = 32) -> np.ndarray:
        """Dense polyline along the path, duplicate joints removed."""
        pts = []
        for i, seg in enumerate(self.segments):
            t = np.linspace(0.0, 1.0, per_segment)
            if i > 0:
                t = t[1:]
            pts.append(eval_bezier_many(seg, t))
        return np.vstack(pts)


def eval_bezier(b: CubicBezier, t: float) -> Point2:
    """Evaluate a cubic Bezier at t in [0, 1] (Bernstein form)."""
    if not 0.0 <= t <= 1.0:
        raise OutOfRangeT(f"t={t} outside [0, 1]")
    p = eval_bezier_many(b, np.array([t]))[0]
    return (float(p[0]), float(p[1]))


def eval_bezier_many(b: CubicBezier, t: np.ndarray) -> np.ndarray:
    c = b.control_array()
    t = np.asarray(t, dtype=float)[:, None]
    u = 1.0 - t
    return (u**3) * c[0] + 3 * (u**2) * t * c[1] + 3 * u * (t**2) * c[2] + (t**3) * c[3]


def bezier_derivative(b: CubicBezier, t: np.ndarray) -> np.ndarray:
    c = b.control_array()
    t = np.asarray(t, dtype=float)[:, None]
    u = 1.0 - t
    return 3 * (u**2) * (c[1] - c[0]) + 6 * u * t * (c[2] - c[1]) + 3 * (t**2) * (c[3] - c[2])


def bezier_second_derivative(b: CubicBezier, t: np.ndarray) -> np.ndarray:
    c = b.control_array()
    t = np.asarray(t, dtype=float)[:, None]
    u = 1.0 - t
    return 6 * u * (c[2] - 2 * c[1] + c[0]) + 6 * t * (c[3] - 2 * c[2] + c[1])


def path_from_lists(data) -> BezierPath:
    """Build a path from [[p0, p1, p2, p3], ...] nested lists (JSON shape)."""
    segs = []
    for seg in data:
        if len(seg) != 4:
            raise ValueError("each segment needs exactly 4 control points")
        segs.append(CubicBezier(*[(float(p[0]), float(p[1])) for p in seg]))
    return BezierPath(tuple(segs))


def path_to_lists(path: BezierPath):
    return [[list(p) for p in (s.p0, s.p1, s.p2, s.p3)] for s in path.segments]
