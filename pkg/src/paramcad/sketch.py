"""Stroke capture to constrained Bezier profile.

Pipeline: smooth the raw 3D stroke, project it onto the plane through its
centroid orthogonal to the view direction (vertical axis aligned with world
up), resample by arc length, least-squares fit piecewise cubics with
Newton-Raphson reparameterization, then normalize the result into the target
curve parameter's profile frame.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import core
from .core import Configuration, Curve, Design, SnapBackResult
from .curves import (R_MIN, BezierPath, CubicBezier, bezier_derivative,
                     bezier_second_derivative, eval_bezier_many)
from .errors import DegenerateStroke, InsufficientPoints, KindMismatch

RESAMPLE_POINTS = 64
DEVIATION_SAMPLES = 256
NEWTON_ITERATIONS = 8


@dataclass(frozen=True)
class Stroke:
    points: np.ndarray  # (n, 3) meters
    timestamps: np.ndarray  # (n,) seconds
    view_dir: tuple[float, float, float]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 3)
        ts = np.asarray(self.timestamps, dtype=float).reshape(-1)
        keep = np.ones(len(pts), dtype=bool)
        keep[1:] = np.linalg.norm(np.diff(pts, axis=0), axis=1) > 0
        pts, ts = pts[keep], ts[keep]
        if len(pts) < 2:
            raise ValueError("stroke needs at least 2 distinct points")
        v = np.asarray(self.view_dir, dtype=float)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("view_dir must be nonzero")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "view_dir", tuple(v / n))


@dataclass(frozen=True)
class FitResult:
    path: BezierPath
    max_deviation: float
    modified_by_constraints: bool = False


# --------------------------------------------------------------------------
# Projection
# --------------------------------------------------------------------------

def plane_basis(view_dir) -> tuple[np.ndarray, np.ndarray]:
    """In-plane orthonormal basis (horizontal, vertical) with the vertical
    axis aligned to world up."""
    n = np.asarray(view_dir, dtype=float)
    up = np.array([0.0, 1.0, 0.0])
    if abs(np.dot(n, up)) > 1.0 - 1e-9:
        up = np.array([0.0, 0.0, 1.0])
    e_u = np.cross(up, n)
    e_u /= np.linalg.norm(e_u)
    e_v = np.cross(n, e_u)
    return e_u, e_v


def project_to_plane(points: np.ndarray, view_dir) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    centroid = pts.mean(axis=0)
    e_u, e_v = plane_basis(view_dir)
    rel = pts - centroid
    return np.stack([rel @ e_u, rel @ e_v], axis=1)


def smooth_points(points: np.ndarray) -> np.ndarray:
    """3-tap moving average on interior points; endpoints untouched."""
    if len(points) < 3:
        return points
    out = points.copy()
    out[1:-1] = (points[:-2] + points[1:-1] + points[2:]) / 3.0
    return out


def resample_polyline(points: np.ndarray, count: int) -> np.ndarray:
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    targets = np.linspace(0.0, total, count)
    out = np.empty((count, points.shape[1]))
    for d in range(points.shape[1]):
        out[:, d] = np.interp(targets, s, points[:, d])
    return out


def project_stroke(stroke: Stroke) -> np.ndarray:
    """Smoothed, plane-projected, arc-length resampled 2D points (64)."""
    pts = stroke.points
    spread = np.linalg.norm(pts - pts.mean(axis=0), axis=1).max()
    if spread < 1e-3:
        raise DegenerateStroke("all stroke points coincide within 1 mm")
    flat = project_to_plane(smooth_points(pts), stroke.view_dir)
    return resample_polyline(flat, RESAMPLE_POINTS)


# --------------------------------------------------------------------------
# Piecewise cubic fitting
# --------------------------------------------------------------------------

def _chord_parameterize(points: np.ndarray) -> np.ndarray:
    d = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(points, axis=0), axis=1))])
    return d / d[-1] if d[-1] > 0 else np.linspace(0, 1, len(points))


def _generate_bezier(points, u, left_tan, right_tan) -> CubicBezier:
    """Least-squares cubic with fixed endpoints and tangent directions."""
    p0, p3 = points[0], points[-1]
    b1 = 3 * (1 - u) ** 2 * u
    b2 = 3 * (1 - u) * u**2
    a0 = b1[:, None] * left_tan
    a1 = b2[:, None] * right_tan
    c00 = np.einsum("ij,ij->", a0, a0)
    c01 = np.einsum("ij,ij->", a0, a1)
    c11 = np.einsum("ij,ij->", a1, a1)
    base = ((1 - u) ** 3 + b1)[:, None] * p0 + (b2 + u**3)[:, None] * p3
    tmp = points - base
    x0 = np.einsum("ij,ij->", a0, tmp)
    x1 = np.einsum("ij,ij->", a1, tmp)
    det_c = c00 * c11 - c01 * c01
    alpha_l = (x0 * c11 - x1 * c01) / det_c if det_c else 0.0
    alpha_r = (c00 * x1 - c01 * x0) / det_c if det_c else 0.0
    seg_len = float(np.linalg.norm(p3 - p0))
    eps = 1e-6 * seg_len
    if alpha_l < eps or alpha_r < eps:
        # Wu-Barsky fallback: place inner controls a third of the chord out.
        alpha_l = alpha_r = seg_len / 3.0
    p1 = p0 + left_tan * alpha_l
    p2 = p3 + right_tan * alpha_r
    return CubicBezier(tuple(p0), tuple(p1), tuple(p2), tuple(p3))


def _data_errors(points, bez, u) -> np.ndarray:
    return np.linalg.norm(eval_bezier_many(bez, u) - points, axis=1)


def _reparameterize(points, bez, u) -> np.ndarray:
    q = eval_bezier_many(bez, u)
    q1 = bezier_derivative(bez, u)
    q2 = bezier_second_derivative(bez, u)
    d = q - points
    num = np.einsum("ij,ij->i", d, q1)
    den = np.einsum("ij,ij->i", q1, q1) + np.einsum("ij,ij->i", d, q2)
    step = np.where(np.abs(den) > 1e-30, num / np.where(den == 0, 1.0, den), 0.0)
    return np.clip(u - step, 0.0, 1.0)


def _fit_segment(points, left_tan, right_tan) -> tuple[CubicBezier, np.ndarray]:
    if len(points) == 2:
        dist = np.linalg.norm(points[1] - points[0]) / 3.0
        bez = CubicBezier(tuple(points[0]), tuple(points[0] + left_tan * dist),
                          tuple(points[1] + right_tan * dist), tuple(points[1]))
        return bez, np.zeros(2)
    u = _chord_parameterize(points)
    bez = _generate_bezier(points, u, left_tan, right_tan)
    errs = _data_errors(points, bez, u)
    best = (bez, errs)
    for _ in range(NEWTON_ITERATIONS):
        u = _reparameterize(points, best[0], u)
        bez = _generate_bezier(points, u, left_tan, right_tan)
        errs = _data_errors(points, bez, u)
        if errs.max() < best[1].max():
            best = (bez, errs)
    return best


def _tangent(a, b) -> np.ndarray:
    v = b - a
    n = np.linalg.norm(v)
    return v / n if n > 0 else np.array([1.0, 0.0])


def _fit_recursive(points, left_tan, right_tan, budget, tol) -> list[CubicBezier]:
    bez, errs = _fit_segment(points, left_tan, right_tan)
    if budget == 1 or len(points) <= 4 or errs.max() <= tol:
        return [bez]
    split = int(np.argmax(errs))
    split = min(max(split, 2), len(points) - 3)
    center = _tangent(points[split + 1], points[split - 1])
    frac = (split + 1) / len(points)
    left_budget = min(max(int(round(budget * frac)), 1), budget - 1)
    return (_fit_recursive(points[:split + 1], left_tan, center, left_budget, tol)
            + _fit_recursive(points[split:], -center, right_tan, budget - left_budget, tol))


def path_deviation(points: np.ndarray, path: BezierPath,
                   samples: int = DEVIATION_SAMPLES) -> float:
    """Max distance from arc-length resampled input points to the path,
    refined by Newton projection per point."""
    probes = resample_polyline(np.asarray(points, dtype=float), samples)
    t_grid = np.linspace(0.0, 1.0, 64)
    best = np.full(len(probes), np.inf)
    for seg in path.segments:
        q = eval_bezier_many(seg, t_grid)
        d2 = ((probes[:, None, :] - q[None, :, :]) ** 2).sum(axis=2)
        t = t_grid[np.argmin(d2, axis=1)]
        for _ in range(8):
            qv = eval_bezier_many(seg, t)
            q1 = bezier_derivative(seg, t)
            q2 = bezier_second_derivative(seg, t)
            diff = qv - probes
            num = np.einsum("ij,ij->i", diff, q1)
            den = np.einsum("ij,ij->i", q1, q1) + np.einsum("ij,ij->i", diff, q2)
            t = np.clip(t - np.where(np.abs(den) > 1e-30, num / np.where(den == 0, 1, den), 0.0),
                        0.0, 1.0)
        dist = np.linalg.norm(eval_bezier_many(seg, t) - probes, axis=1)
        best = np.minimum(best, dist)
    return float(best.max())


def fit_bezier_path(points: np.ndarray, budget: int, tol: float | None = None) -> FitResult:
    """Fit at most `budget` cubic segments; exact endpoint interpolation, C0
    joints, G1 where the split tangents allow."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(points) < 4:
        raise InsufficientPoints("need at least 4 points to fit")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    diag = float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))
    if tol is None:
        tol = 0.01 * diag
    left_tan = _tangent(points[0], points[1])
    right_tan = _tangent(points[-1], points[-2])

    best_path, best_dev = None, np.inf
    for b in range(1, budget + 1):
        segs = _fit_recursive(points, left_tan, right_tan, b, tol)
        path = BezierPath(tuple(segs))
        dev = path_deviation(points, path)
        if dev < best_dev:
            best_path, best_dev = path, dev
        if best_dev <= tol:
            break
    return FitResult(best_path, best_dev, False)


# --------------------------------------------------------------------------
# Applying a fit to a curve parameter
# --------------------------------------------------------------------------

def normalize_profile(path: BezierPath, height: float) -> tuple[BezierPath, bool]:
    """Scale the path uniformly so its vertical span is `height`, drop the base
    to y=0, and clamp radial coordinates to the minimum lathe radius.

    The horizontal coordinate is read as distance from the revolution axis;
    points left of the axis are clamped, which flags the result as modified.
    """
    cp = path.control_points()
    ymin, ymax = cp[:, 1].min(), cp[:, 1].max()
    span = ymax - ymin
    if span <= 1e-9:
        raise KindMismatch("profile sketch has no vertical extent")
    s = height / span
    modified = False
    segs = []
    for seg in path.segments:
        pts = []
        for p in (seg.p0, seg.p1, seg.p2, seg.p3):
            x = p[0] * s
            y = (p[1] - ymin) * s
            if x < R_MIN:
                x = R_MIN
                modified = True
            pts.append((x, y))
        segs.append(CubicBezier(*pts))
    return BezierPath(tuple(segs)), modified


def apply_curve(design: Design, config: Configuration, name: str,
                fit: FitResult) -> tuple[Configuration | SnapBackResult, FitResult]:
    """Commit a fitted path into a curve parameter, normalized to the design's
    current height. Returns the commit outcome and the normalized FitResult."""
    p = design.parameter(name)
    if not isinstance(p.kind, Curve):
        raise KindMismatch(f"parameter {name!r} is not a curve")
    height = 1.0
    binding = design.generator.bindings.get("height")
    if binding is not None:
        source, payload = binding
        height = float(config.values[payload]) if source == "param" else float(payload)
    path, clamped = normalize_profile(fit.path, height)
    out_fit = replace(fit, path=path,
                      modified_by_constraints=fit.modified_by_constraints or clamped)
    result = core.set_parameter(design, config, name, path, core.EditMode.COMMIT)
    return result, out_fit
