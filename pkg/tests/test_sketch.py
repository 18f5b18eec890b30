import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paramcad.core import Configuration, default_configuration
from paramcad.curves import R_MIN, BezierPath, CubicBezier
from paramcad.dsl import get_builtin
from paramcad.errors import DegenerateStroke, InsufficientPoints, KindMismatch
from paramcad.sketch import (Stroke, apply_curve, fit_bezier_path,
                             normalize_profile, path_deviation,
                             project_stroke, resample_polyline)


def quarter_circle(n=200, radius=1.0):
    a = np.linspace(0.0, math.pi / 2, n)
    return np.stack([radius * np.cos(a), radius * np.sin(a)], axis=1)


class TestStroke:
    def test_duplicate_points_dropped(self):
        pts = [[0, 0, 0], [0, 0, 0], [1, 0, 0], [1, 0, 0], [2, 0, 0]]
        s = Stroke(np.array(pts, float), np.arange(5.0), (0, 0, 1))
        assert len(s.points) == 3

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            Stroke(np.zeros((3, 3)), np.zeros(3), (0, 0, 1))

    def test_degenerate_stroke(self):
        pts = np.zeros((10, 3))
        pts[:, 0] = np.linspace(0, 5e-4, 10)
        with pytest.raises(DegenerateStroke):
            project_stroke(Stroke(pts, np.arange(10.0), (0, 0, 1)))

    def test_projection_preserves_in_plane_shape(self):
        # near-full circle in the xy-plane viewed along +z
        a = np.linspace(0, 1.98 * math.pi, 120)
        pts = np.stack([np.cos(a), np.sin(a), np.zeros_like(a)], axis=1)
        flat = project_stroke(Stroke(pts, np.linspace(0, 1, 120), (0, 0, 1)))
        assert flat.shape == (64, 2)
        r = np.linalg.norm(flat - flat.mean(axis=0), axis=1)
        assert r.std() < 0.02  # still circular after smoothing


class TestFit:
    def test_endpoints_interpolated(self):
        pts = quarter_circle()
        fit = fit_bezier_path(pts, budget=2)
        cp = fit.path.control_points()
        np.testing.assert_allclose(cp[0], pts[0], atol=1e-12)
        np.testing.assert_allclose(cp[-1], pts[-1], atol=1e-12)

    def test_quarter_circle_budget_two(self):
        fit = fit_bezier_path(quarter_circle(), budget=2)
        assert fit.max_deviation <= 3e-4

    def test_line_fits_one_segment(self):
        pts = np.stack([np.linspace(0, 1, 40), np.linspace(0, 2, 40)], axis=1)
        fit = fit_bezier_path(pts, budget=4)
        assert len(fit.path.segments) == 1
        assert fit.max_deviation < 1e-9

    def test_deterministic(self):
        pts = quarter_circle(123)
        a = fit_bezier_path(pts, budget=3)
        b = fit_bezier_path(pts, budget=3)
        assert a.path.control_points().tobytes() == b.path.control_points().tobytes()
        assert a.max_deviation == b.max_deviation

    def test_insufficient_points(self):
        with pytest.raises(InsufficientPoints):
            fit_bezier_path(np.zeros((3, 2)), budget=1)

    def test_bad_budget(self):
        with pytest.raises(ValueError):
            fit_bezier_path(quarter_circle(), budget=0)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_single_cubic_recovered(self, seed):
        from paramcad.curves import eval_bezier_many
        rng = np.random.default_rng(seed)
        # function-like cubic: strictly increasing x keeps the stroke free of
        # loops and cusps, matching what a profile sketch looks like
        x = np.concatenate([[0.0], np.cumsum(rng.uniform(0.1, 0.4, size=3))])
        y = rng.uniform(-0.5, 0.5, size=4)
        seg = CubicBezier(*(tuple(p) for p in np.stack([x, y], axis=1)))
        pts = eval_bezier_many(seg, np.linspace(0.0, 1.0, 64))
        diag = np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))
        # endpoint tangents come from sample differences, so recovery is not
        # exact; 2e-3 covers the worst case observed over 10k random cubics
        fit = fit_bezier_path(pts, budget=8, tol=1e-3 * diag)
        assert fit.max_deviation <= 2e-3 * diag

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10_000))
    def test_monotone_improvement_with_budget(self, seed):
        rng = np.random.default_rng(seed)
        t = np.linspace(0, 1, 80)
        pts = np.stack([t + 0.2 * np.sin(2 * math.pi * t + rng.uniform(0, 6)),
                        0.3 * np.cos(3 * math.pi * t + rng.uniform(0, 6))],
                       axis=1)
        devs = [fit_bezier_path(pts, budget=b, tol=0.0).max_deviation
                for b in (1, 2, 4, 8)]
        assert all(b <= a + 1e-12 for a, b in zip(devs, devs[1:]))


class TestNormalize:
    def test_scaled_to_height_and_grounded(self):
        path = BezierPath((CubicBezier((0.2, 0.5), (0.25, 0.7),
                                       (0.3, 0.9), (0.2, 1.5)),))
        out, modified = normalize_profile(path, 0.3)
        cp = out.control_points()
        assert cp[:, 1].min() == pytest.approx(0.0)
        assert cp[:, 1].max() == pytest.approx(0.3)
        assert not modified

    def test_axis_crossing_clamped(self):
        path = BezierPath((CubicBezier((-0.1, 0.0), (0.05, 0.1),
                                       (0.05, 0.2), (0.1, 0.3)),))
        out, modified = normalize_profile(path, 0.3)
        assert modified
        assert out.control_points()[:, 0].min() >= R_MIN

    def test_flat_profile_rejected(self):
        path = BezierPath((CubicBezier((0.1, 0.0), (0.2, 0.0),
                                       (0.3, 0.0), (0.4, 0.0)),))
        with pytest.raises(KindMismatch):
            normalize_profile(path, 0.3)


class TestApplyCurve:
    def test_commit_into_vase(self):
        design = get_builtin("vase_classic")
        cfg = default_configuration(design)
        pts = np.stack([0.08 + 0.03 * np.sin(np.linspace(0, math.pi, 60)),
                        np.linspace(0.0, 0.5, 60)], axis=1)
        fit = fit_bezier_path(pts, budget=3)
        out, norm = apply_curve(design, cfg, "profile", fit)
        assert isinstance(out, Configuration)
        cp = norm.path.control_points()
        assert cp[:, 1].max() == pytest.approx(cfg.values["height"])

    def test_non_curve_parameter(self):
        design = get_builtin("vase_classic")
        cfg = default_configuration(design)
        fit = fit_bezier_path(quarter_circle(), budget=2)
        with pytest.raises(KindMismatch):
            apply_curve(design, cfg, "height", fit)


def test_resample_arc_length_uniform():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    out = resample_polyline(pts, 5)
    steps = np.linalg.norm(np.diff(out, axis=0), axis=1)
    np.testing.assert_allclose(steps, 0.5, atol=1e-9)


def test_path_deviation_small_on_exact_curve():
    seg = CubicBezier((0.0, 0.0), (0.3, 0.5), (0.7, 0.5), (1.0, 0.0))
    t = np.linspace(0, 1, 100)
    from paramcad.curves import eval_bezier_many
    pts = eval_bezier_many(seg, t)
    # limited by the 256-sample parameter search seeding the refinement
    assert path_deviation(pts, BezierPath((seg,))) < 1e-4
