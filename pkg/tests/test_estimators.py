import math

import numpy as np
import pytest

from conftest import make_box_mesh, make_disc_mesh
from paramcad import estimators as est
from paramcad.core import default_configuration, set_parameter
from paramcad.dsl import get_builtin
from paramcad.errors import (EmptyMesh, LightInsideMesh, NoSupportPlane,
                             UnknownClauseForDesignKind)
from paramcad.estimators import (RequirementSpec, check_requirements,
                                 estimate_lighting, estimate_stability,
                                 quasi_static_stability, raster_to_pgm)
from paramcad.geometry import generate_mesh


class TestQuasiStatic:
    def test_box_margin_is_eroded_half_width(self):
        mesh = make_box_mesh(0.4, 0.3, 0.4)
        margin = quasi_static_stability(mesh, 0.0)
        assert margin == pytest.approx(0.2 - est.EROSION, abs=1e-6)

    def test_margin_uses_narrower_axis(self):
        mesh = make_box_mesh(0.4, 0.3, 0.1)
        margin = quasi_static_stability(mesh, 0.0)
        assert margin == pytest.approx(0.05 - est.EROSION, abs=1e-6)

    def test_supercritical_tilt_negative(self):
        # 0.1 wide, 0.6 tall: critical tilt ~9.5 deg; at 20 deg the COM
        # projects outside the resting edge
        mesh = make_box_mesh(0.1, 0.6, 0.1, tilt_deg=20.0)
        assert quasi_static_stability(mesh, 0.0) < 0.0

    def test_accepts_support_plane_object(self, floor_scene):
        mesh = make_box_mesh(0.4, 0.3, 0.4)
        margin = quasi_static_stability(mesh, floor_scene.planes[0])
        assert margin == pytest.approx(0.2 - est.EROSION, abs=1e-3)


class TestDropSim:
    def test_flat_box_settles(self, floor_scene):
        mesh = make_box_mesh(0.4, 0.3, 0.4)
        rep = estimate_stability(mesh, floor_scene, floor_scene.planes[0])
        assert rep.settled and not rep.toppled
        assert rep.quasi_static_margin == pytest.approx(0.195, abs=1e-3)
        assert len(rep.trace) > 0
        assert rep.settled_pose is not None

    def test_slender_tilted_column_topples(self, floor_scene):
        mesh = make_box_mesh(0.05, 0.6, 0.05, tilt_deg=5.0)
        rep = estimate_stability(mesh, floor_scene, floor_scene.planes[0],
                                 release_tilt_deg=0.0)
        assert rep.toppled

    def test_margin_reported_from_unperturbed_pose(self, floor_scene):
        mesh = make_box_mesh(0.4, 0.3, 0.4)
        a = estimate_stability(mesh, floor_scene, floor_scene.planes[0],
                               release_tilt_deg=0.0)
        b = estimate_stability(mesh, floor_scene, floor_scene.planes[0],
                               release_tilt_deg=2.0)
        assert a.quasi_static_margin == b.quasi_static_margin

    def test_no_plane_raises(self, floor_scene):
        with pytest.raises(NoSupportPlane):
            estimate_stability(make_box_mesh(0.2, 0.2, 0.2), floor_scene, None)

    def test_report_json_round_trippable(self, floor_scene):
        import json
        mesh = make_box_mesh(0.3, 0.2, 0.3)
        rep = estimate_stability(mesh, floor_scene, floor_scene.planes[0])
        data = json.loads(json.dumps(rep.to_json()))
        assert data["settled"] is True
        assert data["toppled"] is False
        assert isinstance(data["trace"], list)

    def test_catalog_default_vase_is_stable(self, floor_scene):
        design = get_builtin("vase_classic")
        mesh = generate_mesh(design, default_configuration(design))
        rep = estimate_stability(mesh, floor_scene, floor_scene.planes[0])
        assert rep.settled and not rep.toppled


class TestLighting:
    LIGHT = (0.0, 1.0, 0.0)

    def test_shadow_radius_from_coverage(self, floor_scene):
        disc = make_disc_mesh(0.2, 0.5)
        rep = estimate_lighting(disc, floor_scene, self.LIGHT)
        # disc halfway between light and floor casts a 2x radius shadow
        r_est = math.sqrt(rep.shadow_coverage * est.COVERAGE_RADIUS ** 2)
        assert r_est == pytest.approx(0.4, rel=0.05)

    def test_coverage_monotone_in_disc_size(self, floor_scene):
        covers = [estimate_lighting(make_disc_mesh(r, 0.5), floor_scene,
                                    self.LIGHT).shadow_coverage
                  for r in (0.05, 0.1, 0.2)]
        assert covers[0] < covers[1] < covers[2]

    def test_occluded_samples_dark(self, floor_scene):
        disc = make_disc_mesh(0.3, 0.5)
        rep = estimate_lighting(disc, floor_scene, self.LIGHT)
        shadowed = [s for s in rep.samples
                    if s[2] and np.hypot(s[0][0], s[0][2]) < 0.5]
        assert shadowed
        assert all(s[1] == 0.0 for s in shadowed)

    def test_inverse_square_against_analytic(self, floor_scene):
        rep = estimate_lighting(None, floor_scene, (0.0, 1.0, 0.0),
                                intensity=2.0)
        for (pos, e, occ) in rep.samples:
            p = np.asarray(pos)
            d2 = p[0] ** 2 + (p[1] - 1.0) ** 2 + p[2] ** 2
            expect = 2.0 * abs(1.0 - p[1]) / d2 ** 1.5
            assert e == pytest.approx(expect, abs=1e-9)

    def test_light_inside_mesh_rejected(self, floor_scene):
        box_mesh = make_box_mesh(0.4, 0.4, 0.4)
        with pytest.raises(LightInsideMesh):
            estimate_lighting(box_mesh, floor_scene, (0.03, 0.2, 0.07))

    def test_pgm_export(self, floor_scene):
        rep = estimate_lighting(make_disc_mesh(0.2, 0.5), floor_scene,
                                self.LIGHT)
        data = raster_to_pgm(rep.shadow_raster)
        assert data.startswith(b"P5\n")
        n = rep.shadow_raster.size
        assert len(data) == len(b"P5\n256 256\n255\n") + n

    def test_floor_height_from_lowest_plane(self, floor_scene):
        rep = estimate_lighting(None, floor_scene, self.LIGHT)
        assert rep.floor_height == pytest.approx(0.0, abs=1e-3)


class TestRequirementSpec:
    def test_unknown_clause_type(self):
        with pytest.raises(ValueError):
            RequirementSpec(({"type": "levitates"},))

    def test_max_extent_needs_limit_or_plane(self):
        with pytest.raises(ValueError):
            RequirementSpec(({"type": "max_extent", "axis": "x"},))

    def test_json_round_trip(self):
        spec = RequirementSpec(({"type": "max_height", "limit": 0.4},))
        again = RequirementSpec.from_json(spec.to_json())
        assert again == spec


class TestCheckRequirements:
    def check(self, design_id, clauses, scene=None, **edits):
        design = get_builtin(design_id)
        cfg = default_configuration(design)
        for name, value in edits.items():
            cfg = set_parameter(design, cfg, name, value)
        mesh = generate_mesh(design, cfg)
        return check_requirements(design, cfg, mesh, scene,
                                  RequirementSpec(tuple(clauses)))

    def test_max_height(self):
        clause = {"type": "max_height", "limit": 0.40}
        assert self.check("lampshade_cone", [clause]).passed
        assert not self.check("lampshade_cone", [clause], height=0.45).passed

    def test_max_extent_limit(self):
        clause = {"type": "max_extent", "axis": "x", "limit": 0.45}
        assert self.check("lampshade_cone", [clause]).passed
        assert not self.check("lampshade_cone", [clause],
                              height=0.5, diameter=0.5).passed

    def test_max_extent_reference_plane(self, floor_scene):
        clause = {"type": "max_extent", "axis": "x", "reference_plane": 0}
        assert self.check("table_dining", [clause], scene=floor_scene).passed

    def test_align(self):
        clause = {"type": "align", "param": "armrest_height",
                  "target": 0.24, "tol": 0.01}
        assert self.check("bench_garden", [clause], armrest_height=0.24).passed
        assert not self.check("bench_garden", [clause],
                              armrest_height=0.26).passed

    def test_fits_inside_cavity_lathe(self):
        clause = {"type": "fits_inside_cavity", "radius": 0.02, "height": 0.15}
        assert self.check("lampshade_cone", [clause]).passed

    def test_fits_inside_cavity_unknown_kind(self):
        clause = {"type": "fits_inside_cavity", "radius": 0.02, "height": 0.1}
        with pytest.raises(UnknownClauseForDesignKind):
            self.check("bookholder", [clause])

    def test_stable_without_scene_uses_mesh_floor(self):
        assert self.check("vase_classic", [{"type": "stable"}]).passed

    def test_report_lists_each_clause(self):
        rep = self.check("lampshade_cone",
                         [{"type": "max_height", "limit": 0.4},
                          {"type": "stable"}])
        assert len(rep.results) == 2
        assert all(r.detail for r in rep.results)


def test_empty_mesh_rejected(floor_scene):
    import numpy as np
    from paramcad.geometry import TriangleMesh
    empty = TriangleMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64), {})
    with pytest.raises(EmptyMesh):
        estimate_stability(empty, floor_scene, 0.0)
