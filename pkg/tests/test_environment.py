import numpy as np
import pytest

from conftest import FLOOR_OBJ
from paramcad import environment as env
from paramcad.errors import (EmptyScan, NonTriangulated, ScanParseError)
from paramcad.geometry import TriangleMesh, box

TABLE_OBJ = FLOOR_OBJ + (
    "v -0.5 0.75 -0.5\nv 0.5 0.75 -0.5\nv 0.5 0.75 0.5\nv -0.5 0.75 0.5\n"
    "f 5 6 7 8\n"
)


def ascii_ply(verts, faces):
    lines = ["ply", "format ascii 1.0",
             f"element vertex {len(verts)}",
             "property float x", "property float y", "property float z",
             f"element face {len(faces)}",
             "property list uchar int vertex_indices", "end_header"]
    lines += [" ".join(f"{c:g}" for c in v) for v in verts]
    lines += [f"{len(f)} " + " ".join(map(str, f)) for f in faces]
    return ("\n".join(lines) + "\n").encode()


def binary_ply(verts, faces):
    head = ("ply\nformat binary_little_endian 1.0\n"
            f"element vertex {len(verts)}\n"
            "property float x\nproperty float y\nproperty float z\n"
            f"element face {len(faces)}\n"
            "property list uchar int vertex_indices\nend_header\n").encode()
    body = np.asarray(verts, dtype="<f4").tobytes()
    for f in faces:
        body += np.uint8(len(f)).tobytes() + np.asarray(f, dtype="<i4").tobytes()
    return head + body


class TestObj:
    def test_quad_split(self):
        mesh = env.parse_obj(FLOOR_OBJ)
        assert len(mesh.triangles) == 2
        assert len(mesh.vertices) == 4

    def test_negative_indices(self):
        text = "v 0 0 0\nv 1 0 0\nv 0 0 1\nf -3 -2 -1\n"
        mesh = env.parse_obj(text)
        assert mesh.triangles.tolist() == [[0, 1, 2]]

    def test_z_up_remap(self):
        text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n"
        mesh = env.parse_obj(text, axis_up="z")
        # z-up (0,1,0) becomes y-up (0,0,-1)
        np.testing.assert_allclose(mesh.vertices[2], [0.0, 0.0, -1.0])

    def test_ngon_rejected(self):
        text = ("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0.5 1.5 0\nv 0 1 0\n"
                "f 1 2 3 4 5\n")
        with pytest.raises(NonTriangulated):
            env.parse_obj(text)

    def test_no_faces(self):
        with pytest.raises(EmptyScan):
            env.parse_obj("v 0 0 0\nv 1 0 0\nv 0 0 1\n")

    def test_bad_vertex(self):
        with pytest.raises(ScanParseError):
            env.parse_obj("v 0 zero 0\nf 1 1 1\n")


class TestPly:
    VERTS = [(-1, 0, -1), (1, 0, -1), (1, 0, 1), (-1, 0, 1)]
    FACES = [(0, 1, 2), (0, 2, 3)]

    def test_ascii(self):
        mesh = env.parse_ply(ascii_ply(self.VERTS, self.FACES))
        assert len(mesh.triangles) == 2
        np.testing.assert_allclose(mesh.vertices, self.VERTS)

    def test_binary_matches_ascii(self):
        a = env.parse_ply(ascii_ply(self.VERTS, self.FACES))
        b = env.parse_ply(binary_ply(self.VERTS, self.FACES))
        np.testing.assert_allclose(a.vertices, b.vertices, atol=1e-6)
        np.testing.assert_array_equal(a.triangles, b.triangles)

    def test_quad_faces_split(self):
        mesh = env.parse_ply(ascii_ply(self.VERTS, [(0, 1, 2, 3)]))
        assert len(mesh.triangles) == 2

    def test_not_ply(self):
        with pytest.raises(ScanParseError):
            env.parse_ply(b"solid nope")


class TestScene:
    def test_unknown_format(self):
        with pytest.raises(ScanParseError):
            env.load_scene(FLOOR_OBJ, "stp")

    def test_floor_plane_detected(self, floor_scene):
        assert len(floor_scene.planes) == 1
        p = floor_scene.planes[0]
        assert p.height() == pytest.approx(0.0, abs=1e-3)
        assert abs(p.normal @ env.UP) > np.cos(np.radians(env.PLANE_MAX_TILT_DEG))

    def test_two_planes_sorted_by_support(self):
        scene = env.load_scene(TABLE_OBJ, "obj")
        heights = sorted(p.height() for p in scene.planes)
        assert len(scene.planes) == 2
        assert heights[0] == pytest.approx(0.0, abs=1e-3)
        assert heights[1] == pytest.approx(0.75, abs=1e-3)
        # the floor quad is 16x the table's area, so it collects more inliers
        assert scene.planes[0].inlier_count > scene.planes[1].inlier_count

    def test_detection_deterministic(self):
        a = env.load_scene(TABLE_OBJ, "obj", seed=7)
        b = env.load_scene(TABLE_OBJ, "obj", seed=7)
        for pa, pb in zip(a.planes, b.planes):
            np.testing.assert_array_equal(pa.normal, pb.normal)
            assert pa.offset == pb.offset
            assert pa.inlier_count == pb.inlier_count

    def test_steep_wall_ignored(self):
        wall = FLOOR_OBJ + ("v -2 0 -2\nv 2 0 -2\nv 2 2 -2\nv -2 2 -2\n"
                            "f 5 6 7 8\n")
        scene = env.load_scene(wall, "obj")
        for p in scene.planes:
            assert abs(p.normal @ env.UP) > np.cos(np.radians(env.PLANE_MAX_TILT_DEG))

    def test_plane_bounds_cover_quad(self, floor_scene):
        b = floor_scene.planes[0].bounds_world()
        assert b[:, 0].min() <= -1.9 and b[:, 0].max() >= 1.9
        assert b[:, 2].min() <= -1.9 and b[:, 2].max() >= 1.9


class TestRaycast:
    @pytest.fixture()
    def box_mesh(self):
        v, t = box((-0.5, 0.0, -0.5), (0.5, 1.0, 0.5))
        return TriangleMesh(v, t, {"b": (0, len(t))})

    def test_hit_and_miss(self, box_mesh):
        bvh = env.Bvh(box_mesh)
        hit = bvh.raycast(np.array([0.0, 2.0, 0.0]), np.array([0.0, -1.0, 0.0]))
        assert hit is not None
        assert hit.t == pytest.approx(1.0)
        assert bvh.raycast(np.array([3.0, 2.0, 0.0]),
                           np.array([0.0, -1.0, 0.0])) is None

    def test_max_t_limits_hit(self, box_mesh):
        bvh = env.Bvh(box_mesh)
        assert bvh.raycast(np.array([0.0, 2.0, 0.0]),
                           np.array([0.0, -1.0, 0.0]), max_t=0.5) is None

    def test_matches_brute_force(self, box_mesh):
        bvh = env.Bvh(box_mesh)
        rng = np.random.default_rng(42)
        origins = rng.uniform(-2, 2, size=(500, 3))
        dirs = rng.normal(size=(500, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        for o, d in zip(origins, dirs):
            a = bvh.raycast(o, d)
            b = env.brute_force_raycast(box_mesh, o, d)
            if a is None or b is None:
                assert a is None and b is None
            else:
                assert a.t == pytest.approx(b.t, abs=1e-9)

    def test_scene_raycast_requires_unit_direction(self, floor_scene):
        with pytest.raises(ValueError):
            env.raycast(floor_scene, (0, 1, 0), (0, -2, 0))

    def test_segments_occluded(self, box_mesh):
        starts = np.array([[0.0, 0.5, 0.0],   # inside the box -> blocked
                           [2.0, 0.5, 0.0]])  # to the side -> clear
        end = np.array([0.0, 3.0, 0.0])
        occ = env.segments_occluded(box_mesh, starts, end)
        assert occ.tolist() == [True, False]

    def test_segment_endpoints_not_self_occluding(self, box_mesh):
        # segment exactly from the box surface to a point above: the shared
        # endpoint on the surface must not count as an occluder
        starts = np.array([[0.5, 0.5, 0.0]])
        end = np.array([3.0, 0.5, 0.0])
        assert not env.segments_occluded(box_mesh, starts, end)[0]


def test_sample_surface_area_weighted():
    v, t = box((0, 0, 0), (1, 1, 1))
    mesh = TriangleMesh(v, t, {"b": (0, len(t))})
    pts = env.sample_surface(mesh, 6000, np.random.default_rng(0))
    assert pts.shape == (6000, 3)
    # each of the six faces carries ~1/6 of the samples
    on_top = np.abs(pts[:, 1] - 1.0) < 1e-12
    assert 800 < on_top.sum() < 1200
