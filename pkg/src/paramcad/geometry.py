"""Mesh generation and diagnostics.

Generates triangle meshes from a design's generator binding (solids of
revolution and panel furniture), computes watertightness / volume / center of
mass via the divergence theorem, and exports binary STL. All lengths are
meters, Y-up, design-local frame until the configuration pose is applied.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .core import Configuration, Design, Pose, validate
from .curves import R_MIN, BezierPath, eval_bezier, eval_bezier_many  # noqa: F401 (re-export)
from .errors import DegenerateProfile, EmptyMesh, InvalidConfiguration

DEGENERATE_AREA = 1e-12


@dataclass(frozen=True)
class TriangleMesh:
    vertices: np.ndarray  # (n, 3) float64
    triangles: np.ndarray  # (m, 3) int64
    parts: dict[str, tuple[int, int]] = field(default_factory=dict)  # name -> [start, stop)

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=float).reshape(-1, 3))
        object.__setattr__(self, "triangles", np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3))
        if not self.parts:
            object.__setattr__(self, "parts", {"body": (0, len(self.triangles))})
        if len(self.triangles) and self.triangles.max() >= len(self.vertices):
            raise ValueError("triangle index out of range")

    def part_triangles(self, name: str) -> np.ndarray:
        start, stop = self.parts[name]
        return self.triangles[start:stop]

    def triangle_areas(self) -> np.ndarray:
        v = self.vertices
        t = self.triangles
        cross = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
        return 0.5 * np.linalg.norm(cross, axis=1)


@dataclass(frozen=True)
class MeshDiagnostics:
    watertight_per_part: dict[str, bool]
    volume: float
    center_of_mass: tuple[float, float, float]
    bbox: tuple[tuple[float, float, float], tuple[float, float, float]]

    @property
    def watertight(self) -> bool:
        return all(self.watertight_per_part.values())


def concat_parts(parts: list[tuple[str, np.ndarray, np.ndarray]]) -> TriangleMesh:
    """Merge (name, vertices, triangles) groups into one multi-part mesh."""
    verts, tris, ranges = [], [], {}
    v_off = t_off = 0
    for name, v, t in parts:
        verts.append(v)
        tris.append(np.asarray(t) + v_off)
        ranges[name] = (t_off, t_off + len(t))
        v_off += len(v)
        t_off += len(t)
    return TriangleMesh(np.vstack(verts), np.vstack(tris), ranges)


# --------------------------------------------------------------------------
# Primitive builders
# --------------------------------------------------------------------------

_BOX_TRIS = np.array([
    [0, 1, 2], [0, 2, 3],  # bottom (y-)
    [4, 7, 6], [4, 6, 5],  # top (y+)
    [0, 4, 5], [0, 5, 1],  # z-
    [2, 6, 7], [2, 7, 3],  # z+
    [0, 3, 7], [0, 7, 4],  # x-
    [1, 5, 6], [1, 6, 2],  # x+
])


def box(lo, hi) -> tuple[np.ndarray, np.ndarray]:
    """Axis-aligned box with outward winding."""
    x0, y0, z0 = lo
    x1, y1, z1 = hi
    v = np.array([
        [x0, y0, z0], [x1, y0, z0], [x1, y0, z1], [x0, y0, z1],
        [x0, y1, z0], [x1, y1, z0], [x1, y1, z1], [x0, y1, z1],
    ], dtype=float)
    return v, _BOX_TRIS.copy()


def _signed_volume(vertices: np.ndarray, triangles: np.ndarray) -> float:
    v0 = vertices[triangles[:, 0]]
    v1 = vertices[triangles[:, 1]]
    v2 = vertices[triangles[:, 2]]
    return float(np.einsum("ij,ij->i", v0, np.cross(v1, v2)).sum() / 6.0)


def lathe(profile: BezierPath, height: float, max_diameter: float | None = None,
          twist: float = 0.0, closed: bool = True, segments: int = 64,
          samples_per_segment: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """Revolve a radius-over-height profile around local Y.

    The profile's vertical span is rescaled to [0, height]; when max_diameter
    is given, radii are rescaled so the widest point matches it. A nonzero
    twist shears the angular offset linearly in height.
    """
    pts = []
    for i, seg in enumerate(profile.segments):
        t = np.linspace(0.0, 1.0, samples_per_segment)
        if i > 0:
            t = t[1:]
        pts.append(eval_bezier_many(seg, t))
    pts = np.vstack(pts)
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.linalg.norm(np.diff(pts, axis=0), axis=1) > 1e-9
    pts = pts[keep]
    if len(pts) < 2:
        raise DegenerateProfile("profile collapses to a point")

    r = pts[:, 0].copy()
    y = pts[:, 1].copy()
    if r.min() < R_MIN - 1e-12:
        raise DegenerateProfile(f"profile radius {r.min():.4f} below minimum {R_MIN}")
    span = y.max() - y.min()
    if span < 1e-9:
        raise DegenerateProfile("profile has no vertical extent")
    y = (y - y.min()) * (height / span)
    if max_diameter is not None:
        r *= (max_diameter / 2.0) / r.max()
        r = np.maximum(r, R_MIN)

    k, n = len(pts), segments
    j = np.arange(n)
    phi = 2.0 * math.pi * j / n
    verts = np.empty((k * n, 3))
    for i in range(k):
        a = phi + twist * (y[i] - y[0]) / height
        verts[i * n:(i + 1) * n, 0] = r[i] * np.cos(a)
        verts[i * n:(i + 1) * n, 1] = y[i]
        verts[i * n:(i + 1) * n, 2] = r[i] * np.sin(a)

    tris = []
    jn = (j + 1) % n
    for i in range(k - 1):
        a = i * n + j
        b = i * n + jn
        c = (i + 1) * n + jn
        d = (i + 1) * n + j
        tris.append(np.stack([a, b, c], axis=1))
        tris.append(np.stack([a, c, d], axis=1))
    if closed:
        verts = np.vstack([verts, [[0.0, y[0], 0.0]], [[0.0, y[-1], 0.0]]])
        cb, ct = k * n, k * n + 1
        tris.append(np.stack([np.full(n, cb), jn, j], axis=1))
        top = (k - 1) * n
        tris.append(np.stack([np.full(n, ct), top + j, top + jn], axis=1))
    triangles = np.vstack(tris).astype(np.int64)
    if closed and _signed_volume(verts, triangles) < 0:
        triangles = triangles[:, [0, 2, 1]]
    return verts, triangles


# --------------------------------------------------------------------------
# Generator dispatch
# --------------------------------------------------------------------------

# Slot tables: expected value tag per slot ("length", "number", "int",
# "bool", "curve", "str"). Used by the DSL to reject unbound required slots.
GENERATORS: dict[str, dict[str, dict[str, str]]] = {
    "lathe": {
        "required": {"profile": "curve", "height": "length"},
        "optional": {"max_diameter": "length", "twist": "number",
                     "closed": "bool", "segments": "int"},
    },
    "panel_table": {
        "required": {"width": "length", "depth": "length", "height": "length"},
        "optional": {"top_thickness": "length", "leg_thickness": "length"},
    },
    "panel_shelf": {
        "required": {"width": "length", "height": "length", "depth": "length",
                     "compartments": "number"},
        "optional": {"board_thickness": "length", "has_back": "bool",
                     "back_thickness": "length"},
    },
    "panel_bench": {
        "required": {"seat_width": "length", "seat_depth": "length",
                     "seat_height": "length"},
        "optional": {"seat_thickness": "length", "leg_thickness": "length",
                     "has_armrests": "bool", "armrest_height": "length",
                     "armrest_depth": "length", "armrest_thickness": "length",
                     "has_backrest": "bool", "backrest_height": "length",
                     "backrest_thickness": "length"},
    },
    "panel_bookholder": {
        "required": {"width": "length", "depth": "length", "height": "length"},
        "optional": {"thickness": "length"},
    },
}

_DEFAULTS = {
    "lathe": {"max_diameter": None, "twist": 0.0, "closed": True, "segments": None},
    "panel_table": {"top_thickness": 0.03, "leg_thickness": 0.05},
    "panel_shelf": {"board_thickness": 0.018, "has_back": False, "back_thickness": 0.006},
    "panel_bench": {"seat_thickness": 0.04, "leg_thickness": 0.05,
                    "has_armrests": False, "armrest_height": 0.2,
                    "armrest_depth": 0.3, "armrest_thickness": 0.04,
                    "has_backrest": False, "backrest_height": 0.35,
                    "backrest_thickness": 0.03},
    "panel_bookholder": {"thickness": 0.012},
}


def resolve_slots(design: Design, config: Configuration) -> dict:
    gen = design.generator
    slots = dict(_DEFAULTS[gen.generator])
    for slot, (source, payload) in gen.bindings.items():
        slots[slot] = config.values[payload] if source == "param" else payload
    return slots


def generate_mesh(design: Design, config: Configuration) -> TriangleMesh:
    report = validate(design, config)
    if not report.valid:
        raise InvalidConfiguration(
            "; ".join(v.message for v in report.violations))
    slots = resolve_slots(design, config)
    builder = _BUILDERS[design.generator.generator]
    if design.generator.generator == "lathe" and slots.get("segments") is None:
        slots["segments"] = design.angular_steps
    mesh = builder(slots)
    return apply_pose(mesh, config.pose)


def _build_lathe(s) -> TriangleMesh:
    v, t = lathe(s["profile"], s["height"], s["max_diameter"], s["twist"],
                 s["closed"], int(s["segments"]))
    return TriangleMesh(v, t, {"body": (0, len(t))})


def _legs(x0, x1, z0, z1, h, lt):
    for i, (x, z) in enumerate([(x0, z0), (x1 - lt, z0), (x0, z1 - lt), (x1 - lt, z1 - lt)]):
        yield f"leg_{i}", *box((x, 0.0, z), (x + lt, h, z + lt))


def _build_table(s) -> TriangleMesh:
    w, d, h = s["width"], s["depth"], s["height"]
    tt, lt = s["top_thickness"], s["leg_thickness"]
    parts = [("top", *box((-w / 2, h - tt, -d / 2), (w / 2, h, d / 2)))]
    parts += list(_legs(-w / 2, w / 2, -d / 2, d / 2, h - tt, lt))
    return concat_parts(parts)


def _build_shelf(s) -> TriangleMesh:
    w, h, d = s["width"], s["height"], s["depth"]
    b = s["board_thickness"]
    k = max(1, int(round(s["compartments"])))
    parts = [
        ("side_l", *box((-w / 2, 0, -d / 2), (-w / 2 + b, h, d / 2))),
        ("side_r", *box((w / 2 - b, 0, -d / 2), (w / 2, h, d / 2))),
        ("bottom", *box((-w / 2 + b, 0, -d / 2), (w / 2 - b, b, d / 2))),
        ("top", *box((-w / 2 + b, h - b, -d / 2), (w / 2 - b, h, d / 2))),
    ]
    inner = (h - 2 * b - (k - 1) * b) / k
    for i in range(1, k):
        y0 = b + i * inner + (i - 1) * b
        parts.append((f"shelf_{i}", *box((-w / 2 + b, y0, -d / 2), (w / 2 - b, y0 + b, d / 2))))
    if s["has_back"]:
        bt = s["back_thickness"]
        parts.append(("back", *box((-w / 2, 0, -d / 2), (w / 2, h, -d / 2 + bt))))
    return concat_parts(parts)


def _build_bench(s) -> TriangleMesh:
    w, d, h = s["seat_width"], s["seat_depth"], s["seat_height"]
    st, lt = s["seat_thickness"], s["leg_thickness"]
    parts = [("seat", *box((-w / 2, h - st, -d / 2), (w / 2, h, d / 2)))]
    parts += list(_legs(-w / 2, w / 2, -d / 2, d / 2, h - st, lt))
    if s["has_armrests"]:
        ah, ad, at = s["armrest_height"], s["armrest_depth"], s["armrest_thickness"]
        parts.append(("armrest_l", *box((-w / 2, h, -d / 2), (-w / 2 + at, h + ah, -d / 2 + ad))))
        parts.append(("armrest_r", *box((w / 2 - at, h, -d / 2), (w / 2, h + ah, -d / 2 + ad))))
    if s["has_backrest"]:
        bh, bt = s["backrest_height"], s["backrest_thickness"]
        parts.append(("backrest", *box((-w / 2, h, -d / 2), (w / 2, h + bh, -d / 2 + bt))))
    return concat_parts(parts)


def _build_bookholder(s) -> TriangleMesh:
    w, d, h, t = s["width"], s["depth"], s["height"], s["thickness"]
    parts = [
        ("base", *box((-w / 2, 0, -d / 2), (w / 2, t, d / 2))),
        ("back", *box((-w / 2, t, -d / 2), (w / 2, t + h, -d / 2 + t))),
        ("lip", *box((-w / 2, t, d / 2 - t), (w / 2, t + 0.04, d / 2))),
    ]
    return concat_parts(parts)


_BUILDERS = {
    "lathe": _build_lathe,
    "panel_table": _build_table,
    "panel_shelf": _build_shelf,
    "panel_bench": _build_bench,
    "panel_bookholder": _build_bookholder,
}


# --------------------------------------------------------------------------
# Pose
# --------------------------------------------------------------------------

def yaw_matrix(yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def apply_pose(mesh: TriangleMesh, pose: Pose) -> TriangleMesh:
    if pose.yaw == 0.0 and pose.position == (0.0, 0.0, 0.0):
        return mesh
    v = mesh.vertices @ yaw_matrix(pose.yaw).T + np.asarray(pose.position)
    return TriangleMesh(v, mesh.triangles, dict(mesh.parts))


# --------------------------------------------------------------------------
# Diagnostics
# --------------------------------------------------------------------------

def _is_manifold(triangles: np.ndarray) -> bool:
    """Every edge shared by exactly 2 triangles with opposite orientation."""
    if len(triangles) == 0:
        return False
    directed: dict[tuple[int, int], int] = {}
    for a, b, c in triangles:
        for u, v in ((a, b), (b, c), (c, a)):
            e = (int(u), int(v))
            directed[e] = directed.get(e, 0) + 1
    for (u, v), n in directed.items():
        if n != 1 or directed.get((v, u), 0) != 1:
            return False
    return True


def diagnose(mesh: TriangleMesh) -> MeshDiagnostics:
    watertight: dict[str, bool] = {}
    total_v = 0.0
    weighted_com = np.zeros(3)
    for name in mesh.parts:
        tris = mesh.part_triangles(name)
        ok = _is_manifold(tris)
        watertight[name] = ok
        if not ok:
            continue
        v0 = mesh.vertices[tris[:, 0]]
        v1 = mesh.vertices[tris[:, 1]]
        v2 = mesh.vertices[tris[:, 2]]
        det = np.einsum("ij,ij->i", v0, np.cross(v1, v2))
        vol = det.sum() / 6.0
        com = (det[:, None] * (v0 + v1 + v2)).sum(axis=0) / 24.0
        total_v += vol
        weighted_com += com
    if total_v > 1e-15:
        com = weighted_com / total_v
    else:
        com = mesh.vertices.mean(axis=0) if len(mesh.vertices) else np.zeros(3)
    bbox_lo = mesh.vertices.min(axis=0) if len(mesh.vertices) else np.zeros(3)
    bbox_hi = mesh.vertices.max(axis=0) if len(mesh.vertices) else np.zeros(3)
    return MeshDiagnostics(watertight, float(total_v), tuple(com),
                           (tuple(bbox_lo), tuple(bbox_hi)))


# --------------------------------------------------------------------------
# STL and JSON interchange
# --------------------------------------------------------------------------

_STL_TRI = np.dtype([("normal", "<f4", 3), ("v0", "<f4", 3), ("v1", "<f4", 3),
                     ("v2", "<f4", 3), ("attr", "<u2")])


def export_stl(mesh: TriangleMesh) -> bytes:
    if len(mesh.triangles) == 0:
        raise EmptyMesh("cannot export a mesh with no triangles")
    t = mesh.triangles
    v0 = mesh.vertices[t[:, 0]]
    v1 = mesh.vertices[t[:, 1]]
    v2 = mesh.vertices[t[:, 2]]
    n = np.cross(v1 - v0, v2 - v0)
    lens = np.linalg.norm(n, axis=1)
    n = np.where(lens[:, None] > 0, n / np.maximum(lens, 1e-30)[:, None], 0.0)
    rec = np.zeros(len(t), dtype=_STL_TRI)
    rec["normal"], rec["v0"], rec["v1"], rec["v2"] = n, v0, v1, v2
    header = b"paramcad binary STL".ljust(80, b"\0")
    return header + struct.pack("<I", len(t)) + rec.tobytes()


def import_stl(data: bytes) -> TriangleMesh:
    if len(data) < 84:
        raise EmptyMesh("not a binary STL")
    (count,) = struct.unpack_from("<I", data, 80)
    rec = np.frombuffer(data, dtype=_STL_TRI, count=count, offset=84)
    verts = np.empty((count * 3, 3))
    verts[0::3] = rec["v0"]
    verts[1::3] = rec["v1"]
    verts[2::3] = rec["v2"]
    tris = np.arange(count * 3, dtype=np.int64).reshape(-1, 3)
    return TriangleMesh(verts, tris, {"stl": (0, count)})


def mesh_to_json(mesh: TriangleMesh) -> dict:
    return {
        "vertices": mesh.vertices.tolist(),
        "triangles": mesh.triangles.tolist(),
        "parts": {name: list(rng) for name, rng in mesh.parts.items()},
    }


def mesh_from_json(data: dict) -> TriangleMesh:
    return TriangleMesh(
        np.asarray(data["vertices"], dtype=float),
        np.asarray(data["triangles"], dtype=np.int64),
        {name: tuple(rng) for name, rng in data["parts"].items()},
    )
