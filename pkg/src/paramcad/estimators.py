"""In-context validation: drop/topple stability, point-light shadowing, and
machine-checkable requirement specs.

The stability path has two estimators that cross-check each other: a dynamic
drop simulation over a convex-hull collider and a quasi-static support-polygon
margin. Lighting is a point-light occlusion/illuminance pass over the scanned
environment surface with a top-down shadow raster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial import ConvexHull

from .core import Configuration, Design, validate
from .curves import eval_bezier_many
from .errors import (EmptyMesh, EmptyScene, InvalidConfiguration,
                     LightInsideMesh, NoSupportPlane,
                     UnknownClauseForDesignKind)
from .environment import EnvironmentScene, SupportPlane, segments_occluded
from .geometry import R_MIN, TriangleMesh, diagnose, resolve_slots

GRAVITY = 9.81
DT = 1.0 / 240.0
FRICTION = 0.5
DROP_HEIGHT = 0.02
SETTLE_LINEAR = 1e-3  # m/s
SETTLE_ANGULAR = 1e-2  # rad/s
SETTLE_HOLD = 0.5  # s of sustained quiet before declaring rest
MAX_SIM_TIME = 5.0
TOPPLE_DEG = 45.0
CONTACT_TOL = 1e-3  # support-polygon membership distance from the plane
SIM_CONTACT_TOL = 2e-3  # solver contact band; wider so rim contacts persist
EROSION = 0.005  # support polygon erosion
RELEASE_TILT_DEG = 2.0  # default perturbation so unstable equilibria resolve

PlaneLike = Union[SupportPlane, float]


def _plane_height(plane: PlaneLike) -> float:
    if isinstance(plane, SupportPlane):
        return plane.height()
    return float(plane)


# --------------------------------------------------------------------------
# Report types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RigidTransform:
    position: tuple[float, float, float]
    rotation: tuple  # 3x3 row tuples

    def to_json(self) -> dict:
        return {"position": list(self.position),
                "rotation": [list(r) for r in self.rotation]}


@dataclass(frozen=True)
class TraceSample:
    t: float
    position: tuple[float, float, float]
    up_deviation_deg: float


@dataclass(frozen=True)
class StabilityReport:
    toppled: bool
    settled: bool
    settled_pose: RigidTransform
    quasi_static_margin: float
    contact_points: tuple
    trace: tuple

    def to_json(self) -> dict:
        return {
            "toppled": self.toppled,
            "settled": self.settled,
            "settled_pose": self.settled_pose.to_json(),
            "quasi_static_margin": self.quasi_static_margin,
            "contact_points": [list(p) for p in self.contact_points],
            "trace": [{"t": s.t, "position": list(s.position),
                       "up_deviation_deg": s.up_deviation_deg}
                      for s in self.trace],
        }


@dataclass(frozen=True)
class LightingReport:
    samples: tuple  # of (point, illuminance, occluded)
    shadow_raster: np.ndarray  # (n, n) occlusion fractions, rows = +z
    raster_extent: float
    raster_center: tuple[float, float]  # (x, z) of raster center, floor y
    floor_height: float
    shadow_coverage: float
    mean_illuminance: float

    def to_json(self, include_samples: bool = False) -> dict:
        out = {
            "shadow_coverage": self.shadow_coverage,
            "mean_illuminance": self.mean_illuminance,
            "raster_extent": self.raster_extent,
            "raster_center": list(self.raster_center),
            "floor_height": self.floor_height,
            "raster_size": int(self.shadow_raster.shape[0]),
            "sample_count": len(self.samples),
            "occluded_count": sum(1 for s in self.samples if s[2]),
        }
        if include_samples:
            out["samples"] = [{"point": list(p), "illuminance": e, "occluded": o}
                              for p, e, o in self.samples]
        return out


def raster_to_pgm(raster: np.ndarray) -> bytes:
    """8-bit binary PGM; shadowed cells render dark."""
    n, m = raster.shape
    pixels = np.round(255.0 * (1.0 - np.clip(raster, 0.0, 1.0))).astype(np.uint8)
    return f"P5\n{m} {n}\n255\n".encode("ascii") + pixels.tobytes()


# --------------------------------------------------------------------------
# Quasi-static margin
# --------------------------------------------------------------------------

def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom < 1e-18 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


def _support_margin(contacts_2d: np.ndarray, com_2d: np.ndarray) -> float:
    """Signed distance of the COM projection to the eroded support polygon.

    Positive inside. Degenerate (point/segment) contact sets have no interior,
    so the margin is the negated distance to the contact set, eroded.
    """
    pts = np.unique(np.round(contacts_2d, 9), axis=0)
    if len(pts) >= 3:
        try:
            hull = ConvexHull(pts)
        except Exception:
            hull = None
        if hull is not None:
            verts = pts[hull.vertices]
            # interior test via the hull half-plane equations (unit normals)
            d = hull.equations[:, :2] @ com_2d + hull.equations[:, 2]
            edge_dists = [
                _point_segment_distance(com_2d, verts[i], verts[(i + 1) % len(verts)])
                for i in range(len(verts))
            ]
            nearest = min(edge_dists)
            inside = bool(np.all(d <= 1e-12))
            return (nearest if inside else -nearest) - EROSION
    if len(pts) == 1:
        return -float(np.linalg.norm(com_2d - pts[0])) - EROSION
    # collinear: distance to the spanning segment
    spread = pts - pts.mean(axis=0)
    _, _, vt = np.linalg.svd(spread, full_matrices=False)
    axis = vt[0]
    s = spread @ axis
    a = pts.mean(axis=0) + s.min() * axis
    b = pts.mean(axis=0) + s.max() * axis
    return -_point_segment_distance(com_2d, a, b) - EROSION


def quasi_static_stability(mesh: TriangleMesh, plane: PlaneLike) -> float:
    """Margin at the rest pose reached by lowering the mesh without rotation."""
    if len(mesh.triangles) == 0:
        raise EmptyMesh("stability needs a non-empty mesh")
    ground = _plane_height(plane)
    drop = mesh.vertices[:, 1].min() - ground
    verts = mesh.vertices.copy()
    verts[:, 1] -= drop
    contacts = verts[verts[:, 1] - ground <= CONTACT_TOL]
    diag = diagnose(mesh)
    com = np.asarray(diag.center_of_mass)
    return _support_margin(contacts[:, [0, 2]], com[[0, 2]])


# --------------------------------------------------------------------------
# Dynamic drop simulation
# --------------------------------------------------------------------------

def _hull_mass_properties(points: np.ndarray):
    """Volume, COM and body inertia of the convex hull at uniform density 1."""
    hull = ConvexHull(points)
    centroid = points[hull.vertices].mean(axis=0)
    canon = np.array([[1 / 60, 1 / 120, 1 / 120],
                      [1 / 120, 1 / 60, 1 / 120],
                      [1 / 120, 1 / 120, 1 / 60]])
    volume = 0.0
    com = np.zeros(3)
    cov = np.zeros((3, 3))
    for simplex, eq in zip(hull.simplices, hull.equations):
        a, b, c = points[simplex]
        n = np.cross(b - a, c - a)
        if n @ eq[:3] < 0:
            b, c = c, b
        A = np.stack([a - centroid, b - centroid, c - centroid])
        det = float(np.linalg.det(A))
        volume += det / 6.0
        com += det / 24.0 * A.sum(axis=0)
        cov += det * A.T @ canon @ A
    if volume <= 1e-12:
        raise EmptyMesh("collider has no volume")
    com = centroid + com / volume
    shift = com - centroid
    cov -= volume * np.outer(shift, shift)
    inertia = np.trace(cov) * np.eye(3) - cov
    return volume, com, inertia, points[hull.vertices] - com


def _rodrigues(omega: np.ndarray, dt: float) -> np.ndarray:
    angle = float(np.linalg.norm(omega)) * dt
    if angle < 1e-12:
        return np.eye(3)
    axis = omega / np.linalg.norm(omega)
    K = np.array([[0, -axis[2], axis[1]],
                  [axis[2], 0, -axis[0]],
                  [-axis[1], axis[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * (K @ K)


def _reduce_manifold(idx: np.ndarray, pts: np.ndarray, cap: int = 8) -> np.ndarray:
    """Keep at most `cap` contacts, preferring the support-polygon extremes.

    Large flat or ring-shaped contact patches produce dozens of coplanar
    points; the sequential impulse solver converges far better (and faster)
    on a small representative manifold, the same trick real-time engines use.
    """
    if len(idx) <= cap:
        return idx
    flat = pts[idx][:, [0, 2]]
    try:
        hull = ConvexHull(flat)
        ring = idx[hull.vertices]
    except Exception:
        order = np.argsort(flat[:, 0] + 1e-7 * flat[:, 1])
        ring = idx[order]
    if len(ring) <= cap:
        return ring
    keep = np.floor(np.linspace(0, len(ring), cap, endpoint=False)).astype(int)
    return ring[keep]


def estimate_stability(mesh: TriangleMesh, scene: Optional[EnvironmentScene],
                       plane: PlaneLike, release_tilt_deg: float = RELEASE_TILT_DEG,
                       tilt_axis=(0.0, 0.0, 1.0)) -> StabilityReport:
    """Drop the convex hull of `mesh` onto the plane and watch for a topple.

    The release pose is the mesh pose raised DROP_HEIGHT above the plane,
    perturbed by a small tilt so that knife-edge equilibria resolve one way
    or the other. The reported quasi-static margin is measured on the
    unperturbed input pose.
    """
    if plane is None:
        raise NoSupportPlane("stability estimation needs a support plane")
    if len(mesh.triangles) == 0:
        raise EmptyMesh("stability needs a non-empty mesh")
    ground = _plane_height(plane)
    margin = quasi_static_stability(mesh, plane)

    mass, com0, inertia_body, local = _hull_mass_properties(mesh.vertices)
    inv_inertia_body = np.linalg.inv(inertia_body)

    R = _rodrigues(np.asarray(tilt_axis, dtype=float),
                   math.radians(release_tilt_deg))
    world0 = local @ R.T
    x = com0.copy()
    x[1] += ground + DROP_HEIGHT - (com0[1] + world0[:, 1].min())
    v = np.zeros(3)
    w = np.zeros(3)

    steps = int(round(MAX_SIM_TIME / DT))
    hold_steps = int(round(SETTLE_HOLD / DT))
    trace_every = 24
    quiet = 0
    settled = False
    trace = []
    # impulse warm-starting per hull vertex; resting stacks converge in a few
    # iterations instead of re-fighting gravity from scratch every step
    warm_n: dict[int, float] = {}
    warm_t: dict[int, np.ndarray] = {}
    # sleep counter: the iterative solver leaves a small velocity residual on
    # resting bodies, so near-rest patch contact is put to sleep engine-style
    sleep_quiet = 0
    sleeping = False

    for step in range(steps):
        if sleeping:
            v[:] = 0.0
            w[:] = 0.0
            quiet += 1
            if quiet >= hold_steps:
                settled = True
                break
            continue
        v[1] -= GRAVITY * DT
        Rw = R
        pts = local @ Rw.T
        ys = x[1] + pts[:, 1]
        idx = np.nonzero(ys - ground <= SIM_CONTACT_TOL)[0]
        idx = _reduce_manifold(idx, pts)
        if len(idx):
            inv_I = Rw @ inv_inertia_body @ Rw.T
            rs = pts[idx]
            # speculative contacts: a separated point may still approach the
            # plane at up to separation/dt this step
            floors = -np.maximum(ys[idx] - ground, 0.0) / DT
            jn_acc = np.zeros(len(idx))
            jt_acc = np.zeros((len(idx), 2))
            tangents = (np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]))
            normal = np.array([0.0, 1.0, 0.0])
            for c, vid in enumerate(idx):
                jn0 = warm_n.get(int(vid), 0.0)
                jt0 = warm_t.get(int(vid))
                if jn0 > 0.0:
                    jn_acc[c] = jn0
                    imp = jn0 * normal
                    if jt0 is not None:
                        jt_acc[c] = jt0
                        imp = imp + jt0[0] * tangents[0] + jt0[1] * tangents[1]
                    v += imp / mass
                    w += inv_I @ np.cross(rs[c], imp)
            for _ in range(10):
                for c in range(len(idx)):
                    r = rs[c]
                    u = v + np.cross(w, r)
                    kn = 1.0 / mass + normal @ np.cross(inv_I @ np.cross(r, normal), r)
                    jn = (floors[c] - u[1]) / kn
                    new_acc = max(0.0, jn_acc[c] + jn)
                    jn = new_acc - jn_acc[c]
                    jn_acc[c] = new_acc
                    imp = jn * normal
                    v += imp / mass
                    w += inv_I @ np.cross(r, imp)
                    limit = FRICTION * jn_acc[c]
                    for ti, tdir in enumerate(tangents):
                        u = v + np.cross(w, r)
                        kt = 1.0 / mass + tdir @ np.cross(inv_I @ np.cross(r, tdir), r)
                        jt = -(u @ tdir) / kt
                        new_t = float(np.clip(jt_acc[c, ti] + jt, -limit, limit))
                        jt = new_t - jt_acc[c, ti]
                        jt_acc[c, ti] = new_t
                        imp = jt * tdir
                        v += imp / mass
                        w += inv_I @ np.cross(r, imp)
            warm_n = {int(vid): jn_acc[c] for c, vid in enumerate(idx)}
            warm_t = {int(vid): jt_acc[c].copy() for c, vid in enumerate(idx)}
            if len(idx) >= 3:
                # material damping while resting on a contact patch; points
                # and edges (a toppling pivot) are deliberately undamped
                v *= 0.995
                w *= 0.995
        else:
            warm_n, warm_t = {}, {}
        x = x + v * DT
        R = _rodrigues(w, DT) @ R
        # positional projection keeps penetration out of the velocity state
        depth = ground - (x[1] + (local @ R.T)[:, 1].min())
        if depth > 0.0:
            x[1] += depth
        # keep R orthonormal against drift
        if step % 32 == 0:
            u_, _, vt_ = np.linalg.svd(R)
            R = u_ @ vt_

        if step % trace_every == 0:
            dev = math.degrees(math.acos(float(np.clip(R[1, 1], -1.0, 1.0))))
            trace.append(TraceSample(step * DT, tuple(x), dev))
        speed = float(np.linalg.norm(v))
        spin = float(np.linalg.norm(w))
        if len(idx) >= 3 and speed < 2e-2 and spin < 1e-1:
            sleep_quiet += 1
            if sleep_quiet >= 24:
                resting = _support_margin((pts + x)[idx][:, [0, 2]] + 0.0,
                                          x[[0, 2]]) > -EROSION
                if resting:
                    sleeping = True
                sleep_quiet = 0
        else:
            sleep_quiet = 0
        quiet = quiet + 1 if (speed < SETTLE_LINEAR and spin < SETTLE_ANGULAR) else 0
        if quiet >= hold_steps:
            settled = True
            break
        dev_now = float(np.clip(R[1, 1], -1.0, 1.0))
        if dev_now < math.cos(math.radians(80.0)):
            break  # committed topple; past any return to upright

    deviation = math.degrees(math.acos(float(np.clip(R[1, 1], -1.0, 1.0))))
    toppled = (not settled) or deviation > TOPPLE_DEG
    pts = local @ R.T
    ys = x[1] + pts[:, 1]
    contact_world = (pts + x)[ys - ground <= CONTACT_TOL]
    trace.append(TraceSample(min(step + 1, steps) * DT, tuple(x), deviation))
    pose = RigidTransform(tuple(x), tuple(tuple(row) for row in R))
    return StabilityReport(toppled, settled, pose, margin,
                           tuple(tuple(p) for p in contact_world), tuple(trace))


# --------------------------------------------------------------------------
# Lighting
# --------------------------------------------------------------------------

SAMPLE_EDGE = 0.02
SAMPLE_RADIUS = 1.5
SAMPLE_FRINGE = 0.1
COVERAGE_RADIUS = 1.0
RASTER_SIZE = 256


def _point_inside(mesh: TriangleMesh, point: np.ndarray) -> bool:
    if len(mesh.triangles) == 0:
        return False
    from .environment import _moller_trumbore
    t = mesh.triangles
    v0 = mesh.vertices[t[:, 0]]
    direction = np.array([0.0, 1.0, 0.0])
    count = 0
    for i in range(len(t)):
        e1 = mesh.vertices[t[i, 1]] - v0[i]
        e2 = mesh.vertices[t[i, 2]] - v0[i]
        if _moller_trumbore(v0[i], e1, e2, point, direction) is not None:
            count += 1
    return count % 2 == 1


def _subdivide(tris: np.ndarray, max_edge: float) -> np.ndarray:
    """tris: (n, 3, 3) -> (m, 3, 3) with every edge <= max_edge."""
    out = []
    work = tris
    while len(work):
        e = np.stack([
            np.linalg.norm(work[:, 1] - work[:, 0], axis=1),
            np.linalg.norm(work[:, 2] - work[:, 1], axis=1),
            np.linalg.norm(work[:, 0] - work[:, 2], axis=1),
        ], axis=1).max(axis=1)
        done = e <= max_edge
        out.append(work[done])
        big = work[~done]
        if not len(big):
            break
        a, b, c = big[:, 0], big[:, 1], big[:, 2]
        ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
        work = np.concatenate([
            np.stack([a, ab, ca], axis=1),
            np.stack([ab, b, bc], axis=1),
            np.stack([ca, bc, c], axis=1),
            np.stack([ab, bc, ca], axis=1),
        ])
    return np.concatenate(out) if out else tris


def estimate_lighting(design_mesh: Optional[TriangleMesh],
                      scene: EnvironmentScene, light_position,
                      intensity: float = 1.0, raster_extent: float = 2.0,
                      raster_size: int = RASTER_SIZE) -> LightingReport:
    env = scene.mesh
    if len(env.triangles) == 0:
        raise EmptyScene("lighting needs a non-empty environment mesh")
    light = np.asarray(light_position, dtype=float)
    if design_mesh is not None and _point_inside(design_mesh, light):
        raise LightInsideMesh("light position is inside the design mesh")

    if scene.planes:
        floor_y = min(p.height() for p in scene.planes)
    else:
        floor_y = float(env.vertices[:, 1].min())
    proj = np.array([light[0], light[2]])

    # surface samples: subdivide nearby environment triangles to 2 cm. A
    # coarse pass first so the vertex-distance window cannot drop a large
    # triangle whose interior overlaps it.
    tri_pts = _subdivide(env.vertices[env.triangles], 0.2)
    horiz = tri_pts[:, :, [0, 2]] - proj
    near = (np.linalg.norm(horiz, axis=2).min(axis=1)
            <= SAMPLE_RADIUS + SAMPLE_FRINGE)
    sub = _subdivide(tri_pts[near], SAMPLE_EDGE)
    centers = sub.mean(axis=1)
    normals = np.cross(sub[:, 1] - sub[:, 0], sub[:, 2] - sub[:, 0])
    nlen = np.linalg.norm(normals, axis=1)
    ok = nlen > 1e-14
    centers, normals = centers[ok], normals[ok] / nlen[ok, None]

    if design_mesh is not None and len(design_mesh.triangles):
        occluded = segments_occluded(design_mesh, centers, light)
    else:
        occluded = np.zeros(len(centers), dtype=bool)
    to_light = light[None, :] - centers
    dist2 = np.einsum("ij,ij->i", to_light, to_light)
    cos = np.einsum("ij,ij->i", normals, to_light) / np.sqrt(dist2)
    # scan winding is unreliable; treat surfaces as two-sided by orienting
    # each sample normal toward the light
    cos = np.abs(cos)
    illum = intensity * np.maximum(0.0, cos) / np.maximum(dist2, 1e-12)
    illum[occluded] = 0.0
    samples = tuple((tuple(p), float(e), bool(o))
                    for p, e, o in zip(centers, illum, occluded))

    # top-down occlusion raster on the floor plane
    half = raster_extent / 2.0
    axis = (np.arange(raster_size) + 0.5) / raster_size * raster_extent - half
    gx, gz = np.meshgrid(proj[0] + axis, proj[1] + axis)
    cells = np.stack([gx.ravel(), np.full(gx.size, floor_y), gz.ravel()], axis=1)
    if design_mesh is not None and len(design_mesh.triangles):
        cell_occ = segments_occluded(design_mesh, cells, light)
    else:
        cell_occ = np.zeros(len(cells), dtype=bool)
    raster = cell_occ.reshape(raster_size, raster_size).astype(float)

    within = (gx - proj[0]) ** 2 + (gz - proj[1]) ** 2 <= COVERAGE_RADIUS ** 2
    coverage = float(raster[within].mean()) if within.any() else 0.0
    mean_illum = float(illum.mean()) if len(illum) else 0.0
    return LightingReport(samples, raster, raster_extent,
                          (float(proj[0]), float(proj[1])), floor_y,
                          coverage, mean_illum)


# --------------------------------------------------------------------------
# Requirement specs
# --------------------------------------------------------------------------

_CLAUSE_KINDS = ("max_height", "max_extent", "align", "fits_inside_cavity",
                 "stable")
_AXES = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class RequirementSpec:
    clauses: tuple

    def __post_init__(self):
        for c in self.clauses:
            kind = c.get("type")
            if kind not in _CLAUSE_KINDS:
                raise ValueError(f"unknown clause type {kind!r}")
            if kind == "max_height" and not c.get("limit", 0) > 0:
                raise ValueError("max_height limit must be positive")
            if kind == "max_extent":
                if c.get("axis") not in _AXES:
                    raise ValueError("max_extent axis must be x, y or z")
                if "limit" not in c and "reference_plane" not in c:
                    raise ValueError("max_extent needs limit or reference_plane")
                if "limit" in c and not c["limit"] > 0:
                    raise ValueError("max_extent limit must be positive")
            if kind == "align":
                if c.get("tol", -1) < 0:
                    raise ValueError("align tol must be >= 0")
                if "param" not in c or "target" not in c:
                    raise ValueError("align needs param and target")
            if kind == "fits_inside_cavity":
                if not (c.get("radius", 0) > 0 and c.get("height", 0) > 0):
                    raise ValueError("cavity radius and height must be positive")

    @staticmethod
    def from_json(data: dict) -> "RequirementSpec":
        return RequirementSpec(tuple(dict(c) for c in data["clauses"]))

    def to_json(self) -> dict:
        return {"clauses": [dict(c) for c in self.clauses]}


@dataclass(frozen=True)
class ClauseResult:
    clause: dict
    passed: bool
    measured: Optional[float]
    detail: str

    def to_json(self) -> dict:
        return {"clause": dict(self.clause), "passed": self.passed,
                "measured": self.measured, "detail": self.detail}


@dataclass(frozen=True)
class RequirementReport:
    results: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> dict:
        return {"passed": self.passed,
                "results": [r.to_json() for r in self.results]}


def _lathe_profile_samples(design: Design, config: Configuration):
    """Scaled (radius, y) samples matching the generated solid of revolution."""
    slots = resolve_slots(design, config)
    path, height = slots["profile"], slots["height"]
    pts = []
    for seg in path.segments:
        pts.append(eval_bezier_many(seg, np.linspace(0.0, 1.0, 256)))
    pts = np.vstack(pts)
    r, y = pts[:, 0].copy(), pts[:, 1].copy()
    y = (y - y.min()) * (height / (y.max() - y.min()))
    if slots.get("max_diameter") is not None:
        r *= (slots["max_diameter"] / 2.0) / r.max()
        r = np.maximum(r, R_MIN)
    return r, y, float(height)


_PANEL_CAVITY = {"panel_table", "panel_shelf", "panel_bench"}


def _panel_cavity(design: Design, config: Configuration) -> tuple[float, float, float]:
    """Interior (width, depth, height) of the panel design's open cavity."""
    gen = design.generator.generator
    s = resolve_slots(design, config)
    if gen == "panel_table":
        return (s["width"] - 2 * s["leg_thickness"],
                s["depth"] - 2 * s["leg_thickness"],
                s["height"] - s["top_thickness"])
    if gen == "panel_bench":
        return (s["seat_width"] - 2 * s["leg_thickness"],
                s["seat_depth"] - 2 * s["leg_thickness"],
                s["seat_height"] - s["seat_thickness"])
    if gen == "panel_shelf":
        b = s["board_thickness"]
        k = max(1, int(round(s["compartments"])))
        depth = s["depth"] - (s["back_thickness"] if s["has_back"] else 0.0)
        inner_h = (s["height"] - 2 * b - (k - 1) * b) / k
        return (s["width"] - 2 * b, depth, inner_h)
    raise UnknownClauseForDesignKind(
        f"fits_inside_cavity is not defined for generator {gen!r}")


def check_requirements(design: Design, config: Configuration,
                       mesh: TriangleMesh, scene: Optional[EnvironmentScene],
                       spec: RequirementSpec) -> RequirementReport:
    report = validate(design, config)
    if not report.valid:
        raise InvalidConfiguration("; ".join(v.message for v in report.violations))
    lo = mesh.vertices.min(axis=0)
    hi = mesh.vertices.max(axis=0)
    results = []
    for clause in spec.clauses:
        kind = clause["type"]
        if kind == "max_height":
            measured = float(hi[1] - lo[1])
            passed = measured <= clause["limit"] + 1e-12
            detail = f"bbox height {measured:.4f} m vs limit {clause['limit']:.4f} m"
        elif kind == "max_extent":
            ax = _AXES[clause["axis"]]
            measured = float(hi[ax] - lo[ax])
            if "limit" in clause:
                limit = float(clause["limit"])
            else:
                if scene is None or not scene.planes:
                    raise NoSupportPlane("reference_plane requires a scene with planes")
                ref = scene.planes[clause["reference_plane"]]
                bw = ref.bounds_world()
                limit = float(bw[:, ax].max() - bw[:, ax].min())
            passed = measured <= limit + 1e-12
            detail = f"extent {measured:.4f} m along {clause['axis']} vs limit {limit:.4f} m"
        elif kind == "align":
            value = float(config.values[clause["param"]])
            measured = abs(value - clause["target"])
            passed = measured <= clause["tol"] + 1e-12
            detail = (f"{clause['param']} = {value:.4f} m vs target "
                      f"{clause['target']:.4f} m (tol {clause['tol']:.4f})")
        elif kind == "fits_inside_cavity":
            r_req, h_req = clause["radius"], clause["height"]
            if design.generator.generator == "lathe":
                radii, ys, height = _lathe_profile_samples(design, config)
                inner = radii[ys <= h_req + 1e-9]
                min_r = float(inner.min()) if len(inner) else 0.0
                measured = min_r
                passed = height + 1e-12 >= h_req and min_r + 1e-12 >= r_req
                detail = (f"min inner radius {min_r:.4f} m over y<= {h_req:.3f} "
                          f"(need {r_req:.4f}); inner height {height:.4f} "
                          f"(need {h_req:.4f})")
            elif design.generator.generator in _PANEL_CAVITY:
                cw, cd, ch = _panel_cavity(design, config)
                measured = min(cw, cd) / 2.0
                passed = (min(cw, cd) + 1e-12 >= 2 * r_req
                          and ch + 1e-12 >= h_req)
                detail = (f"cavity {cw:.3f}x{cd:.3f}x{ch:.3f} m vs cylinder "
                          f"r={r_req:.3f} h={h_req:.3f}")
            else:
                raise UnknownClauseForDesignKind(
                    "fits_inside_cavity is not defined for "
                    f"generator {design.generator.generator!r}")
        elif kind == "stable":
            if scene is not None and scene.planes:
                plane: PlaneLike = min(scene.planes, key=lambda p: p.height())
            else:
                plane = float(lo[1])
            measured = quasi_static_stability(mesh, plane)
            passed = measured > 0.0
            detail = f"quasi-static margin {measured:.4f} m"
        else:  # pragma: no cover - guarded by RequirementSpec
            raise UnknownClauseForDesignKind(kind)
        results.append(ClauseResult(dict(clause), bool(passed),
                                    float(measured), detail))
    return RequirementReport(tuple(results))
