"""Environment scan ingestion: OBJ/PLY import, horizontal support plane
detection (seeded RANSAC over area-weighted surface samples), and ray queries
through a median-split BVH.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull

from .errors import EmptyScan, NonTriangulated, ScanParseError
from .geometry import TriangleMesh

UP = np.array([0.0, 1.0, 0.0])
PLANE_MAX_TILT_DEG = 10.0
PLANE_INLIER_DIST = 0.005
RANSAC_ITERATIONS = 200
MAX_PLANES = 8
SURFACE_SAMPLES = 20000
DEFAULT_SEED = 20240131


@dataclass(frozen=True)
class SupportPlane:
    normal: tuple[float, float, float]  # unit, within 10 degrees of up
    offset: float  # plane equation dot(normal, x) = offset
    inlier_count: int
    bounds: np.ndarray  # (k, 2) convex polygon in the in-plane basis
    basis: np.ndarray  # (2, 3) in-plane orthonormal basis rows
    origin: tuple[float, float, float]

    def bounds_world(self) -> np.ndarray:
        return np.asarray(self.origin) + self.bounds @ self.basis

    def height(self) -> float:
        """World y of the plane point straight below the origin projection."""
        return float(self.origin[1])


@dataclass(frozen=True)
class Hit:
    t: float
    triangle_id: int


@dataclass(frozen=True)
class EnvironmentScene:
    mesh: TriangleMesh
    planes: tuple[SupportPlane, ...]
    accel: "Bvh"
    seed: int = DEFAULT_SEED


# --------------------------------------------------------------------------
# Import
# --------------------------------------------------------------------------

def _remap_axes(v: np.ndarray, axis_up: str) -> np.ndarray:
    if axis_up == "y":
        return v
    if axis_up == "z":  # z-up scans: (x, y, z) -> (x, z, -y)
        return np.stack([v[:, 0], v[:, 2], -v[:, 1]], axis=1)
    raise ScanParseError(f"unsupported up axis {axis_up!r}")


def parse_obj(text: str, axis_up: str = "y") -> TriangleMesh:
    verts: list[list[float]] = []
    tris: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tag, *rest = line.split()
        if tag == "v":
            if len(rest) < 3:
                raise ScanParseError(f"line {lineno}: vertex needs 3 coordinates")
            try:
                verts.append([float(x) for x in rest[:3]])
            except ValueError:
                raise ScanParseError(f"line {lineno}: bad vertex coordinate")
        elif tag == "f":
            idx = []
            for token in rest:
                head = token.split("/")[0]
                try:
                    i = int(head)
                except ValueError:
                    raise ScanParseError(f"line {lineno}: bad face index {token!r}")
                idx.append(i - 1 if i > 0 else len(verts) + i)
            if len(idx) == 3:
                tris.append(idx)
            elif len(idx) == 4:
                tris.append([idx[0], idx[1], idx[2]])
                tris.append([idx[0], idx[2], idx[3]])
            else:
                raise NonTriangulated(f"line {lineno}: {len(idx)}-gon faces are not supported")
    if not tris:
        raise EmptyScan("scan contains no triangles")
    v = _remap_axes(np.asarray(verts, dtype=float), axis_up)
    return TriangleMesh(v, np.asarray(tris, dtype=np.int64), {"scan": (0, len(tris))})


_PLY_TYPES = {
    "char": "i1", "uchar": "u1", "int8": "i1", "uint8": "u1",
    "short": "i2", "ushort": "u2", "int16": "i2", "uint16": "u2",
    "int": "i4", "uint": "u4", "int32": "i4", "uint32": "u4",
    "float": "f4", "float32": "f4", "double": "f8", "float64": "f8",
}


def parse_ply(data: bytes, axis_up: str = "y") -> TriangleMesh:
    end = data.find(b"end_header")
    if not data.startswith(b"ply") or end < 0:
        raise ScanParseError("not a PLY file")
    header = data[:end].decode("ascii", errors="replace").splitlines()
    body = data[data.find(b"\n", end) + 1:]

    fmt = None
    elements: list[tuple[str, int, list]] = []
    for line in header[1:]:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "format":
            fmt = parts[1]
        elif parts[0] == "element":
            elements.append((parts[1], int(parts[2]), []))
        elif parts[0] == "property":
            if not elements:
                raise ScanParseError("property before element")
            if parts[1] == "list":
                elements[-1][2].append(("list", parts[2], parts[3], parts[4]))
            else:
                elements[-1][2].append(("scalar", parts[1], parts[2]))
    if fmt not in ("ascii", "binary_little_endian"):
        raise ScanParseError(f"unsupported PLY format {fmt!r}")

    verts: Optional[np.ndarray] = None
    faces: list[list[int]] = []
    if fmt == "ascii":
        tokens = body.decode("ascii", errors="replace").split()
        pos = 0
        for name, count, props in elements:
            rows = []
            for _ in range(count):
                row = {}
                for p in props:
                    if p[0] == "list":
                        n = int(float(tokens[pos])); pos += 1
                        row[p[3]] = [int(float(tokens[pos + i])) for i in range(n)]
                        pos += n
                    else:
                        row[p[2]] = float(tokens[pos]); pos += 1
                rows.append(row)
            _collect_ply(name, rows, faces)
            if name == "vertex":
                verts = np.array([[r["x"], r["y"], r["z"]] for r in rows])
    else:
        offset = 0
        for name, count, props in elements:
            rows = []
            for _ in range(count):
                row = {}
                for p in props:
                    if p[0] == "list":
                        cdt = np.dtype("<" + _PLY_TYPES[p[1]])
                        n = int(np.frombuffer(body, cdt, 1, offset)[0])
                        offset += cdt.itemsize
                        idt = np.dtype("<" + _PLY_TYPES[p[2]])
                        row[p[3]] = np.frombuffer(body, idt, n, offset).tolist()
                        offset += idt.itemsize * n
                    else:
                        dt = np.dtype("<" + _PLY_TYPES[p[1]])
                        row[p[2]] = float(np.frombuffer(body, dt, 1, offset)[0])
                        offset += dt.itemsize
                rows.append(row)
            _collect_ply(name, rows, faces)
            if name == "vertex":
                verts = np.array([[r["x"], r["y"], r["z"]] for r in rows])
    if verts is None or not faces:
        raise EmptyScan("scan contains no triangles")
    tris = []
    for f in faces:
        if len(f) == 3:
            tris.append(f)
        elif len(f) == 4:
            tris.append([f[0], f[1], f[2]])
            tris.append([f[0], f[2], f[3]])
        else:
            raise NonTriangulated(f"{len(f)}-gon faces are not supported")
    v = _remap_axes(verts.astype(float), axis_up)
    return TriangleMesh(v, np.asarray(tris, dtype=np.int64), {"scan": (0, len(tris))})


def _collect_ply(name, rows, faces):
    if name == "face":
        for r in rows:
            key = "vertex_indices" if "vertex_indices" in r else "vertex_index"
            faces.append(r[key])


def load_scene(data: bytes | str, fmt: str, axis_up: str = "y",
               seed: int = DEFAULT_SEED) -> EnvironmentScene:
    fmt = fmt.lower()
    if fmt == "obj":
        text = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
        mesh = parse_obj(text, axis_up)
    elif fmt == "ply":
        if isinstance(data, str):
            data = data.encode("utf-8")
        mesh = parse_ply(data, axis_up)
    else:
        raise ScanParseError(f"unsupported scan format {fmt!r}")
    planes = detect_planes(mesh, seed=seed)
    return EnvironmentScene(mesh, tuple(planes), Bvh(mesh), seed)


# --------------------------------------------------------------------------
# Plane detection
# --------------------------------------------------------------------------

def sample_surface(mesh: TriangleMesh, count: int, rng: np.random.Generator) -> np.ndarray:
    areas = mesh.triangle_areas()
    total = areas.sum()
    if total <= 0:
        return mesh.vertices[rng.integers(0, len(mesh.vertices), count)]
    pick = rng.choice(len(areas), size=count, p=areas / total)
    r1 = np.sqrt(rng.random(count))
    r2 = rng.random(count)
    t = mesh.triangles[pick]
    a, b, c = mesh.vertices[t[:, 0]], mesh.vertices[t[:, 1]], mesh.vertices[t[:, 2]]
    return (1 - r1)[:, None] * a + (r1 * (1 - r2))[:, None] * b + (r1 * r2)[:, None] * c


def _fit_plane(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid, full_matrices=False)
    normal = vt[-1]
    if normal @ UP < 0:
        normal = -normal
    return normal, centroid


def detect_planes(mesh: TriangleMesh, seed: int = DEFAULT_SEED,
                  samples: int = SURFACE_SAMPLES) -> list[SupportPlane]:
    rng = np.random.default_rng(seed)
    pts = sample_surface(mesh, samples, rng)
    min_inliers = max(500, int(0.02 * samples))
    cos_limit = math.cos(math.radians(PLANE_MAX_TILT_DEG))
    planes: list[SupportPlane] = []

    remaining = pts
    for _ in range(MAX_PLANES):
        if len(remaining) < min_inliers:
            break
        best_mask, best_count = None, 0
        for _ in range(RANSAC_ITERATIONS):
            idx = rng.integers(0, len(remaining), 3)
            a, b, c = remaining[idx]
            n = np.cross(b - a, c - a)
            norm = np.linalg.norm(n)
            if norm < 1e-12:
                continue
            n = n / norm
            if n @ UP < 0:
                n = -n
            if n @ UP < cos_limit:
                continue
            d = (remaining - a) @ n
            mask = np.abs(d) <= PLANE_INLIER_DIST
            count = int(mask.sum())
            if count > best_count:
                best_mask, best_count = mask, count
        if best_mask is None or best_count < min_inliers:
            break
        # refine by least squares over the consensus set, then re-collect
        normal, centroid = _fit_plane(remaining[best_mask])
        if normal @ UP < cos_limit:
            remaining = remaining[~best_mask]
            continue
        d = (remaining - centroid) @ normal
        mask = np.abs(d) <= PLANE_INLIER_DIST
        inliers = remaining[mask]
        normal, centroid = _fit_plane(inliers)
        planes.append(_make_plane(normal, centroid, inliers))
        d = (remaining - centroid) @ normal
        remaining = remaining[np.abs(d) > PLANE_INLIER_DIST]
    planes.sort(key=lambda p: -p.inlier_count)
    return planes


def _make_plane(normal: np.ndarray, origin: np.ndarray, inliers: np.ndarray) -> SupportPlane:
    e_u = np.cross(UP, normal)
    if np.linalg.norm(e_u) < 1e-9:
        e_u = np.array([1.0, 0.0, 0.0])
    else:
        e_u /= np.linalg.norm(e_u)
    e_v = np.cross(normal, e_u)
    basis = np.stack([e_u, e_v])
    flat = (inliers - origin) @ basis.T
    try:
        hull = ConvexHull(flat)
        bounds = flat[hull.vertices]
    except Exception:
        lo, hi = flat.min(axis=0), flat.max(axis=0)
        bounds = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
    return SupportPlane(tuple(normal), float(normal @ origin), len(inliers),
                        bounds, basis, tuple(origin))


# --------------------------------------------------------------------------
# BVH
# --------------------------------------------------------------------------

T_EPS = 1e-6


class Bvh:
    """Median-split bounding volume hierarchy, leaf size <= 4."""

    LEAF_SIZE = 4

    def __init__(self, mesh: TriangleMesh):
        self.mesh = mesh
        t = mesh.triangles
        v = mesh.vertices
        self.v0 = v[t[:, 0]]
        self.e1 = v[t[:, 1]] - self.v0
        self.e2 = v[t[:, 2]] - self.v0
        tri_lo = np.minimum(np.minimum(v[t[:, 0]], v[t[:, 1]]), v[t[:, 2]])
        tri_hi = np.maximum(np.maximum(v[t[:, 0]], v[t[:, 1]]), v[t[:, 2]])
        centroids = (tri_lo + tri_hi) / 2.0
        self.order = np.arange(len(t))
        self.nodes: list[tuple] = []  # (lo, hi, left, right, start, count)
        if len(t):
            self._build(0, len(t), tri_lo, tri_hi, centroids)

    def _build(self, start, stop, tri_lo, tri_hi, centroids) -> int:
        idx = self.order[start:stop]
        lo = tri_lo[idx].min(axis=0)
        hi = tri_hi[idx].max(axis=0)
        node_id = len(self.nodes)
        self.nodes.append(None)
        if stop - start <= self.LEAF_SIZE:
            self.nodes[node_id] = (lo, hi, -1, -1, start, stop - start)
            return node_id
        axis = int(np.argmax(hi - lo))
        keys = centroids[idx][:, axis]
        mid = (stop - start) // 2
        part = np.argpartition(keys, mid)
        self.order[start:stop] = idx[part]
        left = self._build(start, start + mid, tri_lo, tri_hi, centroids)
        right = self._build(start + mid, stop, tri_lo, tri_hi, centroids)
        self.nodes[node_id] = (lo, hi, left, right, start, stop - start)
        return node_id

    def _leaf_hit(self, start, count, origin, direction, best_t):
        best = None
        for k in range(start, start + count):
            tri = self.order[k]
            t = _moller_trumbore(self.v0[tri], self.e1[tri], self.e2[tri],
                                 origin, direction)
            if t is not None and t < best_t:
                best_t = t
                best = Hit(t, int(tri))
        return best, best_t

    def raycast(self, origin, direction, max_t: float = np.inf) -> Optional[Hit]:
        if not self.nodes:
            return None
        origin = np.asarray(origin, dtype=float)
        direction = np.asarray(direction, dtype=float)
        inv = np.where(direction != 0, 1.0 / np.where(direction == 0, 1, direction), np.inf)
        best: Optional[Hit] = None
        best_t = max_t
        stack = [0]
        while stack:
            lo, hi, left, right, start, count = self.nodes[stack.pop()]
            t0 = (lo - origin) * inv
            t1 = (hi - origin) * inv
            tmin = np.minimum(t0, t1).max()
            tmax = np.maximum(t0, t1).min()
            if tmax < max(tmin, T_EPS) or tmin > best_t:
                continue
            if left < 0:
                hit, best_t = self._leaf_hit(start, count, origin, direction, best_t)
                if hit is not None:
                    best = hit
            else:
                stack.append(left)
                stack.append(right)
        return best

    def occluded(self, origin, direction, max_t: float) -> bool:
        return self.raycast(origin, direction, max_t) is not None


def _moller_trumbore(v0, e1, e2, origin, direction) -> Optional[float]:
    pvec = np.cross(direction, e2)
    det = e1 @ pvec
    if abs(det) < 1e-14:
        return None
    inv_det = 1.0 / det
    tvec = origin - v0
    u = (tvec @ pvec) * inv_det
    if u < -1e-12 or u > 1 + 1e-12:
        return None
    qvec = np.cross(tvec, e1)
    v = (direction @ qvec) * inv_det
    if v < -1e-12 or u + v > 1 + 1e-12:
        return None
    t = (e2 @ qvec) * inv_det
    if t <= T_EPS:
        return None
    return float(t)


def raycast(scene: EnvironmentScene, origin, direction, max_t: float = np.inf) -> Optional[Hit]:
    d = np.asarray(direction, dtype=float)
    n = np.linalg.norm(d)
    if abs(n - 1.0) > 1e-6:
        raise ValueError("direction must be a unit vector")
    return scene.accel.raycast(origin, d, max_t)


def brute_force_raycast(mesh: TriangleMesh, origin, direction,
                        max_t: float = np.inf) -> Optional[Hit]:
    """Reference all-triangles intersection for differential testing."""
    origin = np.asarray(origin, dtype=float)
    direction = np.asarray(direction, dtype=float)
    t = mesh.triangles
    v0 = mesh.vertices[t[:, 0]]
    best, best_t = None, max_t
    for i in range(len(t)):
        e1 = mesh.vertices[t[i, 1]] - v0[i]
        e2 = mesh.vertices[t[i, 2]] - v0[i]
        hit = _moller_trumbore(v0[i], e1, e2, origin, direction)
        if hit is not None and hit < best_t:
            best, best_t = Hit(hit, i), hit
    return best


def segments_occluded(mesh: TriangleMesh, starts: np.ndarray, end: np.ndarray,
                      chunk: int = 2048) -> np.ndarray:
    """Vectorized any-hit test for many segments against one small mesh.

    starts: (n, 3) points; end: (3,) shared endpoint (the light).
    """
    t = mesh.triangles
    v0 = mesh.vertices[t[:, 0]]
    e1 = mesh.vertices[t[:, 1]] - v0
    e2 = mesh.vertices[t[:, 2]] - v0
    out = np.zeros(len(starts), dtype=bool)
    for c0 in range(0, len(starts), chunk):
        s = starts[c0:c0 + chunk]
        d = end[None, :] - s  # (n, 3), segment param in [0, 1]
        pvec = np.cross(d[:, None, :], e2[None, :, :])
        det = np.einsum("mj,nmj->nm", e1, pvec)
        safe = np.abs(det) > 1e-14
        inv = np.where(safe, 1.0 / np.where(det == 0, 1, det), 0.0)
        tvec = s[:, None, :] - v0[None, :, :]
        u = np.einsum("nmj,nmj->nm", tvec, pvec) * inv
        qvec = np.cross(tvec, e1[None, :, :])
        vv = np.einsum("nj,nmj->nm", d, qvec) * inv
        tt = np.einsum("mj,nmj->nm", e2, qvec) * inv
        hit = (safe & (u >= 0) & (u <= 1) & (vv >= 0) & (u + vv <= 1)
               & (tt > 1e-6) & (tt < 1 - 1e-6))
        out[c0:c0 + chunk] = hit.any(axis=1)
    return out
