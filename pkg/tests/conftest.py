import math

import numpy as np
import pytest

from paramcad import environment
from paramcad.geometry import TriangleMesh, box

FLOOR_OBJ = "v -2 0 -2\nv 2 0 -2\nv 2 0 2\nv -2 0 2\nf 1 2 3 4\n"


@pytest.fixture(scope="session")
def floor_scene():
    return environment.load_scene(FLOOR_OBJ, "obj")


def make_box_mesh(w, h, d, tilt_deg=0.0):
    """Axis-aligned box resting on y=0, optionally tilted about z through its
    center and re-dropped so the lowest vertex touches y=0."""
    v, t = box((-w / 2, 0.0, -d / 2), (w / 2, h, d / 2))
    if tilt_deg:
        a = math.radians(tilt_deg)
        rot = np.array([[math.cos(a), -math.sin(a), 0.0],
                        [math.sin(a), math.cos(a), 0.0],
                        [0.0, 0.0, 1.0]])
        com = v.mean(axis=0)
        v = (v - com) @ rot.T + com
        v[:, 1] -= v[:, 1].min()
    return TriangleMesh(v, t, {"body": (0, len(t))})


def make_disc_mesh(radius, y, n=128):
    """Horizontal fan disc at height y, centered on the revolution axis."""
    verts = [[0.0, y, 0.0]]
    verts += [[radius * math.cos(2 * math.pi * i / n), y,
               radius * math.sin(2 * math.pi * i / n)] for i in range(n)]
    tris = [[0, (i + 1) % n + 1, i + 1] for i in range(n)]
    return TriangleMesh(np.asarray(verts, dtype=float),
                        np.asarray(tris, dtype=np.int64), {"disc": (0, n)})
