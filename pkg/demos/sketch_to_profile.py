"""From a freehand 3D stroke to a committed lathe profile.

Simulates a controller stroke drawn in mid-air (a wavy vertical line with
jitter), projects it onto the view plane, fits a small cubic Bezier path,
and commits it as the vase's revolve profile. The fitted curve is
normalized to the design's current height and clamped to the minimum
lathe radius; `modified_by_constraints` reports when that happened.

Run:  python3 demos/sketch_to_profile.py
"""

import numpy as np

from paramcad.core import Configuration, default_configuration
from paramcad.dsl import get_builtin
from paramcad.geometry import diagnose, generate_mesh
from paramcad.sketch import (Stroke, apply_curve, fit_bezier_path,
                             project_stroke)
from paramcad.curves import R_MIN


def main():
    rng = np.random.default_rng(7)
    n = 120
    y = np.linspace(0.0, 0.5, n)
    radius = 0.08 + 0.03 * np.sin(y * 9.0) + rng.normal(0, 0.002, n)
    stroke = Stroke(points=np.stack([radius, y, np.zeros(n)], axis=1),
                    timestamps=np.linspace(0.0, 1.4, n),
                    view_dir=(0.0, 0.0, 1.0))

    design = get_builtin("vase_classic")
    config = default_configuration(design)
    budget = design.parameter("profile").kind.segment_budget

    pts = project_stroke(stroke)
    pts[:, 0] += R_MIN - pts[:, 0].min()  # radial distance from the axis
    fit = fit_bezier_path(pts, budget)
    print(f"fitted {len(fit.path.segments)} segment(s), "
          f"max deviation {fit.max_deviation * 1000:.2f} mm")

    result, fit = apply_curve(design, config, "profile", fit)
    assert isinstance(result, Configuration)
    print(f"committed; modified_by_constraints={fit.modified_by_constraints}")

    mesh = generate_mesh(design, result)
    d = diagnose(mesh)
    print(f"regenerated vase: {len(mesh.triangles)} triangles, "
          f"volume {d.volume * 1e6:.1f} cm^3, watertight={d.watertight}")


if __name__ == "__main__":
    main()
