"""Shadow and illumination preview under a point light.

Places a cone lampshade in a small scanned room, hangs a light above it,
and reports how much of the floor around the light lands in shadow plus
the mean surface illuminance. Writes the top-down shadow raster as a
binary PGM you can open in any image viewer.

Run:  python3 demos/lighting_preview.py
"""

from pathlib import Path

from paramcad import environment
from paramcad.core import default_configuration
from paramcad.dsl import get_builtin
from paramcad.estimators import estimate_lighting, raster_to_pgm
from paramcad.geometry import generate_mesh

FLOOR_OBJ = "v -2 0 -2\nv 2 0 -2\nv 2 0 2\nv -2 0 2\nf 1 2 3 4\n"


def main():
    scene = environment.load_scene(FLOOR_OBJ, "obj")
    design = get_builtin("lampshade_cone")
    mesh = generate_mesh(design, default_configuration(design))

    for height in (0.8, 1.2, 1.6):
        report = estimate_lighting(mesh, scene, (0.0, height, 0.0))
        print(f"light at y={height:.1f} m: shadow coverage "
              f"{report.shadow_coverage:.4f}, mean illuminance "
              f"{report.mean_illuminance:.5f} "
              f"({len(report.samples)} samples)")

    report = estimate_lighting(mesh, scene, (0.0, 1.2, 0.0))
    out = Path("lampshade_shadow.pgm")
    out.write_bytes(raster_to_pgm(report.shadow_raster))
    print(f"wrote {out} ({report.shadow_raster.shape[0]}x"
          f"{report.shadow_raster.shape[1]} raster, floor at "
          f"y={report.floor_height:.3f} m)")


if __name__ == "__main__":
    main()
