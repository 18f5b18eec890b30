"""Interactive-style customization walkthrough, headless.

Shows the commit/preview editing contract on a built-in lampshade:
valid commits update the configuration, invalid commits snap back to the
prior state, previews are allowed to be transiently invalid, and the
result exports as a binary STL.

Run:  python3 demos/customize_lampshade.py
"""

from pathlib import Path

from paramcad.core import (Configuration, EditMode, SnapBackResult,
                           default_configuration, set_parameter)
from paramcad.dsl import get_builtin
from paramcad.ergonomics import BodyProfile, recommend
from paramcad.geometry import diagnose, export_stl, generate_mesh


def show(label, config):
    vals = {k: (round(v, 4) if isinstance(v, float) else "…")
            for k, v in config.values.items()}
    print(f"{label:<28} {vals}")


def main():
    design = get_builtin("lampshade_cone")
    config = default_configuration(design)
    show("defaults", config)

    # a valid commit
    config = set_parameter(design, config, "height", 0.4, EditMode.COMMIT)
    show("commit height=0.4", config)

    # diameter is constrained to at most 1.2 * height = 0.48
    out = set_parameter(design, config, "diameter", 0.55, EditMode.COMMIT)
    assert isinstance(out, SnapBackResult)
    print(f"commit diameter=0.55       -> snapped back: {out.violation.message}")
    config = out.config

    # previews may carry invalid values for live ghosting; nothing commits
    preview = set_parameter(design, config, "diameter", 0.55, EditMode.PREVIEW)
    print(f"preview diameter=0.55      -> invalid_preview={preview.invalid_preview}")

    # committing height clamps dependent parameters back into range
    config = set_parameter(design, config, "diameter", 0.45, EditMode.COMMIT)
    config = set_parameter(design, config, "height", 0.3, EditMode.COMMIT)
    show(f"commit height=0.3 (clamped {config.clamped})", config)

    # an ergonomics annotation, for comparison with a table-height slider
    r = recommend("table_height", BodyProfile(1.77))
    print(f"table_height band for 1.77 m user: [{r.lo:.4f}, {r.hi:.4f}] m")

    mesh = generate_mesh(design, config)
    d = diagnose(mesh)
    out_path = Path("lampshade_cone_demo.stl")
    out_path.write_bytes(export_stl(mesh))
    print(f"exported {out_path} ({len(mesh.triangles)} triangles, "
          f"volume {d.volume * 1e6:.1f} cm^3, watertight={d.watertight})")


if __name__ == "__main__":
    main()
