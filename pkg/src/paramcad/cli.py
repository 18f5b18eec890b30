"""Batch/headless command line: catalog listing, STL generation, estimation
runs, requirement checks, and the API server.

Exit codes: 0 success, 1 I/O or parse error, 2 constraint violation,
3 toppled verdict, 4 requirement failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import core, dsl, environment, estimators
from .core import EditMode, SnapBackResult
from .errors import ParamCadError
from .geometry import export_stl, generate_mesh

EXIT_IO = 1
EXIT_CONSTRAINT = 2
EXIT_TOPPLED = 3
EXIT_REQUIREMENT = 4


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_design(design_id: str):
    try:
        return dsl.get_builtin(design_id)
    except ParamCadError:
        pass
    path = Path(design_id)
    if path.suffix == ".pdsl" and path.exists():
        try:
            return dsl.load_design_file(path)
        except (ParamCadError, OSError) as exc:
            _fail(EXIT_IO, f"cannot load design {design_id!r}: {exc}")
    _fail(EXIT_IO, f"unknown design {design_id!r}")


def _parse_value(raw: str):
    lowered = raw.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        return float(raw)
    except ValueError:
        return raw


def _configure(design, assignments):
    config = core.default_configuration(design)
    for token in assignments:
        if "=" not in token:
            _fail(EXIT_IO, f"--set expects name=value, got {token!r}")
        name, _, raw = token.partition("=")
        try:
            result = core.set_parameter(design, config, name,
                                        _parse_value(raw), EditMode.COMMIT)
        except ParamCadError as exc:
            _fail(EXIT_IO, f"{name}: {exc}")
        if isinstance(result, SnapBackResult):
            _fail(EXIT_CONSTRAINT,
                  f"{name}={raw} rejected: {result.violation.message}")
        config = result
    return config


def _load_scene(path: str):
    p = Path(path)
    fmt = p.suffix.lstrip(".").lower()
    try:
        data = p.read_bytes()
        return environment.load_scene(data, fmt)
    except (OSError, ParamCadError) as exc:
        _fail(EXIT_IO, f"cannot load scan {path!r}: {exc}")


def _plane_under(scene, mesh):
    min_y = float(mesh.vertices[:, 1].min())
    below = [p for p in scene.planes if p.height() <= min_y + 1e-6]
    if below:
        return max(below, key=lambda p: p.height())
    if scene.planes:
        return min(scene.planes, key=lambda p: p.height())
    _fail(EXIT_IO, "no support plane detected in the scan")


@click.group()
def main():
    """paramcad: parametric design configuration toolkit."""


@main.command("list-designs")
def list_designs():
    """List the built-in design catalog."""
    designs = dsl.list_builtin()
    width = max(len(d.design_id) for d in designs)
    click.echo(f"{'id':<{width}}  params  generator         name")
    for d in designs:
        click.echo(f"{d.design_id:<{width}}  {len(d.parameters):>6}  "
                   f"{d.generator.generator:<16}  {d.name}")


@main.command()
@click.option("--design", "design_id", required=True)
@click.option("--set", "assignments", multiple=True,
              help="Parameter assignment name=value (repeatable).")
@click.option("--out", "out_path", required=True, type=click.Path())
def generate(design_id, assignments, out_path):
    """Generate a binary STL for a design."""
    design = _load_design(design_id)
    config = _configure(design, assignments)
    try:
        mesh = generate_mesh(design, config)
        data = export_stl(mesh)
        Path(out_path).write_bytes(data)
    except ParamCadError as exc:
        _fail(EXIT_CONSTRAINT, str(exc))
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write {out_path!r}: {exc}")
    click.echo(f"wrote {out_path} ({len(mesh.triangles)} triangles, "
               f"{len(data)} bytes)")


@main.group()
def estimate():
    """Stability and lighting estimation."""


@estimate.command()
@click.option("--design", "design_id", required=True)
@click.option("--set", "assignments", multiple=True)
@click.option("--env", "env_path", required=True, type=click.Path())
@click.option("--tilt", "tilt_deg", default=estimators.RELEASE_TILT_DEG,
              show_default=True, help="Release tilt in degrees.")
@click.option("--json", "as_json", is_flag=True)
def stability(design_id, assignments, env_path, tilt_deg, as_json):
    """Drop-test a configured design onto the scanned support plane."""
    design = _load_design(design_id)
    config = _configure(design, assignments)
    scene = _load_scene(env_path)
    try:
        mesh = generate_mesh(design, config)
        plane = _plane_under(scene, mesh)
        report = estimators.estimate_stability(mesh, scene, plane,
                                               release_tilt_deg=tilt_deg)
    except ParamCadError as exc:
        _fail(EXIT_IO, str(exc))
    if as_json:
        click.echo(json.dumps(report.to_json(), indent=2))
    else:
        verdict = "TOPPLED" if report.toppled else "stable"
        click.echo(f"{verdict}  quasi-static margin "
                   f"{report.quasi_static_margin:+.4f} m, "
                   f"{len(report.contact_points)} contact points")
    sys.exit(EXIT_TOPPLED if report.toppled else 0)


@estimate.command()
@click.option("--design", "design_id", required=True)
@click.option("--set", "assignments", multiple=True)
@click.option("--env", "env_path", required=True, type=click.Path())
@click.option("--light", "light_spec", required=True,
              help="x,y,z[,intensity] of the point light.")
@click.option("--raster", "raster_path", type=click.Path(),
              help="Write the top-down shadow raster as binary PGM.")
@click.option("--json", "as_json", is_flag=True)
def lighting(design_id, assignments, env_path, light_spec, raster_path, as_json):
    """Estimate illumination and shadowing of the scan under a point light."""
    design = _load_design(design_id)
    config = _configure(design, assignments)
    scene = _load_scene(env_path)
    parts = light_spec.split(",")
    if len(parts) not in (3, 4):
        _fail(EXIT_IO, "--light expects x,y,z or x,y,z,intensity")
    try:
        position = [float(x) for x in parts[:3]]
        intensity = float(parts[3]) if len(parts) == 4 else 1.0
    except ValueError:
        _fail(EXIT_IO, f"malformed --light value {light_spec!r}")
    try:
        mesh = generate_mesh(design, config)
        report = estimators.estimate_lighting(mesh, scene, position, intensity)
    except ParamCadError as exc:
        _fail(EXIT_IO, str(exc))
    if raster_path:
        try:
            Path(raster_path).write_bytes(
                estimators.raster_to_pgm(report.shadow_raster))
        except OSError as exc:
            _fail(EXIT_IO, f"cannot write {raster_path!r}: {exc}")
    if as_json:
        click.echo(json.dumps(report.to_json(), indent=2))
    else:
        click.echo(f"shadow coverage {report.shadow_coverage:.4f}, "
                   f"mean illuminance {report.mean_illuminance:.6f} "
                   f"({len(report.samples)} surface samples)")


@main.command()
@click.option("--design", "design_id", required=True)
@click.option("--set", "assignments", multiple=True)
@click.option("--env", "env_path", type=click.Path())
@click.option("--requirements", "spec_path", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def check(design_id, assignments, env_path, spec_path, as_json):
    """Check a configuration against a requirement spec."""
    design = _load_design(design_id)
    config = _configure(design, assignments)
    scene = _load_scene(env_path) if env_path else None
    try:
        spec = estimators.RequirementSpec.from_json(
            json.loads(Path(spec_path).read_text("utf-8")))
    except (OSError, ValueError, KeyError) as exc:
        _fail(EXIT_IO, f"cannot load requirements {spec_path!r}: {exc}")
    try:
        mesh = generate_mesh(design, config)
        report = estimators.check_requirements(design, config, mesh, scene, spec)
    except ParamCadError as exc:
        _fail(EXIT_IO, str(exc))
    if as_json:
        click.echo(json.dumps(report.to_json(), indent=2))
    else:
        for r in report.results:
            mark = "PASS" if r.passed else "FAIL"
            click.echo(f"[{mark}] {r.clause['type']}: {r.detail}")
    sys.exit(0 if report.passed else EXIT_REQUIREMENT)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP API server."""
    from . import service

    service.run(host, port)


if __name__ == "__main__":
    main()
