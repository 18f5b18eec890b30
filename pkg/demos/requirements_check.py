"""Checking configurations against bundled requirement specs.

The package ships six ready-made requirement specs (L1-L4 for lampshades,
B2-B3 for benches) under paramcad/data/tasks. This script evaluates a few
configurations against them and prints the per-clause verdicts.

Run:  python3 demos/requirements_check.py
"""

import json
from importlib import resources

from paramcad.core import EditMode, default_configuration, set_parameter
from paramcad.dsl import get_builtin
from paramcad.estimators import RequirementSpec, check_requirements
from paramcad.geometry import generate_mesh


def load_task(name):
    text = resources.files("paramcad").joinpath(f"data/tasks/{name}.json")
    data = json.loads(text.read_text("utf-8"))
    print(f"\n[{name}] {data['comment']}")
    return RequirementSpec.from_json(data)


def run(design_id, spec, **edits):
    design = get_builtin(design_id)
    config = default_configuration(design)
    for name, value in edits.items():
        config = set_parameter(design, config, name, value, EditMode.COMMIT)
    mesh = generate_mesh(design, config)
    report = check_requirements(design, config, mesh, None, spec)
    label = ", ".join(f"{k}={v}" for k, v in edits.items()) or "defaults"
    print(f"  {design_id} ({label})")
    for r in report.results:
        print(f"    [{'PASS' if r.passed else 'FAIL'}] {r.detail}")


def main():
    l1 = load_task("L1")
    run("lampshade_cone", l1)
    run("lampshade_cone", l1, height=0.45)

    l4 = load_task("L4")
    run("lampshade_cone", l4)
    run("lampshade_empire", l4)

    b3 = load_task("B3")
    run("bench_garden", b3, armrest_height=0.24)
    run("bench_garden", b3, armrest_height=0.26)


if __name__ == "__main__":
    main()
