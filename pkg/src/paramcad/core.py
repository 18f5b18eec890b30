"""Parametric design kernel: parameter kinds, constraints, and commit/preview
edit semantics with snap-back.

Configurations are immutable; every operation returns a fresh value. Invalid
commits return a SnapBackResult carrying the unchanged prior configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Any, Mapping, Optional, Union

import numpy as np

from .curves import C0_TOL, R_MIN, BezierPath
from .errors import KindMismatch, NoHandle, NonLengthParameter, UnknownParameter

TWO_PI = 2.0 * math.pi


# --------------------------------------------------------------------------
# Parameter kinds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Continuous:
    lo: float
    hi: float
    unit: str = "m"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"continuous range requires lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class Discrete:
    levels: tuple[float, ...]
    unit: str = "m"

    def __post_init__(self):
        if len(self.levels) < 1:
            raise ValueError("discrete kind needs at least one level")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError("discrete levels must be strictly increasing")


@dataclass(frozen=True)
class Option:
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels) or not self.labels:
            raise ValueError("option labels must be non-empty and unique")


@dataclass(frozen=True)
class Boolean:
    pass


@dataclass(frozen=True)
class Text:
    max_len: int


@dataclass(frozen=True)
class Curve:
    segment_budget: int
    plane: str = "lathe-profile"  # or "silhouette"

    def __post_init__(self):
        if self.segment_budget < 1:
            raise ValueError("segment_budget must be >= 1")
        if self.plane not in ("lathe-profile", "silhouette"):
            raise ValueError(f"unknown curve plane {self.plane!r}")


Kind = Union[Continuous, Discrete, Option, Boolean, Text, Curve]


# --------------------------------------------------------------------------
# Constraints
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearForm:
    """a * p + b over one other parameter p (p may be None for a constant)."""

    coeff: float = 0.0
    param: Optional[str] = None
    offset: float = 0.0

    def evaluate(self, values: Mapping[str, Any]) -> float:
        if self.param is None:
            return self.offset
        return self.coeff * float(values[self.param]) + self.offset

    def is_constant(self) -> bool:
        return self.param is None


@dataclass(frozen=True)
class Constraint:
    target: str
    lo: LinearForm
    hi: LinearForm

    def referenced(self) -> set[str]:
        refs = set()
        if self.lo.param is not None:
            refs.add(self.lo.param)
        if self.hi.param is not None:
            refs.add(self.hi.param)
        return refs

    def is_relative(self) -> bool:
        return bool(self.referenced())

    def bounds(self, values: Mapping[str, Any]) -> tuple[float, float]:
        return self.lo.evaluate(values), self.hi.evaluate(values)

    def describe(self) -> str:
        def form(f: LinearForm) -> str:
            if f.param is None:
                return _fmt(f.offset)
            s = f.param if f.coeff == 1.0 else f"{_fmt(f.coeff)}*{f.param}"
            return s if f.offset == 0.0 else f"{s} + {_fmt(f.offset)}"

        return f"{self.target} in [{form(self.lo)}, {form(self.hi)}]"


def _fmt(x: float) -> str:
    return repr(x) if x != int(x) else str(int(x))


@dataclass(frozen=True)
class HandleDef:
    """Draggable handle: anchor/axis in the design-local frame.

    Anchor components may depend linearly on other parameter values; the axis
    is a constant unit vector and scale converts meters of drag to parameter
    units.
    """

    anchor: tuple[LinearForm, LinearForm, LinearForm]
    axis: tuple[float, float, float]
    scale: float = 1.0

    def __post_init__(self):
        n = math.sqrt(sum(a * a for a in self.axis))
        if abs(n - 1.0) > 1e-6:
            raise ValueError("handle axis must have unit length")
        if self.scale == 0.0:
            raise ValueError("handle scale must be nonzero")

    def anchor_at(self, values: Mapping[str, Any]) -> np.ndarray:
        return np.array([f.evaluate(values) for f in self.anchor], dtype=float)


@dataclass(frozen=True)
class ParameterDef:
    name: str
    kind: Kind
    default: Any
    group: str = "basic"
    ergonomic_tag: Optional[str] = None
    handle: Optional[HandleDef] = None


@dataclass(frozen=True)
class GeneratorBinding:
    generator: str
    # slot -> ("param", name) or ("literal", value)
    bindings: Mapping[str, tuple[str, Any]]

    def __post_init__(self):
        object.__setattr__(self, "bindings", MappingProxyType(dict(self.bindings)))


@dataclass(frozen=True)
class Design:
    design_id: str
    name: str
    parameters: tuple[ParameterDef, ...]
    constraints: tuple[Constraint, ...]
    generator: GeneratorBinding
    angular_steps: int = 64

    def __post_init__(self):
        names = [p.name for p in self.parameters]
        if len(set(names)) != len(names):
            raise ValueError("parameter names must be unique within a design")
        for c in self.constraints:
            for ref in {c.target} | c.referenced():
                if ref not in names:
                    raise ValueError(f"constraint references unknown parameter {ref!r}")

    def parameter(self, name: str) -> ParameterDef:
        for p in self.parameters:
            if p.name == name:
                return p
        raise UnknownParameter(f"{self.design_id!r} has no parameter {name!r}")

    def constraints_on(self, name: str) -> tuple[Constraint, ...]:
        return tuple(c for c in self.constraints if c.target == name)

    def dependents_of(self, name: str) -> tuple[Constraint, ...]:
        return tuple(c for c in self.constraints if name in c.referenced())


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Pose:
    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    yaw: float = 0.0


@dataclass(frozen=True)
class Configuration:
    design_id: str
    values: Mapping[str, Any]
    pose: Pose = Pose()
    # Transient edit metadata, excluded from value identity.
    invalid_preview: bool = field(default=False, compare=False)
    clamped: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", MappingProxyType(dict(self.values)))

    def with_value(self, name: str, value: Any, **meta) -> "Configuration":
        values = dict(self.values)
        values[name] = value
        return replace(self, values=values, **meta)


@dataclass(frozen=True)
class Violation:
    parameter: str
    message: str
    constraint: Optional[Constraint] = None


@dataclass(frozen=True)
class ValidityReport:
    violations: tuple[Violation, ...]

    @property
    def valid(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class SnapBackResult:
    """A rejected commit: the prior configuration plus the violated bound."""

    config: Configuration
    violation: Violation


class EditMode:
    PREVIEW = "preview"
    COMMIT = "commit"


def default_configuration(design: Design) -> Configuration:
    return Configuration(design.design_id, {p.name: p.default for p in design.parameters})


# --------------------------------------------------------------------------
# Kind checks
# --------------------------------------------------------------------------

def check_kind(kind: Kind, value: Any) -> None:
    """Type-level check; raises KindMismatch. Bounds are checked separately."""
    if isinstance(kind, (Continuous, Discrete)):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise KindMismatch(f"expected a number, got {type(value).__name__}")
        if not math.isfinite(float(value)):
            raise KindMismatch("value must be finite")
    elif isinstance(kind, Option):
        if not isinstance(value, str):
            raise KindMismatch(f"expected an option label, got {type(value).__name__}")
    elif isinstance(kind, Boolean):
        if not isinstance(value, bool):
            raise KindMismatch(f"expected a boolean, got {type(value).__name__}")
    elif isinstance(kind, Text):
        if not isinstance(value, str):
            raise KindMismatch(f"expected text, got {type(value).__name__}")
    elif isinstance(kind, Curve):
        if not isinstance(value, BezierPath):
            raise KindMismatch(f"expected a BezierPath, got {type(value).__name__}")
    else:  # pragma: no cover
        raise KindMismatch(f"unknown kind {kind!r}")


def kind_violation(kind: Kind, value: Any) -> Optional[str]:
    """Bound-level check; returns a message when the value breaks its kind."""
    if isinstance(kind, Continuous):
        if not kind.lo <= float(value) <= kind.hi:
            return f"value {value} outside [{kind.lo}, {kind.hi}]"
    elif isinstance(kind, Discrete):
        if not any(abs(float(value) - lv) <= 1e-12 for lv in kind.levels):
            return f"value {value} is not one of the levels {list(kind.levels)}"
    elif isinstance(kind, Option):
        if value not in kind.labels:
            return f"label {value!r} not in {list(kind.labels)}"
    elif isinstance(kind, Text):
        if len(value) > kind.max_len:
            return f"text length {len(value)} exceeds max_len {kind.max_len}"
    elif isinstance(kind, Curve):
        if len(value.segments) > kind.segment_budget:
            return (f"{len(value.segments)} segments exceed the budget of "
                    f"{kind.segment_budget}")
        if kind.plane == "lathe-profile":
            if float(value.control_points()[:, 0].min()) < R_MIN - C0_TOL:
                return f"profile radius drops below the {R_MIN} m minimum"
    return None


def snap_discrete(kind: Discrete, value: float) -> float:
    """Nearest level; the lower level wins exact ties."""
    best = kind.levels[0]
    best_d = abs(value - best)
    for lv in kind.levels[1:]:
        d = abs(value - lv)
        if d < best_d:
            best, best_d = lv, d
    return best


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------

def validate(design: Design, config: Configuration) -> ValidityReport:
    violations: list[Violation] = []
    for p in design.parameters:
        if p.name not in config.values:
            violations.append(Violation(p.name, "missing value"))
            continue
        value = config.values[p.name]
        try:
            check_kind(p.kind, value)
        except KindMismatch as exc:
            violations.append(Violation(p.name, str(exc)))
            continue
        msg = kind_violation(p.kind, value)
        if msg:
            violations.append(Violation(p.name, msg))
    for c in design.constraints:
        target = design.parameter(c.target)
        if not isinstance(target.kind, (Continuous, Discrete)):
            continue
        value = config.values.get(c.target)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            continue
        lo, hi = c.bounds(config.values)
        if not lo - 1e-12 <= float(value) <= hi + 1e-12:
            violations.append(Violation(
                c.target,
                f"constraint violated: {c.describe()} (value {value}, bounds "
                f"[{lo:.6g}, {hi:.6g}])",
                constraint=c,
            ))
    return ValidityReport(tuple(violations))


def _constraint_violation(design: Design, values: Mapping[str, Any],
                          name: str) -> Optional[Violation]:
    """First violated bound for `name` at the given values (kind + constraints)."""
    p = design.parameter(name)
    msg = kind_violation(p.kind, values[name])
    if msg:
        return Violation(name, msg)
    if isinstance(p.kind, (Continuous, Discrete)):
        for c in design.constraints_on(name):
            lo, hi = c.bounds(values)
            if not lo - 1e-12 <= float(values[name]) <= hi + 1e-12:
                return Violation(name, f"constraint violated: {c.describe()}", c)
    return None


def _clamp_dependents(design: Design, values: dict[str, Any],
                      changed: str) -> Optional[list[str]]:
    """Clamp parameters whose relative bounds reference `changed`.

    Returns the list of clamped names, or None when a dependent cannot be
    brought back into range (the whole edit must snap back).
    """
    moved: list[str] = []
    for c in design.dependents_of(changed):
        dep = design.parameter(c.target)
        if not isinstance(dep.kind, (Continuous, Discrete)):
            continue
        lo, hi = c.bounds(values)
        v = float(values[c.target])
        if lo - 1e-12 <= v <= hi + 1e-12:
            continue
        clamped = min(max(v, lo), hi)
        if isinstance(dep.kind, Discrete):
            in_range = [lv for lv in dep.kind.levels if lo - 1e-12 <= lv <= hi + 1e-12]
            if not in_range:
                return None
            clamped = min(in_range, key=lambda lv: (abs(lv - v), lv))
        else:
            clamped = min(max(clamped, dep.kind.lo), dep.kind.hi)
            if not lo - 1e-12 <= clamped <= hi + 1e-12:
                return None
        values[c.target] = clamped
        moved.append(c.target)
    return moved


def set_parameter(design: Design, config: Configuration, name: str, value: Any,
                  mode: str = EditMode.COMMIT) -> Configuration | SnapBackResult:
    """Slider semantics: previews carry raw (possibly invalid) values; commits
    either succeed or snap back to the unchanged prior configuration."""
    p = design.parameter(name)
    check_kind(p.kind, value)

    if mode == EditMode.PREVIEW:
        candidate = config.with_value(name, value, invalid_preview=False, clamped=())
        if isinstance(p.kind, Discrete):
            bad = not _discrete_previewable(design, candidate.values, p, value)
        else:
            bad = _constraint_violation(design, candidate.values, name) is not None
        return replace(candidate, invalid_preview=bad)

    if mode != EditMode.COMMIT:
        raise ValueError(f"unknown edit mode {mode!r}")

    if isinstance(p.kind, Discrete):
        value = snap_discrete(p.kind, float(value))

    values = dict(config.values)
    values[name] = value
    violation = _constraint_violation(design, values, name)
    if violation is not None:
        return SnapBackResult(config, violation)
    moved = _clamp_dependents(design, values, name)
    if moved is None:
        return SnapBackResult(config, Violation(
            name, f"edit to {name!r} leaves a dependent parameter with no valid value"))
    return replace(config, values=values, invalid_preview=False, clamped=tuple(moved))


def _discrete_previewable(design, values, p, raw) -> bool:
    """Previews of discrete params are valid iff the snapped value would commit."""
    snapped = dict(values)
    snapped[p.name] = snap_discrete(p.kind, float(raw))
    return _constraint_violation(design, snapped, p.name) is None


def apply_handle_drag(design: Design, config: Configuration, name: str,
                      drag_point, mode: str = EditMode.COMMIT) -> Configuration | SnapBackResult:
    p = design.parameter(name)
    if p.handle is None:
        raise NoHandle(f"parameter {name!r} has no handle")
    anchor = p.handle.anchor_at(config.values)
    axis = np.asarray(p.handle.axis, dtype=float)
    delta = float(np.dot(np.asarray(drag_point, dtype=float) - anchor, axis))
    candidate = float(config.values[name]) + delta * p.handle.scale
    return set_parameter(design, config, name, candidate, mode)


def measure_distance(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
        raise ValueError("measurement points must be finite")
    return float(np.linalg.norm(p - q))


def bind_measurement(design: Design, config: Configuration, name: str,
                     length: float) -> Configuration | SnapBackResult:
    p = design.parameter(name)
    if not (isinstance(p.kind, (Continuous, Discrete)) and p.kind.unit == "m"):
        raise NonLengthParameter(f"parameter {name!r} is not a length")
    return set_parameter(design, config, name, float(length), EditMode.COMMIT)


def set_pose(config: Configuration, position, yaw: float) -> Configuration:
    pose = Pose(tuple(float(x) for x in position), float(yaw) % TWO_PI)
    return replace(config, pose=pose, invalid_preview=False, clamped=())
