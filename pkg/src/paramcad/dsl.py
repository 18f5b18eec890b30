"""Design definition language (.pdsl): parser, canonical serializer, and the
built-in catalog.

Grammar (line comments with '#'):

    design <id> "<display name>" {
      [steps <int>]
      param <id> : <kind-spec> [in [<linexpr>, <linexpr>]] default <value>
            [group "<label>"] [ergonomic <tag>]
            [handle(anchor=(<linexpr>,<linexpr>,<linexpr>),
                    axis=(<num>,<num>,<num>), scale=<num>)]
      ...
      generator <name> { <slot> = <id or literal> ... }
    }

    kind-spec := continuous(<num>, <num>[, <unit>])
               | discrete(<num>, ...[, <unit>])
               | option("a", "b", ...) | boolean | text(<int>)
               | curve(<int>, lathe-profile|silhouette)
    linexpr   := [<num> *] <id> [(+|-) <num>] | <num>
    value     := <num> | true | false | "<text>" | curve[(x,y)(x,y)(x,y)(x,y); ...]

Numbers may carry an 'm' or 'cm' suffix; everything is normalized to meters.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from . import core
from .core import (Boolean, Constraint, Continuous, Curve, Design, Discrete,
                   GeneratorBinding, HandleDef, LinearForm, Option,
                   ParameterDef, Text)
from .curves import BezierPath, CubicBezier, path_to_lists
from .errors import (DesignSyntaxError, DuplicateParameter, InvalidDefault,
                     UnboundGeneratorSlot, UnknownReference)
from .geometry import GENERATORS


@dataclass(frozen=True)
class DesignSource:
    text: str
    origin: str = "<string>"


# --------------------------------------------------------------------------
# Lexer
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>-?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_-]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<punct>[{}()\[\],;:=*+-])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise DesignSyntaxError(line, pos - line_start + 1,
                                    f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        val = m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, val, line, m.start() - line_start + 1))
        line += val.count("\n")
        if "\n" in val:
            line_start = m.start() + val.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.peek()
        raise DesignSyntaxError(tok.line, tok.col, msg)

    def expect(self, kind: str, text: Optional[str] = None) -> _Tok:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            self.fail(f"expected {want!r}, got {t.text!r}")
        return self.next()

    def accept(self, kind: str, text: Optional[str] = None) -> Optional[_Tok]:
        t = self.peek()
        if t.kind == kind and (text is None or t.text == text):
            return self.next()
        return None

    # -- terminals ---------------------------------------------------------

    def number(self) -> float:
        neg = False
        if self.accept("punct", "-"):
            neg = True
        t = self.expect("number")
        value = float(t.text)
        unit = self.peek()
        if unit.kind == "ident" and unit.text in ("m", "cm"):
            self.next()
            if unit.text == "cm":
                value /= 100.0
        return -value if neg else value

    def string(self) -> str:
        t = self.expect("string")
        return t.text[1:-1].replace('\\"', '"').replace("\\\\", "\\")

    def linexpr(self) -> LinearForm:
        t = self.peek()
        if t.kind == "number" or (t.kind == "punct" and t.text == "-"):
            value = self.number()
            if self.accept("punct", "*"):
                name = self.expect("ident").text
                offset = 0.0
                if self.accept("punct", "+"):
                    offset = self.number()
                elif self.accept("punct", "-"):
                    offset = -self.number()
                return LinearForm(value, name, offset)
            return LinearForm(0.0, None, value)
        name = self.expect("ident").text
        offset = 0.0
        if self.accept("punct", "+"):
            offset = self.number()
        elif self.accept("punct", "-"):
            offset = -self.number()
        return LinearForm(1.0, name, offset)


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

_UNITS = {"m": "m", "none": "", "rad": "rad"}


def parse_design(src: DesignSource | str) -> Design:
    if isinstance(src, str):
        src = DesignSource(src)
    p = _Parser(_lex(src.text))
    p.expect("ident", "design")
    design_id = p.expect("ident").text
    display = p.string()
    p.expect("punct", "{")

    params: list[ParameterDef] = []
    names: set[str] = set()
    constraints: list[tuple[Constraint, _Tok]] = []
    generator = None
    steps = 64
    while not p.accept("punct", "}"):
        t = p.peek()
        if t.kind == "ident" and t.text == "steps":
            p.next()
            steps = int(p.expect("number").text)
        elif t.kind == "ident" and t.text == "param":
            tok = p.next()
            pdef, constraint = _parse_param(p)
            if pdef.name in names:
                raise DuplicateParameter(tok.line, tok.col,
                                         f"duplicate parameter {pdef.name!r}")
            names.add(pdef.name)
            params.append(pdef)
            if constraint is not None:
                constraints.append((constraint, tok))
        elif t.kind == "ident" and t.text == "generator":
            p.next()
            generator = _parse_generator(p, names)
        elif t.kind == "eof":
            p.fail("unexpected end of input, missing '}'")
        else:
            p.fail(f"expected 'param' or 'generator', got {t.text!r}")
    if generator is None:
        p.fail("design has no generator block")
    p.expect("eof")
    _check_references(params, constraints, generator, names)
    design = Design(design_id, display, tuple(params),
                    tuple(sorted((c for c, _ in constraints), key=lambda c: c.target)),
                    generator, angular_steps=steps)
    _check_defaults(design)
    return design


def _parse_param(p: _Parser) -> tuple[ParameterDef, Optional[Constraint]]:
    name = p.expect("ident").text
    p.expect("punct", ":")
    kind = _parse_kind(p)

    constraint = None
    if p.accept("ident", "in"):
        p.expect("punct", "[")
        lo = p.linexpr()
        p.expect("punct", ",")
        hi = p.linexpr()
        p.expect("punct", "]")
        constraint = Constraint(name, lo, hi)

    p.expect("ident", "default")
    default = _parse_value(p, kind)

    group = "basic"
    ergonomic = None
    handle = None
    while True:
        if p.accept("ident", "group"):
            group = p.string()
        elif p.accept("ident", "ergonomic"):
            ergonomic = p.expect("ident").text
        elif p.accept("ident", "handle"):
            handle = _parse_handle(p)
        else:
            break
    return ParameterDef(name, kind, default, group, ergonomic, handle), constraint


def _parse_kind(p: _Parser):
    tok = p.expect("ident")
    k = tok.text
    try:
        if k == "continuous":
            p.expect("punct", "(")
            lo = p.number()
            p.expect("punct", ",")
            hi = p.number()
            unit = "m"
            if p.accept("punct", ","):
                unit = _expect_unit(p)
            p.expect("punct", ")")
            return Continuous(lo, hi, unit)
        if k == "discrete":
            p.expect("punct", "(")
            levels = [p.number()]
            unit = "m"
            while p.accept("punct", ","):
                t = p.peek()
                if t.kind == "ident" and t.text in _UNITS:
                    unit = _expect_unit(p)
                    break
                levels.append(p.number())
            p.expect("punct", ")")
            return Discrete(tuple(levels), unit)
        if k == "option":
            p.expect("punct", "(")
            labels = [p.string()]
            while p.accept("punct", ","):
                labels.append(p.string())
            p.expect("punct", ")")
            return Option(tuple(labels))
        if k == "boolean":
            return Boolean()
        if k == "text":
            p.expect("punct", "(")
            n = int(p.expect("number").text)
            p.expect("punct", ")")
            return Text(n)
        if k == "curve":
            p.expect("punct", "(")
            budget = int(p.expect("number").text)
            p.expect("punct", ",")
            plane = p.expect("ident").text
            p.expect("punct", ")")
            return Curve(budget, plane)
    except ValueError as exc:
        p.fail(str(exc), tok)
    p.fail(f"unknown parameter kind {k!r}", tok)


def _expect_unit(p: _Parser) -> str:
    t = p.expect("ident")
    if t.text not in _UNITS:
        p.fail(f"unknown unit {t.text!r}", t)
    return _UNITS[t.text]


def _parse_value(p: _Parser, kind) -> Any:
    t = p.peek()
    if isinstance(kind, (Continuous, Discrete)):
        return p.number()
    if isinstance(kind, Boolean):
        tok = p.expect("ident")
        if tok.text not in ("true", "false"):
            p.fail("expected true or false", tok)
        return tok.text == "true"
    if isinstance(kind, (Option, Text)):
        return p.string()
    if isinstance(kind, Curve):
        p.expect("ident", "curve")
        p.expect("punct", "[")
        segments = []
        while True:
            pts = tuple(_parse_point(p) for _ in range(4))
            segments.append(CubicBezier(*pts))
            if not p.accept("punct", ";"):
                break
        p.expect("punct", "]")
        try:
            return BezierPath(tuple(segments))
        except ValueError as exc:
            raise InvalidDefault(t.line, t.col, str(exc))
    p.fail("cannot parse default value", t)


def _parse_point(p: _Parser) -> tuple[float, float]:
    p.expect("punct", "(")
    x = p.number()
    p.expect("punct", ",")
    y = p.number()
    p.expect("punct", ")")
    return (x, y)


def _parse_handle(p: _Parser) -> HandleDef:
    p.expect("punct", "(")
    p.expect("ident", "anchor")
    p.expect("punct", "=")
    p.expect("punct", "(")
    anchor = (p.linexpr(),)
    p.expect("punct", ",")
    anchor += (p.linexpr(),)
    p.expect("punct", ",")
    anchor += (p.linexpr(),)
    p.expect("punct", ")")
    p.expect("punct", ",")
    p.expect("ident", "axis")
    p.expect("punct", "=")
    axis = _parse_point3(p)
    p.expect("punct", ",")
    p.expect("ident", "scale")
    p.expect("punct", "=")
    tok = p.peek()
    scale = p.number()
    p.expect("punct", ")")
    try:
        return HandleDef(anchor, axis, scale)
    except ValueError as exc:
        p.fail(str(exc), tok)


def _parse_point3(p: _Parser) -> tuple[float, float, float]:
    p.expect("punct", "(")
    x = p.number()
    p.expect("punct", ",")
    y = p.number()
    p.expect("punct", ",")
    z = p.number()
    p.expect("punct", ")")
    return (x, y, z)


def _parse_generator(p: _Parser, param_names: set[str]) -> GeneratorBinding:
    tok = p.expect("ident")
    name = tok.text
    if name not in GENERATORS:
        p.fail(f"unknown generator {name!r}", tok)
    p.expect("punct", "{")
    bindings: dict[str, tuple[str, Any]] = {}
    while not p.accept("punct", "}"):
        slot_tok = p.expect("ident")
        slot = slot_tok.text
        spec = GENERATORS[name]
        if slot not in spec["required"] and slot not in spec["optional"]:
            p.fail(f"generator {name!r} has no slot {slot!r}", slot_tok)
        p.expect("punct", "=")
        t = p.peek()
        if t.kind == "ident" and t.text in ("true", "false"):
            p.next()
            bindings[slot] = ("literal", t.text == "true")
        elif t.kind == "ident":
            p.next()
            bindings[slot] = ("param", t.text)
        elif t.kind == "string":
            bindings[slot] = ("literal", p.string())
        else:
            bindings[slot] = ("literal", p.number())
    missing = set(GENERATORS[name]["required"]) - set(bindings)
    if missing:
        raise UnboundGeneratorSlot(tok.line, tok.col,
                                   f"generator {name!r} is missing slots {sorted(missing)}")
    return GeneratorBinding(name, bindings)


def _check_references(params, constraints, generator, names):
    by_name = {p.name: p for p in params}
    for c, tok in constraints:
        for ref in c.referenced():
            if ref not in names:
                raise UnknownReference(tok.line, tok.col,
                                       f"constraint on {c.target!r} references "
                                       f"unknown parameter {ref!r}")
    for slot, (source, payload) in generator.bindings.items():
        if source == "param":
            if payload not in names:
                raise UnknownReference(1, 1, f"generator slot {slot!r} references "
                                             f"unknown parameter {payload!r}")
            tag = {**GENERATORS[generator.generator]["required"],
                   **GENERATORS[generator.generator]["optional"]}[slot]
            kind = by_name[payload].kind
            ok = {
                "curve": isinstance(kind, Curve),
                "length": isinstance(kind, (Continuous, Discrete)) and kind.unit == "m",
                "number": isinstance(kind, (Continuous, Discrete)),
                "int": isinstance(kind, (Continuous, Discrete)),
                "bool": isinstance(kind, Boolean),
                "str": isinstance(kind, (Option, Text)),
            }[tag]
            if not ok:
                raise UnknownReference(1, 1, f"slot {slot!r} expects a {tag} "
                                             f"parameter, {payload!r} is not")
    for p in params:
        if p.handle is not None:
            for form in p.handle.anchor:
                if form.param is not None and form.param not in names:
                    raise UnknownReference(1, 1, f"handle on {p.name!r} references "
                                                 f"unknown parameter {form.param!r}")


def _check_defaults(design: Design):
    config = core.default_configuration(design)
    report = core.validate(design, config)
    if not report.valid:
        v = report.violations[0]
        raise InvalidDefault(1, 1, f"default for {v.parameter!r} invalid: {v.message}")


# --------------------------------------------------------------------------
# Serialization (canonical)
# --------------------------------------------------------------------------

def _num(x: float) -> str:
    return repr(float(x))


def _form(f: LinearForm) -> str:
    if f.param is None:
        return _num(f.offset)
    s = f.param if f.coeff == 1.0 else f"{_num(f.coeff)} * {f.param}"
    if f.offset > 0:
        s += f" + {_num(f.offset)}"
    elif f.offset < 0:
        s += f" - {_num(-f.offset)}"
    return s


def _kind_text(kind) -> str:
    if isinstance(kind, Continuous):
        unit = {"m": "m", "": "none", "rad": "rad"}[kind.unit]
        return f"continuous({_num(kind.lo)}, {_num(kind.hi)}, {unit})"
    if isinstance(kind, Discrete):
        unit = {"m": "m", "": "none", "rad": "rad"}[kind.unit]
        return f"discrete({', '.join(_num(v) for v in kind.levels)}, {unit})"
    if isinstance(kind, Option):
        return f"option({', '.join(_quote(s) for s in kind.labels)})"
    if isinstance(kind, Boolean):
        return "boolean"
    if isinstance(kind, Text):
        return f"text({kind.max_len})"
    if isinstance(kind, Curve):
        return f"curve({kind.segment_budget}, {kind.plane})"
    raise TypeError(f"unknown kind {kind!r}")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _value_text(kind, value) -> str:
    if isinstance(kind, (Continuous, Discrete)):
        return _num(value)
    if isinstance(kind, Boolean):
        return "true" if value else "false"
    if isinstance(kind, (Option, Text)):
        return _quote(value)
    if isinstance(kind, Curve):
        segs = []
        for seg in path_to_lists(value):
            segs.append("".join(f"({_num(x)}, {_num(y)})" for x, y in seg))
        return "curve[" + "; ".join(segs) + "]"
    raise TypeError(f"unknown kind {kind!r}")


def serialize_design(design: Design) -> DesignSource:
    lines = [f"design {design.design_id} {_quote(design.name)} {{"]
    if design.angular_steps != 64:
        lines.append(f"  steps {design.angular_steps}")
    by_target = {c.target: c for c in design.constraints}
    for p in design.parameters:
        s = f"  param {p.name} : {_kind_text(p.kind)}"
        c = by_target.get(p.name)
        if c is not None:
            s += f" in [{_form(c.lo)}, {_form(c.hi)}]"
        s += f" default {_value_text(p.kind, p.default)}"
        s += f" group {_quote(p.group)}"
        if p.ergonomic_tag:
            s += f" ergonomic {p.ergonomic_tag}"
        if p.handle:
            anchor = ", ".join(_form(f) for f in p.handle.anchor)
            axis = ", ".join(_num(a) for a in p.handle.axis)
            s += f" handle(anchor=({anchor}), axis=({axis}), scale={_num(p.handle.scale)})"
        lines.append(s)
    lines.append(f"  generator {design.generator.generator} {{")
    for slot in sorted(design.generator.bindings):
        source, payload = design.generator.bindings[slot]
        if source == "param":
            lines.append(f"    {slot} = {payload}")
        elif isinstance(payload, bool):
            lines.append(f"    {slot} = {'true' if payload else 'false'}")
        elif isinstance(payload, str):
            lines.append(f"    {slot} = {_quote(payload)}")
        else:
            lines.append(f"    {slot} = {_num(payload)}")
    lines.append("  }")
    lines.append("}")
    return DesignSource("\n".join(lines) + "\n", origin=design.design_id)


# --------------------------------------------------------------------------
# Built-in catalog
# --------------------------------------------------------------------------

_catalog_cache: Optional[dict[str, Design]] = None


def list_builtin() -> list[Design]:
    global _catalog_cache
    if _catalog_cache is None:
        catalog = {}
        root = resources.files("paramcad").joinpath("catalog")
        for entry in sorted(root.iterdir(), key=lambda e: e.name):
            if entry.name.endswith(".pdsl"):
                design = parse_design(DesignSource(entry.read_text("utf-8"), entry.name))
                catalog[design.design_id] = design
        _catalog_cache = catalog
    return list(_catalog_cache.values())


def get_builtin(design_id: str) -> Design:
    for d in list_builtin():
        if d.design_id == design_id:
            return d
    from .errors import UnknownDesign
    raise UnknownDesign(f"no built-in design {design_id!r}")


def load_design_file(path: str | Path) -> Design:
    path = Path(path)
    return parse_design(DesignSource(path.read_text("utf-8"), str(path)))
