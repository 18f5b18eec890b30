import pytest

from paramcad.dsl import (DesignSource, get_builtin, list_builtin,
                          load_design_file, parse_design, serialize_design)
from paramcad.errors import (DesignSyntaxError, DuplicateParameter,
                             InvalidDefault, UnboundGeneratorSlot,
                             UnknownDesign, UnknownReference)

MINIMAL = """
design box_stand "Box Stand" {
  param width : continuous(0.1, 1.0, m) default 0.4
  param depth : continuous(0.1, 1.0, m) in [0.1, width] default 0.3
  param height : continuous(0.2, 1.0, m) default 0.7
  generator panel_table {
    width = width
    depth = depth
    height = height
  }
}
"""


class TestParse:
    def test_minimal(self):
        d = parse_design(MINIMAL)
        assert d.design_id == "box_stand"
        assert d.name == "Box Stand"
        assert [p.name for p in d.parameters] == ["width", "depth", "height"]
        assert len(d.constraints) == 1

    def test_cm_suffix(self):
        d = parse_design(MINIMAL.replace("default 0.4", "default 40 cm"))
        assert d.parameters[0].default == pytest.approx(0.4)

    def test_comments_ignored(self):
        d = parse_design("# leading remark\n" + MINIMAL)
        assert d.design_id == "box_stand"


class TestErrors:
    def test_unexpected_character_position(self):
        with pytest.raises(DesignSyntaxError) as exc:
            parse_design('design x "X" {\n  @\n}')
        assert exc.value.line == 2
        assert exc.value.col == 3

    def test_missing_brace(self):
        with pytest.raises(DesignSyntaxError):
            parse_design('design x "X" {')

    def test_duplicate_parameter(self):
        text = MINIMAL.replace("param depth", "param width", 1)
        with pytest.raises(DuplicateParameter):
            parse_design(text)

    def test_unknown_reference_in_constraint(self):
        text = MINIMAL.replace("[0.1, width]", "[0.1, girth]")
        with pytest.raises(UnknownReference):
            parse_design(text)

    def test_unbound_generator_slot(self):
        text = MINIMAL.replace("    height = height\n", "")
        with pytest.raises(UnboundGeneratorSlot):
            parse_design(text)

    def test_invalid_default(self):
        text = MINIMAL.replace("default 0.3", "default 0.9")  # depth > width
        with pytest.raises(InvalidDefault):
            parse_design(text)

    def test_default_outside_kind_bounds(self):
        text = MINIMAL.replace("default 0.7", "default 5.0")
        with pytest.raises(InvalidDefault):
            parse_design(text)


class TestBuiltins:
    def test_catalog_size(self):
        assert len(list_builtin()) == 15

    def test_unknown_design(self):
        with pytest.raises(UnknownDesign):
            get_builtin("hovercraft")

    def test_load_design_file(self, tmp_path):
        path = tmp_path / "box.pdsl"
        path.write_text(MINIMAL)
        d = load_design_file(path)
        assert d.design_id == "box_stand"


class TestRoundTrip:
    @pytest.mark.parametrize("design", list_builtin(),
                             ids=lambda d: d.design_id)
    def test_structural_round_trip(self, design):
        src = serialize_design(design)
        again = parse_design(src)
        assert again == design

    @pytest.mark.parametrize("design", list_builtin(),
                             ids=lambda d: d.design_id)
    def test_byte_stable(self, design):
        once = serialize_design(design).text
        twice = serialize_design(parse_design(once)).text
        assert twice == once
