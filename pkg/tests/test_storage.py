"""Tests for document loading, report rendering and atomic writes."""

import json
import math

import pytest

from src.core.errors import MalformedFunction, ParseError
from src.services import isometry
from src.storage.operations import (
    DocumentStorage,
    function_to_doc,
    isometry_to_dict,
    render_report,
    space_to_doc,
)

SPACE = {"atoms": [{"weight": 0.5}, {"weight": "1/2"}],
         "components": [{"weight_label": "aleph_0", "measure": 1.0},
                        {"weight_label": "aleph_1", "measure": 0.25}]}


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc, indent=2), encoding="utf-8")
    return path


@pytest.fixture
def storage(tmp_path):
    return DocumentStorage(tmp_path)


class TestLoadSpace:
    def test_rationals_and_labels(self, tmp_path, storage):
        _write(tmp_path, "s.json", SPACE)
        space = storage.load_space("s.json")
        assert space.atom_weights == (0.5, 0.5)
        assert space.n_slots == 1
        assert space.components[1].weight_label.index == 1

    def test_realized_flag_only_for_aleph_0(self, tmp_path, storage):
        doc = {"components": [{"weight_label": "aleph_1", "measure": 1.0, "realized": True}]}
        _write(tmp_path, "s.json", doc)
        with pytest.raises(ParseError):
            storage.load_space("s.json")

    def test_json_syntax_errors_carry_the_line(self, tmp_path, storage):
        _write(tmp_path, "s.json", '{\n  "atoms": [\n    {"weight": 0.5},\n  ]\n}\n')
        with pytest.raises(ParseError) as info:
            storage.load_space("s.json")
        assert info.value.line == 4

    def test_validation_errors_carry_line_and_field(self, tmp_path, storage):
        doc = {"atoms": [{"weight": 0.5}, {"weight": True}]}
        _write(tmp_path, "s.json", doc)
        with pytest.raises(ParseError) as info:
            storage.load_space("s.json")
        assert info.value.field == "atoms.1.weight"
        assert info.value.line is not None
        assert info.value.to_dict()["error"] == "ParseError"

    @pytest.mark.parametrize("doc", [
        {"atoms": [{"weight": "NaN"}]},
        {"atoms": [{"weight": 1.0, "extra": 1}]},
        {"components": [{"weight_label": "beth_0", "measure": 1.0}]},
    ])
    def test_bad_documents(self, tmp_path, storage, doc):
        _write(tmp_path, "s.json", doc)
        with pytest.raises(ParseError):
            storage.load_space("s.json")

    def test_missing_file(self, storage):
        with pytest.raises(ParseError):
            storage.load_space("nowhere.json")


class TestLoadOthers:
    def test_function_with_a_space_reference(self, tmp_path, storage):
        (tmp_path / "spaces").mkdir()
        _write(tmp_path / "spaces", "s.json", SPACE)
        doc = {"space": "s.json", "atom_values": [1.0, "-2"],
               "step_parts": [[{"length": "1/3", "value": 4.0}, {"length": "2/3", "value": 0.0}]]}
        path = _write(tmp_path / "spaces", "f.json", doc)
        f = storage.load_function(path)
        assert f.atom_values == (1.0, -2.0)
        assert f.step_parts[0].breaks == pytest.approx((0.0, 1.0 / 3.0, 1.0))

    def test_function_lengths_must_sum_to_one(self, tmp_path, storage):
        doc = {"space": SPACE, "atom_values": [0.0, 0.0], "step_parts": [[{"length": 0.5, "value": 1.0}]]}
        _write(tmp_path, "f.json", doc)
        with pytest.raises(MalformedFunction):
            storage.load_function("f.json")

    def test_isometry_document(self, tmp_path, storage):
        doc = {"source": SPACE, "target": SPACE, "atom_map": [1, 0], "signs": [1, -1],
               "component_map": [0],
               "rearrangements": [[{"from": 0.0, "to": 0.5, "length": 0.5},
                                   {"from": 0.5, "to": 0.0, "length": 0.5}]],
               "segment_signs": [1, 1]}
        _write(tmp_path, "iso.json", doc)
        loaded = storage.load_isometry("iso.json")
        assert loaded.iso.atom_map == (1, 0)
        assert loaded.signs == (1.0, -1.0)
        U = isometry.build_from_measure_preserving(loaded.iso, loaded.signs, loaded.segment_signs)
        assert isometry.verify_isometry(U, trials=10).passed

    def test_matrix_document(self, tmp_path, storage):
        space = {"atoms": [{"weight": 0.5}, {"weight": 0.5}]}
        _write(tmp_path, "m.json", {"source": space, "target": space, "matrix": [[0, -1], [1, 0]]})
        table = storage.load_matrix("m.json")
        assert table.matrix == ((0.0, -1.0), (1.0, 0.0))


class TestReports:
    def test_seventeen_significant_digits(self):
        text = render_report({"x": 0.1, "n": 3, "ok": True, "none": None})
        assert '"x": 0.10000000000000001' in text
        assert '"n": 3' in text
        assert json.loads(text)["ok"] is True

    def test_non_finite_values_become_strings(self):
        data = json.loads(render_report({"a": math.inf, "b": [-math.inf, math.nan]}))
        assert data == {"a": "inf", "b": ["-inf", "nan"]}

    def test_rendering_is_deterministic(self, tmp_path, storage):
        _write(tmp_path, "s.json", SPACE)
        space = storage.load_space("s.json")
        assert render_report(space_to_doc(space)) == render_report(space_to_doc(space))

    def test_domain_documents_load_back(self, tmp_path, storage, rng):
        from src.utils.sampling import random_function, random_space

        f = random_function(rng, random_space(rng, unrealized=True))
        _write(tmp_path, "f.json", render_report(function_to_doc(f)))
        g = storage.load_function("f.json")
        assert g.space == f.space
        assert g.atom_values == f.atom_values

    def test_isometry_report_fields(self, two_halves):
        from src.services.band_maps import MeasurePreservingIso

        U = isometry.build_from_measure_preserving(
            MeasurePreservingIso.from_component_map(two_halves, two_halves, [1, 0]), [1.0, -1.0])
        report = isometry_to_dict(U)
        assert report["signs"] == [1.0, -1.0]
        assert report["range_measure"] == pytest.approx(1.0)
        assert report["phi"]["atom_map"] == [1, 0]

    def test_write_report_is_complete_or_absent(self, tmp_path, storage):
        out = storage.write_report({"value": 1.5}, "reports/out.json")
        assert json.loads(out.read_text()) == {"value": 1.5}
        assert [p.name for p in out.parent.iterdir()] == ["out.json"]
        with pytest.raises(TypeError):
            storage.write_report({"value": object()}, "reports/bad.json")
        assert not (tmp_path / "reports" / "bad.json").exists()
