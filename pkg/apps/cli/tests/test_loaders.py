"""
Tests for reading and validating input documents.
"""

import json
from io import StringIO

import pytest

from apps.cli.services.loaders import (
    load_derivation,
    load_frame,
    load_lifting_code,
    load_model,
    load_presentation,
    load_relation,
    load_space,
    read_document,
)
from apps.core.exceptions import FormulaSyntaxError, InvalidInputError, UnknownIdentifierError

SIERPINSKI = {"points": ["0", "1"], "opens": [[], ["1"], ["0", "1"]]}
DISCRETE_XY = {"points": ["x", "y"], "opens": [[], ["x"], ["y"], ["x", "y"]]}


@pytest.fixture
def write_json(tmp_path):
    """Write a document to a temporary file and return its path."""

    def write(document, name="doc.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return write


@pytest.fixture
def vietoris_document():
    return {
        "space": DISCRETE_XY,
        "functor": "vietoris",
        "gamma": {"x": ["x", "y"], "y": []},
        "valuation": {"p": ["x"]},
    }


class TestReadDocument:
    """Tests for read_document."""

    def test_missing_file(self, tmp_path):
        """Test a missing file names its path."""
        missing = str(tmp_path / "missing.json")
        with pytest.raises(InvalidInputError) as exc_info:
            read_document(missing)
        assert exc_info.value.path == missing

    def test_parse_error_has_position(self, tmp_path):
        """Test malformed JSON reports line and column."""
        path = tmp_path / "broken.json"
        path.write_text('{\n  "points": [', encoding="utf-8")
        with pytest.raises(InvalidInputError) as exc_info:
            read_document(str(path))
        assert exc_info.value.details["line"] == 2

    def test_dash_reads_stdin(self):
        """Test '-' reads the given stream."""
        assert read_document("-", StringIO('{"a": 1}')) == {"a": 1}


class TestLoadSpace:
    """Tests for space documents."""

    def test_sierpinski(self, write_json):
        space = load_space(write_json(SIERPINSKI))
        assert space.points == ("0", "1")
        assert len(space.opens) == 3

    def test_unknown_point_in_open(self, write_json):
        """Test an open naming an unknown point is rejected at that point."""
        with pytest.raises(InvalidInputError) as exc_info:
            load_space(write_json({"points": ["a"], "opens": [[], ["b"], ["a"]]}))
        assert exc_info.value.path == "opens[1][0]"

    def test_missing_field(self, write_json):
        with pytest.raises(InvalidInputError) as exc_info:
            load_space(write_json({"points": ["a"]}))
        assert exc_info.value.path == "opens"


class TestLoadModel:
    """Tests for model documents."""

    def test_valid_model(self, write_json, vietoris_document):
        """Test the Vietoris example model loads."""
        model = load_model(write_json(vietoris_document))
        assert model.functor.name == "vietoris"
        assert model.space.points == ("x", "y")
        assert model.valuation == {"p": 0b01}

    def test_non_open_valuation(self, write_json):
        """Test a valuation that is not open names the letter."""
        document = {
            "space": SIERPINSKI,
            "functor": "kripke",
            "gamma": {"0": [], "1": []},
            "valuation": {"p": ["0"]},
        }
        with pytest.raises(InvalidInputError) as exc_info:
            load_model(write_json(document))
        assert exc_info.value.path == "valuation.p"

    def test_transition_outside_carrier(self, write_json):
        """Test a transition that is not a closed set is rejected for V_kh."""
        document = {
            "space": SIERPINSKI,
            "functor": "vietoris",
            "gamma": {"0": ["1"], "1": ["1"]},
        }
        with pytest.raises(InvalidInputError) as exc_info:
            load_model(write_json(document))
        assert exc_info.value.path == "gamma.0"
        assert exc_info.value.details["element"] == ["1"]

    def test_missing_transition(self, write_json, vietoris_document):
        del vietoris_document["gamma"]["y"]
        with pytest.raises(InvalidInputError) as exc_info:
            load_model(write_json(vietoris_document))
        assert exc_info.value.path == "gamma.y"

    def test_unknown_functor(self, write_json, vietoris_document):
        """Test an unknown functor identifier."""
        vietoris_document["functor"] = "hilbert"
        with pytest.raises(UnknownIdentifierError) as exc_info:
            load_model(write_json(vietoris_document))
        assert exc_info.value.path == "functor"

    def test_model_inside_report_from_stdin(self, vietoris_document):
        """Test a report carrying result.model is accepted on stdin."""
        report = {"command": {"name": "quotient"}, "result": {"model": vietoris_document}}
        model = load_model("-", StringIO(json.dumps(report)))
        assert model.space.size == 2


class TestLoadFrame:
    """Tests for frame documents."""

    def test_chain_closure(self, write_json):
        """Test the listed pairs are closed transitively."""
        frame = load_frame(write_json({"elements": ["0", "m", "1"], "leq": [["0", "m"], ["m", "1"]]}))
        assert frame.size == 3
        assert frame.leq(0, 2)

    def test_closure_across_listing_order(self, write_json):
        """Test pairs listed top-down still close over several steps."""
        document = {"elements": ["0", "a", "b", "1"], "leq": [["b", "1"], ["a", "b"], ["0", "a"]]}
        frame = load_frame(write_json(document))
        assert frame.leq(0, 3)
        assert frame.leq(1, 1)
        assert not frame.leq(3, 0)

    def test_antisymmetry_violation(self, write_json):
        with pytest.raises(InvalidInputError):
            load_frame(write_json({"elements": ["a", "b"], "leq": [["a", "b"], ["b", "a"]]}))

    def test_non_distributive_lattice(self, write_json):
        """Test the diamond M3 is rejected."""
        leq = [["0", name] for name in "abc"] + [[name, "1"] for name in "abc"]
        with pytest.raises(InvalidInputError):
            load_frame(write_json({"elements": ["0", "a", "b", "c", "1"], "leq": leq}))

    def test_duplicate_elements(self, write_json):
        with pytest.raises(InvalidInputError) as exc_info:
            load_frame(write_json({"elements": ["a", "a"]}))
        assert exc_info.value.path == "elements"

    def test_unknown_element_in_order(self, write_json):
        with pytest.raises(InvalidInputError) as exc_info:
            load_frame(write_json({"elements": ["0", "1"], "leq": [["0", "2"]]}))
        assert exc_info.value.path == "leq[0][1]"


class TestLoadPresentation:
    """Tests for presentation documents."""

    def test_bad_term(self, write_json):
        """Test a malformed relation term names the side it sits on."""
        document = {
            "generators": ["g"],
            "relations": [{"lhs": {"op": "nope"}, "rel": "leq", "rhs": "g"}],
        }
        with pytest.raises(InvalidInputError) as exc_info:
            load_presentation(write_json(document))
        assert exc_info.value.path.startswith("relations[0].lhs")


class TestLoadDerivation:
    """Tests for derivation documents."""

    def test_single_axiom(self, write_json):
        document = [
            {
                "id": 0,
                "rule": "identity",
                "premises": [],
                "conclusion": {"lhs": "p:a", "rhs": "p:a"},
                "subst": {"a": "p:a"},
            }
        ]
        nodes = load_derivation(write_json(document))
        assert len(nodes) == 1
        assert nodes[0].rule == "identity"

    def test_formula_syntax_error(self, write_json):
        """Test unparsable conclusion text names the node and side."""
        document = [{"id": 0, "rule": "identity", "conclusion": {"lhs": "p:a &", "rhs": "p:a"}}]
        with pytest.raises(FormulaSyntaxError) as exc_info:
            load_derivation(write_json(document))
        assert exc_info.value.path == "[0].conclusion.lhs"


class TestLoadLiftingCode:
    """Tests for Sierpinski code documents."""

    def test_arity_out_of_range(self, write_json):
        with pytest.raises(InvalidInputError) as exc_info:
            load_lifting_code(write_json({"functor": "kripke", "arity": 3, "code": []}))
        assert exc_info.value.path == "arity"


class TestLoadRelation:
    """Tests for bisimulation relation documents."""

    def test_unknown_point(self, write_json, vietoris_document):
        model = load_model(write_json(vietoris_document, "model.json"))
        with pytest.raises(InvalidInputError) as exc_info:
            load_relation(write_json({"pairs": [["x", "z"]]}, "rel.json"), model, model)
        assert exc_info.value.path == "pairs[0]"
