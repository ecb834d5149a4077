"""
Tests for the geomodal command: exit codes, reports and piping.
"""

import json
from io import StringIO

import pytest

from apps.cli.services.dispatch import HANDLERS, execute, run
from apps.cli.services.reports import EXIT_BOUND, EXIT_FALSE, EXIT_INVALID, EXIT_TRUE, render

DISCRETE_XY = {"points": ["x", "y"], "opens": [[], ["x"], ["y"], ["x", "y"]]}

VIETORIS_MODEL = {
    "space": DISCRETE_XY,
    "functor": "vietoris",
    "gamma": {"x": ["x", "y"], "y": []},
    "valuation": {"p": ["x"]},
}


@pytest.fixture
def files(tmp_path):
    """Write named JSON documents and return a lookup of their paths."""

    def write(name, document):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return {
        "model": write("model.json", VIETORIS_MODEL),
        "two": write("two.json", {"elements": ["0", "1"], "leq": [["0", "1"]]}),
        "sierpinski": write(
            "sierpinski.json", {"points": ["0", "1"], "opens": [[], ["1"], ["0", "1"]]}
        ),
        "indiscrete": write("indiscrete.json", {"points": ["a", "b"], "opens": [[], ["a", "b"]]}),
        "discrete": write(
            "discrete.json", {"points": ["x", "y"], "opens": [[], ["x"], ["y"], ["x", "y"]]}
        ),
    }


def geomodal(*argv, stdin=None):
    """Run the command and return (exit code, decoded JSON report)."""
    out = StringIO()
    code = run(list(argv), stdout=out, stdin=stdin)
    return code, json.loads(out.getvalue())


class TestCheckCommand:
    """Tests for check."""

    def test_truth_set(self, files):
        """Test the box formula holds exactly at the point with no successors."""
        code, report = geomodal("check", "--model", files["model"], "--formula", "<box>(p:p)")
        assert code == EXIT_TRUE
        assert report["verdict"] is None
        assert report["result"]["truth_set"] == ["y"]
        assert report["command"]["name"] == "check"

    def test_point_verdicts(self, files):
        """Test --point turns the truth set into an exit code."""
        code, report = geomodal(
            "check", "--model", files["model"], "--formula", "<dia>(p:p)", "--point", "x"
        )
        assert code == EXIT_TRUE
        assert report["verdict"] is True

        code, report = geomodal(
            "check", "--model", files["model"], "--formula", "<dia>(p:p)", "--point", "y"
        )
        assert code == EXIT_FALSE
        assert report["verdict"] is False

    def test_formula_file(self, files, tmp_path):
        formula = tmp_path / "formula.txt"
        formula.write_text("<box>(p:p)\n", encoding="utf-8")
        code, report = geomodal("check", "--model", files["model"], "--formula-file", str(formula))
        assert code == EXIT_TRUE
        assert report["result"]["truth_set"] == ["y"]

    def test_both_formula_forms_rejected(self, files, tmp_path):
        """Test giving the formula inline and from a file is a usage error."""
        formula = tmp_path / "formula.txt"
        formula.write_text("top", encoding="utf-8")
        code, report = geomodal(
            "check",
            "--model",
            files["model"],
            "--formula",
            "top",
            "--formula-file",
            str(formula),
        )
        assert code == EXIT_INVALID
        assert report["error"]["path"] == "--formula"

    def test_syntax_error(self, files):
        """Test a malformed formula exits 2 with a syntax error body."""
        code, report = geomodal("check", "--model", files["model"], "--formula", "<box>(p:p")
        assert code == EXIT_INVALID
        assert report["error"]["type"] == "syntax"
        assert "verdict" not in report

    def test_unknown_letter(self, files):
        code, report = geomodal("check", "--model", files["model"], "--formula", "p:q")
        assert code == EXIT_INVALID
        assert report["error"]["type"] == "unknown_identifier"

    def test_unknown_point(self, files):
        code, report = geomodal(
            "check", "--model", files["model"], "--formula", "top", "--point", "z"
        )
        assert code == EXIT_INVALID
        assert report["error"]["path"] == "--point"

    def test_missing_model_file(self, tmp_path):
        code, report = geomodal(
            "check", "--model", str(tmp_path / "nope.json"), "--formula", "top"
        )
        assert code == EXIT_INVALID
        assert report["error"]["type"] == "invalid_input"


class TestEquivCommand:
    """Tests for equiv."""

    def test_distinguished_points(self, files):
        """Test x and y differ on the box formula."""
        code, report = geomodal("equiv", "--model", files["model"], "--x", "x", "--y", "y")
        assert code == EXIT_FALSE
        assert report["result"]["equivalent"] is False

    def test_point_is_equivalent_to_itself(self, files):
        code, report = geomodal("equiv", "--model", files["model"], "--x", "x", "--y", "x")
        assert code == EXIT_TRUE
        assert report["verdict"] is True


class TestPresentAndPoints:
    """Tests for present, points and piping one report into the next command."""

    def test_present_m_of_two(self, files):
        code, report = geomodal("present", "--frame", files["two"], "--system", "M")
        assert code == EXIT_TRUE
        assert report["result"]["generators"] == 4

    def test_present_then_points(self, files):
        """Test points reads a present report from stdin."""
        out = StringIO()
        assert run(["present", "--frame", files["two"], "--system", "M"], stdout=out) == EXIT_TRUE

        code, report = geomodal("points", "--presentation", "-", stdin=StringIO(out.getvalue()))
        assert code == EXIT_TRUE
        assert report["result"]["points"] == 3

    def test_compare_m_and_mprime(self, files):
        code, report = geomodal("present", "--frame", files["two"], "--compare")
        assert code == EXIT_TRUE
        assert report["verdict"] is True

    def test_points_of_frame(self, files):
        code, report = geomodal("points", "--frame", files["two"])
        assert code == EXIT_TRUE
        assert report["result"]["points"] == 1

    def test_sober_space(self, files):
        code, report = geomodal("points", "--space", files["sierpinski"])
        assert code == EXIT_TRUE
        assert report["result"]["sober"] is True

    def test_non_t0_space_is_not_sober(self, files):
        """Test the indiscrete two-point space collapses to one point."""
        code, report = geomodal("points", "--space", files["indiscrete"])
        assert code == EXIT_FALSE
        assert report["result"]["points"] == 1
        assert report["result"]["t0"] is False


class TestExitCodes:
    """Tests for usage errors, missing seeds and resource bounds."""

    def test_unknown_subcommand(self):
        """Test argparse rejections come back as exit 2 with an error body."""
        out = StringIO()
        assert run(["frobnicate"], stdout=out) == EXIT_INVALID

    def test_accept_requires_seed(self):
        code, report = geomodal("accept", "--suite", "12")
        assert code == EXIT_INVALID
        assert report["error"]["path"] == "--seed"

    def test_compare_requires_seed(self, files):
        code, report = geomodal(
            "bisim", "--left", files["model"], "--right", files["model"], "--kind", "compare"
        )
        assert code == EXIT_INVALID
        assert report["error"]["path"] == "--seed"

    def test_max_points_above_bound(self):
        """Test a requested bound above MAX_POINTS exits 3."""
        code, report = geomodal(
            "soundness", "--system", "monotone", "--functor", "dkh", "--max-points", "9"
        )
        assert code == EXIT_BOUND
        assert report["error"]["type"] == "resource_bound"
        assert report["error"]["details"]["limit"] == "MAX_POINTS"

    def test_negative_max_points(self):
        code, report = geomodal(
            "soundness", "--system", "monotone", "--functor", "dkh", "--max-points", "-1"
        )
        assert code == EXIT_INVALID

    def test_unknown_acceptance_item(self):
        code, report = geomodal("accept", "--suite", "99", "--seed", "1")
        assert code == EXIT_INVALID
        assert report["error"]["type"] == "unknown_identifier"


class TestBisimCommand:
    """Tests for bisim."""

    def test_empty_relation_is_searched_as_given(self, files, tmp_path):
        """Test an explicit empty relation is not replaced by the greatest bisimulation."""
        relation = tmp_path / "empty.json"
        relation.write_text(json.dumps({"pairs": []}), encoding="utf-8")
        code, report = geomodal(
            "bisim",
            "--left",
            files["model"],
            "--right",
            files["model"],
            "--kind",
            "am",
            "--relation",
            str(relation),
        )
        assert code == EXIT_TRUE
        assert report["result"]["relation"] == []
        assert report["result"]["status"] == "found"

    def test_am_defaults_to_the_greatest_bisimulation(self, files):
        code, report = geomodal(
            "bisim", "--left", files["model"], "--right", files["model"], "--kind", "am"
        )
        assert code == EXIT_TRUE
        assert report["result"]["relation"] == [["x", "x"], ["y", "y"]]


class TestReports:
    """Tests for report layout and determinism."""

    def test_identical_runs_give_identical_bytes(self, files):
        argv = ["check", "--model", files["model"], "--formula", "<box>(p:p)", "--normal-form"]
        first, second = StringIO(), StringIO()
        run(argv, stdout=first)
        run(argv, stdout=second)
        assert first.getvalue() == second.getvalue()

    def test_seed_is_echoed(self):
        code, report = geomodal("accept", "--suite", "parser-round-trip", "--seed", "5")
        assert code == EXIT_TRUE
        assert report["seed"] == 5
        assert report["command"]["options"]["suite"] == "parser-round-trip"

    def test_timing_only_when_asked(self, files):
        _, report = geomodal("check", "--model", files["model"], "--formula", "top")
        assert "timing" not in report
        _, report = geomodal("check", "--model", files["model"], "--formula", "top", "--timing")
        assert report["timing"]["seconds"] >= 0

    def test_timing_on_error_reports(self, files):
        """Test a rejected input still carries timing when asked."""
        code, report = geomodal("check", "--model", files["model"], "--formula", "p:q", "--timing")
        assert code == EXIT_INVALID
        assert report["timing"]["seconds"] >= 0
        assert "error" in report

    def test_text_output(self, files):
        """Test the text form prints nested keys with indentation."""
        out = StringIO()
        run(
            ["check", "--model", files["model"], "--formula", "<box>(p:p)", "--output", "text"],
            stdout=out,
        )
        text = out.getvalue()
        assert "verdict: null" in text
        assert '  truth_set: ["y"]' in text

    def test_render_sorts_keys(self):
        assert render({"b": 1, "a": 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'

    def test_every_command_has_a_handler(self):
        expected = {
            "check",
            "equiv",
            "bisim",
            "lift",
            "present",
            "points",
            "dualize",
            "proofcheck",
            "soundness",
            "quotient",
            "accept",
        }
        assert set(HANDLERS) == expected

    def test_execute_without_the_parser(self, files):
        """Test handlers can be driven with a plain options dict."""
        code, report = execute("dualize", {"space": files["discrete"]})
        assert code == EXIT_TRUE
        assert report["verdict"] is True

    def test_dualize_sierpinski_fails(self, files):
        """Test the duality check is false on a space that is not compact Hausdorff."""
        code, report = execute("dualize", {"space": files["sierpinski"]})
        assert code == EXIT_FALSE
        assert report["result"]["holds"] is False


class TestProofcheckCommand:
    """Tests for proofcheck."""

    def test_valid_derivation(self, tmp_path):
        path = tmp_path / "derivation.json"
        path.write_text(
            json.dumps(
                [
                    {
                        "id": 0,
                        "rule": "identity",
                        "conclusion": {"lhs": "p:a", "rhs": "p:a"},
                        "subst": {"a": "p:a"},
                    }
                ]
            ),
            encoding="utf-8",
        )
        code, report = geomodal("proofcheck", "--derivation", str(path))
        assert code == EXIT_TRUE
        assert report["result"]["valid"] is True

    def test_countermodel_found(self):
        """Test diamond does not entail box, witnessed by a Kripke countermodel."""
        code, report = geomodal(
            "proofcheck",
            "--pair",
            "<dia>(p:p) |> <box>(p:p)",
            "--functor",
            "kripke",
            "--max-points",
            "2",
        )
        assert code == EXIT_FALSE
        assert report["result"]["countermodel"] is not None

    def test_malformed_pair(self):
        code, report = geomodal("proofcheck", "--pair", "p:p")
        assert code == EXIT_INVALID
        assert report["error"]["path"] == "--pair"
