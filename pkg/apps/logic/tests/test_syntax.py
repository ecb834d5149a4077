"""
Tests for the formula grammar, parser and printer.
"""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from apps.core.exceptions import FormulaSyntaxError, InvalidInputError, UnknownIdentifierError
from apps.core.tests.hypothesis_settings import ROUND_TRIP_SETTINGS
from apps.logic.services.syntax import (
    BOT,
    TOP,
    And,
    Modal,
    Or,
    Prop,
    canonical,
    letters_of,
    modal_depth,
    parse,
    same_formula,
    to_text,
)

names = st.from_regex(r"[A-Za-z0-9_]{1,6}", fullmatch=True)


def formulas(lifting_ids=("box", "dia", "pair")):
    arities = {"box": 1, "dia": 1, "pair": 2}
    leaves = st.sampled_from([TOP, BOT]) | st.builds(Prop, names)

    def extend(children):
        modal = st.sampled_from(lifting_ids).flatmap(
            lambda lifting: st.tuples(*[children] * arities[lifting]).map(
                lambda args: Modal(lifting, args)
            )
        )
        return (
            st.builds(And, children, children)
            | st.lists(children, max_size=3).map(lambda items: Or(tuple(items)))
            | modal
        )

    return st.recursive(leaves, extend, max_leaves=10)


class TestParse:
    """Tests for parse."""

    def test_top(self):
        assert parse("top") == TOP

    def test_empty_disjunction_is_bot(self):
        assert parse("\\/[]") == BOT
        assert parse("bot") == BOT

    def test_modal_with_bare_conjunction(self):
        expected = Modal("dia", (And(Prop("a"), Modal("box", (TOP,))),))
        assert parse("<dia>(p:a & <box>(top))") == expected

    def test_whitespace_is_insignificant(self):
        assert parse("  ( p:a\n&\tp:b )") == And(Prop("a"), Prop("b"))

    def test_keyword_as_letter(self):
        assert parse("p:top") == Prop("top")

    def test_nary_disjunction(self):
        assert parse("\\/[p:a, top, bot]") == Or((Prop("a"), TOP, BOT))

    def test_unexpected_token_position(self):
        with pytest.raises(FormulaSyntaxError) as excinfo:
            parse("top top")
        assert (excinfo.value.line, excinfo.value.column) == (1, 5)

    def test_position_on_later_line(self):
        with pytest.raises(FormulaSyntaxError) as excinfo:
            parse("top\n  &")
        assert excinfo.value.line == 2
        assert excinfo.value.column == 3

    def test_bad_character(self):
        with pytest.raises(FormulaSyntaxError) as excinfo:
            parse("p:a$")
        assert excinfo.value.as_dict()["type"] == "syntax"

    def test_unterminated_input(self):
        with pytest.raises(FormulaSyntaxError):
            parse("(p:a & ")

    def test_unknown_lifting_with_signature(self):
        with pytest.raises(UnknownIdentifierError):
            parse("<nec>(top)", {"box": 1})

    def test_arity_mismatch_with_signature(self):
        with pytest.raises(InvalidInputError):
            parse("<box>(top, top)", {"box": 1})

    def test_without_signature_any_lifting_parses(self):
        assert parse("<nec>()") == Modal("nec", ())


class TestPrinter:
    """Tests for to_text and the parse/print round trip."""

    def test_canonical_text(self):
        formula = Or((And(Prop("a"), TOP), Modal("box", (BOT,))))
        assert to_text(formula) == "\\/[(p:a & top), <box>(\\/[])]"

    def test_print_parse_is_identity_on_canonical_text(self):
        text = "<dia>(p:a & <box>(top))"
        assert to_text(parse(text)) == text

    def test_modal_argument_conjunction_prints_bare(self):
        """Test a parenthesised argument conjunction prints without the extra pair."""
        assert to_text(parse("<dia>((p:a & <box>(top)))")) == "<dia>(p:a & <box>(top))"

    def test_nested_conjunction_in_argument(self):
        formula = Modal("box", (And(And(Prop("a"), Prop("b")), Prop("c")),))
        assert to_text(formula) == "<box>((p:a & p:b) & p:c)"
        assert parse(to_text(formula)) == formula

    @given(formula=formulas())
    @ROUND_TRIP_SETTINGS
    def test_parse_inverts_print(self, formula):
        assert parse(to_text(formula)) == formula


class TestFormulaHelpers:
    """Tests for canonical forms and formula measures."""

    def test_or_order_and_nesting_ignored(self):
        a, b = Prop("a"), Prop("b")
        assert same_formula(Or((a, b)), Or((b, Or((a,)))))

    def test_single_disjunct_unwrapped(self):
        assert canonical(Or((Prop("a"),))) == Prop("a")

    def test_conjunction_order_matters(self):
        a, b = Prop("a"), Prop("b")
        assert not same_formula(And(a, b), And(b, a))

    def test_letters_and_depth(self):
        formula = parse("<box>(\\/[p:b, <dia>(p:a)])")
        assert letters_of(formula) == ("a", "b")
        assert modal_depth(formula) == 2
