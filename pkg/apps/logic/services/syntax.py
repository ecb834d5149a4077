"""
Formula syntax: abstract syntax tree, lark grammar, parser and printer.

Formulas are built from ``top``, proposition letters, binary conjunction,
finite disjunction and modal operators named by lifting ids::

    φ ::= top | p:NAME | (φ & φ) | \\/[φ, …, φ] | <LIFT>(φ, …, φ)

``bot`` is accepted as sugar for the empty disjunction ``\\/[]``, and a
conjunction that is a whole modal argument may omit its parentheses, as in
``<dia>(p:a & <box>(top))``.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, Mapping, Optional, Tuple, Union

from lark import Lark, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput

from apps.core.exceptions import FormulaSyntaxError, InvalidInputError, UnknownIdentifierError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    """Finite disjunction; the empty disjunction is falsum."""

    disjuncts: Tuple["Formula", ...] = ()


@dataclass(frozen=True)
class Modal:
    lifting: str
    args: Tuple["Formula", ...]


Formula = Union[Top, Prop, And, Or, Modal]

TOP = Top()
BOT = Or(())


FORMULA_GRAMMAR = r"""
    ?start: formula

    ?formula: "top"                                    -> top
            | "bot"                                    -> bot
            | "p:" NAME                                -> prop
            | "(" formula "&" formula ")"              -> conj
            | "\\/[" (formula ("," formula)*)? "]"     -> disj
            | "<" NAME ">" "(" (arg ("," arg)*)? ")"     -> modal

    // directly inside a modal argument list a conjunction may drop its parentheses
    ?arg: formula
        | formula "&" formula                         -> conj

    NAME: /[A-Za-z0-9_]+/

    %import common.WS
    %ignore WS
"""


class _FormulaBuilder(Transformer):
    """Turns the lark parse tree into formula nodes."""

    def top(self, children):
        return TOP

    def bot(self, children):
        return BOT

    def prop(self, children):
        return Prop(str(children[0]))

    def conj(self, children):
        return And(children[0], children[1])

    def disj(self, children):
        return Or(tuple(children))

    def modal(self, children):
        name, *args = children
        return Modal(str(name), tuple(args))


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark(FORMULA_GRAMMAR, parser="lalr")


def parse(text: str, signature: Optional[Mapping[str, int]] = None) -> Formula:
    """
    Parse formula text.

    Args:
        text: Formula in the concrete grammar
        signature: Optional lifting id to arity map; when given, modal
            operators are checked against it

    Returns:
        The formula tree

    Raises:
        FormulaSyntaxError: If the text does not match the grammar
        UnknownIdentifierError: If a modal operator is not in ``signature``
        InvalidInputError: If a modal operator has the wrong number of arguments
    """
    try:
        tree = _parser().parse(text)
    except UnexpectedInput as exc:
        line, column = _position(exc)
        raise FormulaSyntaxError(
            f"Formula syntax error at line {line}, column {column}: {_reason(exc)}",
            line=line,
            column=column,
        ) from exc
    formula = _FormulaBuilder().transform(tree)
    if signature is not None:
        check_signature(formula, signature)
    return formula


def _position(exc: UnexpectedInput) -> Tuple[int, int]:
    line = getattr(exc, "line", -1)
    column = getattr(exc, "column", -1)
    if isinstance(exc, UnexpectedEOF) or line is None or line < 1:
        return 0, 0
    return line, column


def _reason(exc: UnexpectedInput) -> str:
    if isinstance(exc, UnexpectedCharacters):
        return f"unexpected character {exc.char!r}"
    if isinstance(exc, UnexpectedEOF):
        return "unexpected end of input"
    token = getattr(exc, "token", None)
    return f"unexpected token {str(token)!r}" if token is not None else "unexpected input"


def check_signature(formula: Formula, signature: Mapping[str, int]) -> None:
    """Reject modal operators that are unknown or applied with the wrong arity."""
    for node in subformulas(formula):
        if not isinstance(node, Modal):
            continue
        if node.lifting not in signature:
            raise UnknownIdentifierError(
                f"Unknown lifting: {node.lifting}",
                lifting=node.lifting,
                known=sorted(signature),
            )
        if len(node.args) != signature[node.lifting]:
            raise InvalidInputError(
                f"Lifting {node.lifting} takes {signature[node.lifting]} arguments, got {len(node.args)}",
                lifting=node.lifting,
            )


def to_text(formula: Formula) -> str:
    """Print a formula in canonical concrete syntax."""
    if isinstance(formula, Top):
        return "top"
    if isinstance(formula, Prop):
        return f"p:{formula.name}"
    if isinstance(formula, And):
        return f"({to_text(formula.left)} & {to_text(formula.right)})"
    if isinstance(formula, Or):
        return "\\/[" + ", ".join(to_text(d) for d in formula.disjuncts) + "]"
    if isinstance(formula, Modal):
        return f"<{formula.lifting}>(" + ", ".join(_argument_text(a) for a in formula.args) + ")"
    raise InvalidInputError(f"Not a formula: {formula!r}")


def _argument_text(formula: Formula) -> str:
    # a conjunction that is a whole modal argument is printed bare
    if isinstance(formula, And):
        return f"{to_text(formula.left)} & {to_text(formula.right)}"
    return to_text(formula)


def subformulas(formula: Formula) -> Iterator[Formula]:
    """All subformulas, the formula itself first."""
    stack = [formula]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, And):
            stack.extend((node.right, node.left))
        elif isinstance(node, Or):
            stack.extend(reversed(node.disjuncts))
        elif isinstance(node, Modal):
            stack.extend(reversed(node.args))


def letters_of(formula: Formula) -> Tuple[str, ...]:
    return tuple(sorted({node.name for node in subformulas(formula) if isinstance(node, Prop)}))


def modal_depth(formula: Formula) -> int:
    if isinstance(formula, And):
        return max(modal_depth(formula.left), modal_depth(formula.right))
    if isinstance(formula, Or):
        return max((modal_depth(d) for d in formula.disjuncts), default=0)
    if isinstance(formula, Modal):
        return 1 + max((modal_depth(a) for a in formula.args), default=0)
    return 0


def conjunction(parts) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``top``."""
    parts = list(parts)
    if not parts:
        return TOP
    result = parts[0]
    for part in parts[1:]:
        result = And(result, part)
    return result


def disjunction(parts) -> Formula:
    """Disjunction of ``parts``, unwrapping the single-disjunct case."""
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else Or(parts)


def canonical(formula: Formula) -> Formula:
    """
    Flatten nested disjunctions and sort disjuncts.

    Two formulas are equal up to Or-list order and Or-flattening exactly
    when their canonical forms are equal.
    """
    if isinstance(formula, And):
        return And(canonical(formula.left), canonical(formula.right))
    if isinstance(formula, Modal):
        return Modal(formula.lifting, tuple(canonical(a) for a in formula.args))
    if isinstance(formula, Or):
        flat = []
        for d in formula.disjuncts:
            d = canonical(d)
            flat.extend(d.disjuncts if isinstance(d, Or) else (d,))
        flat = sorted(set(flat), key=to_text)
        return flat[0] if len(flat) == 1 else Or(tuple(flat))
    return formula


def same_formula(left: Formula, right: Formula) -> bool:
    return canonical(left) == canonical(right)


def signature_of(liftings: Mapping[str, object]) -> Dict[str, int]:
    """Lifting id to arity for a registry of liftings."""
    return {lifting_id: lifting.arity for lifting_id, lifting in liftings.items()}
