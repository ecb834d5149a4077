"""
Model checking for geometric modal formulas.

Truth sets are opens of the model's state space. Modal equivalence is
decided through the family of definable opens: the least family holding
the valuation, ∅ and the whole space that is closed under finite meets,
finite joins and every modal step γ⁻¹ ∘ λ.
"""

import logging
import random
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from apps.coalgebra.services.functors import (
    GeomModel,
    disjoint_union,
    is_model_morphism,
    make_model,
)
from apps.coalgebra.services.liftings import OpenLifting, lifting_flags, liftings_for
from apps.core.exceptions import (
    InvalidInputError,
    InvariantViolation,
    ResourceBoundError,
    UnknownIdentifierError,
)
from apps.logic.services.syntax import (
    BOT,
    TOP,
    And,
    Formula,
    Modal,
    Or,
    Prop,
    Top,
    conjunction,
    disjunction,
)
from apps.topology.services.finspace import (
    ContMap,
    Mask,
    bits,
    mask_from_indices,
    space_from_subbase_masks,
)

logger = logging.getLogger(__name__)

Liftings = Mapping[str, OpenLifting]

# Modal arguments with more disjuncts than this are kept whole by normal_form.
SUBFAMILY_EXPANSION_LIMIT = 3


def _registry(model: GeomModel, liftings: Optional[Liftings]) -> Liftings:
    return liftings if liftings is not None else liftings_for(model.functor)


def _lookup(liftings: Liftings, node: Modal) -> OpenLifting:
    lifting = liftings.get(node.lifting)
    if lifting is None:
        raise UnknownIdentifierError(
            f"Lifting {node.lifting} is not registered for this functor",
            lifting=node.lifting,
            known=sorted(liftings),
        )
    if lifting.arity != len(node.args):
        raise InvalidInputError(
            f"Lifting {node.lifting} takes {lifting.arity} arguments, got {len(node.args)}",
            lifting=node.lifting,
        )
    return lifting


def modal_step(model: GeomModel, lifting: OpenLifting, args: Sequence[Mask]) -> Mask:
    """γ⁻¹(λ_X(args))."""
    return model.coalgebra.successor_preimage(lifting(model.space, args))


def truth_set(model: GeomModel, formula: Formula, liftings: Optional[Liftings] = None) -> Mask:
    """
    The open of points satisfying ``formula``.

    Raises:
        UnknownIdentifierError: For an unregistered lifting or a letter
            missing from the valuation
        InvariantViolation: If a computed set is not open
    """
    liftings = _registry(model, liftings)
    space = model.space
    memo: Dict[Formula, Mask] = {}

    def evaluate(node: Formula) -> Mask:
        if node in memo:
            return memo[node]
        if isinstance(node, Top):
            result = space.full
        elif isinstance(node, Prop):
            if node.name not in model.valuation:
                raise UnknownIdentifierError(
                    f"Proposition letter {node.name} is not in the valuation",
                    letter=node.name,
                )
            result = model.valuation[node.name]
        elif isinstance(node, And):
            result = evaluate(node.left) & evaluate(node.right)
        elif isinstance(node, Or):
            result = 0
            for d in node.disjuncts:
                result |= evaluate(d)
        elif isinstance(node, Modal):
            lifting = _lookup(liftings, node)
            result = modal_step(model, lifting, [evaluate(a) for a in node.args])
        else:
            raise InvalidInputError(f"Not a formula: {node!r}")
        if not space.is_open(result):
            raise InvariantViolation(f"Truth set {space.label(result)} is not open")
        memo[node] = result
        return result

    return evaluate(formula)


def satisfies(model: GeomModel, point: str, formula: Formula, liftings: Optional[Liftings] = None) -> bool:
    return bool(truth_set(model, formula, liftings) >> _point(model, point) & 1)


def _point(model: GeomModel, name: str) -> int:
    index = model.space.index.get(name)
    if index is None:
        raise UnknownIdentifierError(f"Unknown point: {name}", point=name)
    return index


# --- normal forms ---------------------------------------------------------------


Clause = Tuple[Formula, ...]


def normal_form(formula: Formula, liftings: Liftings) -> Formula:
    """
    Rewrite into a disjunction of conjunctions of letters and modal atoms.

    Disjunctions are pushed to the top of every modal level. A modal atom
    over disjunctive arguments is replaced by the join of its instances over
    the finite sub-disjunctions of each argument, which is sound for
    Scott-continuous liftings.

    Raises:
        InvalidInputError: If some lifting in ``formula`` is not Scott-continuous
    """
    clauses = _clauses(formula, liftings)
    return disjunction(conjunction(c) for c in clauses) if clauses else BOT


def _merge(left: Clause, right: Clause) -> Clause:
    return tuple(dict.fromkeys(left + right))


def _clauses(node: Formula, liftings: Liftings) -> List[Clause]:
    if isinstance(node, Top):
        return [()]
    if isinstance(node, Prop):
        return [(node,)]
    if isinstance(node, And):
        left = _clauses(node.left, liftings)
        right = _clauses(node.right, liftings)
        return list(dict.fromkeys(_merge(a, b) for a in left for b in right))
    if isinstance(node, Or):
        merged: List[Clause] = []
        for d in node.disjuncts:
            merged.extend(_clauses(d, liftings))
        return list(dict.fromkeys(merged))
    if isinstance(node, Modal):
        lifting = _lookup(liftings, node)
        if not lifting_flags(lifting).scott:
            raise InvalidInputError(
                f"Normal forms need Scott-continuous liftings; {node.lifting} is not",
                lifting=node.lifting,
            )
        choices = [_subdisjunctions(_clauses(a, liftings)) for a in node.args]
        return [(Modal(node.lifting, args),) for args in product(*choices)]
    raise InvalidInputError(f"Not a formula: {node!r}")


def _subdisjunctions(clauses: List[Clause]) -> List[Formula]:
    members = [conjunction(c) for c in clauses]
    if not members:
        return [BOT]
    if len(members) > SUBFAMILY_EXPANSION_LIMIT:
        return [Or(tuple(members))]
    return [
        disjunction(chosen)
        for size in range(1, len(members) + 1)
        for chosen in combinations(members, size)
    ]


def is_normal(formula: Formula) -> bool:
    """Whether disjunctions occur only at the top of each modal level."""

    def conjunctive(node: Formula) -> bool:
        if isinstance(node, And):
            return conjunctive(node.left) and conjunctive(node.right)
        if isinstance(node, Modal):
            return all(is_normal(a) for a in node.args)
        return isinstance(node, (Top, Prop))

    if isinstance(formula, Or):
        return all(conjunctive(d) for d in formula.disjuncts)
    return conjunctive(formula)


# --- definable opens --------------------------------------------------------------


@dataclass
class DefinableOpens:
    """
    Attributes:
        opens: The stabilized family, ascending
        witnesses: For each open, a formula whose truth set it is
        rounds: Closure rounds until nothing new appeared
    """

    opens: Tuple[Mask, ...]
    witnesses: Dict[Mask, Formula] = field(repr=False)
    rounds: int

    def __contains__(self, mask: Mask) -> bool:
        return mask in self.witnesses


def definable_opens(model: GeomModel, liftings: Optional[Liftings] = None) -> DefinableOpens:
    """Least family of opens closed under ∩, ∪ and all modal steps."""
    liftings = _registry(model, liftings)
    space = model.space
    family: Dict[Mask, Formula] = {0: BOT, space.full: TOP}
    for letter in model.letters:
        family.setdefault(model.valuation[letter], Prop(letter))

    rounds = 0
    while True:
        rounds += 1
        current = list(family.items())
        found: Dict[Mask, Formula] = {}

        def add(mask: Mask, witness: Formula) -> None:
            if mask not in family and mask not in found:
                found[mask] = witness

        for (a, wa), (b, wb) in combinations(current, 2):
            add(a & b, And(wa, wb))
            add(a | b, Or((wa, wb)))
        for lifting_id in sorted(liftings):
            lifting = liftings[lifting_id]
            for chosen in product(current, repeat=lifting.arity):
                args = [mask for mask, _ in chosen]
                add(modal_step(model, lifting, args), Modal(lifting_id, tuple(w for _, w in chosen)))
        logger.debug(f"Definable opens round {rounds}: {len(found)} new")
        if not found:
            break
        family.update(found)

    logger.info(f"Definable opens stabilized at {len(family)} opens after {rounds} rounds")
    return DefinableOpens(tuple(sorted(family)), family, rounds)


@dataclass
class TheorySignature:
    """Per point, membership in each definable open."""

    opens: Tuple[Mask, ...]
    profiles: Dict[str, Tuple[bool, ...]]

    def classes(self) -> List[List[str]]:
        """Points grouped by equal profile, in order of first occurrence."""
        groups: Dict[Tuple[bool, ...], List[str]] = {}
        for point, profile in self.profiles.items():
            groups.setdefault(profile, []).append(point)
        return list(groups.values())


def theory_signature(
    model: GeomModel,
    liftings: Optional[Liftings] = None,
    family: Optional[DefinableOpens] = None,
) -> TheorySignature:
    family = family or definable_opens(model, liftings)
    profiles = {
        name: tuple(bool(o >> i & 1) for o in family.opens)
        for i, name in enumerate(model.space.points)
    }
    return TheorySignature(family.opens, profiles)


def modal_equiv(
    model: GeomModel,
    x: str,
    y: str,
    other: Optional[GeomModel] = None,
    liftings: Optional[Liftings] = None,
) -> bool:
    """
    Decide whether ``x`` and ``y`` satisfy the same formulas.

    With ``other``, ``x`` lives in ``model`` and ``y`` in ``other``; both
    are compared inside their disjoint union.

    Raises:
        InvalidInputError: If the two models use different functors
    """
    if other is not None:
        _point(model, x)
        _point(other, y)
        model = disjoint_union([model, other]).model
        x, y = f"m0.{x}", f"m1.{y}"
    signature = theory_signature(model, liftings)
    return signature.profiles[model.space.points[_point(model, x)]] == signature.profiles[
        model.space.points[_point(model, y)]
    ]


def equivalence_classes(model: GeomModel, liftings: Optional[Liftings] = None) -> List[List[str]]:
    return theory_signature(model, liftings).classes()


# --- theory quotient ------------------------------------------------------------


@dataclass
class TheoryQuotient:
    """
    Attributes:
        union: The disjoint union the quotient is taken of
        classes: Modal-equivalence classes of union points
        model: The quotient model, when well defined
        theory_maps: One map per input model into the quotient
        counterexamples: Witnesses against well-definedness
        morphisms_verified: Whether every theory map is a model morphism
    """

    union: GeomModel
    classes: List[List[str]]
    model: Optional[GeomModel] = None
    theory_maps: Tuple[ContMap, ...] = ()
    counterexamples: List[Dict[str, object]] = field(default_factory=list)
    morphisms_verified: bool = False

    @property
    def well_defined(self) -> bool:
        return self.model is not None and not self.counterexamples

    def as_dict(self) -> dict:
        return {
            "well_defined": self.well_defined,
            "classes": self.classes,
            "model": self.model.to_document() if self.model is not None else None,
            "theory_maps": [th.as_names() for th in self.theory_maps],
            "counterexamples": self.counterexamples,
            "morphisms_verified": self.morphisms_verified,
        }


def theory_quotient(models: Sequence[GeomModel], liftings: Optional[Liftings] = None) -> TheoryQuotient:
    """
    Quotient the disjoint union of ``models`` by modal equivalence.

    The quotient's opens are the images of definable opens and its
    transition sends a class to the image of any representative's
    successor. Differing images across one class are reported as
    counterexamples rather than raised.
    """
    union = disjoint_union(models)
    combined = union.model
    functor = combined.functor
    liftings = _registry(combined, liftings)
    family = definable_opens(combined, liftings)
    classes = theory_signature(combined, liftings, family).classes()

    names = [f"[{members[0]}]" for members in classes]
    assignment = [0] * combined.space.size
    for k, members in enumerate(classes):
        for name in members:
            assignment[combined.space.index[name]] = k
    subbase = [mask_from_indices(assignment[i] for i in bits(o)) for o in family.opens]
    quotient_space = space_from_subbase_masks(names, subbase)
    q = ContMap(combined.space, quotient_space, tuple(assignment))
    report = TheoryQuotient(combined, classes)

    carrier = functor.carrier(quotient_space)
    gamma = []
    for members in classes:
        images = [
            (name, functor.element_map(q, combined.coalgebra.gamma[combined.space.index[name]]))
            for name in members
        ]
        first_name, first = images[0]
        for name, image in images:
            if image not in carrier.index:
                report.counterexamples.append(
                    {
                        "point": name,
                        "reason": "successor image is outside the quotient carrier",
                        "image": functor.label(quotient_space, image),
                    }
                )
            elif image != first:
                report.counterexamples.append(
                    {
                        "left": first_name,
                        "right": name,
                        "reason": "equivalent points have different successor images",
                        "left_image": functor.label(quotient_space, first),
                        "right_image": functor.label(quotient_space, image),
                    }
                )
        gamma.append(first)
    if report.counterexamples:
        logger.warning(f"Theory quotient is not well defined: {len(report.counterexamples)} counterexamples")
        return report

    valuation = {letter: q.image(combined.valuation[letter]) for letter in combined.letters}
    try:
        report.model = make_model(quotient_space, functor, gamma, valuation)
    except InvalidInputError as exc:
        report.counterexamples.append({"reason": exc.message, "path": exc.path})
        logger.warning(f"Theory quotient transition rejected: {exc.message}")
        return report

    report.theory_maps = tuple(injection.then(q) for injection in union.injections)
    report.morphisms_verified = all(
        is_model_morphism(th, model, report.model) for th, model in zip(report.theory_maps, models)
    )
    if not report.morphisms_verified:
        raise InvariantViolation("A theory map into a well-defined quotient is not a model morphism")
    logger.info(f"Theory quotient: {combined.space.size} points into {quotient_space.size} classes")
    return report


# --- formula generation ---------------------------------------------------------------


def atoms(letters: Sequence[str]) -> List[Formula]:
    return [TOP, BOT] + [Prop(letter) for letter in letters]


def random_formula(
    rng: random.Random,
    depth: int,
    letters: Sequence[str],
    signature: Mapping[str, int],
    width: int = 2,
) -> Formula:
    """Random formula nested at most ``depth`` deep; seeded through ``rng``."""
    kinds = ["atom"]
    if depth > 0:
        kinds += ["and", "or"] + ["modal", "modal"] * bool(signature)
    kind = rng.choice(kinds)
    if kind == "atom":
        return rng.choice(atoms(letters))
    if kind == "and":
        return And(
            random_formula(rng, depth - 1, letters, signature, width),
            random_formula(rng, depth - 1, letters, signature, width),
        )
    if kind == "or":
        return Or(
            tuple(
                random_formula(rng, depth - 1, letters, signature, width)
                for _ in range(rng.randint(0, width))
            )
        )
    lifting_id = rng.choice(sorted(signature))
    return Modal(
        lifting_id,
        tuple(random_formula(rng, depth - 1, letters, signature, width) for _ in range(signature[lifting_id])),
    )


def enumerate_formulas(
    depth: int,
    letters: Sequence[str],
    signature: Mapping[str, int],
    max_formulas: int = 20000,
) -> Iterator[Formula]:
    """
    All formulas built in ``depth`` construction rounds from atoms.

    Each round adds binary conjunctions, binary disjunctions and modal
    applications over the formulas of the previous round.

    Raises:
        ResourceBoundError: If more than ``max_formulas`` would be produced
    """
    level: List[Formula] = atoms(letters)
    for _ in range(depth):
        grown = list(level)
        for left, right in product(level, repeat=2):
            grown.append(And(left, right))
            grown.append(Or((left, right)))
        for lifting_id in sorted(signature):
            grown.extend(Modal(lifting_id, args) for args in product(level, repeat=signature[lifting_id]))
        if len(grown) > max_formulas:
            raise ResourceBoundError(
                f"Formula enumeration reached {len(grown)} formulas, above {max_formulas}",
                bound=max_formulas,
                value=len(grown),
            )
        level = list(dict.fromkeys(grown))
    yield from level


def bounded_truth_sets(
    model: GeomModel, rounds: int, liftings: Optional[Liftings] = None
) -> Dict[Mask, Formula]:
    """
    Truth sets reached by formulas of bounded construction depth.

    Formulas are grown from atoms and evaluated with truth_set; after each
    round only one representative per truth set is kept.
    """
    liftings = _registry(model, liftings)
    reached: Dict[Mask, Formula] = {}
    for formula in atoms(model.letters):
        reached.setdefault(truth_set(model, formula, liftings), formula)
    for _ in range(rounds):
        level = list(reached.values())
        candidates: List[Formula] = []
        for left, right in product(level, repeat=2):
            candidates.extend((And(left, right), Or((left, right))))
        for lifting_id in sorted(liftings):
            arity = liftings[lifting_id].arity
            candidates.extend(Modal(lifting_id, args) for args in product(level, repeat=arity))
        for formula in candidates:
            reached.setdefault(truth_set(model, formula, liftings), formula)
    return reached
