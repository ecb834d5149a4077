"""
Behavioural equivalence and the comparison of the four equivalence notions.

For two models over one functor the comparison computes Λ-bisimilarity
(greatest Λ-bisimulation), modal equivalence (definable opens of the
disjoint union), behavioural equivalence (theory quotient) and
Aczel–Mendler bisimilarity restricted to sampled relations, then checks
the inclusions between them.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional

from apps.bisim.services.relations import (
    Pair,
    Relation,
    greatest_lambda_bisim,
    is_lambda_bisim,
    search_am_transition,
)
from apps.coalgebra.services.functors import GeomModel, disjoint_union
from apps.coalgebra.services.liftings import check_characteristic, lifting_flags, liftings_for
from apps.core.exceptions import InvalidInputError, ResourceBoundError
from apps.logic.services.semantics import (
    Liftings,
    TheoryQuotient,
    definable_opens,
    theory_quotient,
    theory_signature,
)

logger = logging.getLogger(__name__)


@dataclass
class BehaviouralVerdict:
    """
    Attributes:
        equivalent: True or False, or None when the quotient is not well defined
        quotient: The theory quotient used as witness
    """

    equivalent: Optional[bool]
    quotient: TheoryQuotient

    @property
    def determinate(self) -> bool:
        return self.equivalent is not None

    def as_dict(self) -> dict:
        body: Dict[str, object] = {"equivalent": self.equivalent}
        if self.quotient.well_defined:
            body["witness"] = [th.as_names() for th in self.quotient.theory_maps]
        else:
            body["counterexamples"] = self.quotient.counterexamples
        return body


def _point_index(model: GeomModel, name: str, path: str) -> int:
    if name not in model.space.index:
        raise InvalidInputError(f"Unknown point: {name}", path=path, point=name)
    return model.space.index[name]


def behavioural_equiv(
    left: GeomModel,
    x: str,
    right: GeomModel,
    y: str,
    liftings: Optional[Liftings] = None,
) -> BehaviouralVerdict:
    """
    Decide whether ``x`` and ``y`` are identified by a cospan of model morphisms.

    The cospan is the pair of theory maps into the quotient of the disjoint
    union by modal equivalence.

    Raises:
        InvalidInputError: On unknown points or a functor mismatch
    """
    i = _point_index(left, x, "x")
    j = _point_index(right, y, "y")
    quotient = theory_quotient([left, right], liftings)
    if not quotient.well_defined:
        logger.warning(f"Behavioural equivalence of {x} and {y} is indeterminate: quotient not well defined")
        return BehaviouralVerdict(None, quotient)
    th_left, th_right = quotient.theory_maps
    return BehaviouralVerdict(th_left(i) == th_right(j), quotient)


@dataclass(frozen=True)
class SignatureHypotheses:
    """Flags of a lifting registry that make the equivalence notions coincide."""

    monotone: bool
    scott: bool
    strong: bool
    characteristic: bool

    @property
    def all_hold(self) -> bool:
        return self.monotone and self.scott and self.strong and self.characteristic

    def as_dict(self) -> dict:
        return {
            "monotone": self.monotone,
            "scott": self.scott,
            "strong": self.strong,
            "characteristic": self.characteristic,
        }


def signature_hypotheses(left: GeomModel, right: GeomModel, liftings: Liftings) -> SignatureHypotheses:
    flags = [lifting_flags(lifting) for lifting in liftings.values()]
    members = list(liftings.values())
    functor = left.functor
    characteristic = all(
        check_characteristic(members, space, functor) for space in (left.space, right.space)
    )
    return SignatureHypotheses(
        monotone=all(f.monotone for f in flags),
        scott=all(f.scott for f in flags),
        strong=all(f.strong is True for f in flags),
        characteristic=characteristic,
    )


@dataclass
class EquivalenceReport:
    """
    Attributes:
        lambda_bisimilar: Pairs related by the greatest Λ-bisimulation
        modally_equivalent: Pairs with equal theories
        behaviourally_equivalent: Pairs identified by the theory quotient,
            None when the quotient is not well defined
        am_bisimilar: Pairs covered by a sampled relation with a found transition
        hypotheses: Signature flags
        violations: Failed inclusions, each with a witnessing pair
        am_searches: Status of every sampled Aczel–Mendler search
    """

    left: GeomModel
    right: GeomModel
    lambda_bisimilar: FrozenSet[Pair]
    modally_equivalent: FrozenSet[Pair]
    behaviourally_equivalent: Optional[FrozenSet[Pair]]
    am_bisimilar: FrozenSet[Pair]
    hypotheses: SignatureHypotheses
    violations: List[Dict[str, object]] = field(default_factory=list)
    am_searches: List[Dict[str, object]] = field(default_factory=list)

    @property
    def coincide(self) -> Optional[bool]:
        if self.behaviourally_equivalent is None:
            return None
        return self.lambda_bisimilar == self.modally_equivalent == self.behaviourally_equivalent

    def _names(self, pairs) -> List[List[str]]:
        left, right = self.left.space.points, self.right.space.points
        return sorted([left[i], right[j]] for i, j in pairs)

    def as_dict(self) -> dict:
        behavioural = self.behaviourally_equivalent
        return {
            "functor": self.left.functor.name,
            "hypotheses": self.hypotheses.as_dict(),
            "lambda_bisimilar": self._names(self.lambda_bisimilar),
            "modally_equivalent": self._names(self.modally_equivalent),
            "behaviourally_equivalent": self._names(behavioural) if behavioural is not None else None,
            "am_bisimilar": self._names(self.am_bisimilar),
            "coincide": self.coincide,
            "am_searches": self.am_searches,
            "violations": self.violations,
        }


def _modal_pairs(left: GeomModel, right: GeomModel, liftings: Liftings) -> FrozenSet[Pair]:
    union = disjoint_union([left, right])
    combined = union.model
    family = definable_opens(combined, liftings)
    profiles = theory_signature(combined, liftings, family).profiles
    names = combined.space.points
    first, second = union.injections
    return frozenset(
        (i, j)
        for i in range(left.space.size)
        for j in range(right.space.size)
        if profiles[names[first(i)]] == profiles[names[second(j)]]
    )


def _behavioural_pairs(quotient: TheoryQuotient, left: GeomModel, right: GeomModel) -> Optional[FrozenSet[Pair]]:
    if not quotient.well_defined:
        return None
    th_left, th_right = quotient.theory_maps
    return frozenset(
        (i, j)
        for i in range(left.space.size)
        for j in range(right.space.size)
        if th_left(i) == th_right(j)
    )


def _inclusion(report: EquivalenceReport, smaller, larger, name: str) -> None:
    missing = sorted(smaller - larger)
    if missing:
        i, j = missing[0]
        report.violations.append(
            {
                "inclusion": name,
                "pair": [report.left.space.points[i], report.right.space.points[j]],
                "count": len(missing),
            }
        )


def compare_equivalences(
    left: GeomModel,
    right: GeomModel,
    liftings: Optional[Liftings] = None,
    seed: int = 0,
    samples: int = 4,
    max_nodes: Optional[int] = None,
) -> EquivalenceReport:
    """
    Compute and compare the four equivalence notions between two models.

    AM-bisimilarity is approximated from below by searching transitions on
    the greatest Λ-bisimulation and on ``samples`` random subrelations of
    it. The inclusions AM ⊆ Λ-bisimilar ⊆ modally equivalent are always
    checked; when every signature hypothesis holds, behavioural equivalence
    is also required to coincide with both. Failed checks are reported,
    never raised.

    Raises:
        InvalidInputError: If the models use different functors or letters
    """
    if left.functor.name != right.functor.name:
        raise InvalidInputError(f"Functor mismatch: {left.functor.name} versus {right.functor.name}")
    liftings = liftings if liftings is not None else liftings_for(left.functor)
    hypotheses = signature_hypotheses(left, right, liftings)

    gfp = greatest_lambda_bisim(left, right, liftings)
    modal = _modal_pairs(left, right, liftings)
    behavioural = _behavioural_pairs(theory_quotient([left, right], liftings), left, right)

    rng = random.Random(seed)
    ordered = sorted(gfp.pairs)
    candidates = [gfp] + [
        gfp.with_pairs(pair for pair in ordered if rng.random() < 0.5) for _ in range(samples)
    ]
    am: set = set()
    searches: List[Dict[str, object]] = []
    am_relations: List[Relation] = []
    for relation in candidates:
        try:
            search = search_am_transition(relation, max_nodes)
        except ResourceBoundError as exc:
            searches.append({"pairs": len(relation), "status": "bound", "reason": exc.message})
            continue
        searches.append({"pairs": len(relation), "status": search.status, "nodes": search.nodes})
        if search.found:
            am.update(relation.pairs)
            am_relations.append(relation)

    report = EquivalenceReport(
        left,
        right,
        gfp.pairs,
        modal,
        behavioural,
        frozenset(am),
        hypotheses,
        am_searches=searches,
    )
    if hypotheses.monotone:
        for relation in am_relations:
            check = is_lambda_bisim(relation, liftings)
            if not check:
                report.violations.append(
                    {"inclusion": "am-relation is a lambda-bisimulation", **(check.counterexample or {})}
                )
    _inclusion(report, report.am_bisimilar, report.lambda_bisimilar, "am <= lambda")
    _inclusion(report, report.lambda_bisimilar, report.modally_equivalent, "lambda <= modal")
    if behavioural is not None:
        _inclusion(report, behavioural, report.modally_equivalent, "behavioural <= modal")
        if hypotheses.all_hold:
            _inclusion(report, behavioural, report.lambda_bisimilar, "behavioural <= lambda")
            _inclusion(report, report.modally_equivalent, behavioural, "modal <= behavioural")
    elif hypotheses.all_hold:
        logger.warning("Signature hypotheses hold but behavioural equivalence is indeterminate")

    if report.violations:
        logger.warning(f"Equivalence comparison found {len(report.violations)} violated inclusions")
    logger.info(
        f"Compared equivalences: {len(gfp.pairs)} Λ-bisimilar, {len(modal)} modally equivalent, "
        f"{len(am)} AM-bisimilar pairs"
    )
    return report
