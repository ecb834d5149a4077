"""
The acceptance suite: exact finite checks of the library's theorems.

Every item is deterministic given ``max_points`` and ``seed``. Items draw
their randomness from their own generator, so selecting a subset of the
suite does not change the outcome of any item.
"""

import logging
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, Iterable, List, Optional, Sequence

from apps.bisim.services.equivalence import compare_equivalences
from apps.bisim.services.relations import greatest_lambda_bisim, is_lambda_bisim, random_lambda_bisims
from apps.coalgebra.services.duality import check_monotone_duality
from apps.coalgebra.services.functors import (
    GeomModel,
    disjoint_union,
    get_functor,
    is_model_morphism,
    make_model,
)
from apps.coalgebra.services.kkplift import (
    agreement_map,
    check_agreement_naturality,
    check_lift_theorems,
    fhat_frame,
    kkp_functor,
)
from apps.coalgebra.services.liftings import (
    BUILTIN_PREDICATES,
    builtin_lifting,
    lifting_from_code,
    liftings_agree,
    liftings_for,
    sierpinski_code,
)
from apps.core.exceptions import GeomodalError, InvalidInputError, UnknownIdentifierError
from apps.logic.services.proofsys import soundness_sweep
from apps.logic.services.semantics import normal_form, random_formula, theory_quotient, truth_set
from apps.logic.services.syntax import parse, signature_of, to_text
from apps.topology.services.enumeration import (
    all_frames,
    default_points,
    discrete_spaces_up_to,
    random_subbase_space,
    spaces_up_to,
)
from apps.topology.services.finspace import (
    continuous_maps,
    discrete_space,
    find_frame_isomorphism,
    opn_frame,
    sobrify,
    two_frame,
)
from apps.topology.services.framealg import (
    compare_presentations,
    present_M,
    present_Mprime,
    presentation_points,
    presented_frame_small,
)

logger = logging.getLogger(__name__)

# Carrier sizes of D_kh on the discrete spaces with 1, 2 and 3 points.
DKH_CARRIER_SIZES = {1: 3, 2: 6, 3: 20}

MAX_REPORTED_FAILURES = 5

# Largest models compared for coinciding equivalences. D_kh is taken on the
# disjoint union, which must stay within DKH_MAX_POINTS.
EQUIVALENCE_MAX_POINTS = {"dkh": 2, "vietoris": 3}


@dataclass
class ItemResult:
    """
    Outcome of one acceptance item.

    Attributes:
        id: Two-digit item number
        name: Short item name
        checked: Number of individual checks performed
        failures: Witnesses of failed checks, at most MAX_REPORTED_FAILURES
        failed: Total number of failed checks
        error: Set when the item aborted with a library error
    """

    id: str
    name: str
    checked: int = 0
    failures: List[Dict[str, object]] = field(default_factory=list)
    failed: int = 0
    error: Optional[Dict[str, object]] = None

    @property
    def passed(self) -> bool:
        return self.failed == 0 and self.error is None

    def check(self, ok: bool, witness: Optional[Dict[str, object]] = None) -> bool:
        self.checked += 1
        if not ok:
            self.failed += 1
            if len(self.failures) < MAX_REPORTED_FAILURES:
                self.failures.append(witness or {})
        return ok

    def as_dict(self) -> dict:
        body = {
            "id": self.id,
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "failed": self.failed,
            "failures": self.failures,
        }
        if self.error is not None:
            body["error"] = self.error
        return body


@dataclass(frozen=True)
class SuiteContext:
    max_points: int
    seed: int

    def rng(self, item_id: str) -> random.Random:
        return random.Random(self.seed * 100 + int(item_id))

    def points(self, cap: int) -> int:
        return min(cap, self.max_points)


ItemCheck = Callable[[SuiteContext, ItemResult], None]
ITEMS: Dict[str, tuple] = {}


def acceptance_item(item_id: str, name: str):
    """Register an acceptance check under ``item_id``."""

    def register(check: ItemCheck) -> ItemCheck:
        ITEMS[item_id] = (name, check)
        return check

    return register


# --- random models ----------------------------------------------------------------


def random_discrete_model(
    rng: random.Random, functor_name: str, size: int, letters: Sequence[str] = ("p",)
) -> GeomModel:
    functor = get_functor(functor_name)
    space = discrete_space(default_points(size))
    elements = functor.carrier(space).elements
    gamma = [rng.choice(elements) for _ in range(size)]
    valuation = {letter: rng.randrange(1 << size) for letter in letters}
    return make_model(space, functor, gamma, valuation)


def random_model(
    rng: random.Random, functor_name: str, max_points: int, letters: Sequence[str] = ("p", "q")
) -> GeomModel:
    """
    A model on a random subbase-generated space.

    Transitions are redrawn until continuous; a constant transition is
    always continuous and is the fallback.
    """
    functor = get_functor(functor_name)
    size = rng.randint(1, max_points)
    space = random_subbase_space(rng, size)
    elements = functor.carrier(space).elements
    valuation = {letter: rng.choice(space.opens) for letter in letters}
    for _ in range(20):
        try:
            return make_model(space, functor, [rng.choice(elements) for _ in range(size)], valuation)
        except InvalidInputError:
            continue
    return make_model(space, functor, [elements[0]] * size, valuation)


# --- items ------------------------------------------------------------------------


@acceptance_item("01", "duality-fragment")
def check_duality_fragment(ctx: SuiteContext, result: ItemResult) -> None:
    for space in spaces_up_to(4):
        unit = sobrify(space).unit
        if space.is_t0:
            result.check(unit.is_homeomorphism(), {"space": space.to_document(), "expected": "sober"})
        else:
            injective = len(set(unit.assignment)) == space.size
            result.check(not injective, {"space": space.to_document(), "expected": "non-injective unit"})


@acceptance_item("02", "monotone-duality")
def check_monotone_duality_theorem(ctx: SuiteContext, result: ItemResult) -> None:
    for n in sorted(DKH_CARRIER_SIZES):
        report = check_monotone_duality(discrete_space(default_points(n)))
        ok = report.holds and report.carrier_size == DKH_CARRIER_SIZES[n]
        result.check(ok, {"points": n, **report.as_dict()})


@acceptance_item("03", "m-mprime-isomorphic")
def check_m_and_mprime(ctx: SuiteContext, result: ItemResult) -> None:
    for frame in all_frames(3):
        m, m_prime = present_M(frame), present_Mprime(frame)
        generators = max(len(m.generators), len(m_prime.generators))
        report = compare_presentations(m, m_prime, max_generators=generators)
        result.check(report.isomorphic, {"frame": list(frame.labels), **report.as_dict()})


@acceptance_item("04", "presented-frame")
def check_presented_frame(ctx: SuiteContext, result: ItemResult) -> None:
    presentation = present_M(two_frame())
    presented = presented_frame_small(presentation)
    result.check(presented.frame.size == 8, {"elements": presented.frame.size})
    points = presentation_points(presentation)
    iso = find_frame_isomorphism(presented.frame, opn_frame(points.space))
    result.check(iso is not None, {"reason": "presented frame differs from opn of its points"})


LIFT_CASES = (("powerset", 3), ("monotone", 2))


def _lift_spaces(cap: int) -> List:
    return [space for space in discrete_spaces_up_to(cap) if space.size]


@acceptance_item("05", "kkp-agreement")
def check_kkp_agreement(ctx: SuiteContext, result: ItemResult) -> None:
    for base, cap in LIFT_CASES:
        functor = kkp_functor(base, ("box", "dia"))
        spaces = _lift_spaces(cap)
        for space in spaces:
            report = agreement_map(functor, space)
            result.check(report.verdict is True, {"functor": functor.name, "points": space.size})
        for source, target in product(spaces, repeat=2):
            for f in continuous_maps(source, target):
                result.check(
                    check_agreement_naturality(functor, f),
                    {"functor": functor.name, "map": f.as_names()},
                )


@acceptance_item("06", "lifted-signature")
def check_lifted_signature(ctx: SuiteContext, result: ItemResult) -> None:
    for base, cap in LIFT_CASES:
        functor = kkp_functor(base, ("box", "dia"))
        for space in _lift_spaces(cap):
            report = check_lift_theorems(functor, space)
            result.check(report.confirmed, {"functor": functor.name, **report.as_dict()})
            congruence = fhat_frame(functor.base, functor.liftings, space)
            result.check(congruence.trivial, {"functor": functor.name, **congruence.as_dict()})


@acceptance_item("07", "soundness")
def check_soundness(ctx: SuiteContext, result: ItemResult) -> None:
    for system, functor in (("monotone", "dkh"), ("positive-vietoris", "vietoris")):
        report = soundness_sweep(system, functor, max_points=ctx.points(2))
        result.check(report.sound, {"system": system, "violations": report.violations[:1]})


@acceptance_item("08", "normal-form")
def check_normal_form(ctx: SuiteContext, result: ItemResult) -> None:
    rng = ctx.rng("08")
    for k in range(50):
        model = random_model(rng, ("kripke", "monotone")[k % 2], ctx.points(3))
        liftings = liftings_for(model.functor)
        signature = signature_of(liftings)
        for _ in range(10):
            formula = random_formula(rng, 3, model.letters, signature, width=3)
            rewritten = normal_form(formula, liftings)
            result.check(
                truth_set(model, rewritten, liftings) == truth_set(model, formula, liftings),
                {"formula": to_text(formula), "model": model.to_document()},
            )


def _morphisms(rng: random.Random, ctx: SuiteContext, wanted: int) -> Iterable:
    """Model morphisms from coproduct injections and well-defined theory maps."""
    found = 0
    k = 0
    while found < wanted and k < wanted * 10:
        functor_name = ("kripke", "monotone")[k % 2]
        k += 1
        left = random_model(rng, functor_name, ctx.points(2))
        right = random_model(rng, functor_name, ctx.points(2))
        union = disjoint_union([left, right])
        candidates = list(zip(union.injections, (left, right), (union.model, union.model)))
        quotient = theory_quotient([left, right])
        if quotient.well_defined:
            candidates.extend(zip(quotient.theory_maps, (left, right), (quotient.model, quotient.model)))
        for f, source, target in candidates:
            if is_model_morphism(f, source, target):
                found += 1
                yield f, source, target


@acceptance_item("09", "truth-preservation")
def check_truth_preservation(ctx: SuiteContext, result: ItemResult) -> None:
    rng = ctx.rng("09")
    verified = 0
    for f, source, target in _morphisms(rng, ctx, 100):
        verified += 1
        signature = signature_of(liftings_for(source.functor))
        for _ in range(20):
            formula = random_formula(rng, 3, source.letters, signature, width=3)
            result.check(
                truth_set(source, formula) == f.preimage(truth_set(target, formula)),
                {"formula": to_text(formula), "map": f.as_names()},
            )
    result.check(verified >= 100, {"reason": "too few verified morphisms", "verified": verified})


@acceptance_item("10", "bisimulation")
def check_bisimulation(ctx: SuiteContext, result: ItemResult) -> None:
    rng = ctx.rng("10")
    for k in range(100):
        functor_name = ("kripke", "monotone")[k % 2]
        left = random_discrete_model(rng, functor_name, rng.randint(1, ctx.points(2)))
        right = random_discrete_model(rng, functor_name, rng.randint(1, ctx.points(2)))
        gfp = greatest_lambda_bisim(left, right)
        sampled = random_lambda_bisims(left, right, rng, 3)
        union = sampled[0]
        for relation in sampled:
            result.check(relation.pairs <= gfp.pairs, {"reason": "sampled bisimulation above the gfp"})
            union = union.union(relation)
        check = is_lambda_bisim(union)
        result.check(check.holds, {"reason": "union is not a bisimulation", **(check.counterexample or {})})
    for k in range(20):
        functor_name = ("dkh", "vietoris")[k % 2]
        size = EQUIVALENCE_MAX_POINTS[functor_name]
        left = random_discrete_model(rng, functor_name, rng.randint(1, size))
        right = random_discrete_model(rng, functor_name, rng.randint(1, size))
        report = compare_equivalences(left, right, seed=rng.randrange(1 << 16), samples=2, max_nodes=20000)
        result.check(not report.violations, {"functor": functor_name, "violations": report.violations})


@acceptance_item("11", "sierpinski-codes")
def check_sierpinski_codes(ctx: SuiteContext, result: ItemResult) -> None:
    for functor_name, predicates in sorted(BUILTIN_PREDICATES.items()):
        for lifting_id in sorted(predicates):
            code = sierpinski_code(builtin_lifting(functor_name, lifting_id))
            back = sierpinski_code(lifting_from_code(code, lifting_id))
            result.check(back.code == code.code, {"functor": functor_name, "lifting": lifting_id})
    for functor_name, lifting_id, cap in (
        ("kripke", "box", 3),
        ("kripke", "dia", 3),
        ("monotone", "box", 2),
        ("monotone", "dia", 2),
        ("trivial", "triv", 3),
    ):
        lifting = builtin_lifting(functor_name, lifting_id)
        rebuilt = lifting_from_code(sierpinski_code(lifting), lifting_id)
        universe = list(spaces_up_to(ctx.points(cap)))
        result.check(
            liftings_agree(rebuilt, lifting, universe), {"functor": functor_name, "lifting": lifting_id}
        )


@acceptance_item("12", "parser-round-trip")
def check_parser_round_trip(ctx: SuiteContext, result: ItemResult) -> None:
    rng = ctx.rng("12")
    for _ in range(1000):
        formula = random_formula(rng, 3, ["p", "q"], {"box": 1, "dia": 1}, width=3)
        text = to_text(formula)
        parsed = parse(text)
        result.check(parsed == formula and to_text(parsed) == text, {"formula": text})


# --- driver -----------------------------------------------------------------------


def select_items(suite: str) -> List[str]:
    """
    Resolve ``all`` or a comma list of item ids or names.

    Raises:
        UnknownIdentifierError: For an unknown item
    """
    if suite == "all":
        return sorted(ITEMS)
    names = {name: item_id for item_id, (name, _) in ITEMS.items()}
    selected = set()
    for token in (t.strip() for t in suite.split(",")):
        if not token:
            continue
        item_id = token.zfill(2) if token.isdigit() else names.get(token)
        if item_id not in ITEMS:
            raise UnknownIdentifierError(f"Unknown acceptance item: {token}", known=sorted(ITEMS))
        selected.add(item_id)
    return sorted(selected)


def run_item(item_id: str, ctx: SuiteContext) -> ItemResult:
    name, check = ITEMS[item_id]
    result = ItemResult(item_id, name)
    try:
        check(ctx, result)
    except GeomodalError as exc:
        logger.error(f"Acceptance item {item_id} aborted: {exc.message}")
        result.error = exc.as_dict()
    logger.info(f"Acceptance item {item_id} {name}: {result.checked} checks, {result.failed} failed")
    return result


def run_suite(suite: str = "all", max_points: int = 2, seed: int = 0) -> Dict[str, object]:
    """Run the selected items in id order and collect their results."""
    ctx = SuiteContext(max_points, seed)
    results = [run_item(item_id, ctx) for item_id in select_items(suite)]
    return {
        "passed": all(r.passed for r in results),
        "max_points": max_points,
        "items": [r.as_dict() for r in results],
    }
