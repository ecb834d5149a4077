"""
The topological Kupke-Kurz-Pattinson lift of a Set functor with predicate
liftings.

For a finite space X the frame Ḟ X is the sublattice of subsets of B(U X)
generated by the images λ(a⃗) over opens a⃗. Its points form the lifted
space; a point is stored as the least frame element it sends to 1.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from apps.core.cache import get_or_build
from apps.core.exceptions import InvalidInputError, InvariantViolation, UnknownIdentifierError
from apps.coalgebra.services.functors import (
    Carrier,
    SetFunctor,
    TopFunctor,
    get_functor,
    set_functor,
)
from apps.coalgebra.services.liftings import (
    BUILTIN_PREDICATES,
    OpenLifting,
    Predicate,
    builtin_lifting,
    check_characteristic,
    check_scott,
    directed_families,
    open_tuples,
)
from apps.topology.services.finspace import (
    ContMap,
    FinFrame,
    FinSpace,
    Mask,
    bits,
    find_homeomorphism,
    frame_points,
    mask_from_indices,
    match_by_profiles,
    subset_frame,
    subset_label,
)

logger = logging.getLogger(__name__)


# --- predicate liftings on finite sets -----------------------------------------


@dataclass(frozen=True)
class SetLifting:
    """A predicate lifting for a Set functor, evaluated on arbitrary subsets."""

    id: str
    base: SetFunctor
    arity: int
    predicate: Predicate = field(repr=False, compare=False)

    def __call__(self, space: FinSpace, args: Sequence[Mask]) -> Mask:
        """Bitmask over the positions of ``base.on_set(|X|)``."""
        args = tuple(args)
        elements = self.base.on_set(space.size)
        return mask_from_indices(
            k for k, element in enumerate(elements) if self.predicate(space, element, args)
        )

    def is_monotone_in(self, space: FinSpace, i: int) -> bool:
        """Monotone in argument ``i`` over all subsets of the points."""
        subsets = range(1 << space.size)
        for args in product(subsets, repeat=self.arity):
            value = self(space, args)
            for j in bits(space.full & ~args[i]):
                bigger = args[:i] + (args[i] | 1 << j,) + args[i + 1 :]
                if value & ~self(space, bigger):
                    return False
        return True


def _empty_complement_box(space, b, args):
    return b & args[0] == 0


SET_PREDICATES: Dict[str, Dict[str, Predicate]] = {
    "powerset": {
        "box": BUILTIN_PREDICATES["kripke"]["box"],
        "dia": BUILTIN_PREDICATES["kripke"]["dia"],
        "nbox": _empty_complement_box,
    },
    "monotone": {
        "box": BUILTIN_PREDICATES["monotone"]["box"],
        "dia": BUILTIN_PREDICATES["monotone"]["dia"],
    },
}


def set_lifting(base: str, name: str) -> SetLifting:
    """
    Raises:
        UnknownIdentifierError: For an unknown base or lifting name
    """
    functor = set_functor(base)
    if name not in SET_PREDICATES[base]:
        raise UnknownIdentifierError(
            f"Unknown lifting {name} for set functor {base}", functor=base, lifting=name
        )
    return SetLifting(name, functor, 1, SET_PREDICATES[base][name])


# --- the frames Ḟ X and F̂ X ------------------------------------------------------


def _generators(liftings: Sequence[SetLifting], space: FinSpace) -> Dict[Tuple[str, Tuple[Mask, ...]], Mask]:
    return {
        (lifting.id, args): lifting(space, args)
        for lifting in liftings
        for args in open_tuples(space, lifting.arity)
    }


def _lattice_closure(seeds: Sequence[Mask], full: Mask) -> List[Mask]:
    members = set(seeds) | {0, full}
    frontier = list(members)
    while frontier:
        fresh = []
        for a in frontier:
            for b in list(members):
                for c in (a & b, a | b):
                    if c not in members:
                        members.add(c)
                        fresh.append(c)
        frontier = fresh
    return sorted(members)


def fdot_frame(base: SetFunctor, liftings: Sequence[SetLifting], space: FinSpace) -> FinFrame:
    """
    Sublattice of subsets of B(U X) generated by the lifting images.

    Elements are bitmasks over the positions of ``base.on_set(|X|)``.
    """
    elements = base.on_set(space.size)
    full = (1 << len(elements)) - 1
    members = _lattice_closure(list(_generators(liftings, space).values()), full)

    def label(mask: Mask) -> str:
        return subset_label([base.label(space, elements[k]) for k in bits(mask)])

    frame = subset_frame(members, label)
    logger.debug(f"Fdot frame over {space.size} points has {frame.size} elements")
    return frame


@dataclass
class FHatReport:
    """
    The quotient frame F̂ X and the congruence instances that produced it.

    Attributes:
        frame: The quotient, equal to Ḟ X when the congruence is trivial
        instances: Number of generating pairs checked
        skipped: Lifting identifiers not monotone in some argument
        trivial: Whether every generating pair was already equal
    """

    frame: FinFrame
    instances: int
    skipped: List[str]
    trivial: bool = True

    def as_dict(self) -> dict:
        return {
            "elements": self.frame.size,
            "instances": self.instances,
            "skipped": self.skipped,
            "trivial": self.trivial,
        }


def fhat_frame(
    base: SetFunctor, liftings: Sequence[SetLifting], space: FinSpace
) -> FHatReport:
    """
    Quotient Ḟ X by ⋃ λ(…,b,…) ~ λ(…,⋃B,…) over directed open families B.

    Only arguments in which λ is monotone generate pairs.

    Raises:
        InvariantViolation: If some generating pair is not already an equality
    """
    frame = fdot_frame(base, liftings, space)
    families = directed_families(space)
    instances = 0
    skipped = []
    for lifting in liftings:
        for i in range(lifting.arity):
            if not lifting.is_monotone_in(space, i):
                skipped.append(lifting.id)
                continue
            for args in open_tuples(space, lifting.arity):
                for family in families:
                    joined = 0
                    images = 0
                    for b in family:
                        joined |= b
                        images |= lifting(space, args[:i] + (b,) + args[i + 1 :])
                    instances += 1
                    if images != lifting(space, args[:i] + (joined,) + args[i + 1 :]):
                        raise InvariantViolation(
                            f"Directed-join congruence for {lifting.id} is not trivial",
                            family=[space.label(b) for b in family],
                        )
    return FHatReport(frame, instances, sorted(set(skipped)))


# --- the lifted functor ----------------------------------------------------------


class KKPFunctor(TopFunctor):
    """T̂ = pt ∘ F̂ for a Set functor and a list of its liftings."""

    closed_maps_only = False

    def __init__(self, base: SetFunctor, liftings: Sequence[SetLifting]):
        self.base = base
        self.liftings = tuple(liftings)
        self.name = f"kkp:{base.name}:" + ",".join(lifting.id for lifting in self.liftings)

    def frame(self, space: FinSpace) -> FinFrame:
        return get_or_build(
            f"fhat:{self.name}",
            space.key,
            lambda: fhat_frame(self.base, self.liftings, space).frame,
        )

    def build_carrier(self, space: FinSpace) -> Carrier:
        points = frame_points(self.frame(space))
        elements = tuple(points.frame.elements[g] for g in points.generators)
        return Carrier(space, elements, points.space)

    def element_map(self, f: ContMap, element: Mask) -> Mask:
        """The generator of {u ∈ F̂Y | (Bf)⁻¹(u) ⊇ g}."""
        pulled = self.preimage_hom(f)
        result = (1 << len(self.base.on_set(f.target.size))) - 1
        for u, preimage in pulled.items():
            if element & ~preimage == 0:
                result &= u
        return result

    def preimage_hom(self, f: ContMap) -> Dict[Mask, Mask]:
        """(Bf)⁻¹ restricted to F̂Y, verified to land in F̂X."""
        key = f"{f.source.key}|{f.target.key}|{list(f.assignment)}"
        return get_or_build(f"preimage-hom:{self.name}", key, lambda: self._build_preimage_hom(f))

    def _build_preimage_hom(self, f: ContMap) -> Dict[Mask, Mask]:
        source_elements = self.base.on_set(f.source.size)
        target_elements = self.base.on_set(f.target.size)
        target_index = {e: k for k, e in enumerate(target_elements)}
        images = [target_index[self.base.on_fun(f, e)] for e in source_elements]
        source_frame = self.frame(f.source)
        hom = {}
        for u in self.frame(f.target).elements:
            preimage = mask_from_indices(k for k, position in enumerate(images) if u >> position & 1)
            if preimage not in source_frame.index:
                raise InvariantViolation("Preimage of a lifted open left the frame")
            hom[u] = preimage
        return hom

    def label(self, space: FinSpace, element: Mask) -> str:
        elements = self.base.on_set(space.size)
        return subset_label([self.base.label(space, elements[k]) for k in bits(element)])

    def encode(self, space: FinSpace, element: Mask) -> List:
        elements = self.base.on_set(space.size)
        top = self.base.top_functor
        return [top.encode(space, elements[k]) for k in bits(element)]

    def decode(self, space: FinSpace, document, path: str = "") -> Mask:
        if not isinstance(document, list):
            raise InvalidInputError("Expected a list of base elements", path=path)
        elements = self.base.on_set(space.size)
        index = {e: k for k, e in enumerate(elements)}
        top = self.base.top_functor
        mask = 0
        for i, item in enumerate(document):
            element = top.decode(space, item, f"{path}[{i}]")
            if element not in index:
                raise InvalidInputError("Not an element of the base carrier", path=f"{path}[{i}]")
            mask |= 1 << index[element]
        return mask

    def lifted_liftings(self) -> Dict[str, OpenLifting]:
        return {lifting.id: _lift(self, lifting) for lifting in self.liftings}


def _lift(functor: KKPFunctor, lifting: SetLifting) -> OpenLifting:
    def evaluate(space: FinSpace, args: Tuple[Mask, ...]) -> Mask:
        image = lifting(space, args)
        return functor.carrier(space).select(lambda g: g & ~image == 0)

    def predicate(space: FinSpace, g: Mask, args: Tuple[Mask, ...]) -> bool:
        return g & ~lifting(space, args) == 0

    return OpenLifting(lifting.id, functor, lifting.arity, evaluate, predicate)


@lru_cache(maxsize=None)
def kkp_functor(base: str, lifting_ids: Tuple[str, ...]) -> KKPFunctor:
    return KKPFunctor(set_functor(base), [set_lifting(base, name) for name in lifting_ids])


def kkp_functor_from_id(identifier: str) -> KKPFunctor:
    """Parse ``kkp:<base>:<lifting>,<lifting>``."""
    parts = identifier.split(":")
    if len(parts) != 3 or parts[0] != "kkp":
        raise UnknownIdentifierError(f"Unknown functor: {identifier}", functor=identifier)
    names = tuple(name for name in parts[2].split(",") if name)
    return kkp_functor(parts[1], names)


def kkp_space(functor: KKPFunctor, space: FinSpace) -> FinSpace:
    return functor.on_space(space)


def kkp_map(functor: KKPFunctor, f: ContMap) -> ContMap:
    return functor.on_map(f)


def lift_lifting(functor: KKPFunctor, lifting_id: str) -> OpenLifting:
    return builtin_lifting(functor, lifting_id)


# --- reports -------------------------------------------------------------------


@dataclass
class LiftReport:
    characteristic: bool
    scott: Dict[str, Optional[bool]]
    t0: bool
    points: int
    frame_elements: int

    def as_dict(self) -> dict:
        return {
            "characteristic": self.characteristic,
            "scott": self.scott,
            "t0": self.t0,
            "points": self.points,
            "frame_elements": self.frame_elements,
        }

    @property
    def confirmed(self) -> bool:
        return self.characteristic and self.t0 and all(v is not False for v in self.scott.values())


def check_lift_theorems(functor: KKPFunctor, space: FinSpace) -> LiftReport:
    """
    Characteristic lifted liftings, Scott-continuity of lifted monotone
    liftings, and T0 output, at one space.
    """
    lifted = functor.lifted_liftings()
    carrier = functor.carrier(space)
    scott: Dict[str, Optional[bool]] = {}
    for lifting in functor.liftings:
        monotone = all(lifting.is_monotone_in(space, i) for i in range(lifting.arity))
        scott[lifting.id] = check_scott(lifted[lifting.id], [space]) if monotone else None
    report = LiftReport(
        characteristic=check_characteristic(list(lifted.values()), space, functor),
        scott=scott,
        t0=carrier.space.is_t0,
        points=carrier.size,
        frame_elements=functor.frame(space).size,
    )
    logger.info(f"Lift checks for {functor.name} on {space.size} points: {report.as_dict()}")
    return report


AGREEMENT_TARGETS = {"powerset": "vietoris", "monotone": "dkh"}


@dataclass
class AgreementReport:
    """
    Comparison of the lifted space with the builtin functor.

    ``verdict`` is None for non-discrete spaces, which have no reference result.
    """

    target: str
    homeomorphism: Optional[ContMap]
    canonical: bool
    verdict: Optional[bool]

    def as_dict(self) -> dict:
        return {
            "target": self.target,
            "homeomorphic": self.homeomorphism is not None,
            "canonical": self.canonical,
            "verdict": self.verdict,
            "map": self.homeomorphism.as_names() if self.homeomorphism else None,
        }


def _matching_cells(
    functor: KKPFunctor, target: TopFunctor, space: FinSpace
) -> Tuple[List[Mask], List[Mask]]:
    lifted = functor.lifted_liftings()
    left, right = [], []
    for name in ("box", "dia"):
        if name not in lifted:
            continue
        reference = builtin_lifting(target, name)
        for args in open_tuples(space, 1):
            left.append(lifted[name](space, args))
            right.append(reference(space, args))
    return left, right


def agreement_map(functor: KKPFunctor, space: FinSpace) -> AgreementReport:
    """
    Homeomorphism from the lifted space onto V_kh X (powerset base) or
    D_kh X (monotone base).

    The box ↔ ⊡ and dia ↔ ◇ cell correspondence is tried first, then a
    general homeomorphism search.
    """
    if functor.base.name not in AGREEMENT_TARGETS:
        raise InvalidInputError(f"No builtin counterpart for base {functor.base.name}")
    target = get_functor(AGREEMENT_TARGETS[functor.base.name])
    lifted_space = functor.on_space(space)
    target_space = target.on_space(space)
    left, right = _matching_cells(functor, target, space)
    found = match_by_profiles(lifted_space, left, target_space, right)
    canonical = found is not None
    if found is None:
        found = find_homeomorphism(lifted_space, target_space)
    verdict = (found is not None) if space.is_discrete else None
    return AgreementReport(target.name, found, canonical, verdict)


def check_agreement_naturality(functor: KKPFunctor, f: ContMap) -> bool:
    """h_Y ∘ T̂f = Tf ∘ h_X for the agreement maps h."""
    left = agreement_map(functor, f.source).homeomorphism
    right = agreement_map(functor, f.target).homeomorphism
    if left is None or right is None:
        return False
    target = get_functor(AGREEMENT_TARGETS[functor.base.name])
    lifted = functor.on_map(f)
    builtin = target.on_map(f)
    return lifted.then(right).assignment == left.then(builtin).assignment
