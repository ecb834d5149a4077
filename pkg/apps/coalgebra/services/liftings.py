"""
Open predicate liftings and their property checks.

A lifting is a semantic function: given a space and a tuple of its opens it
returns a bitmask of carrier positions of the functor at that space. Equality
of liftings is extensional over a finite universe of spaces.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from apps.core.conf import limit
from apps.core.exceptions import InvalidInputError, InvariantViolation, UnknownIdentifierError
from apps.coalgebra.services.functors import TopFunctor, get_functor
from apps.topology.services.enumeration import discrete_spaces_up_to, spaces_up_to
from apps.topology.services.finspace import (
    ContMap,
    FinSpace,
    Mask,
    discrete_space,
    mask_from_indices,
    point_space,
    product_space,
    sierpinski_space,
    space_from_subbase_masks,
)

logger = logging.getLogger(__name__)

Evaluator = Callable[[FinSpace, Tuple[Mask, ...]], Mask]
Predicate = Callable[[FinSpace, Hashable, Tuple[Mask, ...]], bool]

MAX_CODE_ARITY = 2

# 𝟚 as the carrier of Sierpinski codes: every subset of 2ⁿ is a coordinate set.
CODE_TWO_SPACE = discrete_space(["0", "1"])


@dataclass(frozen=True, eq=False)
class OpenLifting:
    """
    An open predicate lifting for a functor on finite spaces.

    Attributes:
        id: Identifier used in formulas (``box``, ``dia``, ``triv`` ...)
        functor: The functor lifted to
        arity: Number of arguments
        evaluate: Semantic function returning carrier positions
        predicate: Optional set-level membership test, also defined on
            non-open arguments
    """

    id: str
    functor: TopFunctor
    arity: int
    evaluate: Evaluator = field(repr=False)
    predicate: Optional[Predicate] = field(default=None, repr=False)

    def __call__(self, space: FinSpace, args: Sequence[Mask]) -> Mask:
        args = tuple(args)
        if len(args) != self.arity:
            raise InvalidInputError(
                f"Lifting {self.id} takes {self.arity} arguments, got {len(args)}"
            )
        for a in args:
            if not space.is_open(a):
                raise InvalidInputError(f"Argument {space.label(a)} of {self.id} is not open")
        result = self.evaluate(space, args)
        if not self.functor.on_space(space).is_open(result):
            raise InvariantViolation(
                f"Lifting {self.id} returned a non-open set of {self.functor.name} carrier"
            )
        return result


def predicate_lifting(
    lifting_id: str, functor: TopFunctor, arity: int, predicate: Predicate
) -> OpenLifting:
    """Lifting whose value is the set of carrier elements satisfying ``predicate``."""

    def evaluate(space: FinSpace, args: Tuple[Mask, ...]) -> Mask:
        return functor.carrier(space).select(lambda element: predicate(space, element, args))

    return OpenLifting(lifting_id, functor, arity, evaluate, predicate)


def open_tuples(space: FinSpace, arity: int) -> Iterable[Tuple[Mask, ...]]:
    return product(space.opens, repeat=arity)


# --- builtin liftings ---------------------------------------------------------


def _subset_box(space, b, args):
    return b & ~args[0] == 0


def _subset_dia(space, b, args):
    return b & args[0] != 0


def _collection_box(space, w, args):
    return bool(w >> args[0] & 1)


def _collection_dia(space, w, args):
    return not w >> (space.full & ~args[0]) & 1


def _constant_top(space, element, args):
    return True


BUILTIN_PREDICATES: Dict[str, Dict[str, Predicate]] = {
    "vietoris": {"box": _subset_box, "dia": _subset_dia},
    "kripke": {"box": _subset_box, "dia": _subset_dia},
    "dkh": {"box": _collection_box, "dia": _collection_dia},
    "monotone": {"box": _collection_box, "dia": _collection_dia},
    "trivial": {"triv": _constant_top},
}


@lru_cache(maxsize=None)
def _builtin(functor_name: str, lifting_id: str) -> OpenLifting:
    predicate = BUILTIN_PREDICATES[functor_name][lifting_id]
    return predicate_lifting(lifting_id, get_functor(functor_name), 1, predicate)


def _resolve(functor) -> TopFunctor:
    return get_functor(functor) if isinstance(functor, str) else functor


def liftings_for(functor) -> Dict[str, OpenLifting]:
    """All registered liftings of a functor, by identifier."""
    from apps.coalgebra.services.kkplift import KKPFunctor

    functor = _resolve(functor)
    if isinstance(functor, KKPFunctor):
        return functor.lifted_liftings()
    if functor.name not in BUILTIN_PREDICATES:
        return {}
    return {name: _builtin(functor.name, name) for name in BUILTIN_PREDICATES[functor.name]}


def builtin_lifting(functor, name: str) -> OpenLifting:
    """
    Look up a registered lifting.

    Raises:
        UnknownIdentifierError: If the functor has no lifting called ``name``
    """
    functor = _resolve(functor)
    registered = liftings_for(functor)
    if name not in registered:
        raise UnknownIdentifierError(
            f"Unknown lifting {name} for functor {functor.name}",
            functor=functor.name,
            lifting=name,
        )
    return registered[name]


# --- property checks ------------------------------------------------------------


def default_universe(max_points: int = 2) -> List[FinSpace]:
    return list(spaces_up_to(max_points))


def check_naturality(lifting: OpenLifting, f: ContMap) -> bool:
    """λ_X(f⁻¹a′) = (Tf)⁻¹(λ_X′(a′)) for every open tuple a′ of the target."""
    mapped = lifting.functor.on_map(f)
    for target_args in open_tuples(f.target, lifting.arity):
        source_args = tuple(f.preimage(a) for a in target_args)
        if lifting(f.source, source_args) != mapped.preimage(lifting(f.target, target_args)):
            logger.debug(f"Naturality of {lifting.id} fails at {target_args}")
            return False
    return True


def check_monotone(lifting: OpenLifting, universe: Optional[Sequence[FinSpace]] = None) -> bool:
    """Argumentwise ⊆-monotonicity over all open tuples."""
    for space in universe if universe is not None else default_universe():
        for args in open_tuples(space, lifting.arity):
            value = lifting(space, args)
            for i in range(lifting.arity):
                for larger in space.opens:
                    if larger == args[i] or args[i] & ~larger:
                        continue
                    bigger = args[:i] + (larger,) + args[i + 1 :]
                    if value & ~lifting(space, bigger):
                        return False
    return True


def directed_families(space: FinSpace, max_size: Optional[int] = None) -> List[Tuple[Mask, ...]]:
    """Nonempty directed families of opens of size up to ``max_size``, plus all opens."""
    size = limit("SCOTT_FAMILY_SIZE", max_size)
    opens = space.opens
    found = []
    for k in range(1, min(size, len(opens)) + 1):
        for family in combinations(opens, k):
            if all(any((a | b) & ~c == 0 for c in family) for a in family for b in family):
                found.append(family)
    if opens not in found:
        found.append(opens)
    return found


def check_scott(lifting: OpenLifting, universe: Optional[Sequence[FinSpace]] = None) -> bool:
    """λ(…,⋃B,…) = ⋃ λ(…,b,…) for directed families of opens B in each argument."""
    for space in universe if universe is not None else default_universe():
        families = directed_families(space)
        for args in open_tuples(space, lifting.arity):
            for i in range(lifting.arity):
                for family in families:
                    union = 0
                    for b in family:
                        union |= b
                    images = 0
                    for b in family:
                        images |= lifting(space, args[:i] + (b,) + args[i + 1 :])
                    if lifting(space, args[:i] + (union,) + args[i + 1 :]) != images:
                        return False
    return True


def lifting_images(liftings: Sequence[OpenLifting], space: FinSpace) -> List[Mask]:
    return [
        lifting(space, args) for lifting in liftings for args in open_tuples(space, lifting.arity)
    ]


def check_characteristic(
    liftings: Sequence[OpenLifting], space: FinSpace, functor: Optional[TopFunctor] = None
) -> bool:
    """Whether the lifting images form a subbase for the carrier topology."""
    if functor is None:
        if not liftings:
            raise InvalidInputError("An empty lifting set needs an explicit functor")
        functor = liftings[0].functor
    for lifting in liftings:
        if lifting.functor is not functor and lifting.functor.name != functor.name:
            raise InvalidInputError(f"Lifting {lifting.id} belongs to {lifting.functor.name}")
    carrier = functor.carrier(space)
    generated = space_from_subbase_masks(carrier.space.points, lifting_images(liftings, space))
    return generated.nbhd == carrier.space.nbhd


@dataclass(frozen=True)
class LiftingFlags:
    monotone: bool
    scott: bool
    strong: Optional[bool]

    def as_dict(self) -> dict:
        return {"monotone": self.monotone, "scott": self.scott, "strong": self.strong}


@lru_cache(maxsize=None)
def lifting_flags(lifting: OpenLifting) -> LiftingFlags:
    """Monotone / Scott / strong flags over the default universe, computed once."""
    monotone = check_monotone(lifting)
    scott = check_scott(lifting)
    strong = None
    if monotone and lifting.arity <= MAX_CODE_ARITY:
        strong = check_strong_openness(lifting.functor, lifting.arity, strong_code(lifting))
    return LiftingFlags(monotone, scott, strong)


# --- Sierpinski codes -------------------------------------------------------------


@dataclass(frozen=True)
class SierpinskiCode:
    """
    A subset of the carrier of T(Sⁿ), or of T(𝟚ⁿ) when ``base`` is ``two``.

    Attributes:
        functor: The functor
        arity: n
        code: Bitmask of carrier positions
        base: ``sierpinski`` or ``two``
    """

    functor: TopFunctor
    arity: int
    code: Mask
    base: str = "sierpinski"

    @property
    def space(self) -> FinSpace:
        return power_space(self.base, self.arity)

    def elements(self) -> List[Hashable]:
        carrier = self.functor.carrier(self.space)
        return [carrier.elements[k] for k in range(carrier.size) if self.code >> k & 1]

    def to_document(self) -> dict:
        space = self.space
        return {
            "functor": self.functor.name,
            "arity": self.arity,
            "base": self.base,
            "code": [self.functor.encode(space, e) for e in self.elements()],
        }


def _check_arity(arity: int) -> None:
    if not 0 <= arity <= MAX_CODE_ARITY:
        raise InvalidInputError(f"Codes are supported up to arity {MAX_CODE_ARITY}, got {arity}")


def power_space(base: str, arity: int) -> FinSpace:
    """
    Sⁿ or 𝟚ⁿ with the product topology; the 0-th power is a point.

    Code spaces take 𝟚 discrete, not with the trivial topology of the
    constant functor: T(𝟚ⁿ) must be the set-level T(2ⁿ), and over the
    trivial 𝟚 the Vietoris carrier shrinks to {∅, 𝟚} while V(s) for
    s : S → 𝟚 is undefined because s is not a closed map.
    """
    _check_arity(arity)
    if base == "sierpinski":
        factor = sierpinski_space()
    elif base == "two":
        factor = CODE_TWO_SPACE
    else:
        raise InvalidInputError(f"Unknown code base: {base}")
    if arity == 0:
        return point_space("()")
    if arity == 1:
        return factor
    return product_space([factor] * arity)


def coordinate_opens(arity: int) -> Tuple[Mask, ...]:
    """πᵢ⁻¹({1}) in the product ordering of Sⁿ and 𝟚ⁿ."""
    tuples = list(product(range(2), repeat=arity))
    return tuple(
        mask_from_indices(k for k, t in enumerate(tuples) if t[i] == 1) for i in range(arity)
    )


def characteristic_map(space: FinSpace, args: Sequence[Mask]) -> ContMap:
    """⟨χ_{a₁},…,χ_{aₙ}⟩ : X → Sⁿ."""
    target = power_space("sierpinski", len(args))
    assignment = []
    for x in range(space.size):
        position = 0
        for a in args:
            position = position * 2 + (a >> x & 1)
        assignment.append(position)
    return ContMap(space, target, tuple(assignment))


def sierpinski_code(lifting: OpenLifting) -> SierpinskiCode:
    """λ_{Sⁿ}(π₁⁻¹({1}), …, πₙ⁻¹({1}))."""
    space = power_space("sierpinski", lifting.arity)
    code = lifting(space, coordinate_opens(lifting.arity))
    return SierpinskiCode(lifting.functor, lifting.arity, code)


def code_from_elements(
    functor, arity: int, elements: Sequence, base: str = "sierpinski", path: str = "code"
) -> SierpinskiCode:
    """Decode a code document's element list."""
    functor = _resolve(functor)
    space = power_space(base, arity)
    carrier = functor.carrier(space)
    code = 0
    for i, document in enumerate(elements):
        element = functor.decode(space, document, f"{path}[{i}]")
        if element not in carrier.index:
            raise InvalidInputError("Code element is not in the carrier", path=f"{path}[{i}]")
        code |= 1 << carrier.index[element]
    return SierpinskiCode(functor, arity, code, base)


def lifting_from_code(code: SierpinskiCode, lifting_id: Optional[str] = None) -> OpenLifting:
    """
    λᶜ_X(a⃗) = (T⟨χ_{a₁},…⟩)⁻¹(c).

    Elements whose image leaves the carrier of T(Sⁿ) are not members.

    Raises:
        InvalidInputError: If the code is not open in T(Sⁿ)
    """
    if code.base != "sierpinski":
        raise InvalidInputError("Open liftings are built from codes over Sⁿ")
    functor = code.functor
    code_space = code.space
    target = functor.carrier(code_space)
    if not target.space.is_open(code.code):
        raise InvalidInputError("Code is not open in the carrier of T(Sⁿ)", path="code")

    def evaluate(space: FinSpace, args: Tuple[Mask, ...]) -> Mask:
        chi = characteristic_map(space, args)
        carrier = functor.carrier(space)
        result = 0
        for k, element in enumerate(carrier.elements):
            position = target.index.get(functor.element_map(chi, element))
            if position is not None and code.code >> position & 1:
                result |= 1 << k
        return result

    return OpenLifting(lifting_id or f"code{code.code}", functor, code.arity, evaluate)


def liftings_agree(
    left: OpenLifting, right: OpenLifting, universe: Optional[Sequence[FinSpace]] = None
) -> bool:
    """Extensional equality over a universe of spaces."""
    if left.arity != right.arity:
        return False
    for space in universe if universe is not None else default_universe(3):
        for args in open_tuples(space, left.arity):
            if left(space, args) != right(space, args):
                return False
    return True


# --- strong extensions ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StrongLifting:
    """
    λ̃(b⃗) = ⋂{λ(a⃗) | aᵢ open, aᵢ ⊇ bᵢ}, defined on arbitrary subsets.
    """

    base: OpenLifting

    @property
    def id(self) -> str:
        return self.base.id

    @property
    def functor(self) -> TopFunctor:
        return self.base.functor

    @property
    def arity(self) -> int:
        return self.base.arity

    def __call__(self, space: FinSpace, args: Sequence[Mask]) -> Mask:
        args = tuple(args)
        if len(args) != self.arity:
            raise InvalidInputError(f"Lifting {self.id} takes {self.arity} arguments")
        supersets = [[a for a in space.opens if b & ~a == 0] for b in args]
        result = self.functor.carrier(space).select(lambda element: True)
        for choice in product(*supersets):
            result &= self.base(space, choice)
        return result

    def verify_restriction(self, space: FinSpace) -> None:
        for args in open_tuples(space, self.arity):
            if self(space, args) != self.base(space, args):
                raise InvariantViolation(
                    f"Strong extension of {self.id} differs from it on open arguments",
                    args=[space.label(a) for a in args],
                )

    def disagreements(self, space: FinSpace) -> List[Dict[str, object]]:
        """
        Non-open arguments where the intersection value differs from the
        lifting's own set-level formula.
        """
        predicate = self.base.predicate
        if predicate is None:
            return []
        carrier = self.functor.carrier(space)
        found = []
        for args in product(range(1 << space.size), repeat=self.arity):
            if all(space.is_open(b) for b in args):
                continue
            computed = self(space, args)
            direct = carrier.select(lambda element: predicate(space, element, args))
            if computed != direct:
                found.append(
                    {
                        "args": [space.label(b) for b in args],
                        "intersection": carrier.space.names_of(computed),
                        "direct": carrier.space.names_of(direct),
                    }
                )
        if found:
            logger.warning(
                f"Strong extension of {self.id} on {self.functor.name} disagrees with the "
                f"set-level formula at {len(found)} argument tuples"
            )
        return found


def strong_extension(
    lifting: OpenLifting, universe: Optional[Sequence[FinSpace]] = None
) -> StrongLifting:
    """
    Extend a monotone open lifting to arbitrary subsets.

    The restriction to opens is verified on ``universe`` (discrete spaces up
    to two points by default).

    Raises:
        InvalidInputError: If the lifting is not monotone
        InvariantViolation: If the restriction differs from the lifting
    """
    universe = list(universe) if universe is not None else list(discrete_spaces_up_to(2))
    if not check_monotone(lifting, universe):
        raise InvalidInputError(f"Lifting {lifting.id} is not monotone")
    extension = StrongLifting(lifting)
    for space in universe:
        extension.verify_restriction(space)
    return extension


def check_strong_naturality(extension: StrongLifting, f: ContMap) -> bool:
    """μ(f⁻¹b⃗) = (Tf)⁻¹μ(b⃗) over all subset tuples of the target."""
    functor = extension.functor
    if not functor.accepts(f):
        raise InvalidInputError(f"{functor.name} does not act on this map")
    source = functor.carrier(f.source)
    target = functor.carrier(f.target)
    for args in product(range(1 << f.target.size), repeat=extension.arity):
        value = extension(f.target, args)
        pulled = mask_from_indices(
            k
            for k, element in enumerate(source.elements)
            if value >> target.index[functor.element_map(f, element)] & 1
        )
        if extension(f.source, tuple(f.preimage(b) for b in args)) != pulled:
            return False
    return True


def strong_code(lifting) -> SierpinskiCode:
    """The value at the coordinate sets of 𝟚ⁿ, where every subset is open."""
    space = power_space("two", lifting.arity)
    return SierpinskiCode(lifting.functor, lifting.arity, lifting(space, coordinate_opens(lifting.arity)), "two")


def check_strong_openness(functor, arity: int, code) -> bool:
    """
    Whether (T sⁿ)⁻¹(c) is open in T(Sⁿ), for s : S → 𝟚 the identity.

    ``code`` is a SierpinskiCode over 𝟚ⁿ or a bitmask of T(𝟚ⁿ) positions.
    Into the discrete 𝟚ⁿ of codes s is only a function, so T s is applied
    element-wise and never through ``on_map``.
    """
    functor = _resolve(functor)
    mask = code.code if isinstance(code, SierpinskiCode) else code
    sierpinski = power_space("sierpinski", arity)
    two = power_space("two", arity)
    s = ContMap(sierpinski, two, tuple(range(sierpinski.size)))
    source = functor.carrier(sierpinski)
    target = functor.carrier(two)
    pulled = 0
    for k, element in enumerate(source.elements):
        position = target.index.get(functor.element_map(s, element))
        if position is not None and mask >> position & 1:
            pulled |= 1 << k
    return source.space.is_open(pulled)
