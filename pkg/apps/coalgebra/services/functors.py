"""
Endofunctors on finite sets and finite spaces, coalgebras and models.

Carrier elements use integer encodings:

- ``vietoris`` / ``kripke``: a subset of the points, as a bitmask.
- ``dkh`` / ``monotone``: a collection of subsets, as a bitmask whose bit ``u``
  is set when the subset with bitmask ``u`` belongs to the collection.
- ``trivial``: 0 or 1.

``vietoris`` and ``dkh`` are the compact Hausdorff functors; their map action
is defined on continuous closed maps. ``kripke`` and ``monotone`` carry the
same cells on all subsets / all up-closed collections and act on every
continuous map.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from apps.core.cache import get_or_build
from apps.core.conf import enforce
from apps.core.exceptions import (
    InvalidInputError,
    InvariantViolation,
    UnknownIdentifierError,
)
from apps.topology.services.finspace import (
    ContMap,
    FinSpace,
    Mask,
    bits,
    disjoint_sum,
    indiscrete_space,
    mask_from_indices,
    space_from_subbase_masks,
    subset_label,
)
from apps.topology.services.framealg import boolean_upsets

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Carrier:
    """
    The value of a functor at a space.

    Attributes:
        base: The argument space
        elements: Encoded carrier elements in canonical order
        space: The carrier as a space; its point ``k`` is ``elements[k]``
    """

    base: FinSpace
    elements: Tuple[Hashable, ...]
    space: FinSpace

    @cached_property
    def index(self) -> Dict[Hashable, int]:
        return {element: k for k, element in enumerate(self.elements)}

    @property
    def size(self) -> int:
        return len(self.elements)

    def position(self, element: Hashable) -> int:
        try:
            return self.index[element]
        except KeyError:
            raise InvalidInputError("Element is not in the functor carrier") from None

    def select(self, predicate) -> Mask:
        """Bitmask of carrier positions whose element satisfies ``predicate``."""
        return mask_from_indices(k for k, element in enumerate(self.elements) if predicate(element))


def collection_label(space: FinSpace, collection: int) -> str:
    return "{" + ",".join(space.label(u) for u in bits(collection)) + "}"


def collection_image(f: ContMap, collection: int) -> int:
    """{b ⊆ target | f⁻¹(b) ∈ W}."""
    return mask_from_indices(
        b for b in range(1 << f.target.size) if collection >> f.preimage(b) & 1
    )


class TopFunctor(ABC):
    """An endofunctor on finite spaces with a concrete carrier."""

    name = ""
    closed_maps_only = False

    def carrier(self, space: FinSpace) -> Carrier:
        return get_or_build(f"carrier:{self.name}", space.key, lambda: self.build_carrier(space))

    def on_space(self, space: FinSpace) -> FinSpace:
        return self.carrier(space).space

    @abstractmethod
    def build_carrier(self, space: FinSpace) -> Carrier:
        """Enumerate the carrier and topologise it."""

    @abstractmethod
    def element_map(self, f: ContMap, element: Hashable) -> Hashable:
        """Action of ``T f`` on one encoded element."""

    @abstractmethod
    def label(self, space: FinSpace, element: Hashable) -> str:
        """Display name of a carrier element."""

    @abstractmethod
    def encode(self, space: FinSpace, element: Hashable) -> Any:
        """JSON value for a carrier element."""

    @abstractmethod
    def decode(self, space: FinSpace, document: Any, path: str = "") -> Hashable:
        """Parse and validate a carrier element."""

    def accepts(self, f: ContMap) -> bool:
        if not f.is_continuous():
            return False
        return f.is_closed_map() if self.closed_maps_only else True

    def on_map(self, f: ContMap) -> ContMap:
        """
        The continuous map ``T f``.

        Raises:
            InvalidInputError: If ``f`` is outside the functor's map domain
            InvariantViolation: If an image leaves the target carrier or the
                result is not continuous
        """
        if not f.is_continuous():
            raise InvalidInputError(f"{self.name} is only defined on continuous maps")
        if self.closed_maps_only and not f.is_closed_map():
            raise InvalidInputError(f"{self.name} acts on continuous closed maps only")
        source = self.carrier(f.source)
        target = self.carrier(f.target)
        assignment = []
        for element in source.elements:
            image = self.element_map(f, element)
            if image not in target.index:
                raise InvariantViolation(
                    f"{self.name} sends {self.label(f.source, element)} outside the carrier",
                    image=self.label(f.target, image),
                )
            assignment.append(target.index[image])
        mapped = ContMap(source.space, target.space, tuple(assignment))
        if not mapped.is_continuous():
            raise InvariantViolation(f"{self.name} of a continuous map is not continuous")
        return mapped

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class _SubsetFunctor(TopFunctor):
    """Subsets of the points, topologised by the cells ⊡a and ◇a over opens a."""

    def candidates(self, space: FinSpace) -> List[Mask]:
        raise NotImplementedError

    def build_carrier(self, space: FinSpace) -> Carrier:
        elements = tuple(self.candidates(space))
        cells = []
        for a in space.opens:
            cells.append(mask_from_indices(k for k, b in enumerate(elements) if b & ~a == 0))
            cells.append(mask_from_indices(k for k, b in enumerate(elements) if b & a))
        names = [space.label(b) for b in elements]
        return Carrier(space, elements, space_from_subbase_masks(names, cells))

    def element_map(self, f: ContMap, element: Mask) -> Mask:
        return f.image(element)

    def label(self, space: FinSpace, element: Mask) -> str:
        return space.label(element)

    def encode(self, space: FinSpace, element: Mask) -> List[str]:
        return space.names_of(element)

    def decode(self, space: FinSpace, document: Any, path: str = "") -> Mask:
        if not isinstance(document, list):
            raise InvalidInputError("Expected a list of point names", path=path)
        return _names_mask(space, document, path)


class VietorisFunctor(_SubsetFunctor):
    """V_kh: closed subsets."""

    name = "vietoris"
    closed_maps_only = True

    def candidates(self, space: FinSpace) -> List[Mask]:
        return list(space.closed_sets)


class KripkeFunctor(_SubsetFunctor):
    """All subsets, with the Vietoris cells."""

    name = "kripke"

    def candidates(self, space: FinSpace) -> List[Mask]:
        return list(range(1 << space.size))


class _CollectionFunctor(TopFunctor):
    """Collections of subsets, topologised by ⊡̄a = {W | a ∈ W} and ⟋a = {W | X∖a ∉ W}."""

    def candidates(self, space: FinSpace) -> List[int]:
        raise NotImplementedError

    def build_carrier(self, space: FinSpace) -> Carrier:
        enforce("DKH_MAX_POINTS", space.size, f"Points for the {self.name} carrier")
        elements = tuple(self.candidates(space))
        cells = []
        for a in space.opens:
            complement = space.full & ~a
            cells.append(mask_from_indices(k for k, w in enumerate(elements) if w >> a & 1))
            cells.append(
                mask_from_indices(k for k, w in enumerate(elements) if not w >> complement & 1)
            )
        names = [collection_label(space, w) for w in elements]
        logger.debug(f"{self.name} carrier on {space.size} points has {len(elements)} elements")
        return Carrier(space, elements, space_from_subbase_masks(names, cells))

    def element_map(self, f: ContMap, element: int) -> int:
        return collection_image(f, element)

    def label(self, space: FinSpace, element: int) -> str:
        return collection_label(space, element)

    def encode(self, space: FinSpace, element: int) -> List[List[str]]:
        return [space.names_of(u) for u in bits(element)]

    def decode(self, space: FinSpace, document: Any, path: str = "") -> int:
        if not isinstance(document, list):
            raise InvalidInputError("Expected a list of subsets", path=path)
        collection = 0
        for i, member in enumerate(document):
            if not isinstance(member, list):
                raise InvalidInputError("Expected a list of point names", path=f"{path}[{i}]")
            collection |= 1 << _names_mask(space, member, f"{path}[{i}]")
        return collection


class DkhFunctor(_CollectionFunctor):
    """
    D_kh: collections W with u ∈ W iff some closed c ⊆ u has every open
    superset in W.
    """

    name = "dkh"
    closed_maps_only = True

    def candidates(self, space: FinSpace) -> List[int]:
        subsets = range(1 << space.size)
        cores = []
        for c in space.closed_sets:
            open_supersets = mask_from_indices(a for a in space.opens if c & ~a == 0)
            supersets = mask_from_indices(u for u in subsets if c & ~u == 0)
            cores.append((open_supersets, supersets))
        found = []
        # members of D_kh are up-closed, so only up-sets need the full test
        for w in boolean_upsets(space.size):
            derived = 0
            for open_supersets, supersets in cores:
                if open_supersets & ~w == 0:
                    derived |= supersets
            if derived == w:
                found.append(w)
        return found


class MonotoneFunctor(_CollectionFunctor):
    """All up-closed collections, with the D_kh cells."""

    name = "monotone"

    def candidates(self, space: FinSpace) -> List[int]:
        return boolean_upsets(space.size)


class TrivialFunctor(TopFunctor):
    """The constant functor at the two-point trivial space."""

    name = "trivial"

    def build_carrier(self, space: FinSpace) -> Carrier:
        return Carrier(space, (0, 1), indiscrete_space(["0", "1"]))

    def element_map(self, f: ContMap, element: int) -> int:
        return element

    def label(self, space: FinSpace, element: int) -> str:
        return str(element)

    def encode(self, space: FinSpace, element: int) -> int:
        return element

    def decode(self, space: FinSpace, document: Any, path: str = "") -> int:
        if document in (0, 1, "0", "1") and not isinstance(document, bool):
            return int(document)
        raise InvalidInputError("Trivial functor elements are 0 or 1", path=path)


def _names_mask(space: FinSpace, names: Sequence[Any], path: str) -> Mask:
    mask = 0
    for i, name in enumerate(names):
        if not isinstance(name, str) or name not in space.index:
            raise InvalidInputError(f"Unknown point: {name}", path=f"{path}[{i}]")
        mask |= 1 << space.index[name]
    return mask


FUNCTORS: Dict[str, TopFunctor] = {
    functor.name: functor
    for functor in (
        VietorisFunctor(),
        DkhFunctor(),
        TrivialFunctor(),
        KripkeFunctor(),
        MonotoneFunctor(),
    )
}


def get_functor(name: str) -> TopFunctor:
    """
    Look up a functor by identifier.

    ``kkp:<base>:<lifting>,<lifting>`` builds the lifted functor.

    Raises:
        UnknownIdentifierError: For unknown identifiers
    """
    if name in FUNCTORS:
        return FUNCTORS[name]
    if name.startswith("kkp:"):
        from apps.coalgebra.services.kkplift import kkp_functor_from_id

        return kkp_functor_from_id(name)
    raise UnknownIdentifierError(f"Unknown functor: {name}", functor=name)


def vietoris_functor() -> TopFunctor:
    return FUNCTORS["vietoris"]


def dkh_functor() -> TopFunctor:
    return FUNCTORS["dkh"]


def trivial_functor() -> TopFunctor:
    return FUNCTORS["trivial"]


def is_finite_kh(space: FinSpace) -> bool:
    """Finite compact Hausdorff spaces are exactly the discrete ones."""
    return space.is_discrete


# --- functors on finite sets --------------------------------------------------


@dataclass(frozen=True)
class SetFunctor:
    """
    Powerset or monotone-neighbourhood functor on finite sets.

    A finite set is a tuple of names; elements use the encodings of the
    ``kripke`` and ``monotone`` carriers.
    """

    name: str

    def on_set(self, size: int) -> List[int]:
        if self.name == "powerset":
            return list(range(1 << size))
        enforce("DKH_MAX_POINTS", size, "Set size for the monotone functor")
        return boolean_upsets(size)

    def on_fun(self, f: ContMap, element: int) -> int:
        if self.name == "powerset":
            return f.image(element)
        return collection_image(f, element)

    def label(self, names: FinSpace, element: int) -> str:
        if self.name == "powerset":
            return names.label(element)
        return collection_label(names, element)

    @property
    def top_functor(self) -> TopFunctor:
        """The functor on finite spaces that carries the same elements."""
        return FUNCTORS["kripke" if self.name == "powerset" else "monotone"]


SET_FUNCTORS = ("powerset", "monotone")


def set_functor(name: str) -> SetFunctor:
    if name not in SET_FUNCTORS:
        raise UnknownIdentifierError(f"Unknown set functor: {name}", functor=name)
    return SetFunctor(name)


# --- coalgebras and models ------------------------------------------------------


@dataclass(frozen=True)
class Coalgebra:
    """
    A finite topological coalgebra.

    Attributes:
        space: The state space
        functor: The functor
        gamma: For each point, its encoded successor element
    """

    space: FinSpace
    functor: TopFunctor
    gamma: Tuple[Hashable, ...]

    def __post_init__(self):
        if len(self.gamma) != self.space.size:
            raise InvalidInputError("Transition map is not total on the state space")
        carrier = self.functor.carrier(self.space)
        for i, element in enumerate(self.gamma):
            if element not in carrier.index:
                raise InvalidInputError(
                    f"Transition of {self.space.points[i]} is not in the {self.functor.name} carrier",
                    path=f"gamma.{self.space.points[i]}",
                    element=self.functor.encode(self.space, element),
                )
        if not self.transition_map.is_continuous():
            raise InvalidInputError("Transition map is not continuous", path="gamma")

    @property
    def carrier(self) -> Carrier:
        return self.functor.carrier(self.space)

    @property
    def transition_map(self) -> ContMap:
        carrier = self.carrier
        return ContMap(self.space, carrier.space, tuple(carrier.index[e] for e in self.gamma))

    def successor_preimage(self, carrier_mask: Mask) -> Mask:
        """γ⁻¹ of a set of carrier positions."""
        return self.transition_map.preimage(carrier_mask)


@dataclass(frozen=True)
class GeomModel:
    """
    A coalgebra with an open-valued valuation.

    Attributes:
        coalgebra: The underlying coalgebra
        valuation: Proposition letter to open bitmask
    """

    coalgebra: Coalgebra
    valuation: Dict[str, Mask] = field(default_factory=dict)

    def __post_init__(self):
        for letter, mask in self.valuation.items():
            if not self.space.is_open(mask):
                raise InvalidInputError(
                    f"Valuation of {letter} is not open",
                    path=f"valuation.{letter}",
                    letter=letter,
                )

    @property
    def space(self) -> FinSpace:
        return self.coalgebra.space

    @property
    def functor(self) -> TopFunctor:
        return self.coalgebra.functor

    @property
    def letters(self) -> List[str]:
        return sorted(self.valuation)

    def to_document(self) -> dict:
        space = self.space
        return {
            "space": space.to_document(),
            "functor": self.functor.name,
            "gamma": {
                name: self.functor.encode(space, self.coalgebra.gamma[i])
                for i, name in enumerate(space.points)
            },
            "valuation": {letter: space.names_of(self.valuation[letter]) for letter in self.letters},
        }


def make_model(
    space: FinSpace,
    functor: TopFunctor,
    gamma: Iterable[Hashable],
    valuation: Optional[Dict[str, Mask]] = None,
) -> GeomModel:
    return GeomModel(Coalgebra(space, functor, tuple(gamma)), dict(valuation or {}))


def is_coalg_morphism(f: ContMap, left: Coalgebra, right: Coalgebra) -> bool:
    """
    Decide whether ``f`` makes the coalgebra square commute.

    Raises:
        InvalidInputError: If the functors differ or ``f`` does not connect the spaces
    """
    if left.functor.name != right.functor.name:
        raise InvalidInputError(
            f"Functor mismatch: {left.functor.name} versus {right.functor.name}"
        )
    if f.source != left.space or f.target != right.space:
        raise InvalidInputError("Map does not connect the coalgebra state spaces")
    if not f.is_continuous():
        return False
    functor = left.functor
    return all(
        functor.element_map(f, left.gamma[i]) == right.gamma[f(i)] for i in range(left.space.size)
    )


def is_model_morphism(f: ContMap, left: GeomModel, right: GeomModel) -> bool:
    """Coalgebra morphism with f⁻¹ ∘ V′ = V."""
    if set(left.valuation) != set(right.valuation):
        return False
    if not is_coalg_morphism(f, left.coalgebra, right.coalgebra):
        return False
    return all(
        f.preimage(right.valuation[letter]) == left.valuation[letter] for letter in left.valuation
    )


def check_same_letters(models: Sequence[GeomModel]) -> List[str]:
    letters = set(models[0].valuation) if models else set()
    for k, model in enumerate(models[1:], start=1):
        if set(model.valuation) != letters:
            raise InvalidInputError(
                "Models use different proposition letters",
                path=f"models[{k}].valuation",
            )
    return sorted(letters)


@dataclass(frozen=True)
class DisjointUnion:
    """A combined model with one injection per summand."""

    model: GeomModel
    injections: Tuple[ContMap, ...]


def disjoint_union(models: Sequence[GeomModel], tags: Optional[Sequence[str]] = None) -> DisjointUnion:
    """
    Coproduct of models; point ``x`` of summand ``k`` becomes ``<tag_k>.x``.

    Raises:
        InvalidInputError: On functor or letter mismatch
    """
    if not models:
        raise InvalidInputError("Disjoint union of no models")
    functor = models[0].functor
    for model in models[1:]:
        if model.functor.name != functor.name:
            raise InvalidInputError(
                f"Functor mismatch: {functor.name} versus {model.functor.name}"
            )
    letters = check_same_letters(models)
    tags = list(tags) if tags is not None else [f"m{k}" for k in range(len(models))]
    space, injections = disjoint_sum([model.space for model in models], tags)
    gamma: List[Hashable] = []
    for model, injection in zip(models, injections):
        gamma.extend(functor.element_map(injection, element) for element in model.coalgebra.gamma)
    valuation = {
        letter: _union(
            injection.image(model.valuation[letter]) for model, injection in zip(models, injections)
        )
        for letter in letters
    }
    combined = GeomModel(Coalgebra(space, functor, tuple(gamma)), valuation)
    return DisjointUnion(combined, tuple(injections))


def _union(masks: Iterable[Mask]) -> Mask:
    result = 0
    for mask in masks:
        result |= mask
    return result
