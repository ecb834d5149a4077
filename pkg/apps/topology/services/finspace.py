"""
Finite topological spaces, continuous maps and finite frames.

A finite topology is Alexandrov: every point has a smallest open
neighbourhood, and the opens are exactly the unions of those. FinSpace
stores the minimal neighbourhoods as bitmasks over the point order; the
full list of opens is derived from them on demand. Frames are finite
bounded distributive lattices stored as down-set bitmasks.

The module also contains the finite fragment of the pt/opn duality:
opn_frame, opn_map, frame_points and sobrify.
"""

import json
import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

from apps.core.conf import enforce, limit
from apps.core.exceptions import InvalidInputError, InvariantViolation

logger = logging.getLogger(__name__)

Mask = int


def bits(mask: Mask) -> Iterator[int]:
    """Yield the indices set in ``mask`` in ascending order."""
    index = 0
    while mask:
        if mask & 1:
            yield index
        mask >>= 1
        index += 1


def mask_from_indices(indices: Iterable[int]) -> Mask:
    mask = 0
    for index in indices:
        mask |= 1 << index
    return mask


def subset_label(names: Sequence[str]) -> str:
    """Canonical text for a finite set of names, e.g. ``{x,y}``."""
    return "{" + ",".join(names) + "}"


@dataclass(frozen=True)
class FinSpace:
    """
    A finite topological space.

    Attributes:
        points: Point identifiers in canonical order
        nbhd: For each point, the bitmask of its smallest open neighbourhood
    """

    points: Tuple[str, ...]
    nbhd: Tuple[Mask, ...]

    @cached_property
    def index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.points)}

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def full(self) -> Mask:
        return (1 << len(self.points)) - 1

    def is_open(self, mask: Mask) -> bool:
        return all(self.nbhd[i] & ~mask == 0 for i in bits(mask))

    def is_closed(self, mask: Mask) -> bool:
        return self.is_open(self.full & ~mask)

    def saturation(self, mask: Mask) -> Mask:
        """Smallest open set containing ``mask``."""
        result = 0
        for i in bits(mask):
            result |= self.nbhd[i]
        return result

    def interior(self, mask: Mask) -> Mask:
        return mask_from_indices(i for i in range(self.size) if self.nbhd[i] & ~mask == 0)

    def closure(self, mask: Mask) -> Mask:
        return mask_from_indices(i for i in range(self.size) if self.nbhd[i] & mask)

    def below(self, i: int, j: int) -> bool:
        """Specialization order: ``i`` lies in the closure of ``j``."""
        return bool(self.nbhd[i] >> j & 1)

    @cached_property
    def opens(self) -> Tuple[Mask, ...]:
        found = {0}
        frontier = [0]
        while frontier:
            current = frontier.pop()
            for basic in self.nbhd:
                candidate = current | basic
                if candidate not in found:
                    found.add(candidate)
                    frontier.append(candidate)
        return tuple(sorted(found))

    @cached_property
    def closed_sets(self) -> Tuple[Mask, ...]:
        return tuple(sorted(self.full & ~open_set for open_set in self.opens))

    @property
    def is_t0(self) -> bool:
        return len(set(self.nbhd)) == self.size

    @property
    def is_discrete(self) -> bool:
        return all(basic == 1 << i for i, basic in enumerate(self.nbhd))

    def mask_of(self, names: Iterable[str]) -> Mask:
        mask = 0
        for name in names:
            if name not in self.index:
                raise InvalidInputError(f"Unknown point: {name}", point=name)
            mask |= 1 << self.index[name]
        return mask

    def names_of(self, mask: Mask) -> List[str]:
        return [self.points[i] for i in bits(mask)]

    def label(self, mask: Mask) -> str:
        return subset_label(self.names_of(mask))

    def to_document(self) -> Dict[str, list]:
        return {
            "points": list(self.points),
            "opens": [self.names_of(open_set) for open_set in self.opens],
        }

    @cached_property
    def key(self) -> str:
        """Canonical serialization, used as a cache key."""
        return json.dumps([list(self.points), list(self.nbhd)], separators=(",", ":"))

    def __repr__(self) -> str:
        return f"FinSpace({list(self.points)}, nbhd={[self.label(m) for m in self.nbhd]})"


def _check_points(points: Sequence[str]) -> Tuple[str, ...]:
    seen = set()
    for name in points:
        if name in seen:
            raise InvalidInputError(f"Duplicate point identifier: {name}", point=name)
        seen.add(name)
    return tuple(points)


def space_from_subbase_masks(points: Sequence[str], subbase: Iterable[Mask]) -> FinSpace:
    """Space on ``points`` whose topology is generated by ``subbase``."""
    points = _check_points(points)
    full = (1 << len(points)) - 1
    nbhd = [full] * len(points)
    for member in subbase:
        if member & ~full:
            raise InvalidInputError("Subbase member mentions a non-point")
        for i in bits(member):
            nbhd[i] &= member
    return FinSpace(points, tuple(nbhd))


def make_space(points: Sequence[str], subbase: Iterable[Iterable[str]]) -> FinSpace:
    """
    Build a space from point identifiers and a subbase of named subsets.

    The opens are the closure of the subbase together with the empty set and
    the full point set under pairwise union and intersection.

    Raises:
        InvalidInputError: On duplicate identifiers or unknown subbase points
    """
    points = _check_points(points)
    index = {name: i for i, name in enumerate(points)}
    masks = []
    for member in subbase:
        mask = 0
        for name in member:
            if name not in index:
                raise InvalidInputError(f"Subbase member mentions unknown point: {name}", point=name)
            mask |= 1 << index[name]
        masks.append(mask)
    return space_from_subbase_masks(points, masks)


def space_from_opens(points: Sequence[str], opens: Iterable[Mask]) -> FinSpace:
    """
    Build a space from an explicit family of opens, validating frame closure.

    Raises:
        InvalidInputError: If the family misses ∅ or the full set, or is not
            closed under pairwise union and intersection
    """
    points = _check_points(points)
    full = (1 << len(points)) - 1
    family = set(opens)
    if 0 not in family:
        raise InvalidInputError("Opens must contain the empty set")
    if full not in family:
        raise InvalidInputError("Opens must contain the full point set")
    members = sorted(family)
    for a in members:
        for b in members:
            if a | b not in family or a & b not in family:
                names = [[points[i] for i in bits(m)] for m in (a, b)]
                raise InvalidInputError(
                    "Opens are not closed under union and intersection", witness=names
                )
    space = space_from_subbase_masks(points, members)
    if set(space.opens) != family:
        raise InvariantViolation("Recomputed opens differ from the validated family")
    return space


def point_space(name: str = "x") -> FinSpace:
    return FinSpace((name,), (1,))


def discrete_space(points: Sequence[str]) -> FinSpace:
    points = _check_points(points)
    return FinSpace(points, tuple(1 << i for i in range(len(points))))


def indiscrete_space(points: Sequence[str]) -> FinSpace:
    points = _check_points(points)
    full = (1 << len(points)) - 1
    return FinSpace(points, tuple(full for _ in points))


def sierpinski_space() -> FinSpace:
    """Points 0 and 1 with opens ∅, {1}, {0,1}."""
    return make_space(["0", "1"], [["1"]])


def two_trivial_space() -> FinSpace:
    """The two-element set with the trivial topology."""
    return indiscrete_space(["0", "1"])


def product_space(spaces: Sequence[FinSpace]) -> FinSpace:
    """Product topology; points are named ``(x,y,...)`` in lexicographic order."""
    if not spaces:
        return point_space("()")
    tuples = list(product(*[range(space.size) for space in spaces]))
    position = {t: k for k, t in enumerate(tuples)}
    names = ["(" + ",".join(space.points[i] for space, i in zip(spaces, t)) + ")" for t in tuples]
    nbhd = []
    for t in tuples:
        factors = [list(bits(space.nbhd[i])) for space, i in zip(spaces, t)]
        nbhd.append(mask_from_indices(position[u] for u in product(*factors)))
    return FinSpace(tuple(names), tuple(nbhd))


def subspace(space: FinSpace, mask: Mask) -> Tuple[FinSpace, "ContMap"]:
    """Subspace topology on ``mask`` together with its inclusion map."""
    members = list(bits(mask))
    local = {i: k for k, i in enumerate(members)}
    nbhd = tuple(
        mask_from_indices(local[j] for j in bits(space.nbhd[i] & mask)) for i in members
    )
    sub = FinSpace(tuple(space.points[i] for i in members), nbhd)
    return sub, ContMap(sub, space, tuple(members))


def disjoint_sum(spaces: Sequence[FinSpace], tags: Sequence[str]) -> Tuple[FinSpace, List["ContMap"]]:
    """Coproduct of spaces; points are renamed ``tag.point``."""
    names: List[str] = []
    nbhd: List[Mask] = []
    offsets = []
    for space, tag in zip(spaces, tags):
        offset = len(names)
        offsets.append(offset)
        names.extend(f"{tag}.{name}" for name in space.points)
        nbhd.extend(basic << offset for basic in space.nbhd)
    total = FinSpace(_check_points(names), tuple(nbhd))
    injections = [
        ContMap(space, total, tuple(offset + i for i in range(space.size)))
        for space, offset in zip(spaces, offsets)
    ]
    return total, injections


@dataclass(frozen=True)
class ContMap:
    """
    A function between finite spaces, given by target point indices.

    Construction does not check continuity; use ``is_continuous``.
    """

    source: FinSpace
    target: FinSpace
    assignment: Tuple[int, ...]

    def __post_init__(self):
        if len(self.assignment) != self.source.size:
            raise InvalidInputError("Map assignment is not total on the source points")
        for value in self.assignment:
            if not 0 <= value < self.target.size:
                raise InvalidInputError(f"Map assignment hits a non-point: {value}")

    @classmethod
    def from_names(cls, source: FinSpace, target: FinSpace, mapping: Dict[str, str]) -> "ContMap":
        assignment = []
        for name in source.points:
            if name not in mapping:
                raise InvalidInputError(f"Map is not defined on point {name}", point=name)
            image = mapping[name]
            if image not in target.index:
                raise InvalidInputError(f"Map sends {name} to a non-point {image}", point=name)
            assignment.append(target.index[image])
        return cls(source, target, tuple(assignment))

    @classmethod
    def identity(cls, space: FinSpace) -> "ContMap":
        return cls(space, space, tuple(range(space.size)))

    def __call__(self, i: int) -> int:
        return self.assignment[i]

    def as_names(self) -> Dict[str, str]:
        return {
            self.source.points[i]: self.target.points[j] for i, j in enumerate(self.assignment)
        }

    def preimage(self, mask: Mask) -> Mask:
        return mask_from_indices(i for i, j in enumerate(self.assignment) if mask >> j & 1)

    def image(self, mask: Mask) -> Mask:
        return mask_from_indices(self.assignment[i] for i in bits(mask))

    def then(self, other: "ContMap") -> "ContMap":
        """Composite ``other ∘ self``."""
        if other.source != self.target:
            raise InvalidInputError("Cannot compose maps whose spaces do not match")
        return ContMap(self.source, other.target, tuple(other.assignment[j] for j in self.assignment))

    def is_continuous(self) -> bool:
        # every open is a union of minimal neighbourhoods and preimage preserves unions
        return all(self.source.is_open(self.preimage(basic)) for basic in self.target.nbhd)

    def is_closed_map(self) -> bool:
        return all(self.target.is_closed(self.image(c)) for c in self.source.closed_sets)

    @property
    def is_bijective(self) -> bool:
        return self.source.size == self.target.size and len(set(self.assignment)) == self.source.size

    def inverse(self) -> "ContMap":
        if not self.is_bijective:
            raise InvalidInputError("Only bijections have inverses")
        inverse = [0] * self.target.size
        for i, j in enumerate(self.assignment):
            inverse[j] = i
        return ContMap(self.target, self.source, tuple(inverse))

    def is_homeomorphism(self) -> bool:
        return self.is_bijective and self.is_continuous() and self.inverse().is_continuous()


def check_continuous(f: ContMap) -> bool:
    """True iff every preimage of a target open is a source open."""
    return f.is_continuous()


def continuous_maps(source: FinSpace, target: FinSpace) -> Iterator[ContMap]:
    """All continuous maps ``source → target`` (exhaustive)."""
    for assignment in product(range(target.size), repeat=source.size):
        candidate = ContMap(source, target, assignment)
        if candidate.is_continuous():
            yield candidate


def find_homeomorphism(left: FinSpace, right: FinSpace) -> Optional[ContMap]:
    """
    Backtracking search for a homeomorphism.

    A bijection of finite spaces is a homeomorphism iff it preserves and
    reflects the specialization order, which is what the search enforces.
    """
    if left.size != right.size or len(left.opens) != len(right.opens):
        return None

    def signature(space: FinSpace, i: int) -> Tuple[int, int]:
        return space.nbhd[i].bit_count(), space.closure(1 << i).bit_count()

    left_sig = [signature(left, i) for i in range(left.size)]
    right_sig = [signature(right, j) for j in range(right.size)]
    if sorted(left_sig) != sorted(right_sig):
        return None

    assignment: List[int] = []
    used = [False] * right.size

    def extend(i: int) -> bool:
        if i == left.size:
            return True
        for j in range(right.size):
            if used[j] or right_sig[j] != left_sig[i]:
                continue
            consistent = all(
                left.below(i, k) == right.below(j, assignment[k])
                and left.below(k, i) == right.below(assignment[k], j)
                for k in range(i)
            )
            if not consistent:
                continue
            used[j] = True
            assignment.append(j)
            if extend(i + 1):
                return True
            assignment.pop()
            used[j] = False
        return False

    if not extend(0):
        return None
    found = ContMap(left, right, tuple(assignment))
    if not found.is_homeomorphism():
        raise InvariantViolation("Order-preserving bijection failed the homeomorphism check")
    return found


def match_by_profiles(
    left: FinSpace,
    left_cells: Sequence[Mask],
    right: FinSpace,
    right_cells: Sequence[Mask],
) -> Optional[ContMap]:
    """
    Canonical map sending each point to the point with the same cell profile.

    ``left_cells[k]`` and ``right_cells[k]`` are corresponding subbasic opens.
    Returns the map only if it exists, is bijective and is a homeomorphism.
    """
    def profile(cells: Sequence[Mask], i: int) -> Tuple[bool, ...]:
        return tuple(bool(cell >> i & 1) for cell in cells)

    lookup: Dict[Tuple[bool, ...], int] = {}
    for j in range(right.size):
        key = profile(right_cells, j)
        if key in lookup:
            return None
        lookup[key] = j
    assignment = []
    for i in range(left.size):
        key = profile(left_cells, i)
        if key not in lookup:
            return None
        assignment.append(lookup[key])
    candidate = ContMap(left, right, tuple(assignment))
    return candidate if candidate.is_homeomorphism() else None


@dataclass(frozen=True)
class FinFrame:
    """
    A finite frame, i.e. a finite bounded distributive lattice.

    Attributes:
        elements: Element payloads (hashable), in canonical order
        below: For each element, the bitmask of the elements below it
        labels: Display names, one per element
    """

    elements: Tuple[Hashable, ...]
    below: Tuple[Mask, ...]
    labels: Tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.elements)

    @cached_property
    def index(self) -> Dict[Hashable, int]:
        return {element: i for i, element in enumerate(self.elements)}

    @cached_property
    def label_index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.labels)}

    @cached_property
    def above(self) -> Tuple[Mask, ...]:
        above = [0] * self.size
        for i, down in enumerate(self.below):
            for j in bits(down):
                above[j] |= 1 << i
        return tuple(above)

    @cached_property
    def _down_lookup(self) -> Dict[Mask, int]:
        return {down: i for i, down in enumerate(self.below)}

    @cached_property
    def _up_lookup(self) -> Dict[Mask, int]:
        return {up: i for i, up in enumerate(self.above)}

    def leq(self, i: int, j: int) -> bool:
        return bool(self.below[j] >> i & 1)

    def meet(self, i: int, j: int) -> int:
        try:
            return self._down_lookup[self.below[i] & self.below[j]]
        except KeyError:
            raise InvalidInputError(
                f"No meet for {self.labels[i]} and {self.labels[j]}"
            ) from None

    def join(self, i: int, j: int) -> int:
        try:
            return self._up_lookup[self.above[i] & self.above[j]]
        except KeyError:
            raise InvalidInputError(
                f"No join for {self.labels[i]} and {self.labels[j]}"
            ) from None

    @cached_property
    def bottom(self) -> int:
        full = (1 << self.size) - 1
        for i, up in enumerate(self.above):
            if up == full:
                return i
        raise InvalidInputError("Frame has no bottom element")

    @cached_property
    def top(self) -> int:
        full = (1 << self.size) - 1
        for i, down in enumerate(self.below):
            if down == full:
                return i
        raise InvalidInputError("Frame has no top element")

    def join_all(self, members: Iterable[int]) -> int:
        result = self.bottom
        for member in members:
            result = self.join(result, member)
        return result

    def meet_all(self, members: Iterable[int]) -> int:
        result = self.top
        for member in members:
            result = self.meet(result, member)
        return result

    def is_directed(self, members: Sequence[int]) -> bool:
        if not members:
            return False
        pool = mask_from_indices(members)
        return all(self.above[i] & self.above[j] & pool for i in members for j in members)

    def directed_join(self, members: Sequence[int]) -> int:
        """
        Join of a directed family, realised as its maximum.

        Raises:
            InvalidInputError: If the family is not directed
        """
        if not self.is_directed(members):
            raise InvalidInputError(
                "Directed join applied to a non-directed family",
                family=[self.labels[i] for i in members],
            )
        pool = mask_from_indices(members)
        for i in members:
            if self.below[i] & pool == pool:
                return i
        raise InvariantViolation("Finite directed family without a maximum")

    def validate(self) -> None:
        """
        Check the order, lattice, bounds and distributivity laws.

        Raises:
            InvalidInputError: Naming the first failing law
        """
        n = self.size
        if n == 0:
            raise InvalidInputError("A frame needs at least one element")
        for i in range(n):
            if not self.below[i] >> i & 1:
                raise InvalidInputError(f"Order is not reflexive at {self.labels[i]}")
            for j in bits(self.below[i]):
                if j != i and self.below[j] >> i & 1:
                    raise InvalidInputError(
                        f"Order is not antisymmetric: {self.labels[i]}, {self.labels[j]}"
                    )
                if self.below[j] & ~self.below[i]:
                    raise InvalidInputError(f"Order is not transitive below {self.labels[i]}")
        self.top
        self.bottom
        for i in range(n):
            for j in range(n):
                self.meet(i, j)
                self.join(i, j)
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    left = self.meet(a, self.join(b, c))
                    right = self.join(self.meet(a, b), self.meet(a, c))
                    if left != right:
                        raise InvalidInputError(
                            "Lattice is not distributive",
                            witness=[self.labels[a], self.labels[b], self.labels[c]],
                        )


def frame_from_order(
    elements: Sequence[Hashable],
    leq: Callable[[Hashable, Hashable], bool],
    labels: Optional[Sequence[str]] = None,
    validate: bool = True,
) -> FinFrame:
    """Build a FinFrame from elements and an order predicate."""
    below = tuple(
        mask_from_indices(j for j, lower in enumerate(elements) if leq(lower, upper))
        for upper in elements
    )
    frame = FinFrame(
        tuple(elements),
        below,
        tuple(labels) if labels is not None else tuple(str(e) for e in elements),
    )
    if len(set(frame.labels)) != frame.size:
        raise InvalidInputError("Frame element labels must be distinct")
    if validate:
        frame.validate()
    return frame


def subset_frame(members: Iterable[Mask], label: Callable[[Mask], str]) -> FinFrame:
    """Frame of bitmask subsets ordered by inclusion (must form a lattice)."""
    ordered = sorted(set(members))
    return frame_from_order(
        ordered, lambda a, b: a & ~b == 0, [label(m) for m in ordered], validate=False
    )


def chain_frame(length: int) -> FinFrame:
    """The chain 0 < 1 < ... < length-1."""
    return frame_from_order(list(range(length)), lambda a, b: a <= b, validate=False)


def two_frame() -> FinFrame:
    return chain_frame(2)


def boolean_frame(atoms: Sequence[str]) -> FinFrame:
    return subset_frame(range(1 << len(atoms)), lambda m: subset_label([atoms[i] for i in bits(m)]))


@dataclass(frozen=True)
class FrameHom:
    """An element map between finite frames."""

    source: FinFrame
    target: FinFrame
    assignment: Tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.assignment[i]

    def is_frame_hom(self) -> bool:
        """Preserves ⊥, ⊤, binary meets and binary joins."""
        src, tgt, h = self.source, self.target, self.assignment
        if h[src.bottom] != tgt.bottom or h[src.top] != tgt.top:
            return False
        for i in range(src.size):
            for j in range(src.size):
                if h[src.meet(i, j)] != tgt.meet(h[i], h[j]):
                    return False
                if h[src.join(i, j)] != tgt.join(h[i], h[j]):
                    return False
        return True

    def is_isomorphism(self) -> bool:
        return (
            self.source.size == self.target.size
            and len(set(self.assignment)) == self.source.size
            and all(
                self.source.leq(i, j) == self.target.leq(self.assignment[i], self.assignment[j])
                for i in range(self.source.size)
                for j in range(self.source.size)
            )
        )


def opn_frame(space: FinSpace) -> FinFrame:
    """The frame of opens of ``space`` ordered by inclusion."""
    return subset_frame(space.opens, space.label)


def opn_map(f: ContMap) -> FrameHom:
    """
    Preimage hom ``opn(target) → opn(source)`` of a continuous map.

    Raises:
        InvalidInputError: If ``f`` is not continuous
    """
    if not f.is_continuous():
        raise InvalidInputError("opn is only defined on continuous maps")
    source_frame = opn_frame(f.target)
    target_frame = opn_frame(f.source)
    assignment = tuple(target_frame.index[f.preimage(open_set)] for open_set in source_frame.elements)
    hom = FrameHom(source_frame, target_frame, assignment)
    if not hom.is_frame_hom():
        raise InvariantViolation("Preimage of a continuous map is not a frame homomorphism")
    return hom


@dataclass(frozen=True)
class FramePoints:
    """
    Points of a finite frame.

    Attributes:
        frame: The frame the points belong to
        space: The point space, topologised by the sets ``tilde[a]``
        generators: For each point, the least element it sends to ⊤
        filters: For each point, the bitmask of elements it sends to ⊤
        tilde: For each frame element ``a``, the bitmask of points with p(a) = ⊤
    """

    frame: FinFrame
    space: FinSpace
    generators: Tuple[int, ...]
    filters: Tuple[Mask, ...]
    tilde: Tuple[Mask, ...]

    def point_of_filter(self, filter_mask: Mask) -> Optional[int]:
        for k, candidate in enumerate(self.filters):
            if candidate == filter_mask:
                return k
        return None


def _is_point(frame: FinFrame, candidate: Mask) -> bool:
    if not candidate >> frame.top & 1 or candidate >> frame.bottom & 1:
        return False
    members = list(bits(candidate))
    for i in members:
        if frame.above[i] & ~candidate:
            return False
    for i in members:
        for j in members:
            if not candidate >> frame.meet(i, j) & 1:
                return False
    outside = [i for i in range(frame.size) if not candidate >> i & 1]
    for i in outside:
        for j in outside:
            if candidate >> frame.join(i, j) & 1:
                return False
    return True


def _points_brute_force(frame: FinFrame) -> List[Mask]:
    return [candidate for candidate in range(1 << frame.size) if _is_point(frame, candidate)]


def _points_join_prime(frame: FinFrame) -> List[Mask]:
    filters = []
    for g in range(frame.size):
        if g == frame.bottom:
            continue
        strictly_below = frame.below[g] & ~(1 << g)
        if frame.join_all(bits(strictly_below)) != g:
            filters.append(frame.above[g])
    return filters


def frame_points(frame: FinFrame, method: str = "auto") -> FramePoints:
    """
    Enumerate the points (homs into 2) of a finite frame.

    Args:
        frame: The frame
        method: ``brute`` enumerates all 2^|F| assignments and filters by the
            hom laws; ``prime`` uses join-prime elements; ``auto`` picks brute
            force up to the BRUTE_FORCE_FRAME_LIMIT setting

    Returns:
        FramePoints, with the point space topologised by ã = {p | p(a) = ⊤}
    """
    if method == "auto":
        method = "brute" if frame.size <= limit("BRUTE_FORCE_FRAME_LIMIT") else "prime"
    if method == "brute":
        enforce("BRUTE_FORCE_FRAME_LIMIT", frame.size, "Frame size for brute-force points")
        filters = _points_brute_force(frame)
    elif method == "prime":
        filters = _points_join_prime(frame)
    else:
        raise InvalidInputError(f"Unknown point enumeration method: {method}")

    generators = [frame.meet_all(bits(f)) for f in filters]
    order = sorted(range(len(filters)), key=lambda k: generators[k])
    filters = [filters[k] for k in order]
    generators = [generators[k] for k in order]
    for f, g in zip(filters, generators):
        if frame.above[g] != f:
            raise InvariantViolation("Point filter is not generated by its meet")

    tilde = tuple(
        mask_from_indices(k for k, f in enumerate(filters) if f >> a & 1) for a in range(frame.size)
    )
    names = tuple(frame.labels[g] for g in generators)
    space = FinSpace(names, tuple(tilde[g] for g in generators))
    logger.debug(f"Frame of {frame.size} elements has {len(filters)} points ({method})")
    return FramePoints(frame, space, tuple(generators), tuple(filters), tilde)


@dataclass(frozen=True)
class Sobrification:
    """pt(opn X) with the unit x ↦ p_x."""

    space: FinSpace
    unit: ContMap
    is_sober: bool
    is_t0: bool


def sobrify(space: FinSpace) -> Sobrification:
    """
    Compute pt(opn X) and the unit map x ↦ p_x.

    Sobriety is decided as "the unit is a homeomorphism"; agreement with the
    T0 property is asserted as a cross-check.
    """
    frame = opn_frame(space)
    points = frame_points(frame)
    assignment = []
    for i in range(space.size):
        filter_mask = mask_from_indices(
            k for k, open_set in enumerate(frame.elements) if open_set >> i & 1
        )
        target = points.point_of_filter(filter_mask)
        if target is None:
            raise InvariantViolation(f"p_x for {space.points[i]} is not a point of opn X")
        assignment.append(target)
    unit = ContMap(space, points.space, tuple(assignment))
    if not unit.is_continuous():
        raise InvariantViolation("Sobrification unit is not continuous")
    is_sober = unit.is_homeomorphism()
    if is_sober != space.is_t0:
        raise InvariantViolation("Finite sobriety disagrees with the T0 property")
    return Sobrification(points.space, unit, is_sober, space.is_t0)


def find_frame_isomorphism(left: FinFrame, right: FinFrame) -> Optional[FrameHom]:
    """Backtracking search for an order isomorphism between finite frames."""
    if left.size != right.size:
        return None
    enforce("FRAME_ISO_MAX_ELEMENTS", left.size, "Frame size for isomorphism search")

    def signature(frame: FinFrame, i: int) -> Tuple[int, int]:
        return frame.below[i].bit_count(), frame.above[i].bit_count()

    left_sig = [signature(left, i) for i in range(left.size)]
    right_sig = [signature(right, j) for j in range(right.size)]
    if sorted(left_sig) != sorted(right_sig):
        return None
    order = sorted(range(left.size), key=lambda i: left_sig[i])
    assignment: Dict[int, int] = {}
    used = [False] * right.size

    def extend(position: int) -> bool:
        if position == len(order):
            return True
        i = order[position]
        for j in range(right.size):
            if used[j] or right_sig[j] != left_sig[i]:
                continue
            if all(
                left.leq(i, k) == right.leq(j, assignment[k])
                and left.leq(k, i) == right.leq(assignment[k], j)
                for k in assignment
            ):
                used[j] = True
                assignment[i] = j
                if extend(position + 1):
                    return True
                del assignment[i]
                used[j] = False
        return False

    if not extend(0):
        return None
    return FrameHom(left, right, tuple(assignment[i] for i in range(left.size)))
