"""
Frame algebra: negation, well-inside, regularity, and presentations.

Presentations are solved two ways. presentation_points finds the homs into
the two-element frame directly, by a pruned search over generator
assignments. presented_frame_small builds the free distributive lattice on
the generators and quotients it by the congruence generated by the relations.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from apps.core.conf import enforce
from apps.core.exceptions import InvalidInputError, InvariantViolation, UnknownIdentifierError
from apps.topology.services.finspace import (
    FinFrame,
    FinSpace,
    Mask,
    bits,
    find_homeomorphism,
    frame_from_order,
    mask_from_indices,
    opn_frame,
    space_from_subbase_masks,
    subset_label,
)

logger = logging.getLogger(__name__)


# --- negation, well-inside, regularity -------------------------------------


def negation(frame: FinFrame, a: int) -> int:
    """Pseudocomplement ∼a = ⋁{b | a ∧ b = ⊥}."""
    return frame.join_all(b for b in range(frame.size) if frame.meet(a, b) == frame.bottom)


def well_inside(frame: FinFrame, a: int, b: int) -> bool:
    """
    Decide a ⋖ b.

    Computes both "some c has c ∧ a = ⊥ and c ∨ b = ⊤" and "∼a ∨ b = ⊤".

    Raises:
        InvariantViolation: If the two criteria disagree
    """
    witnessed = any(
        frame.meet(c, a) == frame.bottom and frame.join(c, b) == frame.top
        for c in range(frame.size)
    )
    via_negation = frame.join(negation(frame, a), b) == frame.top
    if witnessed != via_negation:
        raise InvariantViolation(
            "Well-inside criteria disagree",
            a=frame.labels[a],
            b=frame.labels[b],
        )
    return witnessed


def is_regular_element(frame: FinFrame, a: int) -> bool:
    return frame.join_all(b for b in range(frame.size) if well_inside(frame, b, a)) == a


def is_regular_frame(frame: FinFrame) -> bool:
    return all(is_regular_element(frame, a) for a in range(frame.size))


# --- lattice terms and presentations ----------------------------------------


@dataclass(frozen=True)
class Gen:
    name: str


@dataclass(frozen=True)
class Meet:
    terms: Tuple["LatticeTerm", ...]


@dataclass(frozen=True)
class Join:
    terms: Tuple["LatticeTerm", ...]


LatticeTerm = Union[Gen, Meet, Join]

TOP_TERM = Meet(())
BOTTOM_TERM = Join(())

RELATION_KINDS = ("leq", "eq")


def term_generators(term: LatticeTerm) -> List[str]:
    if isinstance(term, Gen):
        return [term.name]
    found: List[str] = []
    for sub in term.terms:
        found.extend(term_generators(sub))
    return found


def term_to_document(term: LatticeTerm) -> dict:
    if isinstance(term, Gen):
        return {"gen": term.name}
    key = "meet" if isinstance(term, Meet) else "join"
    return {key: [term_to_document(sub) for sub in term.terms]}


def term_from_document(document, path: str = "term") -> LatticeTerm:
    if not isinstance(document, dict) or len(document) != 1:
        raise InvalidInputError("A term must be an object with one key", path=path)
    (key, value), = document.items()
    if key == "gen":
        if not isinstance(value, str):
            raise InvalidInputError("Generator names must be strings", path=f"{path}.gen")
        return Gen(value)
    if key in ("meet", "join"):
        if not isinstance(value, list):
            raise InvalidInputError(f"'{key}' expects a list of terms", path=f"{path}.{key}")
        subterms = tuple(
            term_from_document(sub, f"{path}.{key}[{i}]") for i, sub in enumerate(value)
        )
        return Meet(subterms) if key == "meet" else Join(subterms)
    raise InvalidInputError(f"Unknown term constructor: {key}", path=path)


def evaluate_term(term: LatticeTerm, value: Callable[[str], Optional[bool]]) -> Optional[bool]:
    """Three-valued evaluation in 2; ``None`` means not yet determined."""
    if isinstance(term, Gen):
        return value(term.name)
    results = [evaluate_term(sub, value) for sub in term.terms]
    if isinstance(term, Meet):
        if any(result is False for result in results):
            return False
        return True if all(result is True for result in results) else None
    if any(result is True for result in results):
        return True
    return False if all(result is False for result in results) else None


@dataclass(frozen=True)
class Relation:
    lhs: LatticeTerm
    kind: str
    rhs: LatticeTerm
    tag: str = ""

    def holds_in_two(self, value: Callable[[str], Optional[bool]]) -> Optional[bool]:
        left = evaluate_term(self.lhs, value)
        right = evaluate_term(self.rhs, value)
        if self.kind == "leq":
            if left is False or right is True:
                return True
            if left is True and right is False:
                return False
            return None
        if left is None or right is None:
            return None
        return left == right


@dataclass(frozen=True)
class Presentation:
    """
    Generators and relations.

    Attributes:
        generators: Generator names in canonical order
        relations: Relations between lattice terms over those generators
        name: Short description used in reports
    """

    generators: Tuple[str, ...]
    relations: Tuple[Relation, ...]
    name: str = ""

    def __post_init__(self):
        declared = set(self.generators)
        if len(declared) != len(self.generators):
            raise InvalidInputError("Duplicate generator names in presentation")
        for k, relation in enumerate(self.relations):
            if relation.kind not in RELATION_KINDS:
                raise InvalidInputError(
                    f"Unknown relation kind: {relation.kind}", path=f"relations[{k}].rel"
                )
            for name in term_generators(relation.lhs) + term_generators(relation.rhs):
                if name not in declared:
                    raise UnknownIdentifierError(
                        f"Relation mentions undeclared generator {name}",
                        path=f"relations[{k}]",
                    )

    def count(self, tag: str) -> int:
        return sum(1 for relation in self.relations if relation.tag == tag)

    def to_document(self) -> dict:
        return {
            "generators": list(self.generators),
            "relations": [
                {
                    "lhs": term_to_document(relation.lhs),
                    "rel": relation.kind,
                    "rhs": term_to_document(relation.rhs),
                }
                for relation in self.relations
            ],
        }


def m_generator(kind: str, label: str) -> str:
    """Generator name for □a (``box``) or ◇a (``dia``) in M F."""
    return f"{kind}[{label}]"


def directed_subsets(frame: FinFrame) -> List[Tuple[int, ...]]:
    """Non-empty subsets with a maximum, i.e. the finite directed subsets."""
    found = []
    for top in range(frame.size):
        rest = [i for i in bits(frame.below[top]) if i != top]
        for r in range(len(rest) + 1):
            for chosen in combinations(rest, r):
                found.append(tuple(sorted(chosen + (top,))))
    return sorted(found)


def present_M(frame: FinFrame, directed: bool = False) -> Presentation:
    """
    The monotone-neighbourhood presentation M F.

    Generators are □a and ◇a for a ∈ F. Relation instances of M1, M2, M4 and
    M5 range over F × F; with ``directed`` set, M3 and M6 are instantiated over
    every directed subset.
    """
    labels = frame.labels
    box = {a: Gen(m_generator("box", labels[a])) for a in range(frame.size)}
    dia = {a: Gen(m_generator("dia", labels[a])) for a in range(frame.size)}
    relations: List[Relation] = []
    pairs = [(a, b) for a in range(frame.size) for b in range(frame.size)]
    for a, b in pairs:
        relations.append(Relation(box[frame.meet(a, b)], "leq", box[a], "M1"))
    for a, b in pairs:
        if frame.meet(a, b) == frame.bottom:
            relations.append(Relation(Meet((box[a], dia[b])), "eq", BOTTOM_TERM, "M2"))
    if directed:
        for family in directed_subsets(frame):
            top = frame.directed_join(family)
            relations.append(
                Relation(box[top], "eq", Join(tuple(box[a] for a in family)), "M3")
            )
    for a, b in pairs:
        relations.append(Relation(dia[a], "leq", dia[frame.join(a, b)], "M4"))
    for a, b in pairs:
        if frame.join(a, b) == frame.top:
            relations.append(Relation(TOP_TERM, "eq", Join((box[a], dia[b])), "M5"))
    if directed:
        for family in directed_subsets(frame):
            top = frame.directed_join(family)
            relations.append(
                Relation(dia[top], "eq", Join(tuple(dia[a] for a in family)), "M6")
            )
    generators = tuple(box[a].name for a in range(frame.size)) + tuple(
        dia[a].name for a in range(frame.size)
    )
    return Presentation(generators, tuple(relations), name="M")


def _pair_name(labels: Sequence[str], gamma: Mask, delta: Mask) -> str:
    return "(" + subset_label([labels[i] for i in bits(gamma)]) + "," + subset_label(
        [labels[i] for i in bits(delta)]
    ) + ")"


def present_Mprime(frame: FinFrame, directed: bool = False) -> Presentation:
    """
    The join-semilattice presentation M′ F.

    Generators are pairs (γ, δ) of subsets of F, ordered by total size. The
    join law is encoded by equating each pair with the join of its singleton
    pairs and (∅, ∅) with ⊥.
    """
    n = frame.size
    labels = frame.labels
    subsets = range(1 << n)
    ordered = sorted(
        ((gamma, delta) for gamma in subsets for delta in subsets),
        key=lambda pair: (pair[0].bit_count() + pair[1].bit_count(), pair),
    )
    gen = {pair: Gen(_pair_name(labels, *pair)) for pair in ordered}
    relations: List[Relation] = []
    for gamma, delta in ordered:
        pieces = tuple(gen[(1 << i, 0)] for i in bits(gamma)) + tuple(
            gen[(0, 1 << i)] for i in bits(delta)
        )
        if len(pieces) == 1:
            continue
        relations.append(Relation(gen[(gamma, delta)], "eq", Join(pieces), "join"))

    base = [(gamma, delta) for gamma in subsets for delta in subsets]
    elements = range(n)
    for gamma, delta in base:
        for a in elements:
            for b in elements:
                relations.append(
                    Relation(
                        gen[(gamma | 1 << frame.meet(a, b), delta)],
                        "leq",
                        gen[(gamma | 1 << a, delta)],
                        "M'1",
                    )
                )
                if frame.meet(a, b) == frame.bottom:
                    relations.append(
                        Relation(
                            Meet((gen[(gamma | 1 << a, delta)], gen[(gamma, delta | 1 << b)])),
                            "leq",
                            gen[(gamma, delta)],
                            "M'2",
                        )
                    )
                relations.append(
                    Relation(
                        gen[(gamma, delta | 1 << a)],
                        "leq",
                        gen[(gamma, delta | 1 << frame.join(a, b))],
                        "M'4",
                    )
                )
                if frame.join(a, b) == frame.top:
                    relations.append(
                        Relation(TOP_TERM, "leq", gen[(gamma | 1 << a, delta | 1 << b)], "M'5")
                    )
        if directed:
            for family in directed_subsets(frame):
                top = frame.directed_join(family)
                relations.append(
                    Relation(
                        gen[(gamma | 1 << top, delta)],
                        "leq",
                        Join(tuple(gen[(gamma | 1 << a, delta)] for a in family)),
                        "M'3",
                    )
                )
                relations.append(
                    Relation(
                        gen[(gamma, delta | 1 << top)],
                        "leq",
                        Join(tuple(gen[(gamma, delta | 1 << a)] for a in family)),
                        "M'6",
                    )
                )
    relations.append(Relation(gen[(0, 0)], "eq", BOTTOM_TERM, "join"))
    return Presentation(tuple(gen[pair].name for pair in ordered), tuple(relations), name="M'")


# --- points of a presentation ----------------------------------------------


@dataclass(frozen=True)
class PresentationPoints:
    """
    Homs from the presented frame into 2.

    Attributes:
        presentation: The solved presentation
        space: Point space topologised by the cells g̃
        assignments: For each point, the bitmask of generators sent to 1
        cells: For each generator, the bitmask of points sending it to 1
    """

    presentation: Presentation
    space: FinSpace
    assignments: Tuple[Mask, ...]
    cells: Tuple[Mask, ...]

    def cell(self, generator: str) -> Mask:
        return self.cells[self.presentation.generators.index(generator)]


def presentation_points(
    presentation: Presentation, max_generators: Optional[int] = None
) -> PresentationPoints:
    """
    Enumerate the assignments generators → {0, 1} satisfying every relation.

    The search assigns generators in presentation order and, after each step,
    re-checks with three-valued evaluation every relation that mentions the
    generator just assigned.

    Raises:
        ResourceBoundError: If the generator count exceeds the bound
    """
    generators = presentation.generators
    enforce(
        "PRESENTATION_MAX_GENERATORS",
        len(generators),
        "Number of presentation generators",
        override=max_generators,
    )
    position = {name: k for k, name in enumerate(generators)}
    watching: List[List[Relation]] = [[] for _ in generators]
    for relation in presentation.relations:
        mentioned = {position[name] for name in term_generators(relation.lhs)}
        mentioned |= {position[name] for name in term_generators(relation.rhs)}
        if not mentioned:
            if relation.holds_in_two(lambda name: None) is False:
                return _empty_points(presentation)
            continue
        for k in mentioned:
            watching[k].append(relation)

    values: List[Optional[bool]] = [None] * len(generators)

    def value(name: str) -> Optional[bool]:
        return values[position[name]]

    found: List[Mask] = []

    def extend(k: int) -> None:
        if k == len(generators):
            found.append(mask_from_indices(i for i, v in enumerate(values) if v))
            return
        for choice in (False, True):
            values[k] = choice
            if all(relation.holds_in_two(value) is not False for relation in watching[k]):
                extend(k + 1)
        values[k] = None

    extend(0)
    cells = tuple(
        mask_from_indices(p for p, assignment in enumerate(found) if assignment >> g & 1)
        for g in range(len(generators))
    )
    names = [subset_label([generators[g] for g in bits(assignment)]) for assignment in found]
    space = space_from_subbase_masks(names, cells)
    logger.debug(
        f"Presentation {presentation.name or '?'} with {len(generators)} generators "
        f"has {len(found)} points"
    )
    return PresentationPoints(presentation, space, tuple(found), cells)


def _empty_points(presentation: Presentation) -> PresentationPoints:
    return PresentationPoints(
        presentation, FinSpace((), ()), (), tuple(0 for _ in presentation.generators)
    )


# --- the presented frame by congruence closure ------------------------------


class UnionFind:
    """Disjoint sets over 0..n-1 with path halving."""

    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


def boolean_upsets(n: int) -> List[int]:
    """
    All up-sets of the Boolean lattice of subsets of ``n`` elements.

    Each up-set is a bitmask over the 2^n subsets. Read as the set of
    assignments satisfying a monotone DNF, the up-sets are the elements of the
    free bounded distributive lattice on ``n`` generators, with meet ``&`` and
    join ``|``.
    """
    assignments = sorted(range(1 << n), key=lambda s: (-s.bit_count(), s))
    found: List[int] = []

    def extend(k: int, upset: int) -> None:
        if k == len(assignments):
            found.append(upset)
            return
        s = assignments[k]
        extend(k + 1, upset)
        supersets_in = all(upset >> (s | 1 << i) & 1 for i in range(n) if not s >> i & 1)
        if supersets_in:
            extend(k + 1, upset | 1 << s)

    extend(0, 0)
    return sorted(found)


def _dnf_label(upset: int, generators: Sequence[str]) -> str:
    if upset == 0:
        return "⊥"
    minimal = [
        s for s in bits(upset) if not any(upset >> (s & ~(1 << i)) & 1 for i in bits(s))
    ]
    clauses = []
    for s in sorted(minimal, key=lambda s: (s.bit_count(), s)):
        clauses.append("⊤" if s == 0 else "∧".join(generators[i] for i in bits(s)))
    return " ∨ ".join(clauses)


@dataclass(frozen=True)
class PresentedFrame:
    """
    The frame presented by generators and relations.

    Attributes:
        frame: The quotient lattice
        generator_elements: Generator name to its element index in ``frame``
        free_size: Size of the free distributive lattice before quotienting
    """

    frame: FinFrame
    generator_elements: Dict[str, int] = field(default_factory=dict)
    free_size: int = 0


def presented_frame_small(
    presentation: Presentation, max_generators: Optional[int] = None
) -> PresentedFrame:
    """
    Build the presented frame as a quotient of the free distributive lattice.

    Each relation seeds a pair (x ≤ y seeds x ~ x ∧ y); union-find merging is
    propagated along x ↦ x ∧ c and x ↦ x ∨ c for every element c until no new
    merge happens.

    Raises:
        ResourceBoundError: If there are too many generators
        InvariantViolation: If the quotient fails a relation
    """
    generators = presentation.generators
    n = len(generators)
    enforce(
        "PRESENTED_FRAME_MAX_GENERATORS", n, "Number of generators for the presented frame",
        override=max_generators,
    )
    elements = boolean_upsets(n)
    index = {upset: k for k, upset in enumerate(elements)}
    full = (1 << (1 << n)) - 1
    gen_upset = {
        name: mask_from_indices(s for s in range(1 << n) if s >> g & 1)
        for g, name in enumerate(generators)
    }

    def upset_of(term: LatticeTerm) -> int:
        if isinstance(term, Gen):
            return gen_upset[term.name]
        if isinstance(term, Meet):
            result = full
            for sub in term.terms:
                result &= upset_of(sub)
            return result
        result = 0
        for sub in term.terms:
            result |= upset_of(sub)
        return result

    classes = UnionFind(len(elements))
    worklist: List[Tuple[int, int]] = []

    def merge(x: int, y: int) -> None:
        if classes.union(index[x], index[y]):
            worklist.append((x, y))

    for relation in presentation.relations:
        lhs, rhs = upset_of(relation.lhs), upset_of(relation.rhs)
        if relation.kind == "leq":
            merge(lhs, lhs & rhs)
        else:
            merge(lhs, rhs)
    rounds = 0
    while worklist:
        x, y = worklist.pop()
        rounds += 1
        for c in elements:
            merge(x & c, y & c)
            merge(x | c, y | c)

    representative: Dict[int, int] = {}
    for k, upset in enumerate(elements):
        representative.setdefault(classes.find(k), upset)
    reps = sorted(representative.values())

    def leq(a: int, b: int) -> bool:
        return classes.find(index[a & b]) == classes.find(index[a])

    frame = frame_from_order(
        reps, leq, [_dnf_label(rep, generators) for rep in reps], validate=False
    )
    rep_position = {classes.find(index[rep]): k for k, rep in enumerate(reps)}

    def element_of(upset: int) -> int:
        return rep_position[classes.find(index[upset])]

    for relation in presentation.relations:
        lhs, rhs = element_of(upset_of(relation.lhs)), element_of(upset_of(relation.rhs))
        ok = frame.leq(lhs, rhs) if relation.kind == "leq" else lhs == rhs
        if not ok:
            raise InvariantViolation("Quotient frame fails a presentation relation")
    logger.debug(
        f"Presented frame: {len(elements)} free elements, {frame.size} after "
        f"{rounds} propagation steps"
    )
    return PresentedFrame(
        frame,
        {name: element_of(gen_upset[name]) for name in generators},
        len(elements),
    )


# --- comparisons --------------------------------------------------------------


@dataclass
class IsoReport:
    """Outcome of comparing two presentations through their point spaces."""

    isomorphic: bool
    left_points: int
    right_points: int
    left_opens: int
    right_opens: int
    homeomorphism: Optional[Dict[str, str]] = None
    checks: Dict[str, bool] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "isomorphic": self.isomorphic,
            "left_points": self.left_points,
            "right_points": self.right_points,
            "left_opens": self.left_opens,
            "right_opens": self.right_opens,
            "homeomorphism": self.homeomorphism,
            "checks": self.checks,
        }


def compare_spaces(left: FinSpace, right: FinSpace) -> IsoReport:
    found = find_homeomorphism(left, right)
    return IsoReport(
        isomorphic=found is not None,
        left_points=left.size,
        right_points=right.size,
        left_opens=len(left.opens),
        right_opens=len(right.opens),
        homeomorphism=found.as_names() if found is not None else None,
    )


def compare_presentations(
    left: Presentation, right: Presentation, max_generators: Optional[int] = None
) -> IsoReport:
    """Search for a homeomorphism between the point spaces of two presentations."""
    left_points = presentation_points(left, max_generators)
    right_points = presentation_points(right, max_generators)
    report = compare_spaces(left_points.space, right_points.space)
    logger.info(
        f"Compared presentations {left.name or '?'} and {right.name or '?'}: "
        f"isomorphic={report.isomorphic}"
    )
    return report


def check_m_preserves_regularity(frame: FinFrame) -> Dict[str, bool]:
    """
    Regularity of F versus regularity of M F.

    M F is taken as the open-set frame of its point space, which is the
    presented frame because finite presented frames are spatial.
    """
    points = presentation_points(present_M(frame))
    m_frame = opn_frame(points.space)
    return {
        "frame_regular": is_regular_frame(frame),
        "m_regular": is_regular_frame(m_frame),
    }
