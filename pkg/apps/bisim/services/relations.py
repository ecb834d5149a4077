"""
Relations between models, Λ-bisimulations and Aczel–Mendler bisimulations.
"""

import logging
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from apps.coalgebra.services.functors import GeomModel
from apps.coalgebra.services.liftings import OpenLifting, liftings_for
from apps.core.conf import enforce, limit
from apps.core.exceptions import InvalidInputError, InvariantViolation
from apps.logic.services.semantics import Liftings, modal_step
from apps.topology.services.finspace import ContMap, FinSpace, Mask, product_space, subspace

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True)
class Relation:
    """
    A relation between the points of two models, as index pairs.

    Attributes:
        left: Source model
        right: Target model
        pairs: ``(i, j)`` with ``i`` a left and ``j`` a right point index
    """

    left: GeomModel
    right: GeomModel
    pairs: FrozenSet[Pair] = frozenset()

    def __post_init__(self):
        for i, j in self.pairs:
            if not (0 <= i < self.left.space.size and 0 <= j < self.right.space.size):
                raise InvalidInputError(f"Relation pair {(i, j)} references a missing point")

    @classmethod
    def from_names(cls, left: GeomModel, right: GeomModel, pairs: Iterable[Sequence[str]]) -> "Relation":
        indexed = set()
        for k, pair in enumerate(pairs):
            x, y = pair
            if x not in left.space.index or y not in right.space.index:
                raise InvalidInputError(f"Unknown point in relation pair {x!r}, {y!r}", path=f"pairs[{k}]")
            indexed.add((left.space.index[x], right.space.index[y]))
        return cls(left, right, frozenset(indexed))

    @classmethod
    def identity(cls, model: GeomModel) -> "Relation":
        return cls(model, model, frozenset((i, i) for i in range(model.space.size)))

    @classmethod
    def full(cls, left: GeomModel, right: GeomModel) -> "Relation":
        return cls(left, right, frozenset(product(range(left.space.size), range(right.space.size))))

    def image(self, a: Mask) -> Mask:
        """B[a]."""
        result = 0
        for i, j in self.pairs:
            if a >> i & 1:
                result |= 1 << j
        return result

    def preimage(self, b: Mask) -> Mask:
        """B⁻¹[b]."""
        result = 0
        for i, j in self.pairs:
            if b >> j & 1:
                result |= 1 << i
        return result

    def with_pairs(self, pairs: Iterable[Pair]) -> "Relation":
        return Relation(self.left, self.right, frozenset(pairs))

    def union(self, other: "Relation") -> "Relation":
        return self.with_pairs(self.pairs | other.pairs)

    def as_names(self) -> List[List[str]]:
        left, right = self.left.space.points, self.right.space.points
        return sorted([left[i], right[j]] for i, j in self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class CoherentPair:
    left: Mask
    right: Mask


def is_coherent(relation: Relation, a: Mask, b: Mask) -> bool:
    """B[a] ⊆ b and B⁻¹[b] ⊆ a."""
    return relation.image(a) & ~b == 0 and relation.preimage(b) & ~a == 0


def coherent_pairs(relation: Relation) -> List[CoherentPair]:
    """
    All coherent pairs of opens.

    Raises:
        ResourceBoundError: If the number of candidate pairs exceeds COHERENT_PAIR_CAP
    """
    left_opens = relation.left.space.opens
    right_opens = relation.right.space.opens
    enforce("COHERENT_PAIR_CAP", len(left_opens) * len(right_opens), "Candidate coherent pairs")
    return [
        CoherentPair(a, b) for a in left_opens for b in right_opens if is_coherent(relation, a, b)
    ]


def _check_models(left: GeomModel, right: GeomModel) -> None:
    if left.functor.name != right.functor.name:
        raise InvalidInputError(f"Functor mismatch: {left.functor.name} versus {right.functor.name}")


def _resolve_liftings(model: GeomModel, liftings: Optional[Liftings]) -> Liftings:
    return liftings if liftings is not None else liftings_for(model.functor)


def _modal_pairs(
    relation: Relation, liftings: Liftings
) -> Iterable[Tuple[OpenLifting, Tuple[CoherentPair, ...], Mask, Mask]]:
    """For each lifting and coherent tuple, the left and right modal steps."""
    coherent = coherent_pairs(relation)
    for lifting_id in sorted(liftings):
        lifting = liftings[lifting_id]
        left_steps: Dict[Tuple[Mask, ...], Mask] = {}
        right_steps: Dict[Tuple[Mask, ...], Mask] = {}
        for chosen in product(coherent, repeat=lifting.arity):
            a = tuple(c.left for c in chosen)
            b = tuple(c.right for c in chosen)
            if a not in left_steps:
                left_steps[a] = modal_step(relation.left, lifting, a)
            if b not in right_steps:
                right_steps[b] = modal_step(relation.right, lifting, b)
            yield lifting, chosen, left_steps[a], right_steps[b]


def letter_mismatch(relation: Relation, i: int, j: int) -> Optional[str]:
    """First letter on which the two points disagree."""
    left, right = relation.left, relation.right
    for letter in sorted(set(left.valuation) | set(right.valuation)):
        here = bool(left.valuation.get(letter, 0) >> i & 1)
        there = bool(right.valuation.get(letter, 0) >> j & 1)
        if here != there:
            return letter
    return None


@dataclass
class BisimCheck:
    holds: bool
    counterexample: Optional[Dict[str, object]] = None

    def __bool__(self) -> bool:
        return self.holds

    def as_dict(self) -> dict:
        return {"holds": self.holds, "counterexample": self.counterexample}


def is_lambda_bisim(relation: Relation, liftings: Optional[Liftings] = None) -> BisimCheck:
    """
    Check the Λ-bisimulation conditions.

    Every related pair must agree on letters and, for every lifting and
    tuple of coherent pairs, on membership of the modal steps. Stops at
    the first violation.

    Raises:
        InvalidInputError: If the models use different functors
    """
    _check_models(relation.left, relation.right)
    liftings = _resolve_liftings(relation.left, liftings)
    left_points, right_points = relation.left.space.points, relation.right.space.points
    for i, j in sorted(relation.pairs):
        letter = letter_mismatch(relation, i, j)
        if letter is not None:
            return BisimCheck(
                False,
                {"pair": [left_points[i], right_points[j]], "letter": letter},
            )
    for lifting, chosen, left, right in _modal_pairs(relation, liftings):
        for i, j in sorted(relation.pairs):
            if bool(left >> i & 1) != bool(right >> j & 1):
                return BisimCheck(
                    False,
                    {
                        "pair": [left_points[i], right_points[j]],
                        "lifting": lifting.id,
                        "args": [
                            [relation.left.space.names_of(c.left), relation.right.space.names_of(c.right)]
                            for c in chosen
                        ],
                    },
                )
    return BisimCheck(True)


def letter_agreeing_pairs(left: GeomModel, right: GeomModel) -> FrozenSet[Pair]:
    probe = Relation(left, right)
    return frozenset(
        (i, j)
        for i in range(left.space.size)
        for j in range(right.space.size)
        if letter_mismatch(probe, i, j) is None
    )


def greatest_lambda_bisim(
    left: GeomModel,
    right: GeomModel,
    liftings: Optional[Liftings] = None,
    start: Optional[Relation] = None,
) -> Relation:
    """
    Greatest Λ-bisimulation, optionally inside ``start``.

    Iterates the refinement that drops pairs violating some coherent-tuple
    condition, beginning with the letter-agreeing pairs.
    """
    _check_models(left, right)
    liftings = _resolve_liftings(left, liftings)
    pairs = letter_agreeing_pairs(left, right)
    if start is not None:
        pairs &= start.pairs
    relation = Relation(left, right, pairs)
    rounds = 0
    while True:
        rounds += 1
        dropped = set()
        for _, _, here, there in _modal_pairs(relation, liftings):
            dropped.update(
                (i, j) for i, j in relation.pairs if bool(here >> i & 1) != bool(there >> j & 1)
            )
        logger.debug(f"Bisimulation refinement round {rounds}: {len(dropped)} pairs dropped")
        if not dropped:
            break
        relation = relation.with_pairs(relation.pairs - dropped)
    check = is_lambda_bisim(relation, liftings)
    if not check.holds:
        raise InvariantViolation(
            "Refinement fixpoint is not a Λ-bisimulation", counterexample=check.counterexample
        )
    logger.info(f"Greatest Λ-bisimulation has {len(relation)} pairs after {rounds} rounds")
    return relation


def random_lambda_bisims(
    left: GeomModel,
    right: GeomModel,
    rng: random.Random,
    count: int,
    liftings: Optional[Liftings] = None,
) -> List[Relation]:
    """Greatest Λ-bisimulations inside random subrelations of the letter-agreeing pairs."""
    candidates = sorted(letter_agreeing_pairs(left, right))
    found = []
    for _ in range(count):
        chosen = [pair for pair in candidates if rng.random() < 0.6]
        found.append(greatest_lambda_bisim(left, right, liftings, Relation(left, right, frozenset(chosen))))
    return found


# --- Aczel–Mendler bisimulations -------------------------------------------------


@dataclass
class RelationSpace:
    """A relation as a subspace of the product, with its two projections."""

    space: FinSpace
    pairs: Tuple[Pair, ...]
    left_projection: ContMap
    right_projection: ContMap


def relation_space(relation: Relation) -> RelationSpace:
    left, right = relation.left.space, relation.right.space
    pairs = tuple(sorted(relation.pairs))
    whole = product_space([left, right])
    mask = 0
    for i, j in pairs:
        mask |= 1 << (i * right.size + j)
    space, _ = subspace(whole, mask)
    return RelationSpace(
        space,
        pairs,
        ContMap(space, left, tuple(i for i, _ in pairs)),
        ContMap(space, right, tuple(j for _, j in pairs)),
    )


def is_am_bisim(relation: Relation, beta: Sequence) -> bool:
    """
    Whether ``beta`` makes both projections coalgebra morphisms.

    ``beta`` lists one carrier element over the relation space per pair, in
    sorted pair order.
    """
    _check_models(relation.left, relation.right)
    rs = relation_space(relation)
    functor = relation.left.functor
    carrier = functor.carrier(rs.space)
    if len(beta) != len(rs.pairs) or any(b not in carrier.index for b in beta):
        return False
    transition = ContMap(rs.space, carrier.space, tuple(carrier.index[b] for b in beta))
    if not transition.is_continuous():
        return False
    left_gamma, right_gamma = relation.left.coalgebra.gamma, relation.right.coalgebra.gamma
    return all(
        functor.element_map(rs.left_projection, b) == left_gamma[i]
        and functor.element_map(rs.right_projection, b) == right_gamma[j]
        for b, (i, j) in zip(beta, rs.pairs)
    )


@dataclass
class AMSearch:
    """
    Attributes:
        status: ``found``, ``none`` after exhausting the search, or ``bound``
        beta: The transition found, one carrier element per pair
        nodes: Search nodes visited
    """

    status: str
    beta: Optional[Tuple] = None
    nodes: int = 0
    space: Optional[FinSpace] = field(default=None, repr=False)

    @property
    def found(self) -> bool:
        return self.status == "found"

    def as_dict(self, relation: Relation) -> dict:
        body: Dict[str, object] = {"status": self.status, "nodes": self.nodes}
        if self.beta is not None:
            functor = relation.left.functor
            body["beta"] = {
                self.space.points[k]: functor.encode(self.space, b) for k, b in enumerate(self.beta)
            }
        return body


def search_am_transition(relation: Relation, max_nodes: Optional[int] = None) -> AMSearch:
    """
    Backtracking search for an Aczel–Mendler transition on ``relation``.

    Candidates for each pair are the carrier elements whose projections
    hit both successors; continuity is enforced between assigned pairs.
    """
    _check_models(relation.left, relation.right)
    budget = limit("AM_SEARCH_NODES", max_nodes)
    rs = relation_space(relation)
    functor = relation.left.functor
    carrier = functor.carrier(rs.space)
    left_gamma, right_gamma = relation.left.coalgebra.gamma, relation.right.coalgebra.gamma

    candidates: List[List[int]] = []
    for i, j in rs.pairs:
        candidates.append(
            [
                k
                for k, element in enumerate(carrier.elements)
                if functor.element_map(rs.left_projection, element) == left_gamma[i]
                and functor.element_map(rs.right_projection, element) == right_gamma[j]
            ]
        )
    size = rs.space.size
    if any(not options for options in candidates):
        logger.info("Aczel-Mendler search: some pair has no candidate successor")
        return AMSearch("none", space=rs.space)

    order = sorted(range(size), key=lambda k: len(candidates[k]))
    chosen: Dict[int, int] = {}
    nodes = 0
    nbhd, target_nbhd = rs.space.nbhd, carrier.space.nbhd

    def consistent(point: int, position: int) -> bool:
        for other, other_position in chosen.items():
            if nbhd[point] >> other & 1 and not target_nbhd[position] >> other_position & 1:
                return False
            if nbhd[other] >> point & 1 and not target_nbhd[other_position] >> position & 1:
                return False
        return True

    def extend(depth: int) -> Optional[bool]:
        nonlocal nodes
        if depth == size:
            return True
        point = order[depth]
        for position in candidates[point]:
            nodes += 1
            if nodes > budget:
                return None
            if not consistent(point, position):
                continue
            chosen[point] = position
            outcome = extend(depth + 1)
            if outcome is not False:
                return outcome
            del chosen[point]
        return False

    outcome = extend(0)
    if outcome is None:
        logger.warning(f"Aczel-Mendler search hit the node bound of {budget}")
        return AMSearch("bound", nodes=nodes, space=rs.space)
    if not outcome:
        logger.info(f"Aczel-Mendler search exhausted after {nodes} nodes")
        return AMSearch("none", nodes=nodes, space=rs.space)
    beta = tuple(carrier.elements[chosen[k]] for k in range(size))
    return AMSearch("found", beta, nodes, rs.space)


def graph_relation(f: ContMap, left: GeomModel, right: GeomModel) -> Relation:
    """The graph of a map between the models' spaces."""
    return Relation(left, right, frozenset((i, f(i)) for i in range(left.space.size)))
