"""
Small-model enumeration for sweeps and tests.

Topologies on a finite point set correspond to preorders, so every topology
on ``n`` points is produced by choosing a minimal neighbourhood per point and
keeping the transitive choices.
"""

import logging
import random
from itertools import product
from typing import Iterator, List, Optional, Sequence

from apps.core.conf import enforce
from apps.core.exceptions import ResourceBoundError
from apps.topology.services.finspace import (
    ContMap,
    FinFrame,
    FinSpace,
    bits,
    continuous_maps,
    find_frame_isomorphism,
    find_homeomorphism,
    frame_from_order,
    opn_frame,
    space_from_subbase_masks,
)

logger = logging.getLogger(__name__)


def default_points(n: int) -> List[str]:
    return [f"x{i}" for i in range(n)]


def all_topologies(
    n: int, points: Optional[Sequence[str]] = None, up_to_homeomorphism: bool = False
) -> List[FinSpace]:
    """
    Every topology on ``n`` labelled points.

    With ``up_to_homeomorphism`` only one representative per class is kept.
    """
    enforce("MAX_POINTS", n, "Points per enumerated space")
    names = tuple(points) if points is not None else tuple(default_points(n))
    choices = [
        [mask for mask in range(1 << n) if mask >> i & 1] for i in range(n)
    ]
    found: List[FinSpace] = []
    for nbhd in product(*choices):
        if all(nbhd[j] & ~nbhd[i] == 0 for i in range(n) for j in bits(nbhd[i])):
            space = FinSpace(names, tuple(nbhd))
            if up_to_homeomorphism and any(
                find_homeomorphism(space, seen) is not None for seen in found
            ):
                continue
            found.append(space)
    logger.debug(f"Enumerated {len(found)} topologies on {n} points")
    return found


def spaces_up_to(max_points: int, up_to_homeomorphism: bool = True) -> Iterator[FinSpace]:
    for n in range(max_points + 1):
        yield from all_topologies(n, up_to_homeomorphism=up_to_homeomorphism)


def discrete_spaces_up_to(max_points: int) -> Iterator[FinSpace]:
    for n in range(max_points + 1):
        names = tuple(default_points(n))
        yield FinSpace(names, tuple(1 << i for i in range(n)))


def random_subbase_space(rng: random.Random, n: int, members: int = 3) -> FinSpace:
    """Topology generated by ``members`` random subsets of ``n`` points."""
    subbase = [rng.randrange(1 << n) for _ in range(members)] if n else []
    return space_from_subbase_masks(default_points(n), subbase)


def random_continuous_map(
    rng: random.Random, source: FinSpace, target: FinSpace
) -> Optional[ContMap]:
    """A uniformly chosen continuous map, or ``None`` when there is none."""
    candidates = list(continuous_maps(source, target))
    return rng.choice(candidates) if candidates else None


def all_frames(max_elements: int) -> Iterator[FinFrame]:
    """
    Finite frames with at most ``max_elements`` elements, up to isomorphism.

    Every finite distributive lattice is the open-set frame of a finite T0
    space, and a T0 space on n points has at least n + 1 opens with equality
    only for chains. Spaces up to four points plus the chains therefore cover
    every frame with at most six elements.
    """
    if max_elements > 6:
        raise ResourceBoundError(
            "Frame enumeration is only complete up to six elements", bound=6, value=max_elements
        )
    seen: List[FinFrame] = []
    candidates = [
        opn_frame(space)
        for n in range(min(max_elements, 5))
        for space in all_topologies(n, up_to_homeomorphism=True)
        if space.is_t0
    ]
    candidates.extend(chain_frames(max_elements))
    for frame in sorted(candidates, key=lambda f: f.size):
        if frame.size > max_elements:
            continue
        if any(find_frame_isomorphism(frame, other) is not None for other in seen):
            continue
        seen.append(frame)
        yield frame


def chain_frames(max_elements: int) -> List[FinFrame]:
    return [
        frame_from_order(list(range(k)), lambda a, b: a <= b, validate=False)
        for k in range(1, max_elements + 1)
    ]
