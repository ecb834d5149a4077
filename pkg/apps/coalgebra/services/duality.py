"""
The monotone duality: points of M(opn X) against D_kh X.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

from apps.coalgebra.services.functors import dkh_functor
from apps.coalgebra.services.liftings import builtin_lifting
from apps.topology.services.finspace import (
    ContMap,
    FinSpace,
    opn_frame,
    opn_map,
)
from apps.topology.services.framealg import m_generator, present_M, presentation_points

logger = logging.getLogger(__name__)


@dataclass
class DualityReport:
    """
    Attributes:
        carrier_size: Number of elements of D_kh X
        points: Number of points of M(opn X)
        zeta: The map p ↦ W_p, when every W_p lies in the carrier
        zeta_homeomorphism: Whether ζ is a homeomorphism
        generators_match: Whether ζ sends the cells of □a / ◇a to ⊡̄a / ⟋a
        eta_isomorphism: Whether the induced map on open-set frames is an isomorphism
    """

    carrier_size: int
    points: int
    zeta: Optional[ContMap]
    zeta_homeomorphism: bool
    generators_match: bool
    eta_isomorphism: bool

    @property
    def holds(self) -> bool:
        return self.zeta_homeomorphism and self.generators_match and self.eta_isomorphism

    def as_dict(self) -> Dict[str, object]:
        return {
            "carrier_size": self.carrier_size,
            "points": self.points,
            "zeta_homeomorphism": self.zeta_homeomorphism,
            "generators_match": self.generators_match,
            "eta_isomorphism": self.eta_isomorphism,
            "zeta": self.zeta.as_names() if self.zeta is not None else None,
        }


def up_collection(space: FinSpace, seeds) -> int:
    """The collection of subsets containing some seed, as a bitmask over subsets."""
    collection = 0
    for u in range(1 << space.size):
        if any(seed & ~u == 0 for seed in seeds):
            collection |= 1 << u
    return collection


def check_monotone_duality(space: FinSpace) -> DualityReport:
    """
    Compare pt(M(opn X)) with D_kh X through ζ(p) = ↑{X∖a | p(◇a) = 0}.
    """
    frame = opn_frame(space)
    points = presentation_points(present_M(frame))
    functor = dkh_functor()
    carrier = functor.carrier(space)
    generators = points.presentation.generators
    dia = {a: generators.index(m_generator("dia", frame.labels[k])) for k, a in enumerate(frame.elements)}

    assignment = []
    for p in points.assignments:
        seeds = [space.full & ~a for a, g in dia.items() if not p >> g & 1]
        position = carrier.index.get(up_collection(space, seeds))
        if position is None:
            logger.warning(f"W_p for {points.space.label(p)} is not in D_kh")
            break
        assignment.append(position)
    else:
        zeta = ContMap(points.space, carrier.space, tuple(assignment))
        is_homeomorphism = zeta.is_homeomorphism()
        generators_match = is_homeomorphism and _cells_match(space, points, zeta)
        eta = is_homeomorphism and opn_map(zeta.inverse()).is_isomorphism()
        report = DualityReport(
            carrier.size, points.space.size, zeta, is_homeomorphism, generators_match, eta
        )
        logger.info(f"Monotone duality on {space.size} points: {report.as_dict()}")
        return report
    return DualityReport(carrier.size, points.space.size, None, False, False, False)


def _cells_match(space: FinSpace, points, zeta: ContMap) -> bool:
    frame = opn_frame(space)
    box = builtin_lifting("dkh", "box")
    dia = builtin_lifting("dkh", "dia")
    for k, a in enumerate(frame.elements):
        label = frame.labels[k]
        if zeta.image(points.cell(m_generator("box", label))) != box(space, (a,)):
            return False
        if zeta.image(points.cell(m_generator("dia", label))) != dia(space, (a,)):
            return False
    return True
