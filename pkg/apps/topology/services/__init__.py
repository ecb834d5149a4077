"""
Finite spaces, frames and presentations.
"""

from apps.topology.services.finspace import (
    ContMap,
    FinFrame,
    FinSpace,
    FrameHom,
    FramePoints,
    Sobrification,
    boolean_frame,
    chain_frame,
    check_continuous,
    discrete_space,
    find_frame_isomorphism,
    find_homeomorphism,
    frame_points,
    make_space,
    opn_frame,
    opn_map,
    point_space,
    sierpinski_space,
    sobrify,
    two_frame,
    two_trivial_space,
)
from apps.topology.services.framealg import (
    IsoReport,
    Presentation,
    PresentationPoints,
    PresentedFrame,
    compare_presentations,
    is_regular_element,
    is_regular_frame,
    negation,
    present_M,
    present_Mprime,
    presentation_points,
    presented_frame_small,
    well_inside,
)

__all__ = [
    "ContMap",
    "FinFrame",
    "FinSpace",
    "FrameHom",
    "FramePoints",
    "IsoReport",
    "Presentation",
    "PresentationPoints",
    "PresentedFrame",
    "Sobrification",
    "boolean_frame",
    "chain_frame",
    "check_continuous",
    "compare_presentations",
    "discrete_space",
    "find_frame_isomorphism",
    "find_homeomorphism",
    "frame_points",
    "is_regular_element",
    "is_regular_frame",
    "make_space",
    "negation",
    "opn_frame",
    "opn_map",
    "point_space",
    "present_M",
    "present_Mprime",
    "presentation_points",
    "presented_frame_small",
    "sierpinski_space",
    "sobrify",
    "two_frame",
    "two_trivial_space",
    "well_inside",
]
