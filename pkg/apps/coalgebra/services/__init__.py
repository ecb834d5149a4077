"""
Functors, coalgebras, predicate liftings and the topological lift.
"""

from apps.coalgebra.services.duality import DualityReport, check_monotone_duality
from apps.coalgebra.services.functors import (
    Carrier,
    Coalgebra,
    GeomModel,
    SetFunctor,
    TopFunctor,
    disjoint_union,
    dkh_functor,
    get_functor,
    is_coalg_morphism,
    is_finite_kh,
    is_model_morphism,
    make_model,
    set_functor,
    trivial_functor,
    vietoris_functor,
)
from apps.coalgebra.services.kkplift import (
    KKPFunctor,
    agreement_map,
    check_lift_theorems,
    fdot_frame,
    fhat_frame,
    kkp_functor,
    kkp_map,
    kkp_space,
    lift_lifting,
)
from apps.coalgebra.services.liftings import (
    OpenLifting,
    SierpinskiCode,
    StrongLifting,
    builtin_lifting,
    check_characteristic,
    check_monotone,
    check_naturality,
    check_scott,
    check_strong_openness,
    lifting_from_code,
    liftings_for,
    sierpinski_code,
    strong_extension,
)

__all__ = [
    "Carrier",
    "Coalgebra",
    "DualityReport",
    "GeomModel",
    "KKPFunctor",
    "OpenLifting",
    "SetFunctor",
    "SierpinskiCode",
    "StrongLifting",
    "TopFunctor",
    "agreement_map",
    "builtin_lifting",
    "check_characteristic",
    "check_lift_theorems",
    "check_monotone",
    "check_monotone_duality",
    "check_naturality",
    "check_scott",
    "check_strong_openness",
    "disjoint_union",
    "dkh_functor",
    "fdot_frame",
    "fhat_frame",
    "get_functor",
    "is_coalg_morphism",
    "is_finite_kh",
    "is_model_morphism",
    "kkp_functor",
    "kkp_map",
    "kkp_space",
    "lift_lifting",
    "lifting_from_code",
    "liftings_for",
    "make_model",
    "set_functor",
    "sierpinski_code",
    "strong_extension",
    "trivial_functor",
    "vietoris_functor",
]
