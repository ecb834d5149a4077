"""
Pytest configuration and shared fixtures for geomodal tests.
"""

import pytest
from django.core.cache import caches


@pytest.fixture
def vietoris_example_model():
    """
    V_kh model on the discrete space {x, y}.

    γ(x) = {x, y}, γ(y) = ∅ and p holds at x only.
    """
    from apps.coalgebra.services.functors import get_functor, make_model
    from apps.topology.services.finspace import discrete_space

    space = discrete_space(["x", "y"])
    return make_model(space, get_functor("vietoris"), [0b11, 0b00], {"p": 0b01})


@pytest.fixture
def monotone_split_models():
    """
    Two monotone models with a Λ-bisimulation that has no Aczel–Mendler transition.

    The left root s has γ(s) = ↑{{p}, {q}}, the right root s′ has
    γ′(s′) = ↑{{r1, r2}}; every other point steps to the empty collection.
    The relation {(s,s′), (p,r1), (p,r2), (q,r2)} is a Λ-bisimulation for
    box and dia, but any β would have to contain {(q,r2)} and so would
    project {r2} into the right successor.
    """
    from apps.coalgebra.services.duality import up_collection
    from apps.coalgebra.services.functors import get_functor, make_model
    from apps.topology.services.finspace import discrete_space

    monotone = get_functor("monotone")
    left_space = discrete_space(["s", "p", "q"])
    right_space = discrete_space(["s'", "r1", "r2"])
    left = make_model(
        left_space,
        monotone,
        [up_collection(left_space, [0b010, 0b100]), 0, 0],
    )
    right = make_model(
        right_space,
        monotone,
        [up_collection(right_space, [0b110]), 0, 0],
    )
    return left, right


@pytest.fixture
def clear_geomodal_cache():
    """Empty the carrier cache before and after a test."""
    caches["geomodal"].clear()
    yield
    caches["geomodal"].clear()
