"""
Test factories for spaces, coalgebras and models using factory_boy.
"""
import factory

from apps.coalgebra.services.functors import Coalgebra, GeomModel, get_functor
from apps.topology.services.finspace import FinSpace


class SpaceFactory(factory.Factory):
    """Factory for finite spaces, discrete on two points by default."""

    class Meta:
        model = FinSpace

    points = ("x0", "x1")
    nbhd = factory.LazyAttribute(lambda o: tuple(1 << i for i in range(len(o.points))))

    class Params:
        sierpinski = factory.Trait(points=("0", "1"), nbhd=(0b11, 0b10))
        singleton = factory.Trait(points=("x",), nbhd=(1,))


class CoalgebraFactory(factory.Factory):
    """Factory for coalgebras; every point steps to the carrier element 0."""

    class Meta:
        model = Coalgebra

    space = factory.SubFactory(SpaceFactory)
    functor = factory.LazyFunction(lambda: get_functor("kripke"))
    gamma = factory.LazyAttribute(lambda o: tuple(0 for _ in o.space.points))


class ModelFactory(factory.Factory):
    """Factory for geometric models with one letter true everywhere."""

    class Meta:
        model = GeomModel

    coalgebra = factory.SubFactory(CoalgebraFactory)
    valuation = factory.LazyAttribute(lambda o: {"p": o.coalgebra.space.full})
