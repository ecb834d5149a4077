"""
Tests for behavioural equivalence and the equivalence comparison.
"""

import random

import pytest

from apps.bisim.services.equivalence import behavioural_equiv, compare_equivalences
from apps.bisim.tests.test_relations import random_model
from apps.coalgebra.services.duality import up_collection
from apps.coalgebra.services.functors import get_functor, make_model
from apps.coalgebra.services.liftings import builtin_lifting
from apps.core.exceptions import InvalidInputError, ResourceBoundError
from apps.topology.services.finspace import FinSpace, discrete_space


class TestBehaviouralEquiv:
    """Tests for behavioural_equiv."""

    def test_mirror_point(self, vietoris_example_model):
        model = vietoris_example_model
        verdict = behavioural_equiv(model, "x", model, "x")
        assert verdict.equivalent is True
        assert verdict.determinate
        assert verdict.as_dict()["witness"] == [{"x": "[m0.x]", "y": "[m0.y]"}] * 2

    def test_different_letters(self, vietoris_example_model):
        model = vietoris_example_model
        assert behavioural_equiv(model, "x", model, "y").equivalent is False

    def test_unknown_point(self, vietoris_example_model):
        with pytest.raises(InvalidInputError):
            behavioural_equiv(vietoris_example_model, "z", vietoris_example_model, "x")

    def test_indeterminate_when_quotient_fails(self):
        space = discrete_space(["x", "y"])
        below_x = up_collection(space, [0b01])
        model = make_model(space, get_functor("dkh"), [below_x, below_x], {"p": 0b01})
        verdict = behavioural_equiv(model, "x", model, "y")
        assert verdict.equivalent is None
        assert verdict.as_dict()["counterexamples"]


class TestCompareEquivalences:
    """Tests for compare_equivalences."""

    def test_example_model_with_itself(self, vietoris_example_model):
        model = vietoris_example_model
        report = compare_equivalences(model, model)
        identity = frozenset({(0, 0), (1, 1)})
        assert report.lambda_bisimilar == identity
        assert report.modally_equivalent == identity
        assert report.behaviourally_equivalent == identity
        assert report.am_bisimilar == identity
        assert report.coincide is True
        assert report.violations == []

    def test_split_models_exceed_the_carrier_bound(self, monotone_split_models):
        """Test the six-point union of the split models is refused, not computed."""
        left, right = monotone_split_models
        with pytest.raises(ResourceBoundError) as exc_info:
            compare_equivalences(left, right, seed=3)
        assert exc_info.value.details["limit"] == "DKH_MAX_POINTS"
        assert exc_info.value.details["value"] == 6

    def test_small_monotone_models(self):
        """Test two-point monotone models whose union fits the carrier bound."""
        monotone = get_functor("monotone")
        space = discrete_space(["a", "b"])
        left = make_model(space, monotone, [up_collection(space, [0b01]), 0], {"p": 0b01})
        report = compare_equivalences(left, left, seed=3)
        assert report.violations == []
        assert report.lambda_bisimilar == frozenset({(0, 0), (1, 1)})
        assert report.lambda_bisimilar == report.modally_equivalent

    def test_box_alone_is_not_characteristic(self, vietoris_example_model):
        model = vietoris_example_model
        report = compare_equivalences(model, model, {"box": builtin_lifting("vietoris", "box")})
        assert report.hypotheses.characteristic is False
        assert not report.hypotheses.all_hold
        assert report.as_dict()["hypotheses"]["characteristic"] is False

    def test_empty_models(self):
        empty = make_model(FinSpace((), ()), get_functor("kripke"), [])
        report = compare_equivalences(empty, empty)
        assert report.lambda_bisimilar == frozenset()
        assert report.coincide is True

    def test_functor_mismatch(self, vietoris_example_model, monotone_split_models):
        with pytest.raises(InvalidInputError):
            compare_equivalences(vietoris_example_model, monotone_split_models[0])

    def test_report_is_seeded(self):
        rng = random.Random(8)
        left, right = random_model(rng, "kripke"), random_model(rng, "kripke")
        first = compare_equivalences(left, right, seed=4).as_dict()
        second = compare_equivalences(left, right, seed=4).as_dict()
        assert first == second

    def test_inclusions_on_random_kripke_models(self):
        rng = random.Random(31)
        for _ in range(25):
            left, right = random_model(rng, "kripke"), random_model(rng, "kripke")
            report = compare_equivalences(left, right, seed=rng.randrange(1000), samples=2)
            assert report.am_bisimilar <= report.lambda_bisimilar
            assert report.lambda_bisimilar <= report.modally_equivalent
            assert report.violations == []

    @pytest.mark.slow
    @pytest.mark.parametrize("size", [1, 2])
    def test_dkh_random_models(self, size):
        rng = random.Random(size)
        for _ in range(10):
            left = random_model(rng, "dkh", size)
            right = random_model(rng, "dkh", rng.randint(1, size))
            report = compare_equivalences(left, right, seed=size, samples=2)
            assert report.violations == [], report.violations
            assert report.lambda_bisimilar <= report.modally_equivalent
            if report.behaviourally_equivalent is not None and report.hypotheses.all_hold:
                assert report.coincide
