"""
Tests for the topological lift of Set functors with predicate liftings.
"""

import random

import pytest
from django.core.cache import caches

from apps.coalgebra.services.functors import get_functor, set_functor
from apps.coalgebra.services.kkplift import (
    KKPFunctor,
    agreement_map,
    check_agreement_naturality,
    check_lift_theorems,
    fdot_frame,
    fhat_frame,
    kkp_functor,
    kkp_map,
    kkp_space,
    lift_lifting,
    set_lifting,
)
from apps.core.cache import CACHE_ALIAS
from apps.core.exceptions import UnknownIdentifierError
from apps.topology.services.enumeration import (
    discrete_spaces_up_to,
    random_continuous_map,
    spaces_up_to,
)
from apps.topology.services.finspace import (
    ContMap,
    continuous_maps,
    discrete_space,
    point_space,
    sierpinski_space,
)


@pytest.fixture
def powerset_lift():
    return kkp_functor("powerset", ("box", "dia"))


@pytest.fixture
def monotone_lift():
    return kkp_functor("monotone", ("box", "dia"))


def _liftings(base, names):
    return [set_lifting(base, name) for name in names]


class TestFdotFrame:
    """Tests for fdot_frame."""

    def test_powerset_on_point(self):
        frame = fdot_frame(set_functor("powerset"), _liftings("powerset", ["box", "dia"]), point_space())
        assert frame.size == 4

    def test_monotone_on_point(self):
        frame = fdot_frame(set_functor("monotone"), _liftings("monotone", ["box", "dia"]), point_space())
        assert frame.size == 8

    def test_no_liftings(self):
        frame = fdot_frame(set_functor("powerset"), [], discrete_space(["a", "b"]))
        assert frame.size == 2


class TestFhatFrame:
    """Tests for fhat_frame."""

    def test_congruence_is_trivial(self):
        base = set_functor("powerset")
        liftings = _liftings("powerset", ["box", "dia"])
        for space in spaces_up_to(2):
            report = fhat_frame(base, liftings, space)
            assert report.trivial
            assert report.frame == fdot_frame(base, liftings, space)

    def test_powerset_on_point_unchanged(self):
        report = fhat_frame(set_functor("powerset"), _liftings("powerset", ["box", "dia"]), point_space())
        assert report.frame.size == 4
        assert report.instances > 0

    def test_non_monotone_lifting_skipped(self):
        report = fhat_frame(
            set_functor("powerset"), _liftings("powerset", ["box", "nbox"]), point_space()
        )
        assert report.skipped == ["nbox"]


class TestLiftedSpaces:
    """Tests for kkp_space and kkp_map."""

    def test_powerset_on_discrete_two_points(self, powerset_lift):
        space = kkp_space(powerset_lift, discrete_space(["a", "b"]))
        assert space.size == 4
        assert space.is_discrete

    def test_monotone_on_point(self, monotone_lift):
        assert kkp_space(monotone_lift, point_space()).size == 3

    def test_monotone_on_discrete_two_points(self, monotone_lift):
        assert kkp_space(monotone_lift, discrete_space(["a", "b"])).size == 6

    def test_no_liftings_gives_single_point(self):
        lift = kkp_functor("powerset", ())
        report = check_lift_theorems(lift, sierpinski_space())
        assert report.points == 1
        assert report.characteristic

    def test_identity_and_composition(self, powerset_lift):
        spaces = list(spaces_up_to(2))
        for space in spaces:
            mapped = kkp_map(powerset_lift, ContMap.identity(space))
            assert mapped.assignment == tuple(range(mapped.source.size))
        rng = random.Random(5)
        for _ in range(30):
            x, y, z = rng.choice(spaces), rng.choice(spaces), rng.choice(spaces)
            f = random_continuous_map(rng, x, y)
            g = random_continuous_map(rng, y, z)
            if f is None or g is None:
                continue
            composite = kkp_map(powerset_lift, f.then(g))
            assert composite == kkp_map(powerset_lift, f).then(kkp_map(powerset_lift, g))

    def test_preimage_homs_share_the_bounded_cache(self, powerset_lift, mocker):
        """Test equal maps reuse one entry of the geomodal cache."""
        caches[CACHE_ALIAS].clear()
        build = mocker.spy(powerset_lift, "_build_preimage_hom")
        space = discrete_space(["a", "b"])
        first = powerset_lift.preimage_hom(ContMap(space, point_space(), (0, 0)))
        second = powerset_lift.preimage_hom(ContMap(discrete_space(["a", "b"]), point_space(), (0, 0)))
        assert first == second
        assert build.call_count == 1
        powerset_lift.preimage_hom(ContMap(space, space, (1, 0)))
        assert build.call_count == 2

    def test_registry_identifier(self):
        functor = get_functor("kkp:monotone:box,dia")
        assert isinstance(functor, KKPFunctor)
        assert functor is kkp_functor("monotone", ("box", "dia"))

    @pytest.mark.parametrize("identifier", ["kkp:powerset:box,halo", "kkp:giry:box", "kkp:powerset"])
    def test_unknown_identifiers(self, identifier):
        with pytest.raises(UnknownIdentifierError):
            get_functor(identifier)


class TestLiftedLiftings:
    """Tests for lift_lifting."""

    def test_monotone_box_on_point(self, monotone_lift):
        space = point_space()
        cell = lift_lifting(monotone_lift, "box")(space, (space.full,))
        assert bin(cell).count("1") == 2

    def test_box_at_top_is_everything(self, powerset_lift):
        space = discrete_space(["a", "b"])
        cell = lift_lifting(powerset_lift, "box")(space, (space.full,))
        assert cell == (1 << powerset_lift.carrier(space).size) - 1

    def test_powerset_box_matches_vietoris_box(self, powerset_lift):
        space = discrete_space(["a", "b"])
        report = agreement_map(powerset_lift, space)
        a = space.mask_of(["a"])
        lifted = lift_lifting(powerset_lift, "box")(space, (a,))
        vietoris = get_functor("vietoris").carrier(space)
        expected = vietoris.select(lambda b: b & ~a == 0)
        assert report.homeomorphism.image(lifted) == expected


class TestLiftTheorems:
    """Tests for check_lift_theorems."""

    def test_powerset_on_small_spaces(self, powerset_lift):
        for space in spaces_up_to(2):
            assert check_lift_theorems(powerset_lift, space).confirmed

    @pytest.mark.slow
    def test_powerset_on_three_points(self, powerset_lift):
        for space in spaces_up_to(3):
            assert check_lift_theorems(powerset_lift, space).confirmed

    def test_monotone_on_small_spaces(self, monotone_lift):
        for space in spaces_up_to(2):
            assert check_lift_theorems(monotone_lift, space).confirmed


class TestAgreement:
    """Agreement of the lift with the Vietoris and D_kh functors."""

    def test_powerset_lift_is_vietoris(self, powerset_lift):
        for space in discrete_spaces_up_to(3):
            report = agreement_map(powerset_lift, space)
            assert report.verdict
            assert report.canonical

    def test_monotone_lift_is_dkh(self, monotone_lift):
        for space in discrete_spaces_up_to(2):
            report = agreement_map(monotone_lift, space)
            assert report.verdict
            assert report.canonical

    def test_non_discrete_spaces_have_no_verdict(self, powerset_lift):
        assert agreement_map(powerset_lift, sierpinski_space()).verdict is None

    @pytest.mark.parametrize("base", ["powerset", "monotone"])
    def test_agreement_commutes_with_maps(self, base):
        functor = kkp_functor(base, ("box", "dia"))
        for source in discrete_spaces_up_to(2):
            for target in discrete_spaces_up_to(2):
                for f in continuous_maps(source, target):
                    assert check_agreement_naturality(functor, f)
