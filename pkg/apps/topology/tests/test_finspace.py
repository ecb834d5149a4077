"""
Tests for finite spaces, continuous maps, frames and the pt/opn fragment.
"""

import random

import pytest

from apps.core.exceptions import InvalidInputError
from apps.topology.services.enumeration import all_frames, all_topologies, random_continuous_map
from apps.topology.services.finspace import (
    ContMap,
    FrameHom,
    boolean_frame,
    chain_frame,
    check_continuous,
    discrete_space,
    find_frame_isomorphism,
    find_homeomorphism,
    frame_from_order,
    frame_points,
    make_space,
    opn_frame,
    opn_map,
    point_space,
    product_space,
    sierpinski_space,
    sobrify,
    space_from_opens,
    two_frame,
    two_trivial_space,
)


class TestMakeSpace:
    """Tests for building spaces from a subbase."""

    def test_singleton_has_only_trivial_opens(self):
        space = make_space(["x"], [])
        assert [space.names_of(o) for o in space.opens] == [[], ["x"]]

    def test_sierpinski_opens(self):
        space = make_space(["0", "1"], [["1"]])
        assert [space.names_of(o) for o in space.opens] == [[], ["1"], ["0", "1"]]

    def test_closure_under_union(self):
        space = make_space(["a", "b", "c"], [["a"], ["b"]])
        assert sorted(space.names_of(o) for o in space.opens) == sorted(
            [[], ["a"], ["b"], ["a", "b"], ["a", "b", "c"]]
        )

    def test_duplicate_point_rejected(self):
        with pytest.raises(InvalidInputError) as excinfo:
            make_space(["x", "x"], [])
        assert excinfo.value.details["point"] == "x"

    def test_unknown_subbase_point_rejected(self):
        with pytest.raises(InvalidInputError):
            make_space(["x"], [["y"]])

    def test_space_from_opens_validates_closure(self):
        with pytest.raises(InvalidInputError):
            space_from_opens(["a", "b", "c"], [0b000, 0b011, 0b110, 0b111])

    def test_space_from_opens_round_trip(self):
        space = space_from_opens(["a", "b", "c"], [0b000, 0b001, 0b011, 0b111])
        assert space.opens == (0b000, 0b001, 0b011, 0b111)

    def test_product_of_sierpinski_spaces(self):
        square = product_space([sierpinski_space(), sierpinski_space()])
        assert square.size == 4
        assert len(square.opens) == 6
        assert square.is_t0


class TestContinuity:
    """Tests for check_continuous."""

    def test_identity_on_sierpinski(self):
        assert check_continuous(ContMap.identity(sierpinski_space()))

    def test_constant_map_into_open_point(self):
        source = discrete_space(["0", "1"])
        f = ContMap.from_names(source, sierpinski_space(), {"0": "1", "1": "1"})
        assert check_continuous(f)

    def test_swap_on_sierpinski_is_not_continuous(self):
        space = sierpinski_space()
        swap = ContMap.from_names(space, space, {"0": "1", "1": "0"})
        assert not check_continuous(swap)

    def test_assignment_to_non_point_rejected(self):
        space = sierpinski_space()
        with pytest.raises(InvalidInputError):
            ContMap.from_names(space, space, {"0": "1", "1": "2"})

    def test_partial_assignment_rejected(self):
        space = sierpinski_space()
        with pytest.raises(InvalidInputError):
            ContMap.from_names(space, space, {"0": "1"})


class TestOpnFrame:
    """Tests for opn_frame and opn_map."""

    def test_point_space_gives_two_element_frame(self):
        assert opn_frame(point_space()).size == 2

    def test_sierpinski_gives_three_chain(self):
        frame = opn_frame(sierpinski_space())
        assert frame.labels == ("{}", "{1}", "{0,1}")
        assert frame.leq(0, 1) and frame.leq(1, 2)
        assert find_frame_isomorphism(frame, chain_frame(3)) is not None

    def test_opn_map_of_identity_is_identity(self):
        space = sierpinski_space()
        hom = opn_map(ContMap.identity(space))
        assert hom.assignment == tuple(range(hom.source.size))

    def test_opn_map_rejects_discontinuous_maps(self):
        space = sierpinski_space()
        swap = ContMap.from_names(space, space, {"0": "1", "1": "0"})
        with pytest.raises(InvalidInputError):
            opn_map(swap)

    def test_opn_map_is_functorial(self):
        rng = random.Random(11)
        spaces = [s for n in range(4) for s in all_topologies(n, up_to_homeomorphism=True)]
        for _ in range(60):
            x, y, z = rng.choice(spaces), rng.choice(spaces), rng.choice(spaces)
            f = random_continuous_map(rng, x, y)
            g = random_continuous_map(rng, y, z)
            if f is None or g is None:
                continue
            composite = opn_map(f.then(g))
            stepwise = opn_map(g).assignment
            expected = tuple(opn_map(f).assignment[k] for k in stepwise)
            assert composite.assignment == expected


class TestFrames:
    """Tests for frame construction and lattice operations."""

    def test_non_distributive_lattice_rejected(self):
        order = {("0", x) for x in "0abc1"} | {(x, "1") for x in "0abc1"}
        order |= {(x, x) for x in "0abc1"}
        with pytest.raises(InvalidInputError):
            frame_from_order(list("0abc1"), lambda p, q: (p, q) in order)

    def test_directed_join_is_maximum(self):
        frame = chain_frame(4)
        assert frame.directed_join([0, 2, 1]) == 2

    def test_directed_join_rejects_non_directed_family(self):
        frame = boolean_frame(["x", "y"])
        atoms = [frame.label_index["{x}"], frame.label_index["{y}"]]
        with pytest.raises(InvalidInputError):
            frame.directed_join(atoms)

    def test_identity_is_frame_hom(self):
        frame = boolean_frame(["x", "y"])
        assert FrameHom(frame, frame, tuple(range(frame.size))).is_frame_hom()


class TestFramePoints:
    """Tests for frame_points."""

    def test_two_element_frame_has_one_point(self):
        assert frame_points(two_frame()).space.size == 1

    def test_three_chain_gives_sierpinski(self):
        points = frame_points(chain_frame(3))
        assert points.space.size == 2
        assert find_homeomorphism(points.space, sierpinski_space()) is not None

    def test_boolean_frame_gives_discrete_space(self):
        points = frame_points(boolean_frame(["x", "y"]))
        assert points.space.size == 2
        assert points.space.is_discrete

    def test_brute_force_and_join_primes_agree(self):
        for frame in all_frames(6):
            brute = frame_points(frame, method="brute")
            prime = frame_points(frame, method="prime")
            assert brute.filters == prime.filters

    def test_every_point_open_is_a_tilde_set(self):
        for frame in all_frames(6):
            points = frame_points(frame)
            assert set(points.space.opens) <= set(points.tilde)

    def test_unknown_method_rejected(self):
        with pytest.raises(InvalidInputError):
            frame_points(two_frame(), method="guess")


class TestSobrify:
    """Tests for sobrify."""

    def test_sierpinski_is_sober(self):
        result = sobrify(sierpinski_space())
        assert result.is_sober
        assert result.unit.is_homeomorphism()

    def test_two_point_trivial_space_is_not_sober(self):
        result = sobrify(two_trivial_space())
        assert result.space.size == 1
        assert not result.is_sober

    def test_discrete_space_is_sober(self):
        result = sobrify(discrete_space(["a", "b", "c"]))
        assert result.is_sober
        assert result.space.is_discrete

    @pytest.mark.slow
    def test_unit_is_homeomorphism_exactly_for_t0_spaces(self):
        for n in range(5):
            for space in all_topologies(n, up_to_homeomorphism=True):
                result = sobrify(space)
                if space.is_t0:
                    assert result.unit.is_homeomorphism()
                else:
                    assert len(set(result.unit.assignment)) < space.size

    def test_round_trip_through_points(self):
        for n in range(4):
            for space in all_topologies(n, up_to_homeomorphism=True):
                if not space.is_t0:
                    continue
                frame = opn_frame(space)
                rebuilt = opn_frame(frame_points(frame).space)
                assert find_frame_isomorphism(rebuilt, frame) is not None
