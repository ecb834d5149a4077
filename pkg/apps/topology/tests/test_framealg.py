"""
Tests for frame algebra and presentations.
"""

import pytest

from apps.core.exceptions import ResourceBoundError, UnknownIdentifierError
from apps.topology.services.enumeration import all_frames
from apps.topology.services.finspace import (
    boolean_frame,
    chain_frame,
    find_frame_isomorphism,
    find_homeomorphism,
    opn_frame,
    sierpinski_space,
    two_frame,
)
from apps.topology.services.framealg import (
    TOP_TERM,
    Gen,
    Presentation,
    Relation,
    check_m_preserves_regularity,
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


@pytest.fixture
def boolean4():
    return boolean_frame(["x", "y"])


@pytest.fixture
def sierpinski_frame():
    return opn_frame(sierpinski_space())


class TestNegationAndWellInside:
    """Tests for negation, well_inside and regularity."""

    def test_negation_of_atom(self, boolean4):
        x = boolean4.label_index["{x}"]
        assert boolean4.labels[negation(boolean4, x)] == "{y}"

    def test_negation_of_bottom_is_top(self, sierpinski_frame):
        assert negation(sierpinski_frame, sierpinski_frame.bottom) == sierpinski_frame.top

    def test_negation_in_sierpinski(self, sierpinski_frame):
        one = sierpinski_frame.label_index["{1}"]
        assert negation(sierpinski_frame, one) == sierpinski_frame.bottom

    def test_boolean_elements_are_well_inside_themselves(self, boolean4):
        assert all(well_inside(boolean4, a, a) for a in range(boolean4.size))

    def test_open_point_not_well_inside_itself(self, sierpinski_frame):
        one = sierpinski_frame.label_index["{1}"]
        assert not well_inside(sierpinski_frame, one, one)

    def test_bottom_is_well_inside_everything(self, sierpinski_frame):
        bottom = sierpinski_frame.bottom
        assert all(well_inside(sierpinski_frame, bottom, b) for b in range(3))

    def test_regularity(self, boolean4, sierpinski_frame):
        assert is_regular_frame(boolean4)
        assert is_regular_frame(two_frame())
        assert not is_regular_frame(sierpinski_frame)
        assert not is_regular_element(sierpinski_frame, sierpinski_frame.label_index["{1}"])

    def test_criteria_agree_on_all_small_frames(self):
        for frame in all_frames(6):
            for a in range(frame.size):
                for b in range(frame.size):
                    well_inside(frame, a, b)

    def test_regular_elements_closed_under_meet_and_join(self):
        for frame in all_frames(6):
            regular = [a for a in range(frame.size) if is_regular_element(frame, a)]
            for a in regular:
                for b in regular:
                    assert is_regular_element(frame, frame.join(a, b))
                    assert is_regular_element(frame, frame.meet(a, b))


class TestPresentM:
    """Tests for the M presentation."""

    def test_two_element_frame_generators(self):
        presentation = present_M(two_frame())
        assert presentation.generators == ("box[0]", "box[1]", "dia[0]", "dia[1]")

    def test_two_element_frame_m2_and_m5_instances(self):
        presentation = present_M(two_frame())
        assert presentation.count("M2") == 3
        assert presentation.count("M5") == 3

    def test_trivial_frame(self):
        presentation = present_M(chain_frame(1))
        assert len(presentation.generators) == 2
        assert presentation.count("M2") == 1
        assert presentation.count("M5") == 1

    def test_directed_instances_only_with_flag(self):
        assert present_M(two_frame()).count("M3") == 0
        assert present_M(two_frame(), directed=True).count("M3") == 3

    def test_directed_instances_are_redundant(self):
        for frame in all_frames(4):
            plain = presentation_points(present_M(frame)).space
            full = presentation_points(present_M(frame, directed=True)).space
            assert plain == full


class TestPresentMprime:
    """Tests for the M' presentation."""

    def test_two_element_frame_has_sixteen_generators(self):
        assert len(present_Mprime(two_frame()).generators) == 16

    def test_empty_pair_is_bottom(self):
        points = presentation_points(present_Mprime(two_frame()))
        assert points.cell("({},{})") == 0

    def test_m5_instance_at_top(self):
        presentation = present_Mprime(two_frame())
        assert Relation(TOP_TERM, "leq", Gen("({1},{1})"), "M'5") in presentation.relations


class TestPresentationPoints:
    """Tests for presentation_points."""

    def test_m_of_two_element_frame_has_three_points(self):
        assert presentation_points(present_M(two_frame())).space.size == 3

    def test_free_frame_on_one_generator(self):
        points = presentation_points(Presentation(("g",), ()))
        assert find_homeomorphism(points.space, sierpinski_space()) is not None

    def test_generator_equal_to_top(self):
        presentation = Presentation(("g",), (Relation(Gen("g"), "eq", TOP_TERM),))
        assert presentation_points(presentation).space.size == 1

    def test_generator_bound(self):
        presentation = Presentation(tuple(f"g{i}" for i in range(3)), ())
        with pytest.raises(ResourceBoundError):
            presentation_points(presentation, max_generators=2)

    def test_unknown_generator_rejected(self):
        with pytest.raises(UnknownIdentifierError):
            Presentation(("g",), (Relation(Gen("h"), "leq", Gen("g")),))


class TestPresentedFrame:
    """Tests for presented_frame_small."""

    def test_m_of_two_element_frame_is_boolean_eight(self):
        presentation = present_M(two_frame())
        presented = presented_frame_small(presentation)
        assert presented.frame.size == 8
        spatial = opn_frame(presentation_points(presentation).space)
        assert find_frame_isomorphism(presented.frame, spatial) is not None

    def test_free_on_one_generator_is_three_chain(self):
        presented = presented_frame_small(Presentation(("g",), ()))
        assert find_frame_isomorphism(presented.frame, chain_frame(3)) is not None

    def test_collapsing_two_generators(self):
        presentation = Presentation(("g1", "g2"), (Relation(Gen("g1"), "eq", Gen("g2")),))
        presented = presented_frame_small(presentation)
        assert find_frame_isomorphism(presented.frame, chain_frame(3)) is not None
        assert presented.generator_elements["g1"] == presented.generator_elements["g2"]

    def test_bound_exceeded(self):
        presentation = Presentation(tuple(f"g{i}" for i in range(6)), ())
        with pytest.raises(ResourceBoundError):
            presented_frame_small(presentation)

    def test_presented_frame_is_spatial(self):
        presentations = [
            Presentation(("a", "b"), (Relation(Gen("a"), "leq", Gen("b")),)),
            present_M(chain_frame(1)),
            present_M(two_frame()),
        ]
        for presentation in presentations:
            presented = presented_frame_small(presentation).frame
            spatial = opn_frame(presentation_points(presentation).space)
            assert find_frame_isomorphism(presented, spatial) is not None


class TestComparePresentations:
    """Tests for M versus M'."""

    def test_m_and_mprime_agree_on_two_element_frame(self):
        report = compare_presentations(present_M(two_frame()), present_Mprime(two_frame()))
        assert report.isomorphic
        assert report.left_points == report.right_points == 3

    @pytest.mark.slow
    def test_m_and_mprime_agree_on_frames_up_to_three_elements(self):
        for size in (1, 2, 3):
            frame = chain_frame(size)
            report = compare_presentations(
                present_M(frame), present_Mprime(frame), max_generators=64
            )
            assert report.isomorphic, frame.labels

    def test_m_preserves_regularity(self, boolean4):
        assert check_m_preserves_regularity(boolean4) == {
            "frame_regular": True,
            "m_regular": True,
        }
