import pytest
from hypothesis import given, settings, strategies as st

from domino_cylinders.disk import DiskError, QuadDisk, is_trivial_rectangle, parse_disk, rectangle, symmetric_images
from domino_cylinders.fixtures import UNTILEABLE_REGION, untileable_region
from domino_cylinders.floors import tilings_of_planar_region


def test_two_by_two_is_trivial_and_balanced():
    d = parse_disk("##\n##\n")
    assert d.balanced and not d.nontrivial and d.is_disk


def test_untileable_region_flags():
    d = untileable_region()
    assert d.balanced and d.nontrivial and d.is_disk
    assert tilings_of_planar_region(d) == []


def test_disconnected_input_is_rejected():
    with pytest.raises(DiskError):
        parse_disk("#.#\n")


def test_holes_and_pinches_are_not_disks():
    ring = parse_disk("###\n#.#\n###\n")
    assert ring.is_connected and not ring.is_disk
    with pytest.raises(DiskError):
        parse_disk("#.\n.#\n")


def test_text_round_trip():
    assert parse_disk(UNTILEABLE_REGION).to_text() == UNTILEABLE_REGION + "\n"


def test_row_major_indexing():
    d = rectangle(3, 2)
    assert [(s.x, s.y) for s in d.squares] == [(0, 1), (1, 1), (2, 1), (0, 0), (1, 0), (2, 0)]


@settings(max_examples=200, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=14))
def test_balanced_flag_matches_colour_count(cells):
    try:
        d = QuadDisk.from_squares(cells)
    except DiskError:
        return
    black = sum(1 for x, y in cells if (x + y) % 2 == 0)
    assert d.balanced == (2 * black == len(cells))


@pytest.mark.parametrize("w,h", [(w, h) for w in range(1, 6) for h in range(1, 6)])
def test_rectangle_classification(w, h):
    d = rectangle(w, h)
    assert is_trivial_rectangle(w, h) == (min(w, h) <= 1 or w == h == 2)
    if w * h % 2 == 0:
        assert (not d.nontrivial) == is_trivial_rectangle(w, h)


def test_square_symmetries_are_permutations():
    d = rectangle(3, 3)
    images = symmetric_images(d)
    assert len(images) == 8
    for _, perm in images:
        assert sorted(perm) == list(range(9))
