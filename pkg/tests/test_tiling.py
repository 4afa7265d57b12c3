from itertools import islice

import pytest

from domino_cylinders.disk import rectangle
from domino_cylinders.fixtures import extreme_pair, negative_box_tiling
from domino_cylinders.moves import enumerate_tilings
from domino_cylinders.tiling import (
    TilingError, concatenate, concatenate_all, invert, pad_vertical, parse_tiling, render_tiling,
    serialize_tiling, vertical_tiling,
)
from domino_cylinders.twist import twist


@pytest.fixture(scope="module")
def all_3x3x2(box33):
    return list(enumerate_tilings(box33, 2))


def test_vertical_tilings_compose(box33):
    v2 = vertical_tiling(box33, 0, 2)
    assert concatenate(v2, v2) == vertical_tiling(box33, 0, 4)


def test_extreme_pair_concatenates_to_twist_four():
    t0, t1 = extreme_pair()
    t = concatenate(t0, t1)
    assert t.height == 4 and twist(t) == 4


def test_junction_mismatch_is_rejected(box33):
    a = vertical_tiling(box33, 0, 2)
    b = vertical_tiling(box33, 1, 2)
    with pytest.raises(TilingError):
        concatenate(a, b)
    with pytest.raises(TilingError):
        concatenate(a, vertical_tiling(rectangle(2, 2), 0, 2))


def test_invert_vertical_is_vertical(box33):
    v = vertical_tiling(box33, 0, 6)
    assert invert(v) == v


def test_invert_negative_box_tiling():
    assert twist(invert(negative_box_tiling())) == 1


def test_invert_negates_every_3x3x2_twist(all_3x3x2):
    assert len(all_3x3x2) == 229
    for t in all_3x3x2:
        assert twist(invert(t)) == -twist(t)
        assert invert(invert(t)) == t


def test_concatenation_is_associative(all_3x3x2):
    a, b, c = all_3x3x2[3], all_3x3x2[100], all_3x3x2[228]
    assert concatenate(concatenate(a, b), c) == concatenate(a, concatenate(b, c))


def test_vertical_tiling_shape(box33):
    v = vertical_tiling(box33, 0, 2)
    assert v.height == 2 and v.matchings == (0, 0) and twist(v) == 0
    with pytest.raises(TilingError):
        vertical_tiling(box33, 0, 3)


def test_identity_element(box33, all_3x3x2):
    v = vertical_tiling(box33, 0, 2)
    t = all_3x3x2[17]
    assert twist(concatenate(v, t)) == twist(t) == twist(pad_vertical(t, 2))


def test_vertical_2x2_codes():
    t = vertical_tiling(rectangle(2, 2), 0, 2)
    assert serialize_tiling(t) == "disk 2 2\nUU\nUU\n\nDD\nDD\n"
    assert "z=0" in render_tiling(t)


def test_round_trip_3x3x2(all_3x3x2):
    for t in all_3x3x2:
        assert parse_tiling(serialize_tiling(t)) == t


def test_round_trip_3x4x3_corks():
    corks = list(islice(enumerate_tilings(rectangle(3, 4), 3, 0, 0b0110), 3000))
    assert len(corks) == 3000
    for t in corks:
        assert parse_tiling(serialize_tiling(t)) == t


def test_round_trip_with_offset(all_3x3x2):
    t = all_3x3x2[5].shifted(-3)
    s = serialize_tiling(t)
    assert s.startswith("disk 3 3 z0 -3") and parse_tiling(s) == t


@pytest.mark.parametrize("text", [
    "disk 2 2\nEU\nUU\n\nDD\nDD\n",          # dangling E
    "disk 2 2\nUD\nUU\n",                    # unbalanced end plugs
    "disk 2 2\nUU\nUU\n\nDD\nD\n",           # short row
    "disk 2 2\nUX\nUU\n\nDD\nDD\n",          # unknown code
    "grid 2 2\nUU\nUU\n\nDD\nDD\n",          # bad header
])
def test_malformed_tilings_are_rejected(text):
    with pytest.raises(TilingError):
        parse_tiling(text)


def test_concatenate_all_matches_pairwise(all_3x3x2):
    parts = all_3x3x2[:4]
    assert twist(concatenate_all(parts)) == sum(twist(t) for t in parts)
