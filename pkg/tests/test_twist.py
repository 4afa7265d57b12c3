from fractions import Fraction

import pytest

from domino_cylinders.disk import rectangle, symmetric_images
from domino_cylinders.fixtures import negative_box_tiling
from domino_cylinders.floors import enumerate_floors, enumerate_plugs
from domino_cylinders.moves import apply_move, enumerate_flips, enumerate_tilings, enumerate_trits
from domino_cylinders.tiling import Domino3D, Floor, concatenate, mirror, vertical_tiling
from domino_cylinders.twist import (
    floor_twist, path_twist, plug_potential_difference4, tau_pair, twist, twist_pairwise,
)

from conftest import oracle_twist, tiling_pairs


@pytest.fixture(scope="module")
def all_3x3x2(box33):
    return list(enumerate_tilings(box33, 2))


@pytest.fixture(scope="module")
def all_4x4x2(box44):
    return list(enumerate_tilings(box44, 2))


def test_parallel_dominoes_do_not_interact():
    d0 = Domino3D((0, 0, 0), (1, 0, 0))
    d1 = Domino3D((0, 1, 0), (1, 1, 0))
    assert tau_pair(d0, d1) == 0 == tau_pair(d1, d0)


def test_outside_the_shade_is_zero():
    d0 = Domino3D((0, 0, 0), (1, 0, 0))
    d1 = Domino3D((5, 3, 0), (5, 3, 1))
    assert tau_pair(d0, d1) == 0


def test_single_pair_is_a_quarter():
    d0 = Domino3D((0, 0, 0), (1, 0, 0))
    d1 = Domino3D((0, 1, 0), (0, 1, 1))
    assert abs(tau_pair(d0, d1)) == Fraction(1, 4)


def test_negative_box_tiling_pair_sum():
    t = negative_box_tiling()
    assert twist_pairwise(t) == -1 == twist(t)


def test_vertical_tiling_has_zero_twist(box44):
    assert twist(vertical_tiling(box44, 0, 6)) == 0


def test_vertical_floor_weight(box33):
    p = enumerate_plugs(box33)[5]
    comp = box33.full_mask ^ p
    assert floor_twist(box33, Floor(p, 0, comp)) == 0


def test_floor_weight_is_antisymmetric(box33):
    for p0 in enumerate_plugs(box33)[:40]:
        for m, p1 in enumerate_floors(box33, p0):
            f = Floor(p0, m, p1)
            assert floor_twist(box33, f.inverse()) == -floor_twist(box33, f)


def test_open_path_and_its_reverse_cancel(box33, all_3x3x2):
    t = all_3x3x2[40]
    floors = t.floors[:1]
    back = [f.inverse() for f in reversed(floors)]
    assert path_twist(box33, floors + back) == 0


def test_every_3x3x2_tiling(all_3x3x2):
    for t in all_3x3x2:
        tw = twist(t)
        assert tw == twist(t, "e1") == twist(t, "-e1") == twist(t, "-e2")
        assert tw == twist_pairwise(t) == oracle_twist(tiling_pairs(t))
        assert tw == sum(floor_twist(t.disk, f) for f in t.floors)


def test_every_4x4x2_tiling(all_4x4x2, box44):
    assert len(all_4x4x2) == 32000
    for t in all_4x4x2:
        tw = twist(t)
        assert tw == twist(t, "e1") == path_twist(box44, t.floors)


def test_flips_keep_and_trits_shift_twist(all_3x3x2):
    for t in all_3x3x2:
        tw = twist(t)
        for m in enumerate_flips(t):
            assert twist(apply_move(t, m)) == tw
        for m in enumerate_trits(t):
            assert abs(twist(apply_move(t, m)) - tw) == 1


def test_symmetries_of_the_3x3_box(box33, all_3x3x2):
    images = dict(symmetric_images(box33))
    for t in all_3x3x2:
        tw = twist(t)
        for name in ("rot90", "rot180", "rot270"):
            assert twist(mirror(t, images[name])) == tw
        for name in ("mirror_x", "mirror_y", "diag", "antidiag"):
            assert twist(mirror(t, images[name])) == -tw


def test_additivity_on_3x3(all_3x3x2):
    sample = all_3x3x2[::23]
    for a in sample:
        for b in sample:
            assert twist(concatenate(a, b)) == twist(a) + twist(b)


@pytest.mark.parametrize("w,h", [(2, 3), (3, 3), (3, 4)])
def test_axis_change_is_a_coboundary(w, h):
    """``tau^{e1} - tau^{e2}`` of a floor is ``g(p1) - g(p0)`` for one plug function ``g``."""
    d = rectangle(w, h)
    g = {0: 0}
    queue = [0]
    while queue:
        p0 = queue.pop()
        for m, p1 in enumerate_floors(d, p0):
            diff = plug_potential_difference4(d, Floor(p0, m, p1))
            if p1 in g:
                assert g[p1] - g[p0] == diff
            else:
                g[p1] = g[p0] + diff
                queue.append(p1)
    assert len(g) == len(enumerate_plugs(d))


def test_unknown_axis_is_rejected(all_3x3x2):
    with pytest.raises(ValueError):
        twist(all_3x3x2[0], "e3")
