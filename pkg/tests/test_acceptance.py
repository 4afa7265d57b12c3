"""Acceptance suite: one group of tests per numbered criterion.

The terminal summary (see conftest) prints one PASS/FAIL line per criterion.
"""

import random
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from domino_cylinders.counting import count_tilings, min_positive_power, twist_census
from domino_cylinders.disk import rectangle
from domino_cylinders.fixtures import (
    extreme_pair, first_trit_neighbour, negative_box_tiling, rigid_octagon_tiling, thin_pair, thin_triple,
)
from domino_cylinders.floors import enumerate_plugs
from domino_cylinders.groups import A, B, E, cell_boundary_check, phi, regularity_check
from domino_cylinders.moves import apply_move, enumerate_flips, enumerate_tilings, enumerate_trits, flip_components
from domino_cylinders.search import sim_connect, verify_certificate
from domino_cylinders.tiling import concatenate, invert, pad_vertical, parse_tiling, serialize_tiling
from domino_cylinders.tropical import (
    NEG, build_tropical_matrix, certificate_value, max_cycle_mean, tropical_power,
)
from domino_cylinders.twist import path_twist, twist, twist_pairwise

from conftest import sample_tiling

criterion = pytest.mark.criterion

SHAPES = [(2, 3, 4), (2, 4, 3), (3, 3, 2), (3, 4, 2), (4, 4, 2), (2, 3, 6)]


def timed(fn, *args):
    t = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t


# 1. exact counts

@criterion(1, "tiling counts of 3x3x2, 4x4x2, 4x4x4, 4x4x8 within time limits")
@pytest.mark.parametrize("w,h,n,expected,limit", [
    (3, 3, 2, 229, 1.0),
    (4, 4, 2, 32000, 10.0),
    (4, 4, 4, 5051532105, 120.0),
    (4, 4, 8, 175220727982196365632, 600.0),
])
def test_counts(w, h, n, expected, limit):
    got, secs = timed(count_tilings, rectangle(w, h), n)
    assert got == expected
    assert secs < limit


# 2. twist censuses

@criterion(2, "twist censuses of 3x3x2, 4x4x2, 4x4x4, 4x4x8")
def test_census_small_boxes():
    assert twist_census(rectangle(3, 3), 2) == {-1: 1, 0: 227, 1: 1}
    assert twist_census(rectangle(4, 4), 2) == {-2: 2, -1: 256, 0: 31484, 1: 256, 2: 2}


@criterion(2, "twist censuses of 3x3x2, 4x4x2, 4x4x4, 4x4x8")
def test_census_4x4x4():
    c = twist_census(rectangle(4, 4), 4)
    assert c[0] == 4413212553 and c[1] == 310188792
    assert c.total == 5051532105


@criterion(2, "twist censuses of 3x3x2, 4x4x2, 4x4x4, 4x4x8")
def test_census_4x4x8():
    c = twist_census(rectangle(4, 4), 8)
    assert c[0] == 121817608970781595564
    assert c.support() == list(range(-10, 11))
    assert c.total == 175220727982196365632


# 3. flip components

@criterion(3, "flip components of 3x3x2 and 4x4x2")
def test_components():
    t0 = time.perf_counter()
    small = flip_components(rectangle(3, 3), 2)
    assert small.sizes == {-1: [1], 0: [227], 1: [1]}
    big = flip_components(rectangle(4, 4), 2)
    assert big.n_components == 9
    assert big.sizes == {-2: [1, 1], -1: [128, 128], 0: [31484], 1: [128, 128], 2: [1, 1]}
    assert time.perf_counter() - t0 < 60


# 4. calibration tilings

@criterion(4, "twist calibration on reference tilings")
def test_calibration_negative_box():
    t = negative_box_tiling()
    assert twist(t) == -1
    assert twist(first_trit_neighbour(t)) == 0


@criterion(4, "twist calibration on reference tilings")
def test_calibration_extreme_pair():
    for t in extreme_pair():
        assert twist(t) == 2
        assert enumerate_flips(t) == []


@criterion(4, "twist calibration on reference tilings")
def test_calibration_rigid_octagon():
    t = rigid_octagon_tiling()
    assert twist(t) == 0
    assert enumerate_flips(t) == []


# 5. invariant suites

def _sample(data_seed, shape):
    w, h, n = shape
    return sample_tiling(rectangle(w, h), n, random.Random(data_seed))


seeds = st.integers(0, 2**32 - 1)
shapes = st.sampled_from(SHAPES)
invariant = settings(max_examples=1000, deadline=None)


@criterion(5, "invariant suites (random and exhaustive)")
@invariant
@given(seeds, shapes)
def test_twist_is_axis_independent(seed, shape):
    t = _sample(seed, shape)
    assert twist(t, "e1") == twist(t, "e2") == twist(t, "-e1") == twist(t, "-e2")


@criterion(5, "invariant suites (random and exhaustive)")
@invariant
@given(seeds, shapes)
def test_flips_preserve_twist(seed, shape):
    t = _sample(seed, shape)
    k = twist(t)
    for m in enumerate_flips(t):
        assert twist(apply_move(t, m)) == k


@criterion(5, "invariant suites (random and exhaustive)")
@invariant
@given(seeds, shapes)
def test_trits_change_twist_by_one(seed, shape):
    t = _sample(seed, shape)
    k = twist(t)
    for m in enumerate_trits(t):
        assert abs(twist(apply_move(t, m)) - k) == 1


@criterion(5, "invariant suites (random and exhaustive)")
@invariant
@given(seeds, shapes, st.integers(1, 4))
def test_concatenation_adds_twists(seed, shape, n1):
    w, h, n0 = shape
    rng = random.Random(seed)
    d = rectangle(w, h)
    t0, t1 = sample_tiling(d, n0, rng), sample_tiling(d, n1 + n1 % 2 if w * h % 2 else n1, rng)
    assert twist(concatenate(t0, t1)) == twist(t0) + twist(t1)


@criterion(5, "invariant suites (random and exhaustive)")
@invariant
@given(seeds, shapes)
def test_inversion_negates_twist(seed, shape):
    t = _sample(seed, shape)
    assert twist(invert(t)) == -twist(t)


@criterion(5, "invariant suites (random and exhaustive)")
@invariant
@given(seeds, shapes)
def test_floor_sum_equals_pairwise_sum(seed, shape):
    t = _sample(seed, shape)
    assert path_twist(t.disk, t.floors) == twist_pairwise(t) == twist(t)


@criterion(5, "invariant suites (random and exhaustive)")
@invariant
@given(seeds, shapes, st.integers(0, 2))
def test_serialization_round_trip(seed, shape, pad):
    t = _sample(seed, shape)
    if pad:
        t = pad_vertical(t, 2 * pad)
    assert parse_tiling(serialize_tiling(t)) == t


@criterion(5, "invariant suites (random and exhaustive)")
@pytest.mark.parametrize("w,h,n", [(3, 3, 2), (2, 3, 4), (2, 4, 2)])
def test_invariants_exhaustively(w, h, n):
    for t in enumerate_tilings(rectangle(w, h), n):
        k = twist(t)
        assert twist(t, "e1") == k == twist_pairwise(t) == path_twist(t.disk, t.floors)
        assert twist(invert(t)) == -k
        assert parse_tiling(serialize_tiling(t)) == t
        for m in enumerate_flips(t):
            assert twist(apply_move(t, m)) == k
        for m in enumerate_trits(t):
            assert abs(twist(apply_move(t, m)) - k) == 1


# 6. padded flip connection

@criterion(6, "extreme pair connected with padding 2 and a replayable certificate")
def test_extreme_pair_is_connected_after_padding():
    t0, t1 = extreme_pair()
    status, trace = sim_connect(t0, t1, max_pad=2)
    assert status == "sim"
    assert max(trace.pad0, trace.pad1) <= 2
    ok, msg = verify_certificate(trace)
    assert ok, msg


# 7. thin rectangles

@criterion(7, "phi on thin rectangles")
def test_phi_reference_values():
    t0, t1 = thin_pair()
    assert phi(t0) == A and phi(t1) == B.inverse() and A != B.inverse()
    assert twist(t0) == twist(t1)
    assert [phi(t) for t in thin_triple()] == [A.inverse(), B, E]


@criterion(7, "phi on thin rectangles")
def test_phi_survives_perturbations():
    rng = random.Random(7)
    refs = list(thin_pair()) + list(thin_triple())
    for k in range(1000):
        t = refs[k % len(refs)]
        g = phi(t)
        for _ in range(rng.randint(1, 6)):
            if rng.random() < 0.3:
                t = pad_vertical(t, 2)
            moves = enumerate_flips(t)
            if moves:
                t = apply_move(t, rng.choice(moves))
        assert phi(t) == g


@criterion(7, "phi on thin rectangles")
def test_cell_boundaries_of_the_2x3_complex():
    rep = cell_boundary_check(rectangle(2, 3))
    assert rep.thin and rep.sound
    assert rep.n_bigons + rep.n_quads + rep.n_doubles > 0


# 8. growth constant

@criterion(8, "max-plus growth constant of 4x4 and 2x3 tables")
def test_growth_constant_4x4():
    t0 = time.perf_counter()
    m = build_tropical_matrix(rectangle(4, 4))
    res = max_cycle_mean(m)
    assert res.c == Fraction(3, 2)
    w = res.witness
    assert w.plugs[0] == w.plugs[-1] and len(set(w.plugs[:-1])) == w.length
    assert w.mean == Fraction(3, 2)
    assert path_twist(m.disk, w.floors) == w.twist
    assert certificate_value(m, 4, res.potentials, res.period) == 6
    assert time.perf_counter() - t0 < 300


@criterion(8, "max-plus growth constant of 4x4 and 2x3 tables")
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_2x3_tables_match_brute_force(n):
    d = rectangle(2, 3)
    m = build_tropical_matrix(d)
    table = tropical_power(m, n)
    for p0 in enumerate_plugs(d):
        for p1 in enumerate_plugs(d):
            vals = [4 * path_twist(d, t.floors) for t in enumerate_tilings(d, n, p0, p1)]
            got = int(table[m.index[p0], m.index[p1]])
            assert got == max(vals) if vals else got <= NEG // 2


# 9. regularity of the 4x4 square

@pytest.fixture(scope="module")
def report_4x4():
    return regularity_check(rectangle(4, 4))


@criterion(9, "regularity of the 4x4 square with replayable certificates")
def test_regularity_4x4(report_4x4):
    rep = report_4x4
    assert rep.verdict == "regular-certified", rep.reason
    for c in rep.cases:
        ok, msg = verify_certificate(c.certificate)
        assert ok, f"{c.label}: {msg}"
    assert verify_certificate(rep.commute)[0]


# 10. primitivity of the transfer graph

@criterion(10, "all-positive power of the 2x3 transfer matrix within 4|D| steps")
def test_positive_power_2x3():
    k = min_positive_power(rectangle(2, 3), 24)
    assert k is not None and k <= 24
