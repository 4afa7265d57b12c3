import random

import pytest
from hypothesis import given, settings, strategies as st

from domino_cylinders.disk import parse_disk, rectangle
from domino_cylinders.fixtures import (
    chord_generator_example, eraser_example, snake_chord, snake_plug, thin_pair, thin_triple,
)
from domino_cylinders.floors import enumerate_plugs
from domino_cylinders.groups import (
    A, B, C, E, G2Element, ShapeError, cell_boundary_check, flux, flux_class_members, flux_classes,
    generator_power, generator_tiling, hamiltonian_path, non_respecting_dominoes, path_symmetries, phi, plug_eraser,
    regularity_check, thin_witness, twist_one_generator,
)
from domino_cylinders.moves import apply_move, enumerate_flips
from domino_cylinders.search import flip_connect, sim_connect, verify_certificate
from domino_cylinders.tiling import concatenate, invert, mirror, pad_vertical, vertical_tiling
from domino_cylinders.twist import twist

from conftest import sample_tiling


# matrix oracle: a -> [[1,2],[0,1]], b -> [[1,0],[2,1]] generate a free group
# inside PSL(2, Z) and J = [[0,1],[-1,0]] conjugates a to b^-1 and b to a^-1

def _mul(x, y):
    return ((x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
            (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]))


_GEN = {1: ((1, 2), (0, 1)), -1: ((1, -2), (0, 1)), 2: ((1, 0), (2, 1)), -2: ((1, 0), (-2, 1))}
_J = ((0, 1), (-1, 0))
_I = ((1, 0), (0, 1))


def matrix(g: G2Element):
    out = _I
    for x in g.word:
        out = _mul(out, _GEN[x])
    if g.parity:
        out = _mul(out, _J)
    return out


def same_up_to_sign(x, y) -> bool:
    return x == y or x == tuple(tuple(-v for v in row) for row in y)


letters = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=10)
elements = st.builds(G2Element, letters, st.integers(0, 1))


@settings(max_examples=400, deadline=None)
@given(elements, elements)
def test_group_law_matches_matrices(g, h):
    assert same_up_to_sign(matrix(g * h), _mul(matrix(g), matrix(h)))
    assert (g * g.inverse()).is_identity and (g.inverse() * g).is_identity


@settings(max_examples=200, deadline=None)
@given(elements)
def test_normal_form_is_faithful(g):
    assert same_up_to_sign(matrix(g), _I) == g.is_identity
    assert G2Element.parse(str(g)) == g


def test_involution_relations():
    assert (C * C).is_identity
    assert C * A * C == B.inverse()
    assert C * B * C == A.inverse()
    assert A ** -2 == (A * A).inverse() and A ** 0 == E
    with pytest.raises(ValueError):
        G2Element.parse("a q")


# phi on thin rectangles

def test_thin_pair_values():
    t0, t1 = thin_pair()
    assert (twist(t0), twist(t1)) == (1, 1)
    assert phi(t0) == A and phi(t1) == B.inverse()


def test_thin_triple_values():
    t0, t1, t2 = thin_triple()
    assert [twist(t) for t in (t0, t1, t2)] == [1, 1, 1]
    assert [phi(t) for t in (t0, t1, t2)] == [A.inverse(), B, E]


def test_phi_of_vertical_tilings():
    for m in (3, 4, 5):
        assert phi(vertical_tiling(rectangle(2, m), 0, 6)) == E


def test_phi_needs_a_thin_rectangle(box33):
    with pytest.raises(ShapeError):
        phi(vertical_tiling(box33, 0, 2))


def _perturb(t, rng, steps=6):
    for _ in range(steps):
        if rng.random() < 0.3:
            t = pad_vertical(t, 2)
        moves = enumerate_flips(t)
        if moves:
            t = apply_move(t, rng.choice(moves))
    return t


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([(2, 3, 4), (2, 3, 6), (2, 4, 4), (2, 5, 4)]))
def test_phi_is_flip_and_padding_invariant(seed, shape):
    rng = random.Random(seed)
    w, h, n = shape
    t = sample_tiling(rectangle(w, h), n, rng)
    assert phi(_perturb(t, rng)) == phi(t)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 5), st.integers(1, 5))
def test_phi_is_multiplicative(seed, n0, n1):
    rng = random.Random(seed)
    d = rectangle(2, 3)
    t0, t1 = sample_tiling(d, n0, rng), sample_tiling(d, n1, rng)
    assert phi(concatenate(t0, t1)) == phi(t0) * phi(t1)


def test_thin_witness_separates_equal_twists():
    t0, t1 = thin_witness(rectangle(2, 3))
    assert twist(t0) == twist(t1) and phi(t0) != phi(t1)


def test_cells_of_the_2x3_complex():
    rep = cell_boundary_check(rectangle(2, 3))
    assert rep.thin and rep.sound
    assert rep.n_bigons > 0 and rep.n_quads > 0 and rep.n_doubles == 3


def test_cells_of_a_wide_disk_report_membership(box33):
    rep = cell_boundary_check(box33)
    assert not rep.thin and rep.n_cells > 0
    assert all(isinstance(v, list) for v in rep.membership.values())


# hamiltonian paths and flux

def test_snake_on_4x4(box44):
    path = hamiltonian_path(box44)
    assert path.order[0] == box44.index[(0, 3)]
    assert [box44.colors[i] for i in path.order] == [(-1) ** k for k in range(1, 17)]
    assert len(path.chords()) == len(box44.edges) - 15


def test_paths_on_small_disks():
    assert hamiltonian_path(rectangle(2, 3)) is not None
    assert hamiltonian_path(parse_disk("#.#\n###\n#.#\n")) is None
    assert hamiltonian_path(parse_disk(".#.\n###\n")) is None


def test_flux_of_the_empty_plug_and_zero_sum(box44):
    path = hamiltonian_path(box44)
    for edge in path.chords():
        assert flux(path, edge, 0).as_tuple() == (0, 0, 0)
    edge = snake_chord(path, 3, 6)
    dm = box44.edge_masks[edge]
    for p in enumerate_plugs(box44)[::7]:
        if not p & dm:
            assert sum(flux(path, edge, p).as_tuple()) == 0


def test_flux_classes_of_a_short_chord(box44):
    path, edge, plug, _ = chord_generator_example()
    classes = flux_classes(path, edge)
    assert len(classes) == 9
    assert all(abs(f.as_tuple()[0]) <= 1 and abs(f.as_tuple()[1]) <= 1 for f in classes)
    assert flux(path, edge, plug).as_tuple() == (0, 1, -1)


def test_flux_classes_match_brute_force_image():
    d = rectangle(2, 4)
    path = hamiltonian_path(d)
    for edge in path.chords():
        dm = d.edge_masks[edge]
        image = {flux(path, edge, p) for p in enumerate_plugs(d) if not p & dm and not d.color_balance(p)}
        classes = flux_classes(path, edge)
        assert set(classes) == image
        for fl, rep in classes.items():
            members = flux_class_members(path, edge, fl)
            assert members[0] == rep and all(flux(path, edge, p) == fl for p in members)


def test_generator_tilings(box44):
    path = hamiltonian_path(box44)
    for edge in path.chords():
        signs = set()
        for fl, p in flux_classes(path, edge).items():
            t = generator_tiling(path, edge, p)
            assert t.is_cylinder and len(non_respecting_dominoes(path, t)) == 1
            f = fl.as_tuple()
            alternating = -f[0] + f[1] - f[2]
            k = twist(t)
            assert 2 * k in (alternating, -alternating)
            if alternating:
                signs.add(2 * k // alternating)
        assert len(signs) <= 1


def test_generator_on_a_path_domino_is_trivial(box44):
    path = hamiltonian_path(box44)
    edge = snake_chord(path, 4, 5)
    t = generator_tiling(path, edge, snake_plug(path, (6, 7)))
    assert twist(t) == 0
    status, trace = sim_connect(t, vertical_tiling(box44, 0, 2), max_pad=2)
    assert status == "sim" and verify_certificate(trace)[0]


def test_generator_example_has_twist_minus_one():
    _, _, _, t = chord_generator_example()
    assert twist(t) == -1 and t.height == 4


def test_eraser_is_even_with_empty_middle():
    t = eraser_example()
    n = t.height // 2
    assert t.z0 == -n and t.plugs[n] == 0 and invert(t) == t
    assert t.start_plug == t.end_plug != 0


def test_erasers_on_the_2x3_disk_flip_to_vertical():
    d = rectangle(2, 3)
    path = hamiltonian_path(d)
    for p in enumerate_plugs(d):
        t = plug_eraser(path, p)
        assert invert(t) == t and path.respects(t.matchings[0] | t.matchings[-1])
        v = vertical_tiling(d, p, t.height, z0=t.z0)
        trace = flip_connect(t, v)
        assert trace is not None and verify_certificate(trace)[0]


def test_twist_one_generator(box44):
    a = twist_one_generator(box44, hamiltonian_path(box44))
    assert twist(a) == 1 and a.height == 4
    status, trace = sim_connect(concatenate(a, invert(a)), vertical_tiling(box44, 0, 8), max_pad=2)
    assert status == "sim" and verify_certificate(trace)[0]
    assert twist(generator_power(a, -3)) == -3 and generator_power(a, 0).height == 2


def test_twist_one_generator_needs_room():
    with pytest.raises(ShapeError):
        twist_one_generator(rectangle(2, 2))


def test_thin_rectangles_are_reported_with_witnesses():
    rep = regularity_check(rectangle(2, 4))
    assert rep.verdict == "inconclusive" and rep.witnesses is not None
    t0, t1 = rep.witnesses
    assert twist(t0) == twist(t1) and phi(t0) != phi(t1)


def test_snake_symmetry_reverses_the_path(box44):
    path = hamiltonian_path(box44)
    syms = path_symmetries(path)
    assert len(syms) == 1
    _, perm = syms[0]
    assert [perm[i] for i in path.order] == list(path.order[::-1])


def test_generators_are_equivariant_under_the_path_symmetry(box44):
    path = hamiltonian_path(box44)
    _, perm = path_symmetries(path)[0]
    for edge in path.chords():
        i, j = box44.edges[edge]
        image = box44.edge_index[tuple(sorted((perm[i], perm[j])))]
        for fl, plug in list(flux_classes(path, edge).items())[:3]:
            q = sum(1 << perm[s] for s in box44.squares_of(plug))
            t = generator_tiling(path, edge, plug)
            assert mirror(t, perm) == generator_tiling(path, image, q)
            assert twist(generator_tiling(path, image, q)) == -twist(t)
