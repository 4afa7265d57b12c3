"""Reference regions and tilings with known properties.

Each constructor is deterministic: when several tilings qualify, the one
with the smallest serialization (or the first one in enumeration order) is
returned, so tests and the CLI always see the same objects.
"""

from __future__ import annotations

from functools import lru_cache

from .disk import QuadDisk, parse_disk, rectangle
from .floors import enumerate_floors, enumerate_plugs
from .groups import (
    A, B, E, G2Element, HamPath, generator_tiling, hamiltonian_path, phi, plug_eraser, thin_floor_label,
)
from .moves import apply_move, enumerate_flips, enumerate_tilings, enumerate_trits
from .tiling import CylinderTiling, Floor, concatenate, matching_edges, serialize_tiling
from .twist import twist

# balanced, simply connected, not a trivial disk, and with no planar tiling
UNTILEABLE_REGION = "..#.\n####\n.#.."


def untileable_region() -> QuadDisk:
    return parse_disk(UNTILEABLE_REGION)


def _by_text(tilings) -> list[CylinderTiling]:
    return sorted(tilings, key=serialize_tiling)


# calibration tilings

@lru_cache(maxsize=None)
def negative_box_tiling() -> CylinderTiling:
    """The only tiling of the 3x3x2 box with twist -1."""
    found = [t for t in enumerate_tilings(rectangle(3, 3), 2) if twist(t) == -1]
    if len(found) != 1:
        raise RuntimeError("expected a unique 3x3x2 tiling of twist -1")
    return found[0]


def first_trit_neighbour(t: CylinderTiling) -> CylinderTiling:
    """Result of the first available trit, in move order."""
    trits = sorted(enumerate_trits(t))
    if not trits:
        raise ValueError("the tiling admits no trit")
    return apply_move(t, trits[0])


@lru_cache(maxsize=None)
def extreme_pair() -> tuple[CylinderTiling, CylinderTiling]:
    """The two 4x4x2 tilings of twist +2, ordered by serialization."""
    found = _by_text(t for t in enumerate_tilings(rectangle(4, 4), 2) if twist(t) == 2)
    if len(found) != 2:
        raise RuntimeError("expected exactly two 4x4x2 tilings of twist +2")
    return found[0], found[1]


def _place_blocks(big: QuadDisk, small: QuadDisk, blocks, offsets) -> CylinderTiling:
    """Tile ``big`` by translated copies of tilings of ``small`` (same height)."""
    n = blocks[0].height
    plugs = [0] * (n + 1)
    mats = [0] * n
    for t, (ox, oy) in zip(blocks, offsets):
        where = [big.index[(s.x + ox, s.y + oy)] for s in small.squares]

        def lift(mask: int) -> int:
            return sum(1 << where[i] for i in small.squares_of(mask))

        for j in range(n + 1):
            plugs[j] |= lift(t.plugs[j])
        for j in range(n):
            for k in matching_edges(t.matchings[j]):
                a, b = (where[i] for i in small.edges[k])
                mats[j] |= 1 << big.edge_index[(min(a, b), max(a, b))]
    return CylinderTiling(big, tuple(plugs), tuple(mats)).validate()


@lru_cache(maxsize=None)
def rigid_octagon_tiling() -> CylinderTiling:
    """A flip-free tiling of the 8x8x4 box with twist 0.

    One layer (height 2) is assembled from the four flip-free 4x4x2 tilings,
    two of twist +2 in opposite corners and two of twist -2 in the others,
    and the layer is stacked twice.
    """
    small, big = rectangle(4, 4), rectangle(8, 8)
    iso = sorted((t for t in enumerate_tilings(small, 2) if abs(twist(t)) == 2),
                 key=lambda t: (-twist(t), serialize_tiling(t)))
    offsets = [(0, 0), (4, 0), (0, 4), (4, 4)]
    layer = _place_blocks(big, small, [iso[0], iso[2], iso[2], iso[0]], offsets)
    t = concatenate(layer, layer.shifted(2))
    if twist(t) != 0 or enumerate_flips(t):
        raise RuntimeError("stacked layer is not a flip-free tiling of twist 0")
    return t


# thin rectangles

@lru_cache(maxsize=None)
def thin_pair() -> tuple[CylinderTiling, CylinderTiling]:
    """2x3x4 tilings of twist 1 with ``phi`` equal to ``a`` and ``b^-1``."""
    want = {A: None, B.inverse(): None}
    for t in _by_text(t for t in enumerate_tilings(rectangle(2, 3), 4) if twist(t) == 1):
        g = phi(t)
        if g in want and want[g] is None:
            want[g] = t
    if None in want.values():
        raise RuntimeError("missing a 2x3x4 tiling with the requested phi")
    return want[A], want[B.inverse()]


def _labelled_tilings(disk: QuadDisk, n: int):
    """Tilings of ``disk x [0, n]`` crossing a floor with a non-trivial label."""
    plugs = enumerate_plugs(disk)
    floors = {p: enumerate_floors(disk, p) for p in plugs}
    labelled = [Floor(p, m, q) for p in plugs for m, q in floors[p]
                if not thin_floor_label(disk, Floor(p, m, q)).is_identity]

    for f in labelled:
        for j in range(n):
            # empty prefixes and suffixes are corks of height 0
            pres = list(enumerate_tilings(disk, j, 0, f.p0)) if j else ([None] if f.p0 == 0 else [])
            k = n - 1 - j
            posts = list(enumerate_tilings(disk, k, f.p1, 0)) if k else ([None] if f.p1 == 0 else [])
            for pre in pres:
                for post in posts:
                    fl = (pre.floors if pre else []) + [f] + (post.floors if post else [])
                    yield CylinderTiling.from_floors(disk, fl)


@lru_cache(maxsize=None)
def thin_triple() -> tuple[CylinderTiling, CylinderTiling, CylinderTiling]:
    """2x5x6 tilings of twist 1 with ``phi`` equal to ``a^-1``, ``b`` and ``e``.

    Every 2x5 floor with a non-trivial label is crossed by the first two; the
    third is the first twist 1 tiling in enumeration order.
    """
    disk = rectangle(2, 5)
    best: dict[G2Element, tuple[str, CylinderTiling]] = {}
    for t in _labelled_tilings(disk, 6):
        if twist(t) != 1:
            continue
        g = phi(t)
        if g not in (A.inverse(), B):
            continue
        s = serialize_tiling(t)
        if g not in best or s < best[g][0]:
            best[g] = (s, t)
    if len(best) != 2:
        raise RuntimeError("missing a 2x5x6 tiling with the requested phi")
    trivial = next(t for t in enumerate_tilings(disk, 6) if twist(t) == 1 and phi(t) == E)
    return best[A.inverse()][1], best[B][1], trivial


# hamiltonian path examples on the 4x4 square

def snake_plug(path: HamPath, positions) -> int:
    """Plug marking the squares at the given 1-based path positions."""
    return sum(1 << path.order[k - 1] for k in positions)


def snake_chord(path: HamPath, lo: int, hi: int) -> int:
    """Edge index of the domino joining path positions ``lo`` and ``hi``."""
    a, b = path.order[lo - 1], path.order[hi - 1]
    return path.disk.edge_index[(min(a, b), max(a, b))]


def eraser_example() -> CylinderTiling:
    """Eraser tiling on the 4x4 square for a pair at path distance 5."""
    path = hamiltonian_path(rectangle(4, 4))
    return plug_eraser(path, snake_plug(path, (1, 6)))


def chord_generator_example() -> tuple[HamPath, int, int, CylinderTiling]:
    """The generator for the chord joining positions 3 and 6, with the plug at
    positions 4 and 7: ``(path, edge, plug, t_{d;p})``."""
    path = hamiltonian_path(rectangle(4, 4))
    edge = snake_chord(path, 3, 6)
    plug = snake_plug(path, (4, 7))
    return path, edge, plug, generator_tiling(path, edge, plug)

