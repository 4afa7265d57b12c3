"""Flips and trits on tilings, tiling enumeration and flip components.

Searches work on a flat cell-code array: cell ``z * |D| + i`` holds the
direction of its partner cube (see ``CODES``) or ``NOTCH`` for cubes removed
at the ends of a cork.  Every move site is precomputed per (disk, height) as
the cells it touches plus the two cell-code configurations it swaps between,
so applicability of all sites is one vectorised comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .disk import QuadDisk
from .floors import enumerate_floors, enumerate_plugs
from .tiling import CylinderTiling, TilingError, matching_edges

# partner direction codes
PX, MX, PY, MY, PZ, MZ, NOTCH = range(7)
CODES = {PX: (1, 0, 0), MX: (-1, 0, 0), PY: (0, 1, 0), MY: (0, -1, 0), PZ: (0, 0, 1), MZ: (0, 0, -1)}
_CODE_OF = {v: k for k, v in CODES.items()}
AXIS_NAMES = ("x", "y", "z")
UNIT = ((1, 0, 0), (0, 1, 0), (0, 0, 1))

# trit diagonals: pair of removed corners of the 2x2x2 box
TRIT_DIAGONALS = (
    ((0, 0, 0), (1, 1, 1)),
    ((1, 0, 0), (0, 1, 1)),
    ((0, 1, 0), (1, 0, 1)),
    ((0, 0, 1), (1, 1, 0)),
)


@dataclass(frozen=True, order=True)
class Move:
    """A flip (``axis`` in x/y/z: normal of the flat 2x2x1 box) or a trit
    (``axis`` = ``d0``..``d3``: removed diagonal of the 2x2x2 box).
    ``(x, y, z)`` is the minimal corner of the box in absolute coordinates."""

    kind: str
    axis: str
    x: int
    y: int
    z: int

    def __str__(self) -> str:
        return f"{self.kind} {self.axis} {self.x} {self.y} {self.z}"

    @classmethod
    def parse(cls, line: str) -> "Move":
        parts = line.split()
        if len(parts) != 5 or parts[0] not in ("flip", "trit"):
            raise ValueError(f"bad move line {line!r}")
        kind, axis = parts[0], parts[1]
        if kind == "flip" and axis not in AXIS_NAMES or kind == "trit" and axis not in ("d0", "d1", "d2", "d3"):
            raise ValueError(f"bad move axis in {line!r}")
        return cls(kind, axis, int(parts[2]), int(parts[3]), int(parts[4]))

    def cubes(self) -> list[tuple[int, int, int]]:
        """Cubes of the box touched by the move (six for a trit, four for a flip)."""
        if self.kind == "flip":
            n = AXIS_NAMES.index(self.axis)
            a, b = [k for k in range(3) if k != n]
            out = []
            for da in (0, 1):
                for db in (0, 1):
                    c = [self.x, self.y, self.z]
                    c[a] += da
                    c[b] += db
                    out.append(tuple(c))
            return out
        removed = TRIT_DIAGONALS[int(self.axis[1])]
        return [
            (self.x + dx, self.y + dy, self.z + dz)
            for dx in (0, 1) for dy in (0, 1) for dz in (0, 1)
            if (dx, dy, dz) not in removed
        ]


@dataclass(frozen=True, eq=False)
class SiteTable:
    """All move sites of a cork shape, as index and code arrays."""

    disk: QuadDisk
    height: int
    z0: int
    cells: np.ndarray      # (n_sites, 6) cell indices, padded with the first cell for flips
    conf_a: np.ndarray     # (n_sites, 6) codes of configuration A
    conf_b: np.ndarray     # (n_sites, 6) codes of configuration B
    moves: tuple           # Move per site
    is_trit: np.ndarray


def _cell(disk: QuadDisk, z0: int, n: int, x: int, y: int, z: int) -> int | None:
    i = disk.index.get((x, y))
    if i is None or not z0 <= z < z0 + n:
        return None
    return (z - z0) * len(disk) + i


def _code(delta) -> int:
    return _CODE_OF[tuple(delta)]


@lru_cache(maxsize=64)
def site_table(disk: QuadDisk, height: int, z0: int = 0) -> SiteTable:
    cells, ca, cb, moves, trit = [], [], [], [], []
    x0, x1, y0, y1 = disk.bounds
    for z in range(z0, z0 + height):
        for y in range(y0, y1 + 1):
            for x in range(x0, x1 + 1):
                # flips
                for nrm in range(3):
                    a, b = [k for k in range(3) if k != nrm]
                    corner = (x, y, z)

                    def at(da, db):
                        c = list(corner)
                        c[a] += da
                        c[b] += db
                        return tuple(c)

                    pts = [at(0, 0), at(1, 0), at(0, 1), at(1, 1)]
                    idx = [_cell(disk, z0, height, *p) for p in pts]
                    if None in idx:
                        continue
                    ua, ub = UNIT[a], UNIT[b]
                    na, nb = tuple(-v for v in ua), tuple(-v for v in ub)
                    conf_a = [_code(ua), _code(na), _code(ua), _code(na)]
                    conf_b = [_code(ub), _code(ub), _code(nb), _code(nb)]
                    cells.append(idx + [idx[0]] * 2)
                    ca.append(conf_a + [conf_a[0]] * 2)
                    cb.append(conf_b + [conf_b[0]] * 2)
                    moves.append(Move("flip", AXIS_NAMES[nrm], x, y, z))
                    trit.append(False)
                # trits
                for k, removed in enumerate(TRIT_DIAGONALS):
                    # hexagon order starting from the corner after removed[0]
                    r0 = removed[0]
                    ring = []
                    # start next to r0 and walk around the 6-cycle of remaining corners
                    verts = [
                        (dx, dy, dz) for dx in (0, 1) for dy in (0, 1) for dz in (0, 1)
                        if (dx, dy, dz) not in removed
                    ]
                    cur = min(v for v in verts if sum(abs(p - q) for p, q in zip(v, r0)) == 1)
                    prev = None
                    while len(ring) < 6:
                        ring.append(cur)
                        nxt = [
                            v for v in verts
                            if v != prev and v not in ring and sum(abs(p - q) for p, q in zip(v, cur)) == 1
                        ]
                        prev, cur = cur, (min(nxt) if nxt else None)
                    pts = [(x + v[0], y + v[1], z + v[2]) for v in ring]
                    idx = [_cell(disk, z0, height, *p) for p in pts]
                    if None in idx:
                        continue
                    conf_a, conf_b = [0] * 6, [0] * 6
                    for j in range(0, 6, 2):
                        d = tuple(q - p for p, q in zip(ring[j], ring[j + 1]))
                        conf_a[j], conf_a[j + 1] = _code(d), _code(tuple(-v for v in d))
                    for j in range(1, 6, 2):
                        d = tuple(q - p for p, q in zip(ring[j], ring[(j + 1) % 6]))
                        conf_b[j], conf_b[(j + 1) % 6] = _code(d), _code(tuple(-v for v in d))
                    cells.append(idx)
                    ca.append(conf_a)
                    cb.append(conf_b)
                    moves.append(Move("trit", f"d{k}", x, y, z))
                    trit.append(True)
    if not cells:
        empty = np.zeros((0, 6), dtype=np.int64)
        return SiteTable(disk, height, z0, empty, empty.astype(np.uint8), empty.astype(np.uint8), (), np.zeros(0, bool))
    return SiteTable(
        disk, height, z0,
        np.asarray(cells, dtype=np.int64),
        np.asarray(ca, dtype=np.uint8),
        np.asarray(cb, dtype=np.uint8),
        tuple(moves),
        np.asarray(trit, dtype=bool),
    )


# state conversion

def to_state(t: CylinderTiling) -> np.ndarray:
    disk = t.disk
    s = len(disk)
    n = t.height
    out = np.full(s * n, 255, dtype=np.uint8)
    for i in disk.squares_of(t.plugs[0]):
        out[i] = NOTCH
    for i in disk.squares_of(t.plugs[-1]):
        out[(n - 1) * s + i] = NOTCH
    for j in range(1, n):
        for i in disk.squares_of(t.plugs[j]):
            out[(j - 1) * s + i] = PZ
            out[j * s + i] = MZ
    sq = disk.squares
    for j, m in enumerate(t.matchings):
        for k in matching_edges(m):
            a, b = disk.edges[k]
            d = (sq[b].x - sq[a].x, sq[b].y - sq[a].y, 0)
            out[j * s + a] = _code(d)
            out[j * s + b] = _code(tuple(-v for v in d))
    if (out == 255).any():
        raise TilingError("tiling leaves uncovered cubes")
    return out


def from_state(disk: QuadDisk, state: np.ndarray, z0: int = 0) -> CylinderTiling:
    s = len(disk)
    n = len(state) // s
    plugs = [0] * (n + 1)
    matchings = [0] * n
    for i in range(s):
        if state[i] == NOTCH:
            plugs[0] |= 1 << i
        if state[(n - 1) * s + i] == NOTCH:
            plugs[n] |= 1 << i
    for j in range(n):
        base = j * s
        m = 0
        for i in range(s):
            c = state[base + i]
            if c == PZ:
                plugs[j + 1] |= 1 << i
            elif c in (PX, PY):
                dx, dy, _ = CODES[int(c)]
                sq = disk.squares[i]
                other = disk.index[(sq.x + dx, sq.y + dy)]
                m |= 1 << disk.edge_index[(min(i, other), max(i, other))]
        matchings[j] = m
    return CylinderTiling(disk, tuple(plugs), tuple(matchings), z0)


def _applicable_sites(table: SiteTable, state: np.ndarray, kinds: str = "flip") -> tuple[np.ndarray, np.ndarray]:
    """(site indices, in-config-A flags) of sites applicable to ``state``."""
    if len(table.moves) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=bool)
    vals = state[table.cells]
    in_a = (vals == table.conf_a).all(axis=1)
    in_b = (vals == table.conf_b).all(axis=1)
    ok = in_a | in_b
    if kinds == "flip":
        ok &= ~table.is_trit
    elif kinds == "trit":
        ok &= table.is_trit
    idx = np.nonzero(ok)[0]
    return idx, in_a[idx]


def _apply_site(table: SiteTable, state: np.ndarray, site: int, from_a: bool) -> np.ndarray:
    out = state.copy()
    out[table.cells[site]] = table.conf_b[site] if from_a else table.conf_a[site]
    return out


def enumerate_flips(t: CylinderTiling) -> list[Move]:
    table = site_table(t.disk, t.height, t.z0)
    idx, _ = _applicable_sites(table, to_state(t), "flip")
    return [table.moves[i] for i in idx]


def enumerate_trits(t: CylinderTiling) -> list[Move]:
    table = site_table(t.disk, t.height, t.z0)
    idx, _ = _applicable_sites(table, to_state(t), "trit")
    return [table.moves[i] for i in idx]


def _site_of(table: SiteTable, move: Move) -> int:
    lookup = _site_lookup(table)
    if move not in lookup:
        raise ValueError(f"move {move} does not fit inside the region")
    return lookup[move]


@lru_cache(maxsize=64)
def _site_lookup(table: SiteTable) -> dict:
    return {m: k for k, m in enumerate(table.moves)}


def apply_move_state(table: SiteTable, state: np.ndarray, move: Move) -> np.ndarray:
    k = _site_of(table, move)
    vals = state[table.cells[k]]
    if (vals == table.conf_a[k]).all():
        return _apply_site(table, state, k, True)
    if (vals == table.conf_b[k]).all():
        return _apply_site(table, state, k, False)
    raise ValueError(f"move {move} is not applicable")


def apply_move(t: CylinderTiling, move: Move) -> CylinderTiling:
    table = site_table(t.disk, t.height, t.z0)
    return from_state(t.disk, apply_move_state(table, to_state(t), move), t.z0)


def neighbours(table: SiteTable, state: np.ndarray, kinds: str = "flip") -> Iterator[tuple[Move, np.ndarray]]:
    idx, in_a = _applicable_sites(table, state, kinds)
    for k, a in zip(idx.tolist(), in_a.tolist()):
        yield table.moves[k], _apply_site(table, state, k, a)


# enumeration

def _reach_sets(disk: QuadDisk, start: int, steps: int) -> list[set[int]]:
    sets = [{start}]
    cache: dict[int, list[int]] = {}
    for _ in range(steps):
        nxt = set()
        for p in sets[-1]:
            if p not in cache:
                cache[p] = sorted({q for _, q in enumerate_floors(disk, p)})
            nxt.update(cache[p])
        sets.append(nxt)
    return sets


def enumerate_tilings(disk: QuadDisk, n: int, p0: int = 0, p1: int = 0, budget: int | None = None) -> Iterator[CylinderTiling]:
    """Every tiling of the cork of height ``n`` with end plugs ``p0``/``p1``, once each.

    Depth-first over floors; a partial path is extended only to plugs from
    which ``p1`` is reachable in the remaining number of floors (the plug
    graph is symmetric, so these are the plugs reachable from ``p1``).
    """
    if budget is not None:
        from .counting import count_cork
        from .floors import BudgetExceeded

        total = count_cork(disk, n, p0, p1)
        if total > budget:
            raise BudgetExceeded(f"{total} tilings exceed the enumeration budget {budget}")
    back = _reach_sets(disk, p1, n)
    floor_cache: dict[int, list[tuple[int, int]]] = {}

    def floors(p):
        if p not in floor_cache:
            floor_cache[p] = enumerate_floors(disk, p)
        return floor_cache[p]

    plugs = [p0]
    mats: list[int] = []

    def rec(j: int):
        if j == n:
            if plugs[-1] == p1:
                yield CylinderTiling(disk, tuple(plugs), tuple(mats))
            return
        allowed = back[n - j - 1]
        for m, q in floors(plugs[-1]):
            if q in allowed:
                plugs.append(q)
                mats.append(m)
                yield from rec(j + 1)
                plugs.pop()
                mats.pop()

    if p0 in back[n]:
        yield from rec(0)


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]


@dataclass
class ComponentReport:
    """Flip components grouped by twist: ``sizes[twist]`` is a sorted list."""

    sizes: dict[int, list[int]]
    n_tilings: int
    representatives: dict[int, list[CylinderTiling]]

    @property
    def n_components(self) -> int:
        return sum(len(v) for v in self.sizes.values())


def flip_components(disk: QuadDisk, n: int, budget: int = 2_000_000) -> ComponentReport:
    """Union-find over all tilings of ``disk x [0, n]`` with flip edges."""
    from .twist import twist

    tilings = list(enumerate_tilings(disk, n, budget=budget))
    keys = {}
    states = []
    for k, t in enumerate(tilings):
        st = to_state(t)
        keys[st.tobytes()] = k
        states.append(st)
    table = site_table(disk, n, 0)
    uf = UnionFind(len(tilings))
    for k, st in enumerate(states):
        for _, nb in neighbours(table, st, "flip"):
            j = keys.get(nb.tobytes())
            if j is None:
                raise TilingError("flip left the enumerated tiling set")
            uf.union(k, j)
    groups: dict[int, list[int]] = {}
    for k in range(len(tilings)):
        groups.setdefault(uf.find(k), []).append(k)
    sizes: dict[int, list[int]] = {}
    reps: dict[int, list[CylinderTiling]] = {}
    for members in groups.values():
        tw = twist(tilings[members[0]])
        sizes.setdefault(tw, []).append(len(members))
        reps.setdefault(tw, []).append(tilings[members[0]])
    for tw in sizes:
        order = sorted(range(len(sizes[tw])), key=lambda i: -sizes[tw][i])
        sizes[tw] = [sizes[tw][i] for i in order]
        reps[tw] = [reps[tw][i] for i in order]
    return ComponentReport(dict(sorted(sizes.items())), len(tilings), dict(sorted(reps.items())))


def all_plugs(disk: QuadDisk) -> Sequence[int]:
    return enumerate_plugs(disk)
