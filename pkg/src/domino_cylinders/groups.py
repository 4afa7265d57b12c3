"""Group machinery: the thin-rectangle homomorphism, 2-cells of the plug
complex, hamiltonian-path generators with their flux, cork fillers and the
regularity check.

The target group of the thin-rectangle map is ``F2 x| Z/2`` with generators
``a``, ``b`` and an involution ``c`` acting by ``c a c = b^-1``,
``c b c = a^-1``.  Every floor of a ``2 x M`` cylinder maps to an element
``(g, 1)`` with ``g`` in ``{e, a, b, a^-1, b^-1}``, so the parity bit of a
product records the height parity and floors at odd positions automatically
pick up the twisted labels.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .disk import QuadDisk
from .floors import enumerate_floors, enumerate_plugs
from .search import (
    FlipTrace, compose_traces, concat_traces, migration_moves, mirror_trace, sim_connect, verify_certificate,
)
from .tiling import (
    CylinderTiling, Floor, concatenate_all, invert, matching_edges, mirror, pad_vertical, vertical_tiling,
)
from .twist import twist


# the group F2 x| Z/2

_LETTERS = {1: "a", 2: "b", -1: "a^-1", -2: "b^-1"}
_PSI = {1: -2, 2: -1, -1: 2, -2: 1}  # action of c: a -> b^-1, b -> a^-1


def _reduce(word: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class G2Element:
    """Normal form ``(w, parity)`` standing for ``w * c^parity``; ``w`` reduced."""

    word: tuple[int, ...] = ()
    parity: int = 0

    def __post_init__(self):
        object.__setattr__(self, "word", _reduce(self.word))
        object.__setattr__(self, "parity", self.parity & 1)

    def __mul__(self, other: "G2Element") -> "G2Element":
        rhs = tuple(_PSI[x] for x in other.word) if self.parity else other.word
        return G2Element(self.word + rhs, self.parity ^ other.parity)

    def inverse(self) -> "G2Element":
        inv = tuple(-x for x in reversed(self.word))
        if self.parity:
            inv = tuple(_PSI[x] for x in inv)
        return G2Element(inv, self.parity)

    def __pow__(self, k: int) -> "G2Element":
        base = self if k >= 0 else self.inverse()
        out = G2Element()
        for _ in range(abs(k)):
            out = out * base
        return out

    @property
    def is_identity(self) -> bool:
        return not self.word and not self.parity

    def exponent_sum(self, letter: int) -> int:
        return sum(1 if x == letter else -1 if x == -letter else 0 for x in self.word)

    def __str__(self) -> str:
        parts = [_LETTERS[x] for x in self.word]
        if self.parity:
            parts.append("c")
        return " ".join(parts) if parts else "e"

    @classmethod
    def parse(cls, text: str) -> "G2Element":
        names = {v: k for k, v in _LETTERS.items()}
        word: list[int] = []
        parity = 0
        for tok in text.split():
            if tok == "e":
                continue
            if tok == "c":
                # move c to the right end: c x = psi(x) c
                parity ^= 1
                continue
            if tok not in names:
                raise ValueError(f"unknown generator {tok!r}")
            x = names[tok]
            word.append(_PSI[x] if parity else x)
        return cls(tuple(word), parity)


E = G2Element()
A = G2Element((1,))
B = G2Element((2,))
C = G2Element((), 1)


# thin rectangles

class ShapeError(ValueError):
    """Raised when an operation needs a particular disk shape."""


@dataclass(frozen=True)
class ThinFrame:
    """Coordinates of a ``2 x M`` rectangle: ``long(i)`` in ``[0, M)``, ``side(i)`` in ``{0, 1}``."""

    disk: QuadDisk
    m: int
    long: tuple[int, ...]
    side: tuple[int, ...]

    def row(self, r: int) -> tuple[int, int]:
        """Square indices of the cross row ``r`` (side 0, side 1)."""
        a = [i for i in range(len(self.disk)) if self.long[i] == r]
        a.sort(key=lambda i: self.side[i])
        return a[0], a[1]

    def rows_mask(self, lo: int, hi: int) -> int:
        return sum(1 << i for i in range(len(self.disk)) if lo <= self.long[i] < hi)

    def cross_edge(self, r: int) -> int:
        i, j = self.row(r)
        return self.disk.edge_index[(min(i, j), max(i, j))]


@lru_cache(maxsize=32)
def thin_frame(disk: QuadDisk) -> ThinFrame:
    x0, _, y0, _ = disk.bounds
    w, h = disk.n_cols, disk.n_rows
    if len(disk) != w * h or 2 not in (w, h) or max(w, h) < 3:
        raise ShapeError("the disk must be a 2 x M rectangle with M >= 3")
    if w == 2:
        long = tuple(s.y - y0 for s in disk.squares)
        side = tuple(s.x - x0 for s in disk.squares)
    else:
        long = tuple(s.x - x0 for s in disk.squares)
        side = tuple(s.y - y0 for s in disk.squares)
    return ThinFrame(disk, max(w, h), long, side)


# Colour of the entry-plug squares below the central cross domino that marks
# the floors labelled ``a`` (odd M).  Fixed by requiring Tw = #a - #b on
# 2 x 3 cylinders; see ``calibrate_thin_labels``.
ODD_A_COLOR = -1

# Even M: which side condition carries the pair {a, b} and the entry colours
# of the ``a`` and ``a^-1`` floors; fixed by the same calibration.
EVEN_AB_CONDITION = 0
EVEN_A_COLOR = -1
EVEN_AINV_COLOR = 1


def _one_color(disk: QuadDisk, mask: int, size: int) -> int | None:
    """The common colour of ``mask`` if it has ``size`` squares of one colour."""
    if mask.bit_count() != size:
        return None
    bal = disk.color_balance(mask)
    if bal == size:
        return 1
    if bal == -size:
        return -1
    return None


def thin_floor_label(disk: QuadDisk, f: Floor, params: tuple | None = None) -> G2Element:
    """The label ``g`` with ``phi(f) = (g, 1)`` for a floor at even position."""
    fr = thin_frame(disk)
    m = fr.m
    if m % 2:
        a_color = ODD_A_COLOR if params is None else params[0]
        h = (m - 1) // 2
        if not f.matching >> fr.cross_edge(h) & 1:
            return E
        col = _one_color(disk, f.p0 & fr.rows_mask(0, h), h)
        if col is None:
            return E
        return A if col == a_color else B
    cond_ab, a_col, ainv_col = (EVEN_AB_CONDITION, EVEN_A_COLOR, EVEN_AINV_COLOR) if params is None else params
    h = m // 2
    hits = []
    if f.matching >> fr.cross_edge(h - 1) & 1:
        col = _one_color(disk, f.p0 & fr.rows_mask(0, h - 1), h - 1)
        if col is not None:
            hits.append((0, col))
    if f.matching >> fr.cross_edge(h) & 1:
        col = _one_color(disk, f.p0 & fr.rows_mask(h + 1, m), h - 1)
        if col is not None:
            hits.append((1, col))
    if len(hits) != 1:
        return E
    cond, col = hits[0]
    if cond == cond_ab:
        return A if col == a_col else B
    return A.inverse() if col == ainv_col else B.inverse()


def phi_floors(disk: QuadDisk, floors: Sequence[Floor], params: tuple | None = None) -> G2Element:
    out = E
    for f in floors:
        out = out * G2Element(thin_floor_label(disk, f, params).word, 1)
    return out


def phi(t: CylinderTiling, params: tuple | None = None) -> G2Element:
    """Image of a ``2 x M`` tiling in ``F2 x| Z/2`` (flip invariant, multiplicative)."""
    return phi_floors(t.disk, t.floors, params)


def thin_label_candidates(m: int) -> list[tuple]:
    if m % 2:
        return [(1,), (-1,)]
    return [(c, x, y) for c in (0, 1) for x in (1, -1) for y in (1, -1)]


def calibrate_thin_labels(disk: QuadDisk, heights: Sequence[int] = (2, 4)) -> list[tuple]:
    """Label parameters that make every 2-cell boundary trivial and satisfy
    ``Tw = #a - #b`` (exponent sums) on all tilings of the given even heights."""
    from .moves import enumerate_tilings

    tilings = [t for n in heights for t in enumerate_tilings(disk, n)]
    tw = [twist(t) for t in tilings]
    cells = enumerate_cells(disk)
    good = []
    for params in thin_label_candidates(thin_frame(disk).m):
        if any(not cell_word(disk, c, params).is_identity for c in cells):
            continue
        ok = True
        for t, k in zip(tilings, tw):
            g = phi(t, params)
            if g.exponent_sum(1) - g.exponent_sum(2) != k:
                ok = False
                break
        if ok:
            good.append(params)
    return good


# 2-cells of the plug complex

@dataclass(frozen=True)
class Cell:
    """A 2-cell: ``kind`` is ``bigon``, ``quad`` or ``double``; ``boundary``
    lists the floors with orientation (+1 traversed forwards, -1 backwards)."""

    kind: str
    boundary: tuple[tuple[Floor, int], ...]


def _planar_flips(disk: QuadDisk, matching: int) -> list[int]:
    """Matchings obtained by rotating two parallel dominoes in a 2x2 square."""
    out = []
    sq = disk.squares
    for x, y in [(s.x, s.y) for s in sq]:
        ids = [disk.index.get(p) for p in ((x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1))]
        if None in ids:
            continue
        a, b, c, d = ids

        def e(i, j):
            return 1 << disk.edge_index[(min(i, j), max(i, j))]

        horiz = e(a, b) | e(c, d)
        vert = e(a, c) | e(b, d)
        if matching & horiz == horiz:
            out.append(matching ^ horiz ^ vert)
        elif matching & vert == vert:
            out.append(matching ^ vert ^ horiz)
    return out


def enumerate_cells(disk: QuadDisk, max_plugs: int = 5000) -> list[Cell]:
    """All bigons (planar flips inside one floor), quadrilaterals (flips of a
    vertical pair against two stacked planar dominoes) and the doubled loops
    at the empty plug."""
    plugs = enumerate_plugs(disk)
    if len(plugs) > max_plugs:
        from .floors import BudgetExceeded

        raise BudgetExceeded(f"{len(plugs)} plugs exceed the cell enumeration budget {max_plugs}")
    floors_of = {p: enumerate_floors(disk, p) for p in plugs}
    cells: list[Cell] = []
    for p0 in plugs:
        for m, p1 in floors_of[p0]:
            for m2 in _planar_flips(disk, m):
                if m < m2:
                    cells.append(Cell("bigon", ((Floor(p0, m, p1), 1), (Floor(p0, m2, p1), -1))))
    for p0 in plugs:
        for m1t, p1t in floors_of[p0]:
            for k, (i, j) in enumerate(disk.edges):
                dm = (1 << i) | (1 << j)
                if p1t & dm != dm:
                    continue
                p1 = p1t & ~dm
                f1t = Floor(p0, m1t, p1t)
                f1 = Floor(p0, m1t | 1 << k, p1)
                for m2t, p2 in floors_of[p1t]:
                    f2t = Floor(p1t, m2t, p2)
                    f2 = Floor(p1, m2t | 1 << k, p2)
                    cells.append(Cell("quad", ((f1, 1), (f2, 1), (f2t, -1), (f1t, -1))))
    for m, p1 in floors_of[0]:
        if p1 == 0:
            f = Floor(0, m, 0)
            cells.append(Cell("double", ((f, 1), (f, 1))))
    return cells


def cell_word(disk: QuadDisk, cell: Cell, params: tuple | None = None) -> G2Element:
    out = E
    for f, s in cell.boundary:
        g = G2Element(thin_floor_label(disk, f, params).word, 1)
        out = out * (g if s > 0 else g.inverse())
    return out


@dataclass
class CellReport:
    n_bigons: int
    n_quads: int
    n_doubles: int
    violations: list[tuple[Cell, G2Element]] = field(default_factory=list)
    membership: dict[Floor, list[int]] = field(default_factory=dict)
    thin: bool = False

    @property
    def n_cells(self) -> int:
        return self.n_bigons + self.n_quads + self.n_doubles

    @property
    def sound(self) -> bool:
        return not self.violations

    def floors_without_cells(self) -> list[Floor]:
        return [f for f, ids in self.membership.items() if not ids]


def cell_boundary_check(disk: QuadDisk, max_plugs: int = 5000) -> CellReport:
    """Enumerate the 2-cells, record which cells each floor lies on and, for
    ``2 x M`` rectangles, evaluate ``phi`` on every boundary word."""
    cells = enumerate_cells(disk, max_plugs)
    kinds = [c.kind for c in cells]
    rep = CellReport(kinds.count("bigon"), kinds.count("quad"), kinds.count("double"))
    for p in enumerate_plugs(disk):
        for m, q in enumerate_floors(disk, p):
            rep.membership[Floor(p, m, q)] = []
    for idx, c in enumerate(cells):
        for f, _ in c.boundary:
            lst = rep.membership.setdefault(f, [])
            if not lst or lst[-1] != idx:
                lst.append(idx)
    try:
        thin_frame(disk)
        rep.thin = True
    except ShapeError:
        return rep
    for c in cells:
        w = cell_word(disk, c)
        if not w.is_identity:
            rep.violations.append((c, w))
    return rep


# hamiltonian paths and flux

@dataclass(frozen=True)
class HamPath:
    """Squares ``s_1 .. s_n`` of a hamiltonian path; ``color(s_i) = (-1)^i``."""

    disk: QuadDisk
    order: tuple[int, ...]

    def __post_init__(self):
        disk, order = self.disk, self.order
        if sorted(order) != list(range(len(disk))):
            raise ValueError("a hamiltonian path visits every square once")
        for a, b in zip(order, order[1:]):
            if b not in disk.neighbors[a]:
                raise ValueError("consecutive path squares must be adjacent")
        for pos, i in enumerate(order, start=1):
            if disk.colors[i] != (-1) ** pos:
                raise ValueError("path colours must alternate starting with -1")

    @property
    def position(self) -> dict[int, int]:
        """Square index to 1-based position along the path."""
        return {i: k for k, i in enumerate(self.order, start=1)}

    @property
    def edge_mask(self) -> int:
        """Matching bits of the dominoes contained in the path."""
        out = 0
        for a, b in zip(self.order, self.order[1:]):
            out |= 1 << self.disk.edge_index[(min(a, b), max(a, b))]
        return out

    def chords(self) -> list[int]:
        """Edge indices of the planar dominoes not contained in the path."""
        return [k for k in range(len(self.disk.edges)) if not self.edge_mask >> k & 1]

    def respects(self, matching: int) -> bool:
        return matching & ~self.edge_mask == 0


def _normalise(disk: QuadDisk, order: Sequence[int]) -> tuple[int, ...] | None:
    order = tuple(order)
    if disk.colors[order[0]] != -1:
        order = order[::-1]
    if disk.colors[order[0]] != -1:
        return None
    return order


def _snake(disk: QuadDisk) -> list[int] | None:
    x0, x1, y0, y1 = disk.bounds
    if len(disk) != disk.n_rows * disk.n_cols:
        return None
    order = []
    for k, x in enumerate(range(x0, x1 + 1)):
        ys = range(y1, y0 - 1, -1) if k % 2 == 0 else range(y0, y1 + 1)
        order.extend(disk.index[(x, y)] for y in ys)
    return order


def hamiltonian_path(disk: QuadDisk, node_budget: int = 1_000_000) -> HamPath | None:
    """Column snake for rectangles (from the top left corner, first column
    downwards); otherwise a backtracking search.  ``None`` when no path with
    alternating colours exists or the search budget runs out."""
    if disk.color_balance(disk.full_mask) != 0:
        return None
    order = _snake(disk)
    if order is not None:
        norm = _normalise(disk, order)
        if norm is not None:
            return HamPath(disk, norm)
    n = len(disk)
    nbrs = disk.neighbors
    budget = [node_budget]

    def extend(path: list[int], used: int) -> list[int] | None:
        if len(path) == n:
            return path
        budget[0] -= 1
        if budget[0] < 0:
            return None
        # fewest onward moves first
        cand = [j for j in nbrs[path[-1]] if not used >> j & 1]
        cand.sort(key=lambda j: sum(1 for q in nbrs[j] if not used >> q & 1))
        for j in cand:
            path.append(j)
            got = extend(path, used | 1 << j)
            if got:
                return got
            path.pop()
        return None

    leaves = [i for i in range(n) if len(nbrs[i]) == 1]
    if len(leaves) > 2:
        return None
    starts = leaves or [i for i in range(n) if disk.colors[i] == -1]
    for s in starts:
        got = extend([s], 1 << s)
        if got:
            norm = _normalise(disk, got)
            if norm is not None:
                return HamPath(disk, norm)
        if budget[0] < 0:
            break
    return None


@dataclass(frozen=True)
class Flux:
    minus: int
    zero: int
    plus: int

    def __post_init__(self):
        if self.minus + self.zero + self.plus:
            raise ValueError("flux components must sum to zero")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.minus, self.zero, self.plus)

    def __str__(self) -> str:
        return "({:+d},{:+d},{:+d})".format(*self.as_tuple())


def chord_intervals(path: HamPath, edge: int) -> tuple[range, range, range]:
    """The three position intervals ``I_-1``, ``I_0``, ``I_+1`` cut by a chord."""
    pos = path.position
    i, j = path.disk.edges[edge]
    lo, hi = sorted((pos[i], pos[j]))
    if hi == lo + 1:
        raise ValueError("the domino is contained in the path")
    return range(1, lo), range(lo + 1, hi), range(hi + 1, len(path.disk) + 1)


def flux(path: HamPath, edge: int, plug: int) -> Flux:
    """Signed square counts of ``plug`` over the three chord intervals."""
    if plug & path.disk.edge_masks[edge]:
        raise ValueError("plug is not compatible with the domino")
    order = path.order
    vals = []
    for rng in chord_intervals(path, edge):
        vals.append(sum((-1) ** k for k in rng if plug >> order[k - 1] & 1))
    return Flux(*vals)


def flux_classes(path: HamPath, edge: int) -> dict[Flux, int]:
    """Every achievable flux with a representative compatible plug.

    The representative has the fewest squares, ties broken by the smallest
    mask, which keeps the generator tilings short.
    """
    dm = path.disk.edge_masks[edge]
    out: dict[Flux, int] = {}
    for p in enumerate_plugs(path.disk):
        if p & dm or path.disk.color_balance(p):
            continue
        f = flux(path, edge, p)
        best = out.get(f)
        if best is None or (p.bit_count(), p) < (best.bit_count(), best):
            out[f] = p
    return dict(sorted(out.items(), key=lambda kv: kv[0].as_tuple()))


def flux_class_members(path: HamPath, edge: int, fl: Flux) -> list[int]:
    """All compatible plugs with the given flux, representative first."""
    dm = path.disk.edge_masks[edge]
    found = [p for p in enumerate_plugs(path.disk)
             if not p & dm and not path.disk.color_balance(p) and flux(path, edge, p) == fl]
    return sorted(found, key=lambda p: (p.bit_count(), p))


# cork fillers

def _path_pair(path: HamPath, plug: int) -> tuple[int, int]:
    """Positions of the closest opposite-colour pair of plug squares."""
    pos = [k for k in range(1, len(path.order) + 1) if plug >> path.order[k - 1] & 1]
    best = None
    for a in pos:
        for b in pos:
            if a < b and (b - a) % 2 == 1:
                if best is None or (b - a, a) < (best[1] - best[0], best[0]):
                    best = (a, b)
    if best is None:
        raise ValueError("plug has no opposite-colour pair")
    return best


def _path_dominoes(path: HamPath, lo: int, hi: int) -> int:
    """Matching of the path dominoes (s_lo, s_lo+1), (s_lo+2, s_lo+3), ... up to s_hi."""
    disk, order = path.disk, path.order
    m = 0
    for k in range(lo, hi, 2):
        a, b = order[k - 1], order[k]
        m |= 1 << disk.edge_index[(min(a, b), max(a, b))]
    return m


def eraser_half(path: HamPath, plug: int) -> list[Floor]:
    """Floors from ``plug`` down to the empty plug, two per erased pair."""
    disk, order = path.disk, path.order
    floors = []
    cur = plug
    while cur:
        a, b = _path_pair(path, cur)
        inner = sum(1 << order[k - 1] for k in range(a + 1, b))
        q1 = disk.full_mask & ~(cur | inner)
        rest = cur & ~(1 << order[a - 1]) & ~(1 << order[b - 1])
        floors.append(Floor(cur, _path_dominoes(path, a + 1, b - 1), q1))
        floors.append(Floor(q1, _path_dominoes(path, a, b), rest))
        cur = rest
    return floors


def plug_eraser(path: HamPath, plug: int, n: int | None = None) -> CylinderTiling:
    """Even tiling of the cork ``D x [-n, n]`` with both end plugs ``plug``,
    middle plug empty and every domino inside the path.

    Pairs of opposite-colour plug squares at minimal path distance are erased
    two floors at a time from each end; whatever height is left over in the
    middle is filled vertically.  ``n`` defaults to ``max(|plug|, 2)``.
    """
    disk = path.disk
    if disk.color_balance(plug):
        raise ValueError("only balanced plugs can be erased")
    size = plug.bit_count()
    n = max(size, 2) if n is None else n
    if n % 2 or n < size:
        raise ValueError("height must be even and at least the plug size")
    lower = eraser_half(path, plug)
    middle = []
    if n > size:
        middle = vertical_tiling(disk, 0, 2 * (n - size)).floors
    upper = [f.inverse() for f in reversed(lower)]
    return CylinderTiling.from_floors(disk, lower + middle + upper, z0=-n)


def eraser_filler(path: HamPath, plug: int) -> CylinderTiling:
    """Lower half of ``plug_eraser``: a path-respecting tiling from ``plug`` to the empty plug."""
    if plug == 0:
        return vertical_tiling(path.disk, 0, 2)
    return CylinderTiling.from_floors(path.disk, eraser_half(path, plug))


def _respecting_floors(path: HamPath, p0: int) -> list[tuple[int, int]]:
    """Floors out of ``p0`` whose dominoes all lie along the path."""
    disk, order = path.disk, path.order
    n = len(order)
    target = disk.color_balance(disk.full_mask) - disk.color_balance(p0)
    out = []

    def rec(k: int, m: int, p1: int) -> None:
        while k < n and p0 >> order[k] & 1:
            k += 1
        if k == n:
            if disk.color_balance(p1) == target:
                out.append((m, p1))
            return
        i = order[k]
        rec(k + 1, m, p1 | 1 << i)
        if k + 1 < n and not p0 >> order[k + 1] & 1:
            j = order[k + 1]
            rec(k + 2, m | 1 << disk.edge_index[(min(i, j), max(i, j))], p1)

    rec(0, 0, 0)
    return out


@lru_cache(maxsize=8)
def _respecting_tree(path: HamPath) -> dict:
    """Breadth-first tree from the empty plug over path-respecting floors,
    on states (plug, parity of the number of floors)."""
    parent: dict = {(0, 0): None}
    queue = deque([(0, 0)])
    while queue:
        p, par = queue.popleft()
        for m, q in _respecting_floors(path, p):
            key = (q, par ^ 1)
            if key not in parent:
                parent[key] = (p, par, m)
                queue.append(key)
    return parent


def short_filler(path: HamPath, plug: int, parity: int = 0) -> CylinderTiling:
    """Shortest path-respecting tiling from ``plug`` to the empty plug whose
    height has the given parity (at least one floor)."""
    parent = _respecting_tree(path)
    if plug == 0 and parity == 0:
        return vertical_tiling(path.disk, 0, 2)
    key = (plug, parity)
    if key not in parent:
        raise ValueError("no path-respecting filler with that parity")
    floors = []
    while parent[key] is not None:
        p, par, m = parent[key]
        floors.append(Floor(key[0], m, p))
        key = (p, par)
    return CylinderTiling.from_floors(path.disk, floors)


def generator_tiling(path: HamPath, edge: int, plug: int, compact: bool = True) -> CylinderTiling:
    """The tiling ``t_{d;p}``: empty plug to ``p``, the floor holding the single
    domino ``d`` over ``p``, then back to the empty plug, all other dominoes
    inside the path.

    With ``compact`` both halves are shortest path-respecting fillers (the
    second of odd height, absorbing the vertical floor); otherwise they are
    eraser halves with an explicit vertical floor.  Any two path-respecting
    fillers between the same plugs are flip equivalent after padding, so the
    two variants define the same group element.  ``plug_0`` sits at height 0.
    """
    disk = path.disk
    dm = disk.edge_masks[edge]
    if plug & dm:
        raise ValueError("plug is not compatible with the domino")
    if disk.color_balance(plug):
        raise ValueError("plug must be balanced")
    p1 = disk.full_mask & ~(plug | dm)
    f1 = Floor(plug, 1 << edge, p1)
    if compact:
        head = invert(short_filler(path, plug, 0))
        tail = short_filler(path, p1, 1)
    else:
        head = invert(eraser_filler(path, plug))
        tail = concatenate_all([
            CylinderTiling.from_floors(disk, [Floor(p1, 0, plug | dm)]),
            eraser_filler(path, plug | dm),
        ])
    floors = head.floors + [f1] + tail.floors
    return CylinderTiling.from_floors(disk, floors, z0=-head.height)


def non_respecting_dominoes(path: HamPath, t: CylinderTiling) -> list[tuple[int, int]]:
    """(floor index, edge) of every planar domino of ``t`` outside the path."""
    out = []
    for j, m in enumerate(t.matchings, start=1):
        for k in matching_edges(m & ~path.edge_mask):
            out.append((j, k))
    return out


# the twist-one generator

def _subrectangles(disk: QuadDisk, w: int, h: int) -> list[list[tuple[int, int]]]:
    out = []
    cells = set(disk.index)
    for s in sorted(disk.squares, key=lambda s: (s.x, s.y)):
        box = [(s.x + dx, s.y + dy) for dx in range(w) for dy in range(h)]
        if all(c in cells for c in box):
            out.append(box)
    return out


def _box_tilings(disk: QuadDisk) -> list[CylinderTiling]:
    """Height-4 twist-one tilings of the first 2 x 3 sub-box, lifted to the
    disk with vertical dominoes elsewhere; the ``phi = a`` ones come first."""
    from .moves import enumerate_tilings
    from .tiling import serialize_tiling

    boxes = _subrectangles(disk, 2, 3) or _subrectangles(disk, 3, 2)
    if not boxes:
        raise ShapeError("the disk contains no 2 x 3 rectangle")
    sub = QuadDisk.from_squares(boxes[0])
    small = [t for t in enumerate_tilings(sub, 4) if twist(t) == 1]
    small.sort(key=lambda t: (phi(t) != A, serialize_tiling(t)))
    to_big = [disk.index[(s.x, s.y)] for s in sub.squares]
    outside = disk.full_mask & ~sum(1 << i for i in to_big)

    def lift(mask: int) -> int:
        return sum(1 << to_big[i] for i in sub.squares_of(mask))

    out = []
    for t in small:
        plugs = [lift(p) | (outside if j % 2 else 0) for j, p in enumerate(t.plugs)]
        mats = []
        for m in t.matchings:
            bits = 0
            for k in matching_edges(m):
                a, b = (to_big[i] for i in sub.edges[k])
                bits |= 1 << disk.edge_index[(min(a, b), max(a, b))]
            mats.append(bits)
        big = CylinderTiling(disk, tuple(plugs), tuple(mats)).validate()
        if twist(big) != 1:
            raise AssertionError("embedded generator lost its twist")
        out.append(big)
    return out


@lru_cache(maxsize=8)
def twist_one_generator(disk: QuadDisk, path: HamPath | None = None) -> CylinderTiling:
    """A tiling of height 4 with twist +1: a twist-one tiling of a 2 x 3 x 4
    box with vertical dominoes elsewhere.

    With a path, a box tiling that is itself a generator tiling ``t_{d;p}``
    is preferred (for the 4 x 4 snake this is the chord s3 s6 over the plug
    s2 s5); otherwise the box tiling that ``phi`` sends to ``a``.
    """
    boxes = _box_tilings(disk)
    if path is not None:
        shapes = {t.key() for t in boxes}
        hits = []
        parent = _respecting_tree(path)
        for edge in path.chords():
            dm = disk.edge_masks[edge]
            for plug in enumerate_plugs(disk):
                if plug & dm or disk.color_balance(plug) or (plug, 0) not in parent:
                    continue
                if plug and short_filler(path, plug).height != 2:
                    continue
                t = generator_tiling(path, edge, plug)
                if t.height == 4 and t.key() in shapes:
                    hits.append(t.shifted(0))
        if hits:
            from .tiling import serialize_tiling

            return min(hits, key=serialize_tiling)
    return boxes[0]


def generator_power(a_tile: CylinderTiling, k: int) -> CylinderTiling:
    """``a^k``; negative powers use the z-reflection of ``a`` (its group
    inverse), and ``a^0`` is the vertical tiling of height 2."""
    if k == 0:
        return vertical_tiling(a_tile.disk, a_tile.start_plug, 2)
    base = a_tile if k > 0 else invert(a_tile)
    return concatenate_all([base.shifted(0)] * abs(k))


# regularity

@dataclass
class CaseResult:
    """One (chord, flux class) question ``t_{d;p} ~ a^k``."""

    edge: int
    positions: tuple[int, int]
    flux: Flux
    plug: int
    tiling: CylinderTiling
    k: int
    certificate: FlipTrace | None = None
    route: str = ""          # direct, alternate representative, mirror of <case>, sibling <case>, product <case> * <case>

    @property
    def proven(self) -> bool:
        return self.certificate is not None

    @property
    def label(self) -> str:
        return f"s{self.positions[0]}s{self.positions[1]} {self.flux}"


@dataclass
class RegularityReport:
    disk: QuadDisk
    verdict: str                                  # regular-certified | inconclusive
    cases: list[CaseResult] = field(default_factory=list)
    generator: CylinderTiling | None = None
    path: HamPath | None = None
    commute: FlipTrace | None = None              # a * c ~ c * a
    witnesses: tuple[CylinderTiling, CylinderTiling] | None = None
    reason: str = ""

    @property
    def pending(self) -> list[CaseResult]:
        return [c for c in self.cases if not c.proven]

    @property
    def n_proven(self) -> int:
        return sum(c.proven for c in self.cases)


def _relabel_end(trace: FlipTrace, target: CylinderTiling) -> FlipTrace:
    """Read a trace ending at ``target * vert_m`` as one ending at ``target``."""
    extra = trace.end.height - target.height
    if extra < 0 or (extra and pad_vertical(target, extra) != trace.end) or (not extra and target != trace.end):
        raise ValueError("the trace does not end at a padding of the target")
    return FlipTrace(trace.start, trace.moves, target.shifted(trace.start.z0), trace.pad0, trace.pad1 + extra)


def _product_trace(t_trace: FlipTrace, lo: CaseResult, hi: CaseResult, a_tile: CylinderTiling) -> FlipTrace:
    """``t ~ X * Y``, ``X ~ a^i``, ``Y ~ a^j`` (``i``, ``j`` not of opposite
    signs) combine into ``t ~ a^(i+j)``."""
    both = concat_traces(lo.certificate, hi.certificate)
    if lo.k == 0 and hi.k != 0:
        # vert_2 * a^j: carry the vertical pair to the top
        block = generator_power(a_tile, hi.k)
        lead = vertical_tiling(a_tile.disk, block.start_plug, 2)
        z = both.start.z0
        moves = migration_moves(block, 1, z)
        both = compose_traces(
            both, FlipTrace(concatenate_all([lead, block]).shifted(z), moves, block.shifted(z), 0, 2)
        )
    else:
        both = _relabel_end(both, generator_power(a_tile, lo.k + hi.k))
    return compose_traces(t_trace, both)


def path_symmetries(path: HamPath) -> list[tuple[str, list[int]]]:
    """Non-trivial lattice symmetries of the disk mapping the path to itself
    or to its reverse."""
    from .disk import symmetric_images

    order = list(path.order)
    return [(name, perm) for name, perm in symmetric_images(path.disk)
            if name != "id" and [perm[i] for i in order] in (order, order[::-1])]


def _mirrored_certificate(
    c: CaseResult, path: HamPath, cases: list[CaseResult], a_tile: CylinderTiling,
    max_pad: int, budget: int, time_budget: float | None,
) -> tuple[FlipTrace, str] | None:
    """``t ~ a^k`` from a proven case ``X`` with ``mirror(t) ~ X``."""
    if c.k == 0:
        return None
    sign = 1 if c.k > 0 else -1
    for name, perm in path_symmetries(path):
        img = mirror(c.tiling, perm)
        k2 = twist(img)
        near = sorted((x for x in cases if x.proven and x.k == k2), key=lambda x: x.tiling != img)
        for x in near[:4]:
            status, trace = sim_connect(img, x.tiling, max_pad=max_pad, state_budget=budget, time_budget=time_budget)
            if status != "sim":
                continue
            base = a_tile if k2 > 0 else invert(a_tile)
            status, unit = sim_connect(mirror(base, perm), generator_power(a_tile, sign), max_pad=max_pad,
                                       state_budget=budget, time_budget=time_budget)
            if status != "sim":
                break
            unit = _relabel_end(unit, generator_power(a_tile, sign))
            chain = unit
            for _ in range(abs(c.k) - 1):
                chain = concat_traces(chain, unit)
            back = mirror_trace(compose_traces(_relabel_end(trace, x.tiling), x.certificate), perm)
            return compose_traces(back, _relabel_end(chain, generator_power(a_tile, c.k))), f"{name} of {x.label}"
    return None


def _direct_attempt(args) -> FlipTrace | None:
    t, target, max_pad, budget, time_budget = args
    status, trace = sim_connect(t, target, max_pad=max_pad, state_budget=budget, time_budget=time_budget)
    return trace if status == "sim" else None


def _alternate_attempt(args) -> tuple[int, CylinderTiling, FlipTrace] | None:
    alts, target, max_pad, budget, time_budget = args
    for plug, t in alts:
        status, trace = sim_connect(t, target, max_pad=max_pad, state_budget=budget, time_budget=time_budget)
        if status == "sim":
            return plug, t, trace
    return None


def _product_attempt(args) -> tuple[int, int, FlipTrace] | None:
    t, cands, max_pad, budget, time_budget = args
    for i, j, target in cands:
        status, trace = sim_connect(t, target, max_pad=max_pad, state_budget=budget, time_budget=time_budget)
        if status == "sim":
            return i, j, trace
    return None


def _run(fn, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def thin_witness(disk: QuadDisk, height: int = 4) -> tuple[CylinderTiling, CylinderTiling] | None:
    """Two tilings of a ``2 x M`` cylinder with equal twist and different
    ``phi``; they are not ``~`` equivalent since ``phi`` is flip invariant."""
    from .moves import enumerate_tilings

    seen: dict[int, tuple[G2Element, CylinderTiling]] = {}
    for t in enumerate_tilings(disk, height):
        k, g = twist(t), phi(t)
        if k in seen and seen[k][0] != g:
            return seen[k][1], t
        seen.setdefault(k, (g, t))
    return None


def regularity_check(
    disk: QuadDisk,
    state_budget: int = 1_000_000,
    max_pad: int = 4,
    product_budget: int = 100_000,
    product_pad: int = 2,
    max_products: int = 12,
    rounds: int = 2,
    alternates: int = 8,
    alternate_budget: int = 300_000,
    siblings: int = 12,
    sibling_budget: int = 300_000,
    symmetric: bool = True,
    time_budget: float | None = None,
    workers: int = 1,
) -> RegularityReport:
    """Certify ``t_{d;p} ~ a^k`` for every chord ``d`` and flux class.

    Each case is first searched directly against ``a^k``.  An open case is
    then retried with up to ``alternates`` other plugs of the same flux
    class; a success replaces the case representative.  With ``symmetric``,
    an open case whose image under a lattice symmetry preserving the path
    (up to reversal) connects to a proven case inherits the mirrored
    certificate, joined to ``a^k`` through ``mirror(a^(+-1)) ~ a^(+-1)``.
    Each round then
    searches open cases against up to ``siblings`` proven cases with the same
    ``k`` (same chord first) and composes with their certificates.  Cases still
    open are searched against products ``X * Y`` of two proven cases whose twists
    add up to ``k`` (and are not of opposite signs); the certificates of the
    factors are concatenated and composed with the new one.  ``2 x M``
    rectangles are reported as inconclusive together with a pair of tilings
    separated by ``phi``.
    """
    try:
        thin_frame(disk)
    except ShapeError:
        pass
    else:
        return RegularityReport(disk, "inconclusive", witnesses=thin_witness(disk),
                                reason="2 x M rectangles are not regular: phi separates tilings of equal twist")
    path = hamiltonian_path(disk)
    if path is None:
        return RegularityReport(disk, "inconclusive", reason="no hamiltonian path with alternating colours found")
    try:
        a_tile = twist_one_generator(disk, path)
    except ShapeError as exc:
        return RegularityReport(disk, "inconclusive", path=path, reason=str(exc))
    pos = path.position
    cases: list[CaseResult] = []
    for edge in path.chords():
        i, j = disk.edges[edge]
        for fl, plug in flux_classes(path, edge).items():
            t = generator_tiling(path, edge, plug)
            cases.append(CaseResult(edge, tuple(sorted((pos[i], pos[j]))), fl, plug, t, twist(t)))
    rep = RegularityReport(disk, "inconclusive", cases, a_tile, path)

    jobs = [(c.tiling, generator_power(a_tile, c.k), max_pad, state_budget, time_budget) for c in cases]
    for c, trace in zip(cases, _run(_direct_attempt, jobs, workers)):
        if trace is not None:
            c.certificate = _relabel_end(trace, generator_power(a_tile, c.k))
            c.route = "direct"

    if alternates:
        open_cases = rep.pending
        jobs = []
        for c in open_cases:
            others = [p for p in flux_class_members(path, c.edge, c.flux) if p != c.plug][:alternates]
            alts = [(p, generator_tiling(path, c.edge, p)) for p in others]
            alts = [(p, t) for p, t in alts if twist(t) == c.k]
            jobs.append((alts, generator_power(a_tile, c.k), max_pad, alternate_budget, time_budget))
        for c, got in zip(open_cases, _run(_alternate_attempt, jobs, workers)):
            if got is not None:
                c.plug, c.tiling, trace = got
                c.certificate = _relabel_end(trace, generator_power(a_tile, c.k))
                c.route = "direct, alternate representative"

    if symmetric:
        for c in rep.pending:
            got = _mirrored_certificate(c, path, cases, a_tile, max_pad, sibling_budget, time_budget)
            if got is not None:
                c.certificate, c.route = got

    for _ in range(rounds):
        open_cases = rep.pending
        if not open_cases:
            break
        progress = False
        if siblings:
            done = [c for c in cases if c.proven]
            jobs = []
            for c in open_cases:
                near = sorted((x for x, s in enumerate(done) if s.k == c.k),
                              key=lambda x: (done[x].edge != c.edge, abs(done[x].tiling.height - c.tiling.height), x))
                jobs.append((c.tiling, [(x, x, done[x].tiling) for x in near[:siblings]],
                             product_pad, sibling_budget, time_budget))
            for c, got in zip(open_cases, _run(_product_attempt, jobs, workers)):
                if got is None:
                    continue
                x, _, trace = got
                c.certificate = compose_traces(_relabel_end(trace, done[x].tiling), done[x].certificate)
                c.route = f"sibling {done[x].label}"
                progress = True
            open_cases = rep.pending
            if not open_cases:
                break
        done = [c for c in cases if c.proven]
        jobs = []
        for c in open_cases:
            cands = []
            for x, lo in enumerate(done):
                for y, hi in enumerate(done):
                    if lo.k + hi.k != c.k or lo.k * hi.k < 0 or (lo.k == 0 and hi.k == 0 and c.k != 0):
                        continue
                    same = (lo.edge == c.edge) + (hi.edge == c.edge)
                    cands.append((-same, abs(lo.tiling.height + hi.tiling.height - c.tiling.height), x, y))
            cands.sort()
            chosen = [(x, y, concatenate_all([done[x].tiling.shifted(0), done[y].tiling]))
                      for _, _, x, y in cands[:max_products]]
            jobs.append((c.tiling, chosen, product_pad, product_budget, time_budget))
        for c, got in zip(open_cases, _run(_product_attempt, jobs, workers)):
            if got is None:
                continue
            x, y, trace = got
            c.certificate = _product_trace(trace, done[x], done[y], a_tile)
            c.route = f"product {done[x].label} * {done[y].label}"
            progress = True
        if not progress:
            break

    c_tile = CylinderTiling.from_floors(disk, [Floor(0, min(_planar_tilings(disk)), 0)])
    ac = concatenate_all([a_tile.shifted(0), c_tile])
    ca = concatenate_all([c_tile, a_tile])
    status, trace = sim_connect(ac, ca, max_pad=max_pad, state_budget=state_budget, time_budget=time_budget)
    rep.commute = trace if status == "sim" else None

    ok = rep.commute is not None and verify_certificate(rep.commute)[0]
    for c in cases:
        if c.proven and not _check_case(c, a_tile):
            c.certificate = None
            c.route = "rejected"
        ok = ok and c.proven
    rep.verdict = "regular-certified" if ok else "inconclusive"
    if not ok:
        rep.reason = f"{len(rep.pending)} case(s) open" + ("" if rep.commute else "; a * c ~ c * a not found")
    return rep


def _planar_tilings(disk: QuadDisk) -> list[int]:
    from .floors import tilings_of_planar_region

    return tilings_of_planar_region(disk)


def _check_case(c: CaseResult, a_tile: CylinderTiling) -> bool:
    """Replay the certificate and match its ends with ``t_{d;p}`` and ``a^k``."""
    tr = c.certificate
    if tr is None or c.k != twist(c.tiling):
        return False
    if tr.start != c.tiling or tr.end != generator_power(a_tile, c.k):
        return False
    return verify_certificate(tr)[0]
