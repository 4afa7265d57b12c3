"""Plugs, floors and the transfer graph of a disk.

Floors out of a plug are generated square by square in index order: each
square is either already covered by the entry plug, the first half of a
planar domino with a later neighbour, or a monomer that joins the exit plug.
The exit plug is kept only when the residue is balanced.  The twist weight ``4 tau^{e2}``
is accumulated incrementally along the way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterator

import numpy as np

from .disk import QuadDisk
from .tiling import is_plug
from .twist import edge_weight_masks


class BudgetExceeded(RuntimeError):
    """Raised when a computation would exceed its configured budget."""


def enumerate_plugs(disk: QuadDisk) -> list[int]:
    """All plugs of the disk, in increasing mask order.

    For a balanced disk these are the balanced subsets.  For an unbalanced
    disk with excess ``e = #black - #white`` the plugs of a cylinder alternate
    between excess 0 and excess ``e``, so both kinds are listed.
    """
    black = disk.squares_of(disk.black_mask)
    white = disk.squares_of(disk.white_mask)
    excess = disk.color_balance(disk.full_mask)
    out = []
    for e in sorted({0, excess}):
        for k in range(len(black) + 1):
            if not 0 <= k - e <= len(white):
                continue
            bsets = [sum(1 << i for i in c) for c in combinations(black, k)]
            wsets = [sum(1 << i for i in c) for c in combinations(white, k - e)]
            out.extend(b | w for b in bsets for w in wsets)
    out.sort()
    return out


def tilings_of_planar_region(disk: QuadDisk, forbidden: int = 0) -> list[int]:
    """All perfect matchings (edge bit masks) of the squares outside ``forbidden``."""
    region = disk.full_mask & ~forbidden
    out: list[int] = []
    fwd = disk.forward_edges
    n = len(disk)

    def rec(i: int, covered: int, m: int) -> None:
        while i < n and (covered >> i & 1 or not region >> i & 1):
            i += 1
        if i == n:
            out.append(m)
            return
        for j, k in fwd[i]:
            if region >> j & 1 and not covered >> j & 1:
                rec(i + 1, covered | (1 << j), m | (1 << k))

    rec(0, 0, 0)
    out.sort()
    return out


def _floor_walk(disk: QuadDisk, p0: int, u: str = "e2"):
    """Yield ``(matching, p1, 4 tau^u(f; p0, p1))`` for every floor out of ``p0``."""
    n = len(disk)
    fwd = disk.forward_edges
    colors = disk.colors
    pos, neg = edge_weight_masks(disk, u)
    # square -> edge masks of dominoes having that square in their +/- strips
    spos = [0] * n
    sneg = [0] * n
    for k in range(len(disk.edges)):
        for i in disk.squares_of(pos[k]):
            spos[i] |= 1 << k
        for i in disk.squares_of(neg[k]):
            sneg[i] |= 1 << k
    wp0 = [(p0 & pos[k]).bit_count() - (p0 & neg[k]).bit_count() for k in range(len(disk.edges))]

    target = disk.color_balance(disk.full_mask) - disk.color_balance(p0)
    stack = [(0, p0, 0, 0, 0, 0)]
    while stack:
        i, covered, m, p1, w, bal = stack.pop()
        while i < n and covered >> i & 1:
            i += 1
        if i == n:
            if bal == target:
                yield m, p1, w
            continue
        bit = 1 << i
        # monomer: square i joins the exit plug
        stack.append((
            i + 1, covered | bit, m, p1 | bit,
            w + (m & spos[i]).bit_count() - (m & sneg[i]).bit_count(),
            bal + colors[i],
        ))
        for j, k in fwd[i]:
            if not covered >> j & 1:
                stack.append((
                    i + 1, covered | bit | (1 << j), m | (1 << k), p1,
                    w + (p1 & pos[k]).bit_count() - (p1 & neg[k]).bit_count() - wp0[k],
                    bal,
                ))


def enumerate_floors(disk: QuadDisk, p0: int, u: str = "e2") -> list[tuple[int, int]]:
    """All floors ``(matching, p1)`` leaving ``p0``, sorted by matching then exit plug."""
    if not is_plug(disk, p0):
        raise ValueError("entry plug is not a plug of the disk")
    return sorted((m, p1) for m, p1, _ in _floor_walk(disk, p0, u))


def enumerate_floors_weighted(disk: QuadDisk, p0: int, u: str = "e2") -> list[tuple[int, int, int]]:
    """Like ``enumerate_floors`` with ``4 tau^u(f; p0, p1)`` attached."""
    return sorted(_floor_walk(disk, p0, u))


@dataclass
class TransferGraph:
    """Plug graph of a disk with aggregated floor multiplicities.

    ``src``, ``dst``, ``w4`` and ``count`` are parallel arrays, one row per
    distinct ``(p0, p1, 4 tau^{e2})`` triple, sorted by source index.
    ``count`` holds the number of floors realising that triple.
    """

    disk: QuadDisk
    plugs: list[int]
    src: np.ndarray
    dst: np.ndarray
    w4: np.ndarray
    count: np.ndarray
    index: dict = field(repr=False, default_factory=dict)

    @property
    def n_plugs(self) -> int:
        return len(self.plugs)

    @cached_property
    def pair_counts(self):
        """(src, dst, multiplicity) with multiplicities summed over weights."""
        key = self.src.astype(np.int64) * self.n_plugs + self.dst
        uniq, inv = np.unique(key, return_inverse=True)
        tot = np.zeros(len(uniq), dtype=np.int64)
        np.add.at(tot, inv, self.count)
        return (uniq // self.n_plugs).astype(np.int64), (uniq % self.n_plugs).astype(np.int64), tot

    @cached_property
    def pair_max_weight(self):
        """(src, dst, max 4 tau^{e2}) over floors joining each pair, sorted by src."""
        key = self.src.astype(np.int64) * self.n_plugs + self.dst
        order = np.lexsort((-self.w4, key))
        k_sorted = key[order]
        first = np.ones(len(k_sorted), dtype=bool)
        first[1:] = k_sorted[1:] != k_sorted[:-1]
        sel = order[first]
        return self.src[sel].astype(np.int64), self.dst[sel].astype(np.int64), self.w4[sel].astype(np.int64)

    def adjacency_sparse(self):
        from scipy.sparse import csr_matrix

        s, d, c = self.pair_counts
        return csr_matrix((c, (s, d)), shape=(self.n_plugs, self.n_plugs), dtype=np.int64)

    def out_edges(self, p0: int):
        """Aggregated rows leaving plug mask ``p0``: list of (p1, w4, count)."""
        i = self.index[p0]
        lo, hi = np.searchsorted(self.src, [i, i + 1])
        return [(self.plugs[int(self.dst[r])], int(self.w4[r]), int(self.count[r])) for r in range(lo, hi)]

    def edge_count(self, p0: int, p1: int) -> int:
        return sum(c for q, _, c in self.out_edges(p0) if q == p1)

    def dump_lines(self) -> Iterator[str]:
        """Text dump "p0-bits p1-bits matching-bits", one line per floor."""
        for p0 in self.plugs:
            for m, p1 in enumerate_floors(self.disk, p0):
                yield f"{self.disk.mask_to_bits(p0)} {self.disk.mask_to_bits(p1)} {_bits(m, len(self.disk.edges))}"


def _bits(m: int, n: int) -> str:
    return "".join("1" if m >> k & 1 else "0" for k in range(n))


MAX_MATERIALIZED_SQUARES = 16


@lru_cache(maxsize=8)
def build_transfer_graph(disk: QuadDisk, max_squares: int = MAX_MATERIALIZED_SQUARES) -> TransferGraph:
    """Materialise the aggregated plug graph (twist weights use u = e2)."""
    if len(disk) > max_squares:
        raise BudgetExceeded(
            f"transfer graph for {len(disk)} squares is not materialised (limit {max_squares});"
            " use the streaming floor enumeration instead"
        )
    plugs = enumerate_plugs(disk)
    index = {p: i for i, p in enumerate(plugs)}
    src, dst, w4, cnt = [], [], [], []
    for i, p0 in enumerate(plugs):
        agg: dict[tuple[int, int], int] = {}
        for _, p1, w in _floor_walk(disk, p0):
            key = (index[p1], w)
            agg[key] = agg.get(key, 0) + 1
        for (j, w), c in sorted(agg.items()):
            src.append(i)
            dst.append(j)
            w4.append(w)
            cnt.append(c)
    return TransferGraph(
        disk,
        plugs,
        np.asarray(src, dtype=np.int32),
        np.asarray(dst, dtype=np.int32),
        np.asarray(w4, dtype=np.int32),
        np.asarray(cnt, dtype=np.int64),
        index,
    )
