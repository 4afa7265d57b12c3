"""Max-plus machinery for the growth constant ``c_D``.

Edge weights are ``w(p0, p1) = max 4 tau^{e2}(f; p0, p1)`` over floors ``f``
joining the two plugs (integers: quarters of twist).  ``c_D`` is the maximum
cycle mean of this graph, divided by 4.

For large plug graphs the mean is found by max-plus power iteration until
the iterates become periodic, ``x_{k+c} = x_k + c * lam``.  The periodic
block yields potentials ``D`` with ``c*w(u,v) + D(v) - D(u) <= c*lam`` on
every edge, which is an upper-bound certificate, and every plug has a tight
out-edge, so following tight edges closes a cycle of mean exactly ``lam``
(the lower bound).  Karp's algorithm is kept as an independent check on
small graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .disk import QuadDisk
from .floors import build_transfer_graph, enumerate_floors_weighted
from .tiling import Floor
from .twist import path_twist4

NEG = np.iinfo(np.int64).min // 4  # stands in for -infinity


@dataclass
class TropicalMatrix:
    """Sparse max-plus matrix over plugs; absent entries are -infinity."""

    disk: QuadDisk
    plugs: list[int]
    src: np.ndarray
    dst: np.ndarray
    w4: np.ndarray
    row_start: np.ndarray

    @property
    def n(self) -> int:
        return len(self.plugs)

    @property
    def index(self) -> dict[int, int]:
        return {p: i for i, p in enumerate(self.plugs)}

    def entry4(self, p0: int, p1: int) -> int | None:
        i, j = self.index[p0], self.index[p1]
        lo, hi = self.row_start[i], self.row_start[i + 1]
        hit = np.nonzero(self.dst[lo:hi] == j)[0]
        return int(self.w4[lo + hit[0]]) if len(hit) else None

    def entry(self, p0: int, p1: int) -> Fraction | None:
        v = self.entry4(p0, p1)
        return None if v is None else Fraction(v, 4)

    def dense4(self) -> np.ndarray:
        out = np.full((self.n, self.n), NEG, dtype=np.int64)
        out[self.src, self.dst] = self.w4
        return out

    def step(self, x: np.ndarray, scale: int = 1) -> np.ndarray:
        """``y(u) = max_v scale * w(u, v) + x(v)``."""
        vals = scale * self.w4 + x[self.dst]
        return np.maximum.reduceat(vals, self.row_start[:-1])


def build_tropical_matrix(disk: QuadDisk) -> TropicalMatrix:
    g = build_transfer_graph(disk)
    s, d, w = g.pair_max_weight
    order = np.lexsort((d, s))
    s, d, w = s[order], d[order], w[order]
    row_start = np.searchsorted(s, np.arange(g.n_plugs + 1))
    if np.any(np.diff(row_start) == 0):
        raise ValueError("a plug has no outgoing floor")
    return TropicalMatrix(disk, g.plugs, s, d, w, row_start)


def maxplus_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense max-plus product with NEG as -infinity."""
    n = a.shape[0]
    out = np.full((n, b.shape[1]), NEG, dtype=np.int64)
    for k in range(a.shape[1]):
        col = a[:, k:k + 1]
        row = b[k:k + 1, :]
        cand = col + row
        cand[(col <= NEG) | (row <= NEG)] = NEG
        np.maximum(out, cand, out=out)
    return out


def tropical_power(m: TropicalMatrix, n: int) -> np.ndarray:
    """Dense ``M^n`` in quarter units (NEG marks -infinity); small graphs only."""
    if n < 1:
        raise ValueError("power must be positive")
    if m.n > 2000:
        raise ValueError("dense tropical powers are limited to small plug graphs")
    base = m.dense4()
    out = base.copy()
    for _ in range(n - 1):
        out = maxplus_product(out, base)
    return out


def tropical_entry_power(m: TropicalMatrix, n: int, p0: int, p1: int) -> int | None:
    """``(M^n)_{p0,p1}`` in quarters via a single max-plus vector iteration."""
    idx = m.index
    x = np.full(m.n, NEG, dtype=np.int64)
    x[idx[p1]] = 0
    for _ in range(n):
        x = m.step(x)
        x[x < NEG // 2] = NEG
    v = int(x[idx[p0]])
    return None if v <= NEG // 2 else v


# cycle means

def karp_max_cycle_mean4(m: TropicalMatrix) -> Fraction:
    """Karp's algorithm on the weighted digraph (quarter units); O(n * edges)."""
    n = m.n
    dk = np.full((n + 1, n), NEG, dtype=np.int64)
    dk[0, :] = 0  # virtual source linked to every vertex
    # propagate forward along edges: D_{k}(v) = max_u D_{k-1}(u) + w(u, v)
    for k in range(1, n + 1):
        prev = dk[k - 1]
        cand = prev[m.src] + m.w4
        cand[prev[m.src] <= NEG // 2] = NEG
        row = np.full(n, NEG, dtype=np.int64)
        np.maximum.at(row, m.dst, cand)
        dk[k] = row
    best = None
    for v in range(n):
        if dk[n, v] <= NEG // 2:
            continue
        worst = None
        for k in range(n):
            if dk[k, v] <= NEG // 2:
                continue
            val = Fraction(int(dk[n, v] - dk[k, v]), n - k)
            worst = val if worst is None or val < worst else worst
        if worst is not None and (best is None or worst > best):
            best = worst
    return best


@dataclass
class CycleWitness:
    plugs: list[int]            # closed: plugs[0] == plugs[-1]
    floors: list[Floor]
    twist4: int

    @property
    def length(self) -> int:
        return len(self.floors)

    @property
    def mean(self) -> Fraction:
        return Fraction(self.twist4, 4 * self.length)

    @property
    def twist(self) -> Fraction:
        return Fraction(self.twist4, 4)


@dataclass
class CycleMeanResult:
    mean4: Fraction               # maximum cycle mean in quarter units
    witness: CycleWitness
    potentials: np.ndarray        # scaled by ``period``
    period: int
    iterations: int

    @property
    def c(self) -> Fraction:
        return self.mean4 / 4


def max_cycle_mean(m: TropicalMatrix, max_iter: int = 20000, max_period: int = 64) -> CycleMeanResult:
    """Maximum cycle mean with potentials and an optimal simple cycle."""
    # history entries are normalised by their own max, so recover the raw growth
    x = np.zeros(m.n, dtype=np.int64)
    raw = [x]
    offsets = [0]
    it = 0
    found = None
    while it < max_iter:
        it += 1
        y = m.step(raw[-1])
        top = int(y.max())
        raw.append(y - top)
        offsets.append(offsets[-1] + top)
        for c in range(1, min(max_period, it) + 1):
            if np.array_equal(raw[-1], raw[-1 - c]):
                found = c
                break
        if found:
            break
        if len(raw) > max_period + 2:
            raw.pop(0)
            offsets.pop(0)
    if not found:
        raise RuntimeError("max-plus iteration did not become periodic within the iteration cap")
    c = found
    lam_num = offsets[-1] - offsets[-1 - c]  # growth over c steps, quarters
    block = raw[-1 - c:-1]
    boff = offsets[-1 - c:-1]
    # D(u) = max_j c*x_{k+j}(u) - j*lam_num with x_{k+j} = raw + offset
    pots = None
    for j, (r, off) in enumerate(zip(block, boff)):
        cand = c * (r + (off - boff[0])) - j * lam_num
        pots = cand if pots is None else np.maximum(pots, cand)
    reduced = c * m.w4 + pots[m.dst] - pots[m.src]
    if reduced.max() > lam_num:
        raise RuntimeError("potentials fail the sub-eigenvector check")
    tight = reduced == lam_num
    # follow tight edges from plug 0 until a plug repeats
    nxt = {}
    for e in np.nonzero(tight)[0]:
        nxt.setdefault(int(m.src[e]), int(m.dst[e]))
    seen: dict[int, int] = {}
    path = [0]
    while path[-1] not in seen:
        seen[path[-1]] = len(path) - 1
        path.append(nxt[path[-1]])
    cyc = path[seen[path[-1]]:]
    plugs = [m.plugs[i] for i in cyc]
    floors = realise_cycle(m, plugs)
    tw4 = path_twist4(m.disk, floors)
    mean4 = Fraction(lam_num, c)
    if Fraction(tw4, len(floors)) != mean4:
        raise RuntimeError("tight cycle does not realise the cycle mean")
    return CycleMeanResult(mean4, CycleWitness(plugs, floors, tw4), pots, c, it)


def realise_cycle(m: TropicalMatrix, plugs: Sequence[int]) -> list[Floor]:
    """Pick, for each consecutive plug pair, a floor of maximal weight."""
    floors = []
    for p0, p1 in zip(plugs, plugs[1:]):
        want = m.entry4(p0, p1)
        best = min((mt for mt, q, w in enumerate_floors_weighted(m.disk, p0) if q == p1 and w == want))
        floors.append(Floor(p0, best, p1))
    return floors


def upper_bound_certificate(m: TropicalMatrix, n: int, potentials: np.ndarray | None = None, scale: int = 1) -> Fraction:
    """``m / n`` with ``m = max_{p0,p1} (M^n)_{p0,p1} + D(p1) - D(p0)`` in twist units.

    ``potentials`` are given multiplied by ``scale`` (as produced by
    ``max_cycle_mean``); ``None`` means ``D = 0``.
    """
    pots = np.zeros(m.n, dtype=np.int64) if potentials is None else potentials.astype(np.int64)
    y = pots.copy()
    for _ in range(n):
        y = m.step(y, scale)
    top = Fraction(int((y - pots).max()), scale)  # quarters
    return top / 4 / n


def certificate_value(m: TropicalMatrix, n: int, potentials: np.ndarray | None = None, scale: int = 1) -> Fraction:
    """The maximum ``m`` itself (twist units) for the bound ``c_D <= m / n``."""
    return upper_bound_certificate(m, n, potentials, scale) * n
