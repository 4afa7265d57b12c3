"""Exact transfer-matrix counting, plain and twist-weighted.

The fast route works modulo a handful of primes below 2**31 with sparse int64
matrix products and reconstructs the exact integer by the Chinese remainder
theorem; the number of primes comes from the bound ``(max row sum) ** N``.
The streaming route keeps Python integers in plug-keyed dictionaries and
regenerates floors on demand; it serves disks too large to materialise and
acts as an independent check on small ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .disk import QuadDisk
from .floors import TransferGraph, build_transfer_graph, enumerate_floors_weighted, MAX_MATERIALIZED_SQUARES


@dataclass
class TwistPolynomial:
    """Map from quarter-integer exponent (stored as ``4 * exponent``) to count."""

    coeffs4: dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_twists(cls, twists: Iterable) -> "TwistPolynomial":
        out: dict[int, int] = {}
        for t in twists:
            k = int(Fraction(t) * 4)
            out[k] = out.get(k, 0) + 1
        return cls(out)

    def __getitem__(self, t) -> int:
        return self.coeffs4.get(int(Fraction(t) * 4), 0)

    @property
    def total(self) -> int:
        return sum(self.coeffs4.values())

    @property
    def integral(self) -> bool:
        return all(k % 4 == 0 for k, c in self.coeffs4.items() if c)

    def support(self) -> list[Fraction]:
        return [Fraction(k, 4) for k in sorted(self.coeffs4) if self.coeffs4[k]]

    def items(self) -> list[tuple[Fraction, int]]:
        return [(Fraction(k, 4), c) for k, c in sorted(self.coeffs4.items()) if c]

    def as_int_dict(self) -> dict[int, int]:
        if not self.integral:
            raise ValueError("census has non-integral exponents")
        return {k // 4: c for k, c in sorted(self.coeffs4.items()) if c}

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Mapping):
            other = TwistPolynomial({int(Fraction(k) * 4): v for k, v in other.items()})
        if not isinstance(other, TwistPolynomial):
            return NotImplemented
        a = {k: v for k, v in self.coeffs4.items() if v}
        b = {k: v for k, v in other.coeffs4.items() if v}
        return a == b


# modular arithmetic helpers

def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_below(limit: int, count: int) -> list[int]:
    out = []
    n = limit - 1
    while len(out) < count:
        if _is_prime(n):
            out.append(n)
        n -= 1
    return out


def crt(residues: list[int], moduli: list[int]) -> int:
    x, m = 0, 1
    for r, q in zip(residues, moduli):
        # solve x + m*k = r (mod q)
        k = (r - x) * pow(m, -1, q) % q
        x += m * k
        m *= q
    return x


PRIME_LIMIT = 1 << 31


def _primes_for_bound(bound: int) -> list[int]:
    count = 1
    while True:
        ps = primes_below(PRIME_LIMIT, count)
        prod = 1
        for p in ps:
            prod *= p
        if prod > bound:
            return ps
        count += 1


def _row_sum_bound(graph: TransferGraph) -> int:
    s, _, c = graph.pair_counts
    sums = np.bincount(s, weights=c, minlength=graph.n_plugs)
    return int(sums.max())


# fast counting on a materialised graph

def count_cork(disk: QuadDisk, n: int, p0: int = 0, p1: int = 0) -> int:
    """Number of tilings of the cork of height ``n`` with end plugs ``p0``, ``p1``."""
    if n < 0:
        raise ValueError("height must be nonnegative")
    if n == 0:
        return int(p0 == p1)
    if len(disk) > MAX_MATERIALIZED_SQUARES:
        return count_streaming(disk, n, p0, p1)
    g = build_transfer_graph(disk)
    a = g.adjacency_sparse()
    i0, i1 = g.index[p0], g.index[p1]
    bound = _row_sum_bound(g) ** n
    primes = _primes_for_bound(bound)
    residues = []
    for q in primes:
        am = a.copy()
        am.data %= q
        x = np.zeros(g.n_plugs, dtype=np.int64)
        x[i1] = 1
        for _ in range(n):
            x = (am @ x) % q
        residues.append(int(x[i0]))
    return crt(residues, primes)


def count_tilings(disk: QuadDisk, n: int) -> int:
    """Number of tilings of ``disk x [0, n]``."""
    if n < 1:
        raise ValueError("height must be at least 1")
    return count_cork(disk, n, 0, 0)


def twist_census(disk: QuadDisk, n: int, p0: int = 0, p1: int = 0) -> TwistPolynomial:
    """Counts of cork tilings by ``4 * twist`` (u = e2), exact."""
    if n < 1:
        raise ValueError("height must be at least 1")
    if len(disk) > MAX_MATERIALIZED_SQUARES:
        return census_streaming(disk, n, p0, p1)
    from scipy.sparse import csr_matrix

    g = build_transfer_graph(disk)
    wmax = int(np.abs(g.w4).max()) if len(g.w4) else 0
    offset = n * wmax
    width = 2 * offset + 1
    deltas = sorted(set(int(w) for w in g.w4))
    mats = {}
    for dw in deltas:
        sel = g.w4 == dw
        mats[dw] = csr_matrix(
            (g.count[sel], (g.src[sel].astype(np.int64), g.dst[sel].astype(np.int64))),
            shape=(g.n_plugs, g.n_plugs),
            dtype=np.int64,
        )
    i0, i1 = g.index[p0], g.index[p1]
    bound = _row_sum_bound(g) ** n
    primes = _primes_for_bound(bound)
    per_prime = []
    for q in primes:
        x = np.zeros((g.n_plugs, width), dtype=np.int64)
        x[i1, offset] = 1
        lo = hi = offset  # occupied column range
        for _ in range(n):
            y = np.zeros_like(x)
            for dw, m in mats.items():
                prod = (m @ x[:, lo:hi + 1]) % q
                y[:, lo + dw:hi + 1 + dw] += prod
            lo, hi = lo - wmax, hi + wmax
            x = y % q
        per_prime.append(x[i0].copy())
    coeffs = {}
    for col in range(width):
        val = crt([int(r[col]) for r in per_prime], primes)
        if val:
            coeffs[col - offset] = val
    return TwistPolynomial(coeffs)


# streaming route

def _floors_cached(disk: QuadDisk):
    cache: dict[int, list[tuple[int, int, int]]] = {}

    def get(p: int):
        rows = cache.get(p)
        if rows is None:
            rows = enumerate_floors_weighted(disk, p)
            cache[p] = rows
        return rows

    return get


def count_streaming(disk: QuadDisk, n: int, p0: int = 0, p1: int = 0) -> int:
    """Forward dynamic programme over plug dictionaries with Python integers."""
    floors = _floors_cached(disk)
    x = {p0: 1}
    for _ in range(n):
        y: dict[int, int] = {}
        for p, c in x.items():
            for _, q, _ in floors(p):
                y[q] = y.get(q, 0) + c
        x = y
    return x.get(p1, 0)


def census_streaming(disk: QuadDisk, n: int, p0: int = 0, p1: int = 0) -> TwistPolynomial:
    floors = _floors_cached(disk)
    x: dict[tuple[int, int], int] = {(p0, 0): 1}
    for _ in range(n):
        y: dict[tuple[int, int], int] = {}
        for (p, w), c in x.items():
            for _, q, dw in floors(p):
                key = (q, w + dw)
                y[key] = y.get(key, 0) + c
        x = y
    return TwistPolynomial({w: c for (q, w), c in x.items() if q == p1})


def min_positive_power(disk: QuadDisk, cap: int) -> int | None:
    """Least ``N <= cap`` with every entry of ``A^N`` positive, else ``None``."""
    if cap < 1:
        return None
    g = build_transfer_graph(disk)
    n = g.n_plugs
    s, d, _ = g.pair_counts
    a = np.zeros((n, n), dtype=bool)
    a[s, d] = True
    ai = a.astype(np.int32)
    power = a.copy()
    for k in range(1, cap + 1):
        if power.all():
            return k
        power = (power.astype(np.int32) @ ai) > 0
    return None
