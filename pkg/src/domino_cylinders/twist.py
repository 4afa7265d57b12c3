"""The twist invariant.

Two independent routes are provided:

* ``tau_pair`` / ``twist_pairwise``: the shade-based double sum over all
  ordered pairs of 3D dominoes (quadratic, used as an oracle);
* ``floor_twist`` / ``twist``: the per-floor decomposition, where a floor
  contributes ``tau(f, p1) - tau(f, p0)`` and ``tau(f, p)`` only involves the
  horizontal dominoes of ``f`` and the vertical dominoes through ``p``.

Values are exact: quarter integers are carried as ``4 * value`` integers
internally and exposed as ``fractions.Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .disk import QuadDisk
from .tiling import CylinderTiling, Domino3D, Floor, matching_edges

AXIS_VECTORS = {
    "e1": (1, 0, 0),
    "-e1": (-1, 0, 0),
    "e2": (0, 1, 0),
    "-e2": (0, -1, 0),
}


class TwistError(ArithmeticError):
    """Raised when a quantity that must be an integer is not."""


def _axis(u) -> tuple[int, int, int]:
    if isinstance(u, str):
        if u not in AXIS_VECTORS:
            raise ValueError(f"unsupported axis {u!r}; use one of {sorted(AXIS_VECTORS)}")
        return AXIS_VECTORS[u]
    vec = tuple(int(c) for c in u)
    if vec not in AXIS_VECTORS.values():
        raise ValueError(f"unsupported axis {vec}")
    return vec


def _det3(a, b, c) -> int:
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


def in_shade(d0: Domino3D, d1: Domino3D, u) -> bool:
    """Does the interior of ``d1`` meet the open half-infinite prism cast by ``d0`` along ``u``?"""
    u = _axis(u)
    k = next(i for i in range(3) if u[i])
    b0, b1 = d0.box, d1.box
    for i in range(3):
        if i != k and not (b1[i][0] < b0[i][1] and b0[i][0] < b1[i][1]):
            return False
    if u[k] > 0:
        return b1[k][1] > b0[k][1]
    return b1[k][0] < b0[k][0]


def tau_pair4(d0: Domino3D, d1: Domino3D, u="e2") -> int:
    """``4 * tau^u(d0, d1)``; 0 unless ``d1`` meets the shade of ``d0``."""
    if not in_shade(d0, d1, u):
        return 0
    return _det3(d1.v, d0.v, _axis(u))


def tau_pair(d0: Domino3D, d1: Domino3D, u="e2") -> Fraction:
    return Fraction(tau_pair4(d0, d1, u), 4)


def twist_pairwise4(dominoes: Sequence[Domino3D], u="e2") -> int:
    """Quadratic double sum of ``4 * tau^u`` over ordered pairs."""
    total = 0
    for i, d0 in enumerate(dominoes):
        for j, d1 in enumerate(dominoes):
            if i != j:
                total += tau_pair4(d0, d1, u)
    return total


def twist_pairwise(t: CylinderTiling, u="e2") -> int:
    q = twist_pairwise4(t.dominoes(), u)
    if q % 4:
        raise TwistError(f"pairwise twist {Fraction(q, 4)} is not an integer")
    return q // 4


# per-floor route

@lru_cache(maxsize=None)
def edge_weight_masks(disk: QuadDisk, u="e2") -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Per planar domino k, masks of squares s with ``4 tau^u(d_k, s) = +1`` / ``-1``.

    Here ``tau(d, s)`` is the interaction of ``d x [0,1]`` with the vertical
    domino ``s x [0,2]`` in both orders.  Only dominoes perpendicular to ``u``
    contribute, and only with squares in the strip they span along ``u``:
    with ``sigma_s = -color(s)`` and ``sigma_d = -color`` of the lower-left
    square of ``d``, the value is ``sigma_s sigma_d`` times the sign of the
    offset along ``u`` (negated for the first axis).
    """
    key = _axis(u)
    along_x = key[1] == 0  # u = +-e1: y-dominoes matter, strip is their row pair
    pos, neg = [], []
    sq = disk.squares
    for a, b in disk.edges:
        p = n = 0
        sa, sb = sq[a], sq[b]
        lo = min((sa, sb), key=lambda s: (s.x, s.y))
        is_x_domino = sa.y == sb.y
        if along_x == is_x_domino:
            pos.append(0)
            neg.append(0)
            continue
        sigma_d = -lo.color
        for i, s in enumerate(sq):
            if along_x:
                if s.y not in (sa.y, sb.y) or s.x == lo.x:
                    continue
                val = -(-s.color) * sigma_d * (1 if s.x > lo.x else -1)
            else:
                if s.x not in (sa.x, sb.x) or s.y == lo.y:
                    continue
                val = (-s.color) * sigma_d * (1 if s.y > lo.y else -1)
            if val > 0:
                p |= 1 << i
            else:
                n |= 1 << i
        pos.append(p)
        neg.append(n)
    return tuple(pos), tuple(neg)


def matching_plug_weight4(disk: QuadDisk, matching: int, plug: int, u="e2") -> int:
    """``4 * tau^u(f, p)`` for the horizontal dominoes of ``f`` against plug ``p``."""
    pos, neg = edge_weight_masks(disk, u)
    w = 0
    for k in matching_edges(matching):
        w += (plug & pos[k]).bit_count() - (plug & neg[k]).bit_count()
    return w


def floor_twist4(disk: QuadDisk, f: Floor, u="e2") -> int:
    return matching_plug_weight4(disk, f.matching, f.p1, u) - matching_plug_weight4(disk, f.matching, f.p0, u)


def floor_twist(disk: QuadDisk, f: Floor, u="e2") -> Fraction:
    """``tau^u(f; p0, p1)`` as an exact quarter integer."""
    return Fraction(floor_twist4(disk, f, u), 4)


def path_twist4(disk: QuadDisk, floors: Iterable[Floor], u="e2") -> int:
    total = 0
    prev = None
    for f in floors:
        if prev is not None and prev.p1 != f.p0:
            raise ValueError("floors do not form a path: plug mismatch")
        total += floor_twist4(disk, f, u)
        prev = f
    return total


def path_twist(disk: QuadDisk, floors: Iterable[Floor], u="e2") -> Fraction:
    return Fraction(path_twist4(disk, floors, u), 4)


def twist4(t: CylinderTiling, u="e2") -> int:
    return path_twist4(t.disk, t.floors, u)


def twist(t: CylinderTiling, u="e2") -> int:
    """Integer twist of a cylinder tiling (or of a closed cork path)."""
    q = twist4(t, u)
    if q % 4:
        raise TwistError(f"twist {Fraction(q, 4)} is not an integer")
    return q // 4


def plug_potential_difference4(disk: QuadDisk, f: Floor) -> int:
    """``4 (tau^{e1} - tau^{e2})`` of one floor."""
    return floor_twist4(disk, f, "e1") - floor_twist4(disk, f, "e2")
