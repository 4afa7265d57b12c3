"""Tilings of cylinders and corks as alternating sequences of plugs and floors.

A tiling of the cork ``D x [z0, z0 + N]`` with end plugs ``p_0``/``p_N`` is
stored as ``plugs = (p_0, ..., p_N)`` (bit masks over disk squares) and
``matchings = (f_1, ..., f_N)`` (bit masks over ``disk.edges``).  Floor ``j``
occupies ``z in [z0 + j - 1, z0 + j]``; squares of ``p_j`` (0 < j < N) carry a
vertical domino ``s x [z0 + j - 1, z0 + j + 1]``.  End plugs mark the notches
removed from the first and last floor; a cylinder has empty end plugs.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .disk import QuadDisk, STEPS, DiskError

AXES = {"e1": (1, 0, 0), "e2": (0, 1, 0), "e3": (0, 0, 1)}


class TilingError(ValueError):
    """Raised when plugs and floors do not describe a valid tiling."""


def matching_squares(disk: QuadDisk, matching: int) -> int:
    mask = 0
    k = 0
    m = matching
    masks = disk.edge_masks
    while m:
        if m & 1:
            mask |= masks[k]
        m >>= 1
        k += 1
    return mask


def matching_edges(matching: int) -> list[int]:
    out = []
    k = 0
    while matching:
        if matching & 1:
            out.append(k)
        matching >>= 1
        k += 1
    return out


def is_perfect_matching(disk: QuadDisk, matching: int, region: int) -> bool:
    covered = 0
    for k in matching_edges(matching):
        if k >= len(disk.edges):
            return False
        em = disk.edge_masks[k]
        if covered & em:
            return False
        covered |= em
    return covered == region


def is_plug(disk: QuadDisk, mask: int) -> bool:
    """Subset whose colour excess is 0 or that of the whole disk."""
    return mask & ~disk.full_mask == 0 and disk.color_balance(mask) in (0, disk.color_balance(disk.full_mask))


@dataclass(frozen=True)
class Floor:
    """One z-slice: entry plug, planar matching of the residue, exit plug."""

    p0: int
    matching: int
    p1: int

    @property
    def vertical(self) -> bool:
        return self.matching == 0

    def inverse(self) -> "Floor":
        return Floor(self.p1, self.matching, self.p0)

    def check(self, disk: QuadDisk) -> None:
        if not is_plug(disk, self.p0) or not is_plug(disk, self.p1):
            raise TilingError("floor end plugs must be plugs of the disk")
        if self.p0 & self.p1:
            raise TilingError("floor end plugs intersect")
        if disk.color_balance(self.p0 | self.p1) != disk.color_balance(disk.full_mask):
            raise TilingError("floor residue is unbalanced")
        region = disk.full_mask & ~(self.p0 | self.p1)
        if not is_perfect_matching(disk, self.matching, region):
            raise TilingError("floor matching does not tile the residual region")


@dataclass(frozen=True)
class Domino3D:
    """Two unit cubes sharing a face; cubes are given by their min corners."""

    a: tuple[int, int, int]
    b: tuple[int, int, int]

    def __post_init__(self):
        diff = [q - p for p, q in zip(self.a, self.b)]
        if sorted(map(abs, diff)) != [0, 0, 1]:
            raise TilingError(f"cubes {self.a} and {self.b} are not adjacent")

    @property
    def axis(self) -> int:
        return next(k for k in range(3) if self.a[k] != self.b[k])

    @property
    def v(self) -> tuple[int, int, int]:
        """Unit vector from the white cube centre to the black cube centre."""
        black, white = (self.a, self.b) if sum(self.a) % 2 == 0 else (self.b, self.a)
        return tuple(p - q for p, q in zip(black, white))

    @property
    def box(self) -> tuple[tuple[int, int], ...]:
        return tuple((min(p, q), max(p, q) + 1) for p, q in zip(self.a, self.b))

    @property
    def horizontal(self) -> bool:
        return self.axis != 2


@dataclass(frozen=True, eq=False)
class CylinderTiling:
    disk: QuadDisk
    plugs: tuple[int, ...]
    matchings: tuple[int, ...]
    z0: int = 0

    def __post_init__(self):
        object.__setattr__(self, "plugs", tuple(self.plugs))
        object.__setattr__(self, "matchings", tuple(self.matchings))
        if len(self.plugs) != len(self.matchings) + 1:
            raise TilingError("need exactly one more plug than floors")
        if not self.matchings:
            raise TilingError("a tiling needs at least one floor")

    @classmethod
    def from_floors(cls, disk: QuadDisk, floors: Sequence[Floor], z0: int = 0) -> "CylinderTiling":
        if not floors:
            raise TilingError("a tiling needs at least one floor")
        plugs = [floors[0].p0]
        for a, b in zip(floors, floors[1:]):
            if a.p1 != b.p0:
                raise TilingError("consecutive floors do not share a plug")
        plugs.extend(f.p1 for f in floors)
        return cls(disk, tuple(plugs), tuple(f.matching for f in floors), z0)

    def validate(self) -> "CylinderTiling":
        for f in self.floors:
            f.check(self.disk)
        return self

    @property
    def height(self) -> int:
        return len(self.matchings)

    def __len__(self) -> int:
        return len(self.matchings)

    @property
    def start_plug(self) -> int:
        return self.plugs[0]

    @property
    def end_plug(self) -> int:
        return self.plugs[-1]

    @property
    def is_cylinder(self) -> bool:
        return self.plugs[0] == 0 and self.plugs[-1] == 0

    @property
    def floors(self) -> list[Floor]:
        return [Floor(self.plugs[j], m, self.plugs[j + 1]) for j, m in enumerate(self.matchings)]

    def floor(self, j: int) -> Floor:
        """Floor j, 1-based as in floor_j(t)."""
        return Floor(self.plugs[j - 1], self.matchings[j - 1], self.plugs[j])

    def key(self) -> tuple:
        return (self.plugs, self.matchings)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CylinderTiling)
            and self.disk == other.disk
            and self.key() == other.key()
        )

    def __hash__(self) -> int:
        return hash(self.key())

    def shifted(self, z0: int) -> "CylinderTiling":
        return CylinderTiling(self.disk, self.plugs, self.matchings, z0)

    @cached_property
    def digest(self) -> str:
        return hashlib.blake2b(serialize_tiling(self).encode(), digest_size=16).hexdigest()

    def dominoes(self) -> list[Domino3D]:
        """All dominoes of the tiling in 3D coordinates."""
        sq = self.disk.squares
        out = []
        for j, m in enumerate(self.matchings):
            z = self.z0 + j
            for k in matching_edges(m):
                a, b = self.disk.edges[k]
                out.append(Domino3D((sq[a].x, sq[a].y, z), (sq[b].x, sq[b].y, z)))
        for j in range(1, len(self.plugs) - 1):
            z = self.z0 + j - 1
            p = self.plugs[j]
            for i in self.disk.squares_of(p):
                out.append(Domino3D((sq[i].x, sq[i].y, z), (sq[i].x, sq[i].y, z + 1)))
        return out

    def count_vertical(self) -> int:
        return sum(p.bit_count() for p in self.plugs[1:-1])

    def __repr__(self) -> str:
        return f"CylinderTiling(height={self.height}, z0={self.z0}, digest={self.digest[:12]})"


def concatenate(t0: CylinderTiling, t1: CylinderTiling) -> CylinderTiling:
    """Stack ``t1`` on top of ``t0``; the junction plug becomes vertical dominoes."""
    if t0.disk != t1.disk:
        raise TilingError("cannot concatenate tilings of different disks")
    if t0.end_plug != t1.start_plug:
        raise TilingError("junction plugs do not match")
    return CylinderTiling(t0.disk, t0.plugs + t1.plugs[1:], t0.matchings + t1.matchings, t0.z0)


def concatenate_all(parts: Iterable[CylinderTiling]) -> CylinderTiling:
    parts = list(parts)
    out = parts[0]
    for t in parts[1:]:
        out = concatenate(out, t)
    return out


def invert(t: CylinderTiling) -> CylinderTiling:
    """Reflect in z: floors reversed, each floor's end plugs swapped."""
    return CylinderTiling(t.disk, t.plugs[::-1], t.matchings[::-1], t.z0)


def vertical_tiling(disk: QuadDisk, plug: int, n: int, z0: int = 0) -> CylinderTiling:
    """All-vertical tiling of the cork with end plugs ``plug`` (n even)."""
    if n % 2 or n < 2:
        raise TilingError("vertical tilings need an even height >= 2")
    comp = disk.full_mask ^ plug
    plugs = tuple(plug if j % 2 == 0 else comp for j in range(n + 1))
    return CylinderTiling(disk, plugs, (0,) * n, z0)


def pad_vertical(t: CylinderTiling, m: int) -> CylinderTiling:
    """``t * t_vert,m`` with the vertical floors appended at the end plug."""
    if m == 0:
        return t
    return concatenate(t, vertical_tiling(t.disk, t.end_plug, m))


def mirror(t: CylinderTiling, perm: Sequence[int]) -> CylinderTiling:
    """Apply a square permutation coming from a lattice symmetry of the disk."""
    disk = t.disk

    def map_mask(mask):
        return sum(1 << perm[i] for i in disk.squares_of(mask))

    def map_matching(m):
        out = 0
        for k in matching_edges(m):
            a, b = disk.edges[k]
            a, b = perm[a], perm[b]
            out |= 1 << disk.edge_index[(min(a, b), max(a, b))]
        return out

    return CylinderTiling(disk, tuple(map(map_mask, t.plugs)), tuple(map(map_matching, t.matchings)), t.z0)


# text formats

def floor_codes(t: CylinderTiling, j: int) -> list[str]:
    """Cell codes of floor j (1-based) for every square index."""
    disk = t.disk
    below, above = t.plugs[j - 1], t.plugs[j]
    codes = [""] * len(disk)
    for i in range(len(disk)):
        if below >> i & 1:
            codes[i] = "D"
        elif above >> i & 1:
            codes[i] = "U"
    for k in matching_edges(t.matchings[j - 1]):
        a, b = disk.edges[k]
        codes[a] = disk.direction(a, b)
        codes[b] = disk.direction(b, a)
    return codes


def _floor_grid(t: CylinderTiling, j: int) -> list[str]:
    disk = t.disk
    grid = [["."] * disk.n_cols for _ in range(disk.n_rows)]
    for i, (r, c) in enumerate(disk.grid_positions()):
        grid[r][c] = floor_codes(t, j)[i]
    return ["".join(row) for row in grid]


def serialize_tiling(t: CylinderTiling) -> str:
    head = f"disk {t.disk.n_rows} {t.disk.n_cols}"
    if t.z0:
        head += f" z0 {t.z0}"
    blocks = ["\n".join(_floor_grid(t, j)) for j in range(1, t.height + 1)]
    return head + "\n" + "\n\n".join(blocks) + "\n"


def render_tiling(t: CylinderTiling, per_row: int = 8) -> str:
    """Floors drawn side by side (bottom floor first), as in printed figures."""
    out = []
    for start in range(1, t.height + 1, per_row):
        js = list(range(start, min(start + per_row, t.height + 1)))
        grids = [_floor_grid(t, j) for j in js]
        width = max(len(g[0]) for g in grids)
        labels = [f"z={t.z0 + j - 1}".ljust(width) for j in js]
        out.append("   ".join(labels))
        for r in range(len(grids[0])):
            out.append("   ".join(g[r].ljust(width) for g in grids))
        out.append("")
    return "\n".join(out)


def parse_tiling(text: str, disk: QuadDisk | None = None) -> CylinderTiling:
    lines = [ln.rstrip() for ln in text.splitlines() if not ln.lstrip().startswith("%")]
    while lines and not lines[0].strip():
        lines.pop(0)
    if not lines:
        raise TilingError("empty tiling text")
    head = lines[0].split()
    if len(head) not in (3, 5) or head[0] != "disk" or (len(head) == 5 and head[3] != "z0"):
        raise TilingError(f"bad header line {lines[0]!r}")
    try:
        rows, cols = int(head[1]), int(head[2])
        z0 = int(head[4]) if len(head) == 5 else 0
    except ValueError as exc:
        raise TilingError(f"bad header line {lines[0]!r}") from exc
    body = [ln for ln in lines[1:] if ln.strip()]
    if not body or len(body) % rows:
        raise TilingError("floor blocks do not match the declared row count")
    blocks = [body[k:k + rows] for k in range(0, len(body), rows)]
    for blk in blocks:
        if any(len(ln) != cols for ln in blk):
            raise TilingError("floor rows do not match the declared column count")
        if set("".join(blk)) - set("EWNSUD."):
            raise TilingError("unknown cell code")

    cells = [(c, rows - 1 - r) for r in range(rows) for c in range(cols) if blocks[0][r][c] != "."]
    try:
        parsed_disk = QuadDisk.from_squares(cells)
    except DiskError as exc:
        raise TilingError(str(exc)) from exc
    if disk is not None and disk != parsed_disk:
        raise TilingError("tiling does not match the given disk")
    disk = parsed_disk
    x0, _, _, y1 = disk.bounds
    present = {(r, c) for r in range(rows) for c in range(cols) if blocks[0][r][c] != "."}

    def code_at(blk, i):
        s = disk.squares[i]
        return blk[y1 - s.y][s.x - x0]

    n = len(disk)
    up_masks, down_masks, matchings = [], [], []
    for blk in blocks:
        if {(r, c) for r in range(rows) for c in range(cols) if blk[r][c] != "."} != present:
            raise TilingError("floors have different square sets")
        up = down = m = 0
        for i in range(n):
            ch = code_at(blk, i)
            if ch == "U":
                up |= 1 << i
            elif ch == "D":
                down |= 1 << i
            else:
                j = disk.step(i, ch)
                if j is None or code_at(blk, j) != _OPPOSITE[ch]:
                    raise TilingError(f"dangling horizontal code {ch!r} at square {disk.squares[i]}")
                m |= 1 << disk.edge_index[(min(i, j), max(i, j))]
        up_masks.append(up)
        down_masks.append(down)
        matchings.append(m)
    for j in range(len(blocks) - 1):
        if up_masks[j] != down_masks[j + 1]:
            raise TilingError(f"vertical halves do not match between floors {j + 1} and {j + 2}")
    plugs = [down_masks[0]] + up_masks
    for p in (plugs[0], plugs[-1]):
        if not is_plug(disk, p):
            raise TilingError("unbalanced vertical halves at an end of the tiling")
    t = CylinderTiling(disk, tuple(plugs), tuple(matchings), z0)
    return t.validate()


_OPPOSITE = {"E": "W", "W": "E", "N": "S", "S": "N"}
assert set(_OPPOSITE) == set(STEPS)


def load_tiling(path) -> CylinderTiling:
    with open(path, encoding="utf-8") as fh:
        return parse_tiling(fh.read())
