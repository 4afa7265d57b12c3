"""Quadriculated disks: finite unions of unit lattice squares.

Squares are indexed row-major in reading order (y descending, then x
ascending), so a plug is a portable bit string over these indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

# Unit steps in the plane, keyed by the single-letter codes used in tiling files.
STEPS = {"E": (1, 0), "W": (-1, 0), "N": (0, 1), "S": (0, -1)}


class DiskError(ValueError):
    """Raised for malformed or unusable disk descriptions."""


@dataclass(frozen=True, order=True)
class Square:
    x: int
    y: int

    @property
    def color(self) -> int:
        """+1 for black, -1 for white."""
        return 1 if (self.x + self.y) % 2 == 0 else -1


@dataclass(frozen=True, eq=False)
class QuadDisk:
    """A quadriculated region with adjacency data.

    ``edges`` lists every planar domino as an index pair ``(i, j)`` with
    ``i < j``; matchings are stored as bit masks over this list.
    """

    squares: tuple[Square, ...]
    index: dict = field(repr=False)
    neighbors: tuple[tuple[int, ...], ...] = field(repr=False)
    edges: tuple[tuple[int, int], ...] = field(repr=False)
    edge_index: dict = field(repr=False)

    @classmethod
    def from_squares(cls, cells: Iterable[tuple[int, int]]) -> "QuadDisk":
        pts = {(int(x), int(y)) for x, y in cells}
        if not pts:
            raise DiskError("empty disk")
        ordered = sorted(pts, key=lambda p: (-p[1], p[0]))
        squares = tuple(Square(x, y) for x, y in ordered)
        index = {(s.x, s.y): i for i, s in enumerate(squares)}
        nbrs = []
        for s in squares:
            row = []
            for dx, dy in STEPS.values():
                j = index.get((s.x + dx, s.y + dy))
                if j is not None:
                    row.append(j)
            nbrs.append(tuple(sorted(row)))
        edges = tuple(sorted({(min(i, j), max(i, j)) for i, row in enumerate(nbrs) for j in row}))
        edge_index = {e: k for k, e in enumerate(edges)}
        disk = cls(squares, index, tuple(nbrs), edges, edge_index)
        if not disk.is_connected:
            raise DiskError("disconnected square set")
        return disk

    # basic sizes and masks

    def __len__(self) -> int:
        return len(self.squares)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QuadDisk) and self.squares == other.squares

    def __hash__(self) -> int:
        return hash(self.squares)

    @cached_property
    def full_mask(self) -> int:
        return (1 << len(self.squares)) - 1

    @cached_property
    def colors(self) -> tuple[int, ...]:
        return tuple(s.color for s in self.squares)

    @cached_property
    def black_mask(self) -> int:
        return sum(1 << i for i, c in enumerate(self.colors) if c == 1)

    @cached_property
    def white_mask(self) -> int:
        return self.full_mask ^ self.black_mask

    def color_balance(self, mask: int) -> int:
        """#black - #white among the squares of ``mask``."""
        return (mask & self.black_mask).bit_count() - (mask & self.white_mask).bit_count()

    def edge_mask(self, k: int) -> int:
        i, j = self.edges[k]
        return (1 << i) | (1 << j)

    @cached_property
    def edge_masks(self) -> tuple[int, ...]:
        return tuple((1 << i) | (1 << j) for i, j in self.edges)

    @cached_property
    def forward_edges(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """For square i, the pairs (j, edge index) with j > i adjacent to i."""
        out = []
        for i, row in enumerate(self.neighbors):
            out.append(tuple((j, self.edge_index[(i, j)]) for j in row if j > i))
        return tuple(out)

    def step(self, i: int, code: str) -> int | None:
        s = self.squares[i]
        dx, dy = STEPS[code]
        return self.index.get((s.x + dx, s.y + dy))

    def direction(self, i: int, j: int) -> str:
        a, b = self.squares[i], self.squares[j]
        delta = (b.x - a.x, b.y - a.y)
        for code, d in STEPS.items():
            if d == delta:
                return code
        raise DiskError(f"squares {i} and {j} are not adjacent")

    # geometry of the bounding frame

    @cached_property
    def bounds(self) -> tuple[int, int, int, int]:
        xs = [s.x for s in self.squares]
        ys = [s.y for s in self.squares]
        return min(xs), max(xs), min(ys), max(ys)

    @property
    def n_rows(self) -> int:
        _, _, y0, y1 = self.bounds
        return y1 - y0 + 1

    @property
    def n_cols(self) -> int:
        x0, x1, _, _ = self.bounds
        return x1 - x0 + 1

    # flags

    @cached_property
    def is_connected(self) -> bool:
        return _connected(set(range(len(self.squares))), lambda i: self.neighbors[i])

    @property
    def balanced(self) -> bool:
        return self.color_balance(self.full_mask) == 0

    @property
    def nontrivial(self) -> bool:
        return len(self) >= 6 and any(len(row) >= 3 for row in self.neighbors)

    @cached_property
    def is_disk(self) -> bool:
        """Connected, no holes, and no pinch points.

        The complement must be connected inside a one-cell margin frame, and
        no two squares may touch only at a corner without a shared neighbour
        (otherwise the interior would be disconnected).
        """
        if not self.is_connected:
            return False
        x0, x1, y0, y1 = self.bounds
        occupied = set(self.index)
        outside = {
            (x, y)
            for x in range(x0 - 1, x1 + 2)
            for y in range(y0 - 1, y1 + 2)
            if (x, y) not in occupied
        }

        def out_nbrs(p):
            x, y = p
            for dx, dy in STEPS.values():
                q = (x + dx, y + dy)
                if q in outside:
                    yield q

        if not _connected(outside, out_nbrs):
            return False
        for (x, y) in occupied:
            for dx in (-1, 1):
                for dy in (-1, 1):
                    if (x + dx, y + dy) in occupied:
                        if (x + dx, y) not in occupied and (x, y + dy) not in occupied:
                            return False
        return True

    # rendering helpers

    def grid_positions(self) -> list[tuple[int, int]]:
        """(row, col) position in the text grid for every square index."""
        x0, _, _, y1 = self.bounds
        return [(y1 - s.y, s.x - x0) for s in self.squares]

    def to_text(self) -> str:
        rows = [["."] * self.n_cols for _ in range(self.n_rows)]
        for r, c in self.grid_positions():
            rows[r][c] = "#"
        return "\n".join("".join(r) for r in rows) + "\n"

    def mask_from_squares(self, cells: Iterable[tuple[int, int]]) -> int:
        return sum(1 << self.index[(x, y)] for x, y in cells)

    def squares_of(self, mask: int) -> list[int]:
        return [i for i in range(len(self.squares)) if mask >> i & 1]

    def mask_to_bits(self, mask: int) -> str:
        return "".join("1" if mask >> i & 1 else "0" for i in range(len(self.squares)))

    def bits_to_mask(self, bits: str) -> int:
        if len(bits) != len(self.squares) or set(bits) - {"0", "1"}:
            raise DiskError(f"bad bit string {bits!r}")
        return sum(1 << i for i, ch in enumerate(bits) if ch == "1")


def _connected(nodes: set, nbrs) -> bool:
    if not nodes:
        return True
    start = next(iter(nodes))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in nbrs(v):
            if w in nodes and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(nodes)


def parse_disk(text: str) -> QuadDisk:
    """Parse a '#'/'.' grid; the top text row has the largest y."""
    lines = [ln.rstrip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("%")]
    if not lines:
        raise DiskError("empty input")
    bad = set("".join(lines)) - {"#", "."}
    if bad:
        raise DiskError(f"unexpected characters {sorted(bad)}")
    n = len(lines)
    cells = [(x, n - 1 - r) for r, ln in enumerate(lines) for x, ch in enumerate(ln) if ch == "#"]
    return QuadDisk.from_squares(cells)


def rectangle(width: int, height: int) -> QuadDisk:
    """The disk [0, width] x [0, height]."""
    if width < 1 or height < 1:
        raise DiskError("rectangle sides must be positive")
    return QuadDisk.from_squares((x, y) for x in range(width) for y in range(height))


def load_disk(path) -> QuadDisk:
    with open(path, encoding="utf-8") as fh:
        return parse_disk(fh.read())


def is_trivial_rectangle(width: int, height: int) -> bool:
    """Rectangles [0,L]x[0,M] are trivial iff min(L, M) <= 1 or L = M = 2."""
    return min(width, height) <= 1 or (width == 2 and height == 2)


def symmetric_images(disk: QuadDisk) -> Sequence[tuple[str, list[int]]]:
    """Square permutations induced by the lattice symmetries preserving ``disk``.

    Each entry is ``(name, perm)`` with ``perm[i]`` the image index of square i.
    """
    maps = {
        "id": lambda x, y: (x, y),
        "rot90": lambda x, y: (-y, x),
        "rot180": lambda x, y: (-x, -y),
        "rot270": lambda x, y: (y, -x),
        "mirror_x": lambda x, y: (-x, y),
        "mirror_y": lambda x, y: (x, -y),
        "diag": lambda x, y: (y, x),
        "antidiag": lambda x, y: (-y, -x),
    }
    out = []
    for name, f in maps.items():
        img = [f(s.x, s.y) for s in disk.squares]
        mx = min(p[0] for p in img) - disk.bounds[0]
        my = min(p[1] for p in img) - disk.bounds[2]
        img = [(x - mx, y - my) for x, y in img]
        if all(p in disk.index for p in img):
            out.append((name, [disk.index[p] for p in img]))
    return out
