"""Flip searches between tilings and replayable certificates.

Searches only ever produce positive evidence: a found path is written as a
``FlipTrace`` that ``verify_certificate`` replays on explicit domino sets,
independently of the cell-code machinery used while searching.  Running out
of budget yields ``None`` ("unknown"), never a negative claim.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .moves import (
    Move, apply_move, apply_move_state, enumerate_flips, enumerate_trits, from_state, neighbours, site_table, to_state,
)
from .tiling import (
    CylinderTiling, Domino3D, TilingError, concatenate, invert, mirror, pad_vertical, parse_tiling, serialize_tiling, vertical_tiling,
)
from .twist import twist


@dataclass
class FlipTrace:
    """Moves turning ``start`` into ``end``.

    For a ``~`` claim between ``t0`` and ``t1`` the start is ``t0`` padded
    with ``pad0`` vertical floors and the end is ``t1`` padded with ``pad1``.
    """

    start: CylinderTiling
    moves: list[Move]
    end: CylinderTiling
    pad0: int = 0
    pad1: int = 0
    note: str = ""

    @property
    def flips_only(self) -> bool:
        return all(m.kind == "flip" for m in self.moves)

    def padded_start(self) -> CylinderTiling:
        return pad_vertical(self.start, self.pad0)

    def padded_end(self) -> CylinderTiling:
        return pad_vertical(self.end, self.pad1)

    def to_text(self) -> str:
        lines = ["certificate v1"]
        if self.note:
            lines.append(f"note {self.note}")
        lines.append(f"pad {self.pad0} {self.pad1}")
        lines.append("start")
        lines.append(serialize_tiling(self.start).rstrip("\n"))
        lines.append("end-start")
        lines.append(f"moves {len(self.moves)}")
        lines.extend(str(m) for m in self.moves)
        lines.append("end-moves")
        lines.append("target")
        lines.append(serialize_tiling(self.end).rstrip("\n"))
        lines.append("end-target")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FlipTrace":
        lines = text.splitlines()
        if not lines or lines[0].strip() != "certificate v1":
            raise ValueError("not a certificate")
        note = ""
        pad0 = pad1 = 0
        i = 1
        sections: dict[str, list[str]] = {}
        while i < len(lines):
            ln = lines[i].strip()
            if ln.startswith("note "):
                note = ln[5:]
            elif ln.startswith("pad "):
                _, a, b = ln.split()
                pad0, pad1 = int(a), int(b)
            elif ln in ("start", "target") or ln.startswith("moves"):
                name = "moves" if ln.startswith("moves") else ln
                stop = {"start": "end-start", "target": "end-target", "moves": "end-moves"}[name]
                body = []
                i += 1
                while i < len(lines) and lines[i].strip() != stop:
                    body.append(lines[i])
                    i += 1
                if i == len(lines):
                    raise ValueError(f"unterminated section {name}")
                sections[name] = body
            elif ln:
                raise ValueError(f"unexpected line {ln!r}")
            i += 1
        for key in ("start", "moves", "target"):
            if key not in sections:
                raise ValueError(f"missing section {key}")
        start = parse_tiling("\n".join(sections["start"]))
        end = parse_tiling("\n".join(sections["target"]), start.disk)
        moves = [Move.parse(ln) for ln in sections["moves"] if ln.strip()]
        return cls(start, moves, end, pad0, pad1, note)


# independent replay on domino sets

def _replay_move(dominoes: set, move: Move) -> set:
    cubes = move.cubes()
    inside = set(cubes)
    touched = [d for d in dominoes if d.a in inside or d.b in inside]
    if any(not (d.a in inside and d.b in inside) for d in touched):
        raise ValueError(f"{move}: a domino sticks out of the move box")
    if len(touched) * 2 != len(cubes):
        raise ValueError(f"{move}: move box is not covered by dominoes of the tiling")
    if move.kind == "flip":
        axes = {d.axis for d in touched}
        if len(axes) != 1:
            raise ValueError(f"{move}: dominoes in the box are not parallel")
        ax = axes.pop()
        other = next(k for k in range(3) if k != ax and k != "xyz".index(move.axis))
        new = set()
        base = (move.x, move.y, move.z)
        for step in (0, 1):
            a = list(base)
            a[ax] += step
            b = list(a)
            b[other] += 1
            new.add(Domino3D(tuple(a), tuple(b)))
    else:
        if {d.axis for d in touched} != {0, 1, 2}:
            raise ValueError(f"{move}: trit dominoes are not mutually orthogonal")
        # the six cubes form a hexagon; the other perfect matching of it
        used = {frozenset((d.a, d.b)) for d in touched}
        cycle = [cubes[0]]
        while len(cycle) < 6:
            cur = cycle[-1]
            nxt = [c for c in cubes if c not in cycle and sum(abs(p - q) for p, q in zip(c, cur)) == 1]
            if len(cycle) > 1:
                nxt = [c for c in nxt if c != cycle[-2]]
            cycle.append(nxt[0])
        pairs = [frozenset((cycle[k], cycle[(k + 1) % 6])) for k in range(6)]
        chosen = pairs[0::2] if pairs[0] not in used else pairs[1::2]
        new = {Domino3D(*sorted(p)) for p in chosen}
    return (dominoes - set(touched)) | new


def _domino_key(d: Domino3D):
    return tuple(sorted((d.a, d.b)))


def verify_certificate(trace: FlipTrace) -> tuple[bool, str]:
    """Replay every move on explicit domino sets; report the first failure."""
    try:
        start = trace.padded_start().validate()
        end = trace.padded_end().validate()
    except TilingError as exc:
        return False, f"invalid end tiling: {exc}"
    if start.disk != end.disk or start.height != end.height or start.z0 != end.z0:
        return False, "start and target regions differ"
    cur = {Domino3D(*_domino_key(d)) for d in start.dominoes()}
    region = {c for d in cur for c in (d.a, d.b)}
    for step, mv in enumerate(trace.moves, 1):
        try:
            cur = _replay_move(cur, mv)
        except ValueError as exc:
            return False, f"step {step}: {exc}"
        cov = [c for d in cur for c in (d.a, d.b)]
        if len(cov) != len(set(cov)) or set(cov) != region:
            return False, f"step {step}: result is not a tiling of the region"
    target = {Domino3D(*_domino_key(d)) for d in end.dominoes()}
    if cur != target:
        return False, "replay does not reach the target tiling"
    return True, "ok"


# searches

@dataclass
class SearchStats:
    expanded: int = 0
    seen: int = 0
    seconds: float = 0.0
    outcome: str = "unknown"
    extra: dict = field(default_factory=dict)


def _path_moves(parents: dict, key: bytes) -> list[Move]:
    out = []
    while parents[key] is not None:
        prev, mv = parents[key]
        out.append(mv)
        key = prev
    out.reverse()
    return out


def flip_connect(
    t0: CylinderTiling,
    t1: CylinderTiling,
    state_budget: int = 200_000,
    time_budget: float | None = None,
    strategy: str = "greedy",
    stats: SearchStats | None = None,
    depth_weight: int = 0,
) -> FlipTrace | None:
    """Bidirectional flip search from ``t0`` and ``t1``.

    ``strategy="bfs"`` expands both sides breadth first, breaking ties in
    favour of states with more vertical dominoes; ``"greedy"`` orders each
    frontier by the number of cells that differ from the opposite root, plus
    ``depth_weight / 4`` per move already made (0 gives pure best-first
    search, which reaches far-apart tilings much more often).  Either way a
    meeting state closes the path.
    """
    stats = stats if stats is not None else SearchStats()
    t_start = time.monotonic()
    if t0.disk != t1.disk or t0.height != t1.height or t0.plugs[0] != t1.plugs[0] or t0.plugs[-1] != t1.plugs[-1]:
        raise ValueError("tilings of different regions cannot be flip connected")
    t1 = t1.shifted(t0.z0)
    table = site_table(t0.disk, t0.height, t0.z0)
    s0, s1 = to_state(t0), to_state(t1)
    if np.array_equal(s0, s1):
        stats.outcome = "found"
        return FlipTrace(t0, [], t1)
    roots = (s0, s1)
    parents = ({s0.tobytes(): None}, {s1.tobytes(): None})
    heaps: tuple[list, list] = ([], [])
    counter = 0

    def prio(side: int, st: np.ndarray, depth: int):
        if strategy == "bfs":
            return (depth, -int(np.count_nonzero(st >= 4)))
        other = roots[1 - side]
        return (int(np.count_nonzero(st != other)) + (depth * depth_weight) // 4, depth)

    for side in (0, 1):
        heapq.heappush(heaps[side], (prio(side, roots[side], 0), counter, 0, roots[side]))
        counter += 1
    meet = None
    side = 0
    while heaps[0] or heaps[1]:
        if len(parents[0]) + len(parents[1]) > state_budget:
            break
        if time_budget is not None and time.monotonic() - t_start > time_budget:
            break
        if not heaps[side]:
            side = 1 - side
        _, _, depth, st = heapq.heappop(heaps[side])
        stats.expanded += 1
        key = st.tobytes()
        for mv, nb in neighbours(table, st, "flip"):
            nk = nb.tobytes()
            if nk in parents[side]:
                continue
            parents[side][nk] = (key, mv)
            if nk in parents[1 - side]:
                meet = nk
                break
            heapq.heappush(heaps[side], (prio(side, nb, depth + 1), counter, depth + 1, nb))
            counter += 1
        if meet is not None:
            break
        side = 1 - side
    stats.seen = len(parents[0]) + len(parents[1])
    stats.seconds = time.monotonic() - t_start
    if meet is None:
        stats.outcome = "unknown"
        return None
    fwd = _path_moves(parents[0], meet)
    bwd = _path_moves(parents[1], meet)
    stats.outcome = "found"
    # flips are involutions, so the backward half is replayed in reverse order
    return FlipTrace(t0, fwd + bwd[::-1], t1)


def sim_connect(
    t0: CylinderTiling,
    t1: CylinderTiling,
    max_pad: int = 8,
    state_budget: int = 200_000,
    time_budget: float | None = None,
    strategy: str = "greedy",
) -> tuple[str, FlipTrace | None]:
    """Try ``t0 * vert_{M0}`` vs ``t1 * vert_{M1}`` for growing even paddings.

    Returns ``("sim", trace)``, ``("not-sim", None)`` when the twists differ,
    or ``("unknown", None)`` when every padding up to ``max_pad`` ran out of
    budget.
    """
    if (t0.height - t1.height) % 2:
        raise ValueError("heights must have the same parity")
    if t0.disk != t1.disk or t0.plugs[0] != t1.plugs[0] or t0.plugs[-1] != t1.plugs[-1]:
        raise ValueError("tilings of different corks")
    if t0.is_cylinder and twist(t0) != twist(t1):
        return "not-sim", None
    base0 = max(0, t1.height - t0.height)
    base1 = max(0, t0.height - t1.height)
    for m in range(0, max_pad + 1, 2):
        a = pad_vertical(t0, base0 + m)
        b = pad_vertical(t1, base1 + m)
        trace = flip_connect(a, b, state_budget, time_budget, strategy)
        if trace is not None:
            return "sim", FlipTrace(t0, trace.moves, t1.shifted(t0.z0), base0 + m, base1 + m)
    return "unknown", None


def migrate_vertical(t: CylinderTiling) -> FlipTrace:
    """Flips taking ``vert_2 * s`` (given as ``t``) to ``s * vert_2``.

    Repeatedly pushes a horizontal domino lying right above two vertical
    dominoes of the same pair of squares down by two floors (two flips),
    working upwards from the bottom.
    """
    disk = t.disk
    if t.height < 2 or t.matchings[0] or t.matchings[1] or t.plugs[0] != t.plugs[2]:
        raise ValueError("the tiling must start with a pair of vertical floors")
    rest = CylinderTiling(disk, t.plugs[2:], t.matchings[2:], t.z0)
    target = pad_vertical(rest, 2)
    table = site_table(disk, t.height, t.z0)
    state = to_state(t)
    goal = to_state(target)
    moves: list[Move] = []
    s = len(disk)
    n = t.height
    changed = True
    while changed and not np.array_equal(state, goal):
        changed = False
        for z in range(2, n):
            for i in range(s):
                c = int(state[z * s + i])
                if c not in (0, 2):  # only +x / +y halves start a domino
                    continue
                sq = disk.squares[i]
                dx, dy = (1, 0) if c == 0 else (0, 1)
                j = disk.index[(sq.x + dx, sq.y + dy)]
                below = [state[(z - 2) * s + i], state[(z - 1) * s + i], state[(z - 2) * s + j], state[(z - 1) * s + j]]
                if below != [4, 5, 4, 5]:
                    continue
                axis_norm = "y" if c == 0 else "x"
                zz = t.z0 + z - 2
                m1 = Move("flip", axis_norm, sq.x, sq.y, zz)
                m2 = Move("flip", axis_norm, sq.x, sq.y, zz + 1)
                state = apply_move_state(table, state, m1)
                state = apply_move_state(table, state, m2)
                moves += [m1, m2]
                changed = True
    if not np.array_equal(state, goal):
        raise RuntimeError("vertical migration did not reach the shifted tiling")
    return FlipTrace(t, moves, from_state(disk, goal, t.z0))


# certificate algebra: traces stay valid when both ends get extra vertical
# floors on top, since no move touches them

def _shift_moves(moves: Sequence[Move], dz: int) -> list[Move]:
    return list(moves) if dz == 0 else [replace(m, z=m.z + dz) for m in moves]


def reverse_trace(trace: FlipTrace) -> FlipTrace:
    """The same path walked backwards (flips and trits are involutions)."""
    end = trace.end.shifted(trace.start.z0)
    start = trace.start
    return FlipTrace(end, trace.moves[::-1], start, trace.pad1, trace.pad0, trace.note)


def compose_traces(first: FlipTrace, second: FlipTrace) -> FlipTrace:
    """``t0 ~ t1`` and ``t1 ~ t2`` give ``t0 ~ t2``."""
    if first.end != second.start:
        raise ValueError("the traces do not share the middle tiling")
    h1 = first.end.height + first.pad1
    h2 = second.start.height + second.pad0
    x, y = max(0, h2 - h1), max(0, h1 - h2)
    dz = first.start.z0 - second.start.z0
    moves = list(first.moves) + _shift_moves(second.moves, dz)
    return FlipTrace(first.start, moves, second.end.shifted(first.start.z0), first.pad0 + x, second.pad1 + y)


def migration_moves(block: CylinderTiling, pairs: int, z: int, down: bool = False) -> list[Move]:
    """Moves taking ``vert_{2k} * block`` at height ``z`` to ``block * vert_{2k}``.

    ``down=True`` gives the reverse path.  Pairs go up one at a time,
    topmost first.
    """
    out: list[Move] = []
    lead = vertical_tiling(block.disk, block.start_plug, 2)
    for j in range(pairs - 1, -1, -1):
        out.extend(migrate_vertical(concatenate(lead, block).shifted(z + 2 * j)).moves)
    return out[::-1] if down else out


def concat_traces(lower: FlipTrace, upper: FlipTrace) -> FlipTrace:
    """``t0 ~ s0`` and ``t1 ~ s1`` give ``t0 * t1 ~ s0 * s1``."""
    t0, s0, t1, s1 = lower.start, lower.end, upper.start, upper.end
    a, b, c, d = lower.pad0, lower.pad1, upper.pad0, upper.pad1
    z = t0.z0
    # t0 t1 v^c v^a -> t0 v^a t1 v^c
    moves = migration_moves(pad_vertical(t1, c), a // 2, z + t0.height, down=True)
    # -> s0 v^b t1 v^c
    moves += _shift_moves(lower.moves, z - t0.z0)
    # -> s0 t1 v^c v^b
    moves += migration_moves(pad_vertical(t1, c), b // 2, z + s0.height)
    # -> s0 s1 v^d v^b
    moves += _shift_moves(upper.moves, z + s0.height - t1.z0)
    start = concatenate(t0, t1.shifted(z + t0.height))
    end = concatenate(s0.shifted(z), s1)
    return FlipTrace(start, moves, end, a + c, b + d)


_TRIT_Z_MIRROR = {"d0": "d3", "d3": "d0", "d1": "d2", "d2": "d1"}


def invert_move(move: Move, top: int) -> Move:
    """Image of a move under ``z -> top - 1 - z``."""
    extent = 1 if move.kind == "flip" and move.axis == "z" else 2
    axis = _TRIT_Z_MIRROR[move.axis] if move.kind == "trit" else move.axis
    return Move(move.kind, axis, move.x, move.y, top - move.z - extent)


def invert_trace(trace: FlipTrace) -> FlipTrace:
    """``t0 ~ t1`` gives ``invert(t0) ~ invert(t1)``.

    The mirrored moves act on ``vert * invert(t)``, so the padding is carried
    from the bottom back to the top on both sides.
    """
    a = trace.padded_start()
    top = 2 * a.z0 + a.height
    s0, s1 = invert(trace.start), invert(trace.end)
    moves = migration_moves(s0, trace.pad0 // 2, a.z0, down=True)
    moves += [invert_move(m, top) for m in trace.moves]
    moves += migration_moves(s1, trace.pad1 // 2, a.z0)
    return FlipTrace(s0, moves, s1, trace.pad0, trace.pad1)


def mirror_trace(trace: FlipTrace, perm: Sequence[int]) -> FlipTrace:
    """``t0 ~ t1`` gives ``mirror(t0) ~ mirror(t1)`` for a lattice symmetry of
    the disk, given as a square permutation.

    Each move is matched by replaying: the image move is the unique move of
    the same kind taking the mirrored tiling to the next mirrored tiling.
    """
    cur = trace.padded_start()
    img = mirror(cur, perm)
    moves: list[Move] = []
    for step, m in enumerate(trace.moves, 1):
        nxt = apply_move(cur, m)
        want = mirror(nxt, perm)
        options = enumerate_flips(img) if m.kind == "flip" else enumerate_trits(img)
        hit = next((o for o in options if apply_move(img, o) == want), None)
        if hit is None:
            raise ValueError(f"step {step}: no mirrored move found")
        moves.append(hit)
        cur, img = nxt, want
    return FlipTrace(mirror(trace.start, perm), moves, mirror(trace.end, perm), trace.pad0, trace.pad1)
