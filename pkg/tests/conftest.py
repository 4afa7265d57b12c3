"""Shared helpers: a brute-force box tiler, an independent twist formula and
a uniform random tiling sampler."""

from __future__ import annotations

import random
from functools import lru_cache

import pytest

from domino_cylinders.disk import QuadDisk, rectangle
from domino_cylinders.floors import enumerate_floors
from domino_cylinders.tiling import CylinderTiling, Floor


# brute force: tilings of a set of unit cubes as sets of cube pairs

def brute_box_tilings(cells: set[tuple[int, int, int]]):
    """Every domino tiling of ``cells``; each tiling is a frozenset of
    ``(cube, cube)`` pairs. Plain backtracking on the smallest free cube."""
    order = sorted(cells, key=lambda c: (c[2], c[1], c[0]))
    out = []

    def rec(free: set, acc: list):
        if not free:
            out.append(frozenset(acc))
            return
        c = min(free, key=lambda c: (c[2], c[1], c[0]))
        for dx, dy, dz in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
            d = (c[0] + dx, c[1] + dy, c[2] + dz)
            if d in free:
                free -= {c, d}
                acc.append((c, d))
                rec(free, acc)
                acc.pop()
                free |= {c, d}

    rec(set(order), [])
    return out


def box_cells(disk: QuadDisk, n: int) -> set[tuple[int, int, int]]:
    return {(s.x, s.y, z) for s in disk.squares for z in range(n)}


def _det(a, b, c) -> int:
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def oracle_twist(pairs, u=(0, 1, 0)) -> int:
    """Twist from cube pairs, written directly from the shade definition.

    A domino ``d1`` is in the shade of ``d0`` when their projections along
    ``u`` overlap and ``d1`` lies strictly further along ``u``; the pair
    contributes ``det(v1, v0, u) / 4``, with ``v`` pointing from the white
    cube to the black cube."""
    k = next(i for i in range(3) if u[i])
    sign = u[k]

    def vec(p):
        a, b = p
        black, white = (a, b) if sum(a) % 2 == 0 else (b, a)
        return tuple(x - y for x, y in zip(black, white))

    def span(p):
        a, b = p
        return [(min(a[i], b[i]), max(a[i], b[i]) + 1) for i in range(3)]

    items = [(span(p), vec(p)) for p in pairs]
    total = 0
    for i, (s0, v0) in enumerate(items):
        for j, (s1, v1) in enumerate(items):
            if i == j:
                continue
            if any(not (s1[m][0] < s0[m][1] and s0[m][0] < s1[m][1]) for m in range(3) if m != k):
                continue
            ahead = s1[k][1] > s0[k][1] if sign > 0 else s1[k][0] < s0[k][0]
            if ahead:
                total += _det(v1, v0, u)
    assert total % 4 == 0
    return total // 4


def tiling_pairs(t: CylinderTiling) -> frozenset:
    """The package tiling as a set of ordered cube pairs (brute-force format)."""
    out = []
    for d in t.dominoes():
        a, b = sorted((d.a, d.b), key=lambda c: (c[2], c[1], c[0]))
        out.append((a, b))
    return frozenset(out)


# uniform sampling by transfer counts

@lru_cache(maxsize=None)
def _floors(disk: QuadDisk, p: int) -> tuple:
    return tuple(enumerate_floors(disk, p))


def _ways(disk: QuadDisk, n: int, p0: int, p1: int) -> list[dict[int, int]]:
    """``ways[j][p]``: number of ways to finish from plug ``p`` at level ``j``."""
    levels = [{p0}]
    for _ in range(n):
        levels.append({q for p in levels[-1] for _, q in _floors(disk, p)})
    ways: list[dict[int, int]] = [dict() for _ in range(n + 1)]
    ways[n] = {p1: 1} if p1 in levels[n] else {}
    for j in reversed(range(n)):
        for p in levels[j]:
            w = sum(ways[j + 1].get(q, 0) for _, q in _floors(disk, p))
            if w:
                ways[j][p] = w
    return ways


_WAYS_CACHE: dict = {}


def sample_tiling(disk: QuadDisk, n: int, rng: random.Random, p0: int = 0, p1: int = 0) -> CylinderTiling:
    key = (disk, n, p0, p1)
    if key not in _WAYS_CACHE:
        _WAYS_CACHE[key] = _ways(disk, n, p0, p1)
    ways = _WAYS_CACHE[key]
    floors, p = [], p0
    for j in range(n):
        opts = [(m, q, ways[j + 1].get(q, 0)) for m, q in _floors(disk, p)]
        r = rng.randrange(ways[j][p])
        for m, q, w in opts:
            if r < w:
                floors.append(Floor(p, m, q))
                p = q
                break
            r -= w
    return CylinderTiling.from_floors(disk, floors)


@pytest.fixture(scope="session")
def box33():
    return rectangle(3, 3)


@pytest.fixture(scope="session")
def box44():
    return rectangle(4, 4)


@pytest.fixture(scope="session")
def box23():
    return rectangle(2, 3)


# acceptance summary: one line per numbered criterion

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    entry = _CRITERIA.setdefault(num, {"title": title, "ok": True, "notes": []})
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if hasattr(rep, "wasxfail"):
            entry["ok"] = False
            entry["notes"].append(f"{item.name}: expected failure ({rep.wasxfail})")
        elif not rep.passed:
            entry["ok"] = False
            entry["notes"].append(f"{item.name}: {rep.outcome}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        e = _CRITERIA[num]
        line = f"criterion {num:2d}: {'PASS' if e['ok'] else 'FAIL'}  {e['title']}"
        terminalreporter.write_line(line)
        for note in e["notes"]:
            terminalreporter.write_line(f"              {note}")
