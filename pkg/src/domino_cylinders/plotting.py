"""Matplotlib figures for reports: twist census histograms and floor diagrams.

Everything renders off-screen (Agg) straight to a file.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Circle, Rectangle  # noqa: E402

from .counting import TwistPolynomial  # noqa: E402
from .tiling import CylinderTiling, matching_edges  # noqa: E402

_PLANAR = "#9ecae1"
_UP = "#e6550d"
_DOWN = "#31a354"


def plot_census(census: TwistPolynomial, path, title: str = "") -> Path:
    """Bar chart of tiling counts per twist value, log scale."""
    items = census.items()
    xs = [float(k) for k, _ in items]
    ys = [c for _, c in items]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(xs, ys, width=0.2 if not census.integral else 0.8, color=_PLANAR, edgecolor="black", linewidth=0.5)
    if ys and max(ys) > 100 * max(min(ys), 1):
        ax.set_yscale("log")
    ax.set_xlabel("twist")
    ax.set_ylabel("number of tilings")
    if title:
        ax.set_title(title)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out)
    plt.close(fig)
    return out


def _draw_floor(ax, t: CylinderTiling, j: int) -> None:
    disk = t.disk
    below, above = t.plugs[j - 1], t.plugs[j]
    for s in disk.squares:
        ax.add_patch(Rectangle((s.x, s.y), 1, 1, fill=False, edgecolor="0.8", linewidth=0.5))
    for k in matching_edges(t.matchings[j - 1]):
        a, b = (disk.squares[i] for i in disk.edges[k])
        x0, y0 = min(a.x, b.x), min(a.y, b.y)
        w, h = abs(a.x - b.x) + 1, abs(a.y - b.y) + 1
        ax.add_patch(Rectangle((x0 + 0.08, y0 + 0.08), w - 0.16, h - 0.16,
                               facecolor=_PLANAR, edgecolor="black", linewidth=0.8))
    for i, s in enumerate(disk.squares):
        if above >> i & 1:
            ax.add_patch(Circle((s.x + 0.5, s.y + 0.5), 0.25, facecolor=_UP, edgecolor="black", linewidth=0.6))
        elif below >> i & 1:
            ax.add_patch(Circle((s.x + 0.5, s.y + 0.5), 0.25, facecolor="white", edgecolor=_DOWN, linewidth=1.5))
    x0, x1, y0, y1 = disk.bounds
    ax.set_xlim(x0 - 0.1, x1 + 1.1)
    ax.set_ylim(y0 - 0.1, y1 + 1.1)
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])
    ax.set_title(f"z = {t.z0 + j - 1}", fontsize=8)


def plot_floors(t: CylinderTiling, path, per_row: int = 8, title: str = "") -> Path:
    """One panel per floor, bottom floor first.

    Planar dominoes are drawn as rectangles; filled discs mark vertical
    dominoes going up to the next floor and rings those coming from below.
    """
    n = t.height
    cols = min(per_row, n)
    rows = -(-n // cols)
    fig, axes = plt.subplots(rows, cols, figsize=(1.6 * cols, 1.7 * rows + (0.3 if title else 0)), squeeze=False)
    for j in range(1, n + 1):
        _draw_floor(axes[(j - 1) // cols][(j - 1) % cols], t, j)
    for k in range(n, rows * cols):
        axes[k // cols][k % cols].set_axis_off()
    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out)
    plt.close(fig)
    return out
