"""Partial preorder diagrams.

Renders a partial preorder as a layered graph: indifference classes collapse
into one box, preference arrows follow the transitive reduction, and
incomparable classes simply share no path.  Used by the CLI report path to
drop one figure per node next to the delimited output.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import FancyArrowPatch

from .ranking import PartialPreorder, Relation

__all__ = ["preorder_layout", "render_preorder", "render_report_figures"]


def _indifference_classes(preorder: PartialPreorder) -> list[tuple[str, ...]]:
    groups: list[list[str]] = []
    for alt in preorder.alternatives:
        for group in groups:
            if preorder.relation(group[0], alt) is Relation.INDIFFERENT:
                group.append(alt)
                break
        else:
            groups.append([alt])
    return [tuple(g) for g in groups]


def preorder_layout(preorder: PartialPreorder) -> tuple[list[tuple[str, ...]], list[tuple[int, int]], list[int]]:
    """Classes, reduced preference edges (class indices), and layer depths."""
    classes = _indifference_classes(preorder)
    n = len(classes)
    prefers = [
        [bool(i != j and preorder.relation(classes[i][0], classes[j][0]) is Relation.PREFERRED)
         for j in range(n)]
        for i in range(n)
    ]
    # transitive reduction: drop i->j when a two-hop path exists
    edges = []
    for i in range(n):
        for j in range(n):
            if not prefers[i][j]:
                continue
            if any(prefers[i][k] and prefers[k][j] for k in range(n)):
                continue
            edges.append((i, j))
    # layer = longest chain of preferences above the class
    depth = [0] * n
    changed = True
    while changed:
        changed = False
        for i, j in edges:
            if depth[j] < depth[i] + 1:
                depth[j] = depth[i] + 1
                changed = True
    return classes, edges, depth


def render_preorder(
    preorder: PartialPreorder,
    path: Path | str,
    title: str = "",
    labels: Optional[Mapping[str, str]] = None,
) -> Path:
    """Draw one partial preorder to an image file; returns the path."""
    classes, edges, depth = preorder_layout(preorder)
    levels: dict[int, list[int]] = {}
    for idx, d in enumerate(depth):
        levels.setdefault(d, []).append(idx)
    n_levels = max(levels) + 1 if levels else 1

    fig, ax = plt.subplots(figsize=(1.8 + 2.2 * max(len(v) for v in levels.values()),
                                    1.2 + 1.15 * n_levels))
    positions: dict[int, tuple[float, float]] = {}
    for d in range(n_levels):
        row = levels.get(d, [])
        for k, idx in enumerate(row):
            x = k - (len(row) - 1) / 2.0
            y = -d
            positions[idx] = (x, y)
            text = ", ".join(preorder_label(a, labels) for a in classes[idx])
            ax.text(
                x, y, text,
                ha="center", va="center", fontsize=11,
                bbox={"boxstyle": "round,pad=0.45", "facecolor": "#eef3fb", "edgecolor": "#274b69"},
            )
    for i, j in edges:
        x0, y0 = positions[i]
        x1, y1 = positions[j]
        arrow = FancyArrowPatch(
            (x0, y0 - 0.22), (x1, y1 + 0.24),
            arrowstyle="-|>", mutation_scale=14, color="#274b69", lw=1.2,
            shrinkA=2, shrinkB=2,
        )
        ax.add_patch(arrow)
    ax.set_xlim(min(x for x, _ in positions.values()) - 1.2,
                max(x for x, _ in positions.values()) + 1.2)
    ax.set_ylim(-n_levels + 0.4, 0.65)
    ax.axis("off")
    if title:
        ax.set_title(title, fontsize=12)
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def preorder_label(alt: str, labels: Optional[Mapping[str, str]]) -> str:
    if labels and labels.get(alt):
        return f"{alt}"
    return alt


def render_report_figures(
    report,
    problem,
    stem: Path | str,
    top: int = 1,
) -> list[Path]:
    """One figure per node for the ``top`` most frequent census entries.

    Files land next to ``stem``: ``<stem>.<node>.png`` (rank suffixes past
    the first entry).
    """
    stem = Path(stem)
    out: list[Path] = []
    n = report.sample_count
    for node_id, node in report.nodes.items():
        for rank, entry in enumerate(node.census[:top], start=1):
            freq = 100.0 * entry.count / n
            suffix = f".{node_id}.png" if rank == 1 else f".{node_id}.rank{rank}.png"
            label = problem.tree.node(node_id).label or node_id
            title = f"{label}: most frequent partial preorder ({freq:.2f}%)" if rank == 1 else \
                f"{label}: rank {rank} partial preorder ({freq:.2f}%)"
            out.append(
                render_preorder(entry.preorder, stem.with_name(stem.name + suffix), title=title,
                                labels=problem.performance.labels)
            )
    return out
