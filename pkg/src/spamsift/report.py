"""Report rendering: DOT export and matplotlib figures for trees and metrics."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.colors import to_hex

from .chaid import ChaidNode, ChaidTree
from .metrics import CrossValidationResult

_POSITIVE = "spam"


def _node_caption(node: ChaidNode) -> str:
    spam = node.class_counts.get(_POSITIVE, 0)
    share = spam / node.total if node.total else 0.0
    lines = [f"n={node.total}", f"spam {spam} ({share:.1%})"]
    if node.is_leaf:
        lines.append(f"stop: {node.stop_reason}")
    else:
        lines.append(f"split: {node.split.predictor}")
    return "\n".join(lines)


def tree_to_dot(tree: ChaidTree) -> str:
    """Graphviz source for the tree; render with e.g. `dot -Tpng`."""
    out = ["digraph chaid {", '  node [shape=box, fontname="helvetica"];']
    for node in tree.nodes:
        caption = _node_caption(node).replace("\n", "\\n")
        out.append(f'  {node.id} [label="#{node.id}\\n{caption}"];')
    for node in tree.nodes:
        if node.is_leaf:
            continue
        for group, child_id in zip(node.split.grouping.groups, node.children):
            label = ", ".join(group)
            out.append(f'  {node.id} -> {child_id} [label="{label}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def save_dot(tree: ChaidTree, path: str | Path) -> None:
    Path(path).write_text(tree_to_dot(tree), encoding="utf-8")


def _layout(tree: ChaidTree) -> dict[int, tuple[float, float]]:
    """Leaves get consecutive x slots; parents sit over their children."""
    positions: dict[int, tuple[float, float]] = {}
    next_slot = [0.0]

    def place(node: ChaidNode) -> float:
        if node.is_leaf:
            x = next_slot[0]
            next_slot[0] += 1.0
        else:
            xs = [place(tree.node(cid)) for cid in node.children]
            x = sum(xs) / len(xs)
        positions[node.id] = (x, -float(node.depth))
        return x

    place(tree.root)
    return positions


def render_tree_figure(tree: ChaidTree, path: str | Path) -> None:
    """Draw the tree with per-node spam shares, in the style of a
    hand-drawn classification diagram."""
    positions = _layout(tree)
    n_leaves = max(1, len(tree.leaves()))
    depth = max(node.depth for node in tree.nodes)
    fig, ax = plt.subplots(figsize=(max(6.0, 2.2 * n_leaves), 2.2 * (depth + 1.2)))

    for node in tree.nodes:
        if node.is_leaf:
            continue
        x0, y0 = positions[node.id]
        for group, child_id in zip(node.split.grouping.groups, node.children):
            x1, y1 = positions[child_id]
            ax.plot([x0, x1], [y0 - 0.12, y1 + 0.18], color="0.45", lw=1.0, zorder=1)
            ax.annotate(", ".join(group), ((x0 + x1) / 2, (y0 + y1) / 2),
                        fontsize=7, ha="center", color="0.25",
                        bbox=dict(boxstyle="round,pad=0.15", fc="white", ec="none"))

    for node in tree.nodes:
        x, y = positions[node.id]
        spam_share = node.class_counts.get(_POSITIVE, 0) / node.total if node.total else 0.0
        face = to_hex((1.0, 1.0 - 0.6 * spam_share, 1.0 - 0.6 * spam_share))
        ax.annotate(f"#{node.id}\n" + _node_caption(node), (x, y),
                    fontsize=8, ha="center", va="center",
                    bbox=dict(boxstyle="round,pad=0.35", fc=face, ec="0.3"))

    ax.set_xlim(-0.8, n_leaves - 0.2)
    ax.set_ylim(-depth - 0.6, 0.6)
    ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_metrics_figure(result: CrossValidationResult, path: str | Path) -> None:
    """Grouped per-fold bars for precision/recall/F with mean lines."""
    folds = [f.fold for f in result.folds]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.9 * len(folds) + 3), 4.0))
    width = 0.27
    colors = {"precision": "#4878cf", "recall": "#6acc65", "f_measure": "#d65f5f"}
    for offset, metric in zip((-width, 0.0, width), colors):
        values = [getattr(f.metrics, metric) for f in result.folds]
        ax.bar([x + offset for x in folds], values, width=width,
               label=metric.replace("_", "-"), color=colors[metric])
        ax.axhline(result.mean(metric), color=colors[metric], ls="--", lw=0.8)
    ax.set_xlabel("fold")
    ax.set_ylabel("score")
    ax.set_ylim(0, 1.05)
    ax.set_xticks(folds)
    ax.legend(loc="lower right", fontsize=8)
    ax.set_title("cross-validation metrics (spam as positive class)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
