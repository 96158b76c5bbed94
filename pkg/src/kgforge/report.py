"""Figure rendering for training and evaluation runs.

Figures are written next to the delimited outputs of the same run: a loss
curve beside the loss table, a rank histogram beside the rank dump, and a
2-D projection scatter for labeled embeddings.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_GOLDEN = (math.sqrt(5) - 1.0) / 2.0


def _figure(width=6.4):
    return plt.subplots(figsize=(width, width * _GOLDEN))


def save_loss_curve(losses, path, title="training loss"):
    fig, ax = _figure()
    ax.plot(range(1, len(losses) + 1), losses, marker="o", markersize=3)
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean loss")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_rank_histogram(ranks_by_setting: dict, path, title="rank distribution"):
    fig, ax = _figure()
    top = max((max(r) for r in ranks_by_setting.values() if r), default=1)
    bins = np.logspace(0, math.log10(max(top, 2)), 30)
    for setting in sorted(ranks_by_setting):
        ax.hist(ranks_by_setting[setting], bins=bins, alpha=0.55, label=setting)
    ax.set_xscale("log")
    ax.set_xlabel("rank")
    ax.set_ylabel("test triples")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_embedding_scatter(vectors, labels, path, title="embedding projection"):
    """Scatter of the top-2 principal components, colored by label."""
    vectors = np.asarray(vectors, dtype=float)
    centered = vectors - vectors.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    pts = centered @ vt[:2].T
    fig, ax = _figure()
    for lab in sorted(set(labels)):
        sel = [i for i, l in enumerate(labels) if l == lab]
        ax.scatter(pts[sel, 0], pts[sel, 1], s=18, alpha=0.8, label=lab)
    ax.set_xlabel("pc 1")
    ax.set_ylabel("pc 2")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
