"""Matplotlib renderings of the evaluation outputs.

The evaluate and review-summary report paths write these figures next to
their CSV exports. Rendering is purely presentational: every number comes
straight from the tables computed in :mod:`rxguard.evaluation`.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .domain import REVIEW_METRICS, canonical_class_order
from .evaluation import MetricsTable, ReviewSummary

_METRICS = ("accuracy", "precision", "recall", "f1")


def _cell_label(model: str, rag: bool) -> str:
    return f"{model} ({'RAG' if rag else 'no-RAG'})"


def render_metrics_heatmaps(table: MetricsTable, out_path: Path) -> Path:
    """One heatmap per metric: interaction classes x (model, rag) cells."""
    classes = canonical_class_order()
    cells = [(m, r) for m in table.model_ids for r in table.rag_flags]
    fig, axes = plt.subplots(
        1, len(_METRICS), figsize=(4.2 * len(_METRICS), 0.5 * len(cells) + 2.6), squeeze=False
    )
    for ax, metric in zip(axes[0], _METRICS):
        grid = np.full((len(cells), len(classes)), np.nan)
        for i, (model, rag) in enumerate(cells):
            for j, cls in enumerate(classes):
                row = table.rows.get((model, rag, cls))
                if row is not None:
                    grid[i, j] = getattr(row, metric)
        im = ax.imshow(grid, vmin=0.0, vmax=1.0, cmap="RdYlGn", aspect="auto")
        ax.set_xticks(range(len(classes)), [c.value for c in classes], rotation=45, ha="right")
        ax.set_yticks(range(len(cells)), [_cell_label(m, r) for m, r in cells])
        ax.set_title(metric)
        for i in range(len(cells)):
            for j in range(len(classes)):
                if not np.isnan(grid[i, j]):
                    ax.text(j, i, f"{grid[i, j]:.2f}", ha="center", va="center", fontsize=7)
    fig.colorbar(im, ax=axes[0].tolist(), shrink=0.85)
    fig.suptitle("Per-class metrics by model and retrieval setting")
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_path


def render_rag_comparison(table: MetricsTable, out_path: Path) -> Path:
    """Grouped bars: mean F1 per model, with vs without retrieval."""
    models = list(table.model_ids)
    means = {}
    for rag in (False, True):
        values = []
        for model in models:
            rows = [
                table.rows[(model, rag, cls)]
                for cls in canonical_class_order()
                if (model, rag, cls) in table.rows
            ]
            values.append(float(np.mean([r.f1 for r in rows])) if rows else 0.0)
        means[rag] = values

    x = np.arange(len(models))
    width = 0.38
    fig, ax = plt.subplots(figsize=(1.8 * len(models) + 3, 4))
    ax.bar(x - width / 2, means[False], width, label="no-RAG", color="#b0b0b0")
    ax.bar(x + width / 2, means[True], width, label="RAG", color="#2f7d4f")
    ax.set_xticks(x, models)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("mean F1 across classes")
    ax.set_title("Retrieval grounding effect per model")
    ax.legend()
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_path


def render_review_summary(summary: ReviewSummary, out_path: Path) -> Path:
    """Per-cell mean bars for the five review metrics plus the overall mean."""
    metrics = list(REVIEW_METRICS) + ["overall"]
    labels = [_cell_label(c.model_id, c.rag_enabled) for c in summary.cells]
    x = np.arange(len(labels))
    width = 0.8 / len(metrics)
    fig, ax = plt.subplots(figsize=(1.1 * len(labels) * len(metrics) / 4 + 4, 4.2))
    for i, metric in enumerate(metrics):
        values = [getattr(c, metric) for c in summary.cells]
        offset = (i - (len(metrics) - 1) / 2) * width
        ax.bar(x + offset, values, width, label=metric.upper())
    ax.set_xticks(x, labels, rotation=20, ha="right")
    ax.set_ylim(0, 5.3)
    ax.set_ylabel("mean score (1-5)")
    ax.set_title("Subjective assessment means by model and retrieval setting")
    ax.legend(ncols=3, fontsize=8)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_path
