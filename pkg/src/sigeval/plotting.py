"""Matplotlib figures written next to the JSON/CSV reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_SCORE_BLOCKS = ("MLSM", "SRGS", "HL_SRGS")
_ERROR_BLOCKS = ("SRD_dir", "SRD_prox", "SRPF_dir", "SRPF_prox",
                 "HL_SRD_dir", "HL_SRD_prox", "HL_SRPF_dir", "HL_SRPF_prox")


def plot_aggregate(agg: dict[str, dict], path) -> Path:
    """Two panels: similarity scores in [0, 1] and SRD errors."""
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 3.8), constrained_layout=True)

    labels, vals = [], []
    for block in _SCORE_BLOCKS:
        for name, v in agg.get(block, {}).items():
            if name != "n_frames":
                labels.append(f"{block}\n{name}")
                vals.append(v)
    for block in _ERROR_BLOCKS:
        if block in agg:
            labels.append(f"{block}\nAcc")
            vals.append(agg[block]["Acc"])
    ax0.bar(range(len(vals)), vals, color="tab:blue")
    ax0.set_xticks(range(len(vals)), labels, fontsize=7, rotation=45, ha="right")
    ax0.set_ylim(0, 1.05)
    ax0.set_ylabel("score")
    ax0.set_title("similarity and accuracy")

    blocks = [b for b in _ERROR_BLOCKS if b in agg]
    x = np.arange(len(blocks))
    ax1.bar(x - 0.2, [agg[b]["MAE"] for b in blocks], width=0.4, label="MAE")
    ax1.bar(x + 0.2, [agg[b]["MSE"] for b in blocks], width=0.4, label="MSE")
    ax1.set_xticks(x, blocks, fontsize=7, rotation=45, ha="right")
    ax1.set_ylabel("steps")
    ax1.set_title("relational distance")
    ax1.legend(frameon=False)

    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_bench(rows, path) -> Path:
    counts = [r.count for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.8), constrained_layout=True)
    for attr, label in (("mlsm_s", "MLSM"), ("srgs_s", "SRGS"), ("srd_s", "SRD")):
        ax.loglog(counts, [getattr(r, attr) * 1e3 for r in rows], marker="o", label=label)
    ax.set_xlabel("objects per frame")
    ax.set_ylabel("mean time per frame (ms)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(frameon=False)
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_grid(values: np.ndarray, path, title: str = "attention") -> Path:
    """Heatmap of a map or grid; row 0 is drawn at the bottom (nearest the ego)."""
    fig, ax = plt.subplots(figsize=(4, 4), constrained_layout=True)
    im = ax.imshow(values, origin="lower", cmap="magma", vmin=0, vmax=max(1.0, float(np.max(values))))
    fig.colorbar(im, ax=ax, shrink=0.8)
    ax.set_title(title)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
