"""Headless figure rendering for the command-line reports.

Each helper writes one PNG next to the delimited output it illustrates. The
Agg backend keeps rendering display-free, and the PNG metadata is pinned so
repeated runs produce identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVEKW = {"dpi": 120, "metadata": {"Software": "softglcm"}}


def save_glcm_heatmap(table: np.ndarray, path, title: str) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.imshow(np.asarray(table), origin="upper", cmap="viridis")
    ax.set_xlabel("neighbor level")
    ax.set_ylabel("reference level")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, **_SAVEKW)
    plt.close(fig)


def save_sweep_curve(rows, path) -> None:
    """rows: (steepness, distance, mass) triples in sweep order."""
    ws = [r[0] for r in rows]
    dist = [r[1] for r in rows]
    mass = [r[2] for r in rows]
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    ax.plot(ws, dist, "o-", color="tab:blue", label="Frobenius distance to exact")
    ax.set_xlabel("steepness W")
    ax.set_ylabel("distance", color="tab:blue")
    ax.set_xscale("log")
    ax.set_yscale("log")
    twin = ax.twinx()
    twin.plot(ws, mass, "s--", color="tab:orange", label="total mass")
    twin.set_ylabel("total mass", color="tab:orange")
    ax.set_title("soft co-occurrence vs exact")
    fig.tight_layout()
    fig.savefig(path, **_SAVEKW)
    plt.close(fig)


def save_feature_bars(columns: dict[str, dict[str, float]], path) -> None:
    """Grouped bars, one group per feature, one bar per labeled column."""
    labels = list(columns)
    names = list(next(iter(columns.values())))
    x = np.arange(len(names), dtype=np.float64)
    width = 0.8 / max(len(labels), 1)
    fig, ax = plt.subplots(figsize=(10.0, 4.4))
    for i, label in enumerate(labels):
        vals = [columns[label][n] for n in names]
        ax.bar(x + (i - (len(labels) - 1) / 2.0) * width, vals, width, label=label)
    ax.set_xticks(x)
    ax.set_xticklabels([n.replace("_", "\n") for n in names], fontsize=7)
    ax.set_yscale("symlog", linthresh=1e-3)
    ax.set_ylabel("feature value")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVEKW)
    plt.close(fig)


def save_histogram_overlay(hists: dict[str, np.ndarray], path) -> None:
    """Overlaid 256-bin intensity histograms keyed by label."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    bins = np.arange(256)
    for label, counts in hists.items():
        ax.plot(bins, counts, drawstyle="steps-mid", label=label, linewidth=1.0)
    ax.set_xlabel("8-bit intensity")
    ax.set_ylabel("pixel count")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVEKW)
    plt.close(fig)


def save_trace_curves(rows: list[dict], path) -> None:
    """Loss components against optimizer step, log-scaled."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if rows:
        steps = [r["step"] for r in rows]
        for key, color in (
            ("total", "black"),
            ("mse", "tab:blue"),
            ("glcm", "tab:orange"),
            ("ssim", "tab:green"),
        ):
            ax.plot(steps, [max(r[key], 1e-300) for r in rows], color=color, label=key)
        boundary = next(
            (r["step"] for r in rows if r["weight_glcm"] > 0 or r["weight_ssim"] > 0),
            None,
        )
        if boundary is not None and boundary > 0:
            ax.axvline(boundary, color="gray", linestyle=":", linewidth=1.0)
        ax.set_yscale("log")
        ax.legend()
    ax.set_xlabel("step")
    ax.set_ylabel("loss")
    fig.tight_layout()
    fig.savefig(path, **_SAVEKW)
    plt.close(fig)
