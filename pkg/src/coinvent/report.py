"""Figure rendering for the report stage.

Renders the lag histograms with their fitted curves, the community-size
distributions, and the detector-similarity heatmap to PNG files next to the
delimited outputs. Figures are a convenience view of the CSV/JSON data; the
byte-determinism contract covers only the delimited outputs.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import community as comm
from .stats import _shifted_lognormal_bin_prob

_CATEGORY_STYLE = {
    "self": ("#d62728", "self"),
    "in_community": ("#1f77b4", "in-community"),
    "out_of_community": ("#7f7f7f", "out-of-community"),
}


def _read_hist_csv(path):
    centers, counts, probs = [], [], []
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            centers.append(float(row["bin_center"]))
            counts.append(int(row["count"]))
            probs.append(float(row["probability"]))
    return np.array(centers), np.array(counts), np.array(probs)


def _fit_curve(ax, fit: dict, centers, bin_width, color):
    if "error" in fit or not fit:
        return
    xs = np.linspace(centers.min(), centers.max(), 400)
    lo = xs - bin_width / 2.0
    hi = xs + bin_width / 2.0
    ys = _shifted_lognormal_bin_prob(lo, hi, fit["shift"], fit["mu"], fit["sigma"])
    ax.plot(xs, ys, color=color, linewidth=1.2, alpha=0.9)


def render_lag_figure(out: Path, algorithm: str, stats: dict, bin_width: float, fig_dir: Path):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    plotted = False
    for category, (color, label) in _CATEGORY_STYLE.items():
        hist_path = out / f"hist_{algorithm}_{category}.csv"
        if not hist_path.exists():
            continue
        centers, _, probs = _read_hist_csv(hist_path)
        ax.bar(centers, probs, width=bin_width * 0.9, color=color, alpha=0.45, label=label)
        block = stats.get(category, {})
        _fit_curve(ax, block.get("fit", {}), centers, bin_width, color)
        plotted = True
    if not plotted:
        plt.close(fig)
        return
    ax.set_xlabel("lag to first citation (months)")
    ax.set_ylabel("probability per bin")
    ax.set_title(f"first-citation lag distributions ({algorithm})")
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(fig_dir / f"lags_{algorithm}.png", dpi=150)
    plt.close(fig)


def render_size_figure(out: Path, detectors, fig_dir: Path):
    parts = {}
    for algo in detectors:
        path = out / f"partition_{algo}.tsv"
        if path.exists():
            parts[algo] = comm.load_partition(path)
    if not parts:
        return
    fig, axes = plt.subplots(1, len(parts), figsize=(3.2 * len(parts), 3.4), squeeze=False)
    for ax, (algo, part) in zip(axes[0], parts.items()):
        sizes = part.sizes()
        ax.hist(sizes, bins=min(30, max(sizes)), color="#1f77b4")
        ax.set_yscale("log")
        ax.set_title(algo, fontsize=10)
        ax.set_xlabel("community size")
    axes[0][0].set_ylabel("communities")
    fig.tight_layout()
    fig.savefig(fig_dir / "community_sizes.png", dpi=150)
    plt.close(fig)


def render_ari_figure(ari: dict, fig_dir: Path):
    names = sorted(ari)
    if not names:
        return
    matrix = np.array([[ari[a][b] for b in names] for a in names])
    fig, ax = plt.subplots(figsize=(1.0 + 0.9 * len(names), 0.8 + 0.9 * len(names)))
    im = ax.imshow(matrix, vmin=0.0, vmax=1.0, cmap="viridis")
    ax.set_xticks(range(len(names)), names, rotation=45, ha="right", fontsize=9)
    ax.set_yticks(range(len(names)), names, fontsize=9)
    for i in range(len(names)):
        for j in range(len(names)):
            shade = "black" if matrix[i, j] > 0.6 else "white"
            ax.text(j, i, f"{matrix[i, j]:.2f}", ha="center", va="center",
                    color=shade, fontsize=8)
    fig.colorbar(im, ax=ax, label="adjusted Rand index")
    ax.set_title("partition similarity")
    fig.tight_layout()
    fig.savefig(fig_dir / "ari_matrix.png", dpi=150)
    plt.close(fig)


def render_figures(cfg, out: Path) -> None:
    fig_dir = out / "figures"
    fig_dir.mkdir(exist_ok=True)
    report_path = out / "report.json"
    ari = {}
    if report_path.exists():
        with open(report_path, encoding="utf-8") as handle:
            ari = json.load(handle).get("ari_matrix", {})
    for algo in cfg.detectors:
        stats_path = out / f"stats_{algo}.json"
        if not stats_path.exists():
            continue
        with open(stats_path, encoding="utf-8") as handle:
            stats = json.load(handle)
        render_lag_figure(out, algo, stats, cfg.bin_width, fig_dir)
    render_size_figure(out, cfg.detectors, fig_dir)
    render_ari_figure(ari, fig_dir)
