"""Result reporting: console tables, results.json/.csv, confusion heatmaps."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  backend must be pinned first

import numpy as np

from .core import GESTURE_NAMES
from .evaluate import ConfusionMatrix


def format_confusion(confusion: ConfusionMatrix) -> str:
    """Fixed-width confusion table, rows true / columns predicted."""
    n = confusion.counts.shape[0]
    width = max(5, len(str(int(confusion.counts.max(initial=1)))) + 1)
    name_width = max(len(name) for name in GESTURE_NAMES[:n]) + 4
    lines = ["true \\ pred".ljust(name_width)
             + "".join(str(c).rjust(width) for c in range(n))]
    for r in range(n):
        label = f"{GESTURE_NAMES[r]} ({r})".ljust(name_width)
        lines.append(label + "".join(
            str(int(v)).rjust(width) for v in confusion.counts[r]))
    return "\n".join(lines)


def format_per_class(confusion: ConfusionMatrix) -> str:
    name_width = max(len(name) for name in GESTURE_NAMES) + 2
    lines = ["class".ljust(name_width) + "precision   recall   support"]
    for cid, precision, recall in confusion.per_class():
        support = int(confusion.counts[cid].sum())
        lines.append(GESTURE_NAMES[cid].ljust(name_width)
                     + f"{precision:9.3f}{recall:9.3f}{support:10d}")
    return "\n".join(lines)


def format_report(title: str, accuracy: float, confusion: ConfusionMatrix) -> str:
    parts = [title,
             f"accuracy: {accuracy:.4f} ({int(np.trace(confusion.counts))}/"
             f"{confusion.total})",
             "",
             format_confusion(confusion),
             "",
             format_per_class(confusion)]
    return "\n".join(parts)


def write_results_json(path, payload: dict) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_confusion_csv(path, confusion: ConfusionMatrix) -> None:
    """Confusion counts as CSV, one row per true class."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    n = confusion.counts.shape[0]
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["true_class"] + [GESTURE_NAMES[c] for c in range(n)])
        for r in range(n):
            writer.writerow([GESTURE_NAMES[r]] + [int(v) for v in confusion.counts[r]])


def render_confusion_heatmap(path, confusion: ConfusionMatrix, title: str = "") -> None:
    counts = confusion.counts.astype(np.float64)
    row_sums = counts.sum(axis=1, keepdims=True)
    rates = np.divide(counts, row_sums, out=np.zeros_like(counts),
                      where=row_sums > 0)
    n = counts.shape[0]
    fig, ax = plt.subplots(figsize=(7.2, 6.4))
    image = ax.imshow(rates, cmap="Blues", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(n), [GESTURE_NAMES[c] for c in range(n)],
                  rotation=45, ha="right", fontsize=8)
    ax.set_yticks(range(n), [GESTURE_NAMES[c] for c in range(n)], fontsize=8)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    if title:
        ax.set_title(title)
    for r in range(n):
        for c in range(n):
            value = int(counts[r, c])
            if value:
                ax.text(c, r, str(value), ha="center", va="center", fontsize=7,
                        color="white" if rates[r, c] > 0.5 else "black")
    fig.colorbar(image, ax=ax, label="row share")
    fig.tight_layout()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_run_report(run_dir, payload: dict, confusion: ConfusionMatrix,
                     title: str = "") -> dict:
    """Emit results.json, confusion.csv, and confusion.png under run_dir."""
    run_dir = Path(run_dir)
    paths = {"results": run_dir / "results.json",
             "confusion_csv": run_dir / "confusion.csv",
             "confusion_png": run_dir / "confusion.png"}
    write_results_json(paths["results"], payload)
    write_confusion_csv(paths["confusion_csv"], confusion)
    render_confusion_heatmap(paths["confusion_png"], confusion, title)
    return paths
