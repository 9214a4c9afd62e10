"""Delimited report tables and the matplotlib figures rendered beside them."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_FIG_DPI = 150


def write_table(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _new_axes(xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def sweep_figure(
    values: Sequence[float],
    means: Sequence[float],
    stds: Sequence[float],
    xlabel: str,
    out_path: Path,
    title: Optional[str] = None,
) -> None:
    """Line plot with error bars for a one-parameter sweep."""
    fig, ax = _new_axes(xlabel, "total life years gained")
    ax.errorbar(values, means, yerr=stds, marker="o", capsize=3)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=_FIG_DPI)
    plt.close(fig)


def compare_figure(
    labels: Sequence[str],
    means: Sequence[float],
    stds: Sequence[float],
    out_path: Path,
) -> None:
    """Bar chart with error bars for a policy comparison."""
    fig, ax = _new_axes("policy", "total life years gained")
    positions = range(len(labels))
    ax.bar(positions, means, yerr=stds, capsize=4, color="tab:blue", alpha=0.8)
    ax.set_xticks(list(positions))
    ax.set_xticklabels(labels, rotation=15, ha="right")
    fig.tight_layout()
    fig.savefig(out_path, dpi=_FIG_DPI)
    plt.close(fig)


def trajectory_figure(
    times_days: Sequence[float],
    cumulative_life_years: Sequence[float],
    horizon_days: float,
    out_path: Path,
) -> None:
    """Step plot of the accumulated objective over one replication."""
    fig, ax = _new_axes("day", "cumulative life years gained")
    xs: List[float] = [0.0] + list(times_days) + [horizon_days]
    ys: List[float] = [0.0] + list(cumulative_life_years)
    ys.append(ys[-1])
    ax.step(xs, ys, where="post")
    fig.tight_layout()
    fig.savefig(out_path, dpi=_FIG_DPI)
    plt.close(fig)
