"""Replay report rendering: a frontier-size figure plus a CSV table
written side by side into a report directory."""

from __future__ import annotations

import csv
from pathlib import Path

from .replay import ReplayReport, VIOLATED


def write_report(report: ReplayReport, out_dir, stem: str = "replay") -> dict[str, Path]:
    """Write ``<stem>.csv`` and ``<stem>_frontier.png`` under out_dir
    and return the paths keyed by kind."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    csv_path = out / f"{stem}.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["event_index", "frontier_size", "status"])
        for i, size in enumerate(report.frontier_sizes, start=1):
            violated = report.violated_at is not None and i >= report.violated_at
            writer.writerow([i, size, "violated" if violated else "alive"])
        writer.writerow([])
        writer.writerow(["verdict", report.verdict, ""])

    png_path = out / f"{stem}_frontier.png"
    _plot_frontier(report, png_path)
    return {"csv": csv_path, "figure": png_path}


def _plot_frontier(report: ReplayReport, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    xs = list(range(1, len(report.frontier_sizes) + 1))
    ax.step([0] + xs, [1] + report.frontier_sizes, where="post", lw=1.8)
    if report.violated_at is not None:
        ax.axvline(report.violated_at, color="crimson", ls="--", lw=1.2)
        ax.annotate(
            f"violated at event {report.violated_at}",
            xy=(report.violated_at, 0),
            xytext=(4, 6),
            textcoords="offset points",
            color="crimson",
            fontsize=9,
        )
    ax.set_xlabel("event index")
    ax.set_ylabel("frontier size")
    ax.set_title(f"verdict: {report.verdict}" + (
        "" if report.verdict != VIOLATED else f" (event {report.violated_at})"
    ))
    ax.grid(True, alpha=0.3)
    ax.set_ylim(bottom=-0.2)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
