"""Tournament reports: delimited tables plus rendered figures.

The bundle writer drops report.csv and report.json next to a figures/
directory holding a seat-order win matrix and aggregate score bars.  All
output is deterministic for a given stats list.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .tournament import MatchStats

REPORT_VERSION = 1
CSV_HEADER = ["strategy_p1", "strategy_p2", "wins_p1", "wins_p2", "ties"]


def report_csv(stats: list[MatchStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for m in stats:
        writer.writerow([m.strategy_p1, m.strategy_p2, m.wins_p1, m.wins_p2, m.ties])
    return buf.getvalue()


def report_json(stats: list[MatchStats]) -> str:
    payload = {"version": REPORT_VERSION, "pairings": [m.to_dict() for m in stats]}
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def report_from_json(text: str) -> list[MatchStats]:
    payload = json.loads(text)
    if payload["version"] != REPORT_VERSION:
        raise ValueError(f"unsupported report version {payload['version']}")
    return [MatchStats.from_dict(d) for d in payload["pairings"]]


def write_report(stats: list[MatchStats], path: str | Path, fmt: str) -> Path:
    """Write one report file ("csv" or "json")."""
    path = Path(path)
    if fmt == "csv":
        text = report_csv(stats)
    elif fmt == "json":
        text = report_json(stats)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def _strategy_order(stats: list[MatchStats]) -> list[str]:
    seen: list[str] = []
    for m in stats:
        for name in (m.strategy_p1, m.strategy_p2):
            if name not in seen:
                seen.append(name)
    return seen


def render_win_matrix(stats: list[MatchStats], path: Path) -> None:
    """Heatmap of P1's win share (ties split) per ordered pairing."""
    names = _strategy_order(stats)
    n = len(names)
    grid = np.full((n, n), np.nan)
    labels = [["" for _ in range(n)] for _ in range(n)]
    for m in stats:
        i = names.index(m.strategy_p1)
        j = names.index(m.strategy_p2)
        grid[i, j] = m.score_p1() / m.games
        labels[i][j] = f"{m.wins_p1}-{m.wins_p2}-{m.ties}"

    fig, ax = plt.subplots(figsize=(1.6 * n + 2.5, 1.3 * n + 1.5))
    masked = np.ma.masked_invalid(grid)
    im = ax.imshow(masked, cmap="RdYlGn", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(n), names, rotation=30, ha="right")
    ax.set_yticks(range(n), names)
    ax.set_xlabel("player 2 strategy")
    ax.set_ylabel("player 1 strategy")
    ax.set_title("Player 1 win share (W-L-T annotated)")
    for i in range(n):
        for j in range(n):
            if labels[i][j]:
                ax.text(j, i, labels[i][j], ha="center", va="center", fontsize=9)
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": "hackattack"})
    plt.close(fig)


def render_score_totals(stats: list[MatchStats], path: Path) -> None:
    """Bar chart of each strategy's total score (wins + half ties)."""
    totals: dict[str, float] = {}
    games: dict[str, int] = {}
    for m in stats:
        totals[m.strategy_p1] = totals.get(m.strategy_p1, 0.0) + m.score_p1()
        totals[m.strategy_p2] = totals.get(m.strategy_p2, 0.0) + m.score_p2()
        games[m.strategy_p1] = games.get(m.strategy_p1, 0) + m.games
        games[m.strategy_p2] = games.get(m.strategy_p2, 0) + m.games
    names = _strategy_order(stats)
    shares = [totals[n] / games[n] for n in names]

    fig, ax = plt.subplots(figsize=(1.4 * len(names) + 2.5, 4.0))
    ax.bar(range(len(names)), shares, color="steelblue")
    ax.set_xticks(range(len(names)), names, rotation=30, ha="right")
    ax.set_ylim(0.0, 1.0)
    ax.axhline(0.5, color="grey", linewidth=0.8, linestyle="--")
    ax.set_ylabel("score share (wins + ties/2 per game)")
    ax.set_title("Aggregate strategy scores")
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": "hackattack"})
    plt.close(fig)


def write_report_bundle(stats: list[MatchStats], out_dir: str | Path) -> dict[str, Path]:
    """Write report.csv, report.json, and the figures into one directory."""
    out = Path(out_dir)
    figures = out / "figures"
    figures.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": write_report(stats, out / "report.csv", "csv"),
        "json": write_report(stats, out / "report.json", "json"),
    }
    win_matrix = figures / "win_matrix.png"
    render_win_matrix(stats, win_matrix)
    paths["win_matrix"] = win_matrix
    score_totals = figures / "score_totals.png"
    render_score_totals(stats, score_totals)
    paths["score_totals"] = score_totals
    return paths
