"""Run reports: delimited summaries plus matplotlib figures.

Consumes certificate record streams (one JSON object per line) and
writes a TSV table, a discard-reason frequency chart and a node-count
histogram next to it.
"""

from __future__ import annotations

import json
from collections import Counter
from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def read_certificates(path) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def summary_rows(records: Iterable[dict]) -> list[dict]:
    rows = []
    for rec in records:
        rows.append(
            {
                "candidate": rec["candidate"][:24],
                "shape": rec["shape"],
                "n": rec["n"],
                "outcome": rec["outcome"],
                "nodes": rec["nodes"],
                "survivors": len(rec.get("survivors", [])),
                "top_reason": max(rec["reasons"], key=rec["reasons"].get) if rec["reasons"] else "",
            }
        )
    return rows


def write_tsv(rows: list[dict], path) -> None:
    if not rows:
        Path(path).write_text("")
        return
    cols = list(rows[0])
    lines = ["\t".join(cols)]
    for row in rows:
        lines.append("\t".join(str(row[c]) for c in cols))
    Path(path).write_text("\n".join(lines) + "\n")


def reason_totals(records: Iterable[dict]) -> Counter:
    total: Counter = Counter()
    for rec in records:
        total.update(rec.get("reasons", {}))
    return total


def write_report(certificates_path, out_dir) -> dict:
    """TSV summary plus figures; returns the aggregate statistics."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = read_certificates(certificates_path)
    rows = summary_rows(records)
    write_tsv(rows, out / "certificates.tsv")

    reasons = reason_totals(records)
    outcomes = Counter(rec["outcome"] for rec in records)
    agg = {
        "records": len(records),
        "outcomes": dict(sorted(outcomes.items())),
        "reasons": dict(sorted(reasons.items())),
    }
    write_tsv(
        [{"key": k, "value": v} for k, v in sorted(reasons.items())],
        out / "discard_reasons.tsv",
    )

    if reasons:
        fig, ax = plt.subplots(figsize=(6, 3.2))
        keys = sorted(reasons)
        ax.bar(range(len(keys)), [reasons[k] for k in keys], color="#4e79a7")
        ax.set_xticks(range(len(keys)))
        ax.set_xticklabels(keys, rotation=25, ha="right", fontsize=8)
        ax.set_ylabel("discards")
        ax.set_title("discard rule frequencies")
        fig.tight_layout()
        fig.savefig(out / "discard_reasons.png", dpi=150)
        plt.close(fig)

    nodes = [rec["nodes"] for rec in records if rec["nodes"] > 0]
    if nodes:
        fig, ax = plt.subplots(figsize=(6, 3.2))
        ax.hist(nodes, bins=min(40, max(5, len(set(nodes)))), color="#59a14f")
        ax.set_xlabel("search nodes per (candidate, shape)")
        ax.set_ylabel("count")
        ax.set_yscale("log")
        fig.tight_layout()
        fig.savefig(out / "node_histogram.png", dpi=150)
        plt.close(fig)

    return agg


def write_gallery(realizations: list[tuple[str, dict]], out_dir, name="tilings.png") -> None:
    """Matplotlib gallery of realized tilings (one axes per tiling)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not realizations:
        return
    cols = min(5, len(realizations))
    rows = (len(realizations) + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(2.2 * cols, 2.2 * rows))
    axes_list = [axes] if rows * cols == 1 else list(axes.ravel())
    palette = ("#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f")
    for ax in axes_list:
        ax.set_axis_off()
    for ax, (label, tiles) in zip(axes_list, realizations):
        for i, t in enumerate(sorted(tiles)):
            poly = plt.Polygon(
                tiles[t], closed=True, facecolor=palette[i % len(palette)],
                edgecolor="black", linewidth=0.8,
            )
            ax.add_patch(poly)
        ax.set_xlim(-0.02, 1.02)
        ax.set_ylim(-0.02, 1.02)
        ax.set_aspect("equal")
        ax.set_title(label, fontsize=7)
    fig.tight_layout()
    fig.savefig(out / name, dpi=150)
    plt.close(fig)
