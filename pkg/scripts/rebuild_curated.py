#!/usr/bin/env python3
"""Rebuild the curated equiangular verdict file from realizer evidence.

Runs the full n=5 equiangular pipeline for both tile kinds, attempts a
numeric realization of every survivor and records the ones that admit no
geometric drawing.  Takes several minutes.
"""

import sys
from pathlib import Path

from tilesearch.corpusgen import apexed_corpus
from tilesearch.equiangular import realize_survivor, run_equiangular

OUT = Path(__file__).resolve().parent.parent / "src/tilesearch/data/equiangular_curated_n5.txt"

HEADER = """\
# Curated verdicts for equiangular n=5 survivors that no geometric
# drawing realizes.  Checked by the numeric realizer (multi-start
# bounded least squares + drawing validation); regenerate with
# scripts/rebuild_curated.py.
# Format: <candidate-code-hex> <k> <verdict> <note>
"""


def main() -> int:
    corpus = apexed_corpus(5, min_tile_degree=3)
    lines = []
    for k in (3, 4):
        run = run_equiangular(5, k, corpus=corpus, curated={})
        for s in run.survivors:
            r = realize_survivor(s)
            if r.status != "realized":
                lines.append(f"{s.code_hex} {k} invalid no-geometric-drawing res={r.residual:.1e}")
                print("invalid:", k, s.code_hex[:32])
    OUT.write_text(HEADER + "\n".join(lines) + "\n")
    print(f"wrote {OUT} ({len(lines)} entries)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
