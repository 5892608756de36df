"""Command-line interface: corpus generation, ingestion, proof runs,
equiangular enumeration, rendering and reporting.

Runs are deterministic: certificates are sorted by (candidate code,
shape) before writing, independent of worker count, and every run
writes a manifest with all parameters so it can be reproduced
byte-identically.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import multiprocessing
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .corpusgen import apexed_corpus
from .equations import build_topology
from .equiangular import (
    load_curated,
    realize_survivor,
    run_equiangular,
)
from .filters import apply_filters
from .planegraph import (
    CandidatePair,
    GraphParseError,
    PlaneGraph,
    check_three_connected,
    extract_candidates,
    iter_planar_code_file,
    parse_planar_code,
    rotation_from_code,
    write_planar_code,
)
from .render import render_graph_svg, render_tiling_svg
from .report import write_gallery, write_report
from .search import Certificate, SearchConfig, run_search
from .shapes import TileShape, enumerate_labelings

SCHEMA_VERSION = 1
WORKERS_ENV = "TILESEARCH_WORKERS"


@dataclass
class RunConfig:
    mode: str
    n: int
    k_values: tuple[int, ...]
    eps: str = "1/20"
    tau: float = 1e-9
    node_cap: int = 10**8
    workers: int = 1
    corpus_paths: tuple[str, ...] = ()
    out_dir: str = "out"
    direct_only: bool = False
    schema_version: int = SCHEMA_VERSION
    version: str = __version__

    def search_config(self) -> SearchConfig:
        return SearchConfig(
            eps=Fraction(self.eps),
            tau=self.tau,
            node_cap=self.node_cap,
            allow_reflection=not self.direct_only,
        )


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(config: RunConfig, out: Path, extra: Optional[dict] = None) -> None:
    manifest = asdict(config)
    manifest["corpus_sha256"] = {p: _sha256(p) for p in config.corpus_paths}
    if extra:
        manifest.update(extra)
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def load_corpus(paths: Sequence[str]) -> list[PlaneGraph]:
    graphs: list[PlaneGraph] = []
    for path in paths:
        try:
            graphs.extend(iter_planar_code_file(path))
        except GraphParseError as exc:
            raise GraphParseError(f"{path}: {exc}") from exc
    return graphs


def collect_candidates(graphs: Sequence[PlaneGraph]) -> list[CandidatePair]:
    """Validated, deduplicated candidates in canonical-code order."""
    seen: dict[bytes, CandidatePair] = {}
    for g in graphs:
        g.validate()
        if not check_three_connected(g):
            raise GraphParseError("corpus graph is not 3-connected")
        for cand in extract_candidates(g):
            seen.setdefault(cand.code, cand)
    return [seen[c] for c in sorted(seen)]


# ---------------------------------------------------------------------------
# proof jobs


def _job_shard(code_hex: str, workers: int) -> int:
    return int(hashlib.sha256(code_hex.encode()).hexdigest(), 16) % workers


_WORKER_STATE: dict = {}


def _worker_init(serialized_jobs, config_dict):
    _WORKER_STATE["jobs"] = serialized_jobs
    _WORKER_STATE["config"] = SearchConfig(
        eps=Fraction(config_dict["eps"]),
        tau=config_dict["tau"],
        node_cap=config_dict["node_cap"],
        allow_reflection=not config_dict["direct_only"],
    )


def _run_shard(args) -> list[dict]:
    mode, shard = args
    config = _WORKER_STATE["config"]
    out = []
    for code_hex, k, labels, constraints in _WORKER_STATE["jobs"][shard]:
        cand = _candidate_from_hex(code_hex)
        shape = TileShape(k, tuple(labels))
        cert = run_search(cand, shape, mode, config, constraints)
        out.append(cert.as_record())
    return out


def _candidate_from_hex(code_hex: str) -> CandidatePair:
    code = bytes.fromhex(code_hex)
    apexed = PlaneGraph(rotation_from_code(code))
    sides = tuple(w - 1 for w in apexed.rotation[0])
    from .planegraph import remove_vertex

    return CandidatePair(graph=remove_vertex(apexed, 0), sides=sides, code=code)


def prove(config: RunConfig) -> tuple[int, list[dict]]:
    """Run the proof pipeline; returns (exit_status, certificate records)."""
    graphs = load_corpus(config.corpus_paths)
    cands = collect_candidates(graphs)
    records: list[dict] = []
    jobs_per_shard: list[list] = [[] for _ in range(max(1, config.workers))]
    search_config = config.search_config()
    for cand in cands:
        for k in config.k_values:
            report, constraints = apply_filters(cand, k, config.mode)
            records_filtered = report.verdict == "discard"
            if records_filtered:
                records.append(
                    {
                        "candidate": cand.id_hex(),
                        "shape": f"k{k}",
                        "mode": config.mode,
                        "n": cand.n_tiles,
                        "outcome": "filtered",
                        "nodes": 0,
                        "reasons": {report.rule: 1},
                        "survivors": [],
                        "note": "",
                    }
                )
                continue
            for shape in enumerate_labelings(k, config.mode):
                shard = _job_shard(cand.id_hex(), max(1, config.workers))
                jobs_per_shard[shard].append(
                    (cand.id_hex(), k, shape.labels, constraints)
                )
    config_dict = {
        "eps": config.eps,
        "tau": config.tau,
        "node_cap": config.node_cap,
        "direct_only": config.direct_only,
    }
    if config.workers > 1:
        with multiprocessing.Pool(
            config.workers, initializer=_worker_init, initargs=(jobs_per_shard, config_dict)
        ) as pool:
            for out in pool.map(
                _run_shard, [(config.mode, i) for i in range(len(jobs_per_shard))]
            ):
                records.extend(out)
    else:
        _worker_init(jobs_per_shard, config_dict)
        for i in range(len(jobs_per_shard)):
            records.extend(_run_shard((config.mode, i)))
    records.sort(key=lambda r: (r["candidate"], r["shape"]))
    bad = [r for r in records if r["outcome"] not in ("refuted", "filtered")]
    return (0 if not bad else 1), records


def write_certificates(records: list[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps({"schema": SCHEMA_VERSION, **rec}, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_generate(args) -> int:
    corpus = apexed_corpus(args.tiles, min_tile_degree=args.min_tile_degree)
    data = write_planar_code(corpus)
    Path(args.out).write_bytes(data)
    print(f"wrote {len(corpus)} graphs ({args.tiles} tiles, "
          f"min tile degree {args.min_tile_degree}) to {args.out}")
    return 0


def cmd_ingest(args) -> int:
    graphs = load_corpus(args.paths)
    by_n: dict[int, int] = {}
    for g in graphs:
        by_n[g.vertex_count - 5] = by_n.get(g.vertex_count - 5, 0) + 1
    cands = collect_candidates(graphs)
    with open(args.out, "w", encoding="utf-8") as fh:
        for cand in cands:
            fh.write(json.dumps({"schema": SCHEMA_VERSION, "code": cand.id_hex()}) + "\n")
    for n, count in sorted(by_n.items()):
        print(f"n={n}: {count} graphs")
    print(f"candidates: {len(cands)} (written to {args.out})")
    return 0


def cmd_prove(args) -> int:
    corpus_paths = args.corpus or [_default_corpus(args.n, 4, args.out)]
    config = RunConfig(
        mode=args.shape,
        n=args.n,
        k_values=tuple(args.k),
        eps=args.eps,
        tau=args.tau,
        node_cap=args.node_cap,
        workers=args.workers,
        corpus_paths=tuple(corpus_paths),
        out_dir=args.out,
        direct_only=args.direct_only,
    )
    out = Path(args.out)
    _write_manifest(config, out)
    status, records = prove(config)
    write_certificates(records, out / "certificates.jsonl")
    agg = write_report(out / "certificates.jsonl", out)
    print(f"{config.mode} n={config.n}: {agg['outcomes']}")
    for rule, count in agg["reasons"].items():
        print(f"  {rule}: {count}")
    if status != 0:
        unresolved = [
            r["candidate"][:16] + ":" + r["shape"]
            for r in records
            if r["outcome"] not in ("refuted", "filtered")
        ]
        print("UNRESOLVED:", ", ".join(unresolved))
    else:
        print("all candidate/shape pairs refuted")
    return status


def _default_corpus(n: int, min_tile_degree: int, out_dir: str) -> str:
    path = Path(out_dir) / f"corpus_n{n}_m{min_tile_degree}.pc"
    if not path.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
        corpus = apexed_corpus(n, min_tile_degree=min_tile_degree)
        path.write_bytes(write_planar_code(corpus))
        print(f"generated corpus: {path} ({len(corpus)} graphs)")
    return str(path)


def cmd_equiangular(args) -> int:
    k_values = (3, 4) if args.k == "both" else (int(args.k),)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    corpus_paths = args.corpus or [_default_corpus(args.n, 3, args.out)]
    config = RunConfig(
        mode="equiangular",
        n=args.n,
        k_values=k_values,
        eps=args.eps,
        node_cap=args.node_cap,
        workers=args.workers,
        corpus_paths=tuple(corpus_paths),
        out_dir=args.out,
    )
    _write_manifest(config, out)
    corpus = load_corpus(corpus_paths)
    total = 0
    records = []
    for k in k_values:
        run = run_equiangular(args.n, k, config.search_config(), corpus=corpus)
        tilings = run.tiling_count
        total += tilings
        print(
            f"n={args.n} k={k}: {run.survivor_count} survivors, "
            f"{len(run.curated_invalid)} curated invalid, {tilings} tilings"
        )
        for s in run.survivors:
            records.append(
                {
                    "schema": SCHEMA_VERSION,
                    "k": k,
                    "candidate": s.code_hex,
                    "shapes": sorted({c.shape for c in s.certificates}),
                    "curated_invalid": s.code_hex in run.curated_invalid,
                }
            )
        if args.render:
            gallery = []
            for s in run.survivors:
                if s.code_hex in run.curated_invalid:
                    continue
                r = realize_survivor(s)
                if r.status == "realized":
                    name = f"tiling_k{k}_{s.code_hex[:16]}"
                    (out / f"{name}.svg").write_text(render_tiling_svg(r.tiles))
                    gallery.append((name[:22], r.tiles))
                else:
                    (out / f"graph_k{k}_{s.code_hex[:16]}.svg").write_text(
                        render_graph_svg(s.candidate)
                    )
            write_gallery(gallery, out, name=f"tilings_k{k}.png")
    with open(out / "survivors.jsonl", "w", encoding="utf-8") as fh:
        for rec in sorted(records, key=lambda r: (r["k"], r["candidate"])):
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    if len(k_values) == 2:
        print(f"total tilings: {total}")
    return 0


def cmd_render(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    count = 0
    if args.corpus:
        for path in args.corpus:
            for g in iter_planar_code_file(path):
                for cand in extract_candidates(g):
                    (out / f"graph_{cand.id_hex()[:16]}.svg").write_text(
                        render_graph_svg(cand)
                    )
                    count += 1
    if args.fixture == "unit-square":
        tiles = {0: [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]}
        (out / "unit_square.svg").write_text(render_tiling_svg(tiles))
        count += 1
    print(f"wrote {count} SVG files to {out}")
    return 0


def cmd_report(args) -> int:
    agg = write_report(args.certificates, args.out)
    print(json.dumps(agg, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tilesearch",
        description="Exhaustive search over convex-polygon tilings of squares and rectangles",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    default_workers = int(os.environ.get(WORKERS_ENV, "1"))

    g = sub.add_parser("generate", help="generate an apexed candidate corpus")
    g.add_argument("--tiles", type=int, required=True)
    g.add_argument("--min-tile-degree", type=int, default=4, choices=(3, 4))
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    i = sub.add_parser("ingest", help="parse, validate and extract candidates")
    i.add_argument("paths", nargs="+")
    i.add_argument("--out", default="candidates.jsonl")
    i.set_defaults(func=cmd_ingest)

    p = sub.add_parser("prove", help="run a refutation proof")
    p.add_argument("--shape", choices=("square", "rectangle"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, nargs="+", default=[4, 5, 6])
    p.add_argument("--corpus", nargs="*")
    p.add_argument("--out", default="out/prove")
    p.add_argument("--eps", default="1/20")
    p.add_argument("--tau", type=float, default=1e-9)
    p.add_argument("--node-cap", type=int, default=10**8)
    p.add_argument("--workers", type=int, default=default_workers)
    p.add_argument("--direct-only", action="store_true")
    p.set_defaults(func=cmd_prove)

    e = sub.add_parser("equiangular", help="enumerate equiangular tilings")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--k", choices=("3", "4", "both"), default="both")
    e.add_argument("--corpus", nargs="*")
    e.add_argument("--out", default="out/equiangular")
    e.add_argument("--eps", default="1/20")
    e.add_argument("--node-cap", type=int, default=10**8)
    e.add_argument("--workers", type=int, default=default_workers)
    e.add_argument("--render", action="store_true")
    e.set_defaults(func=cmd_equiangular)

    r = sub.add_parser("render", help="render candidates or fixtures to SVG")
    r.add_argument("--corpus", nargs="*")
    r.add_argument("--fixture", choices=("unit-square",))
    r.add_argument("--out", default="out/render")
    r.set_defaults(func=cmd_render)

    rep = sub.add_parser("report", help="summarize a certificate file")
    rep.add_argument("--certificates", required=True)
    rep.add_argument("--out", default="out/report")
    rep.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
