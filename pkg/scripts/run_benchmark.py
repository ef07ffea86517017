#!/usr/bin/env python3
"""Target-vs-rest classification and cross-matrix block means on seeded synthetic benchmarks.

Usage:
  python3 scripts/run_benchmark.py --seeds 0 1 2
  python3 scripts/run_benchmark.py --dims 300x150 --peaks 60 --per-family 7 --out results/bench.json
"""
import argparse
import json
from pathlib import Path

import numpy as np

from qptm.chromatogram import SourceLibrary
from qptm.classify import block_means, cross_score_matrix, run_binary
from qptm.cli import format_confusion_table, format_metrics_table
from qptm.config import MethodId, RunConfig
from qptm.synth import gulf_families, make_benchmark


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    p.add_argument("--dims", default="200x100")
    p.add_argument("--peaks", type=int, default=25)
    p.add_argument("--per-family", type=int, default=7)
    p.add_argument("--jitter", type=float, default=0.3)
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--znorm-scope", choices=["image", "column"], default="image")
    p.add_argument("--out", help="optional JSON summary path")
    args = p.parse_args()
    dims = tuple(int(v) for v in args.dims.split("x"))

    summary = []
    for seed in args.seeds:
        fams = gulf_families(3, dims, args.peaks, 0.8, args.jitter, args.noise, seed=seed)
        bench = make_benchmark(fams, dims, args.per_family)
        base = RunConfig(znorm_scope=args.znorm_scope)
        runs = [run_binary(bench.tests, bench.library[0], base.replace(method=m)) for m in MethodId]
        lib = SourceLibrary.from_entries(bench.samples)
        matrix, row_eps = cross_score_matrix(lib, base)
        within, across = block_means(matrix, lib.regions)
        print(f"== seed {seed}")
        print(format_confusion_table(runs))
        print(format_metrics_table(runs))
        print(f"cross-matrix within {within:.2f} %  across {across:.2f} %  row eps {sorted(set(row_eps))}\n")
        summary.append({
            "seed": seed,
            "f1": {r["method"]: r["metrics"]["f1"] for r in runs},
            "within": within,
            "across": across,
        })

    f1 = {m.value: np.mean([s["f1"][m.value] for s in summary]) for m in MethodId}
    print("mean F1 over seeds: " + ", ".join(f"{k} {v:.3f}" for k, v in f1.items()))
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(json.dumps(summary, indent=2) + "\n")


if __name__ == "__main__":
    main()
