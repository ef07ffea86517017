#!/usr/bin/env python3
"""Compare per-column and whole-image standardization before SAX on harmonized peak maps.

A harmonized peak map is mostly zeros. Standardizing each column on its own
stretches a column holding one small peak to the same scale as a column
holding a large one, so a few weak peaks dominate the SAX distance.

Usage:
  python3 scripts/znorm_scope.py --seeds 0 1 2 3 4
"""
import argparse

from qptm.chromatogram import SourceLibrary
from qptm.classify import block_means, cross_score_matrix, run_binary
from qptm.config import RunConfig
from qptm.synth import gulf_families, make_benchmark


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    p.add_argument("--min-peak-height", type=float, nargs="+", default=[0.0, 50.0])
    args = p.parse_args()
    dims = (200, 100)
    print(f"{'seed':>4} {'min_h':>6} {'scope':>7} {'F1':>6} {'in-family %':>12} {'within':>8} {'across':>8}")
    for seed in args.seeds:
        bench = make_benchmark(gulf_families(seed=seed), dims, 7)
        lib = SourceLibrary.from_entries(bench.samples)
        for mh in args.min_peak_height:
            for scope in ("column", "image"):
                cfg = RunConfig(znorm_scope=scope, min_peak_height=mh)
                run = run_binary(bench.tests, bench.library[0], cfg)
                pct = [r["percent_match"] for r in run["rows"] if r["target"]]
                within, across = block_means(cross_score_matrix(lib, cfg)[0], lib.regions)
                print(f"{seed:>4} {mh:>6.0f} {scope:>7} {run['metrics']['f1']:>6.3f} "
                      f"{min(pct):>5.1f}-{max(pct):<6.1f} {within:>8.1f} {across:>8.1f}")


if __name__ == "__main__":
    main()
