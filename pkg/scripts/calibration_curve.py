#!/usr/bin/env python3
"""Epsilon calibration curves for families rendered at several jitter levels.

With multiplicative jitter j every co-located pair ratio is at most 1 + j,
so the curve should flatten once epsilon reaches about j.

Usage:
  python3 scripts/calibration_curve.py --jitters 0.1 0.2 0.4 0.6 --csv results/curves.csv
"""
import argparse
from pathlib import Path

from qptm.config import RunConfig
from qptm.similarity import calibrate_epsilon
from qptm.synth import gulf_families, render


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--jitters", type=float, nargs="+", default=[0.1, 0.2, 0.4, 0.6])
    p.add_argument("--dims", default="500x250")
    p.add_argument("--peaks", type=int, default=150)
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--samples", type=int, default=7, help="reference plus training images")
    p.add_argument("--seed", type=int, default=11)
    p.add_argument("--csv", help="write all curves to this CSV")
    args = p.parse_args()
    dims = tuple(int(v) for v in args.dims.split("x"))
    grid = [round(0.05 * k, 10) for k in range(1, 21)]
    w = RunConfig().word_length(dims[0])

    lines = ["jitter,epsilon,deviation"]
    for j in args.jitters:
        fam = gulf_families(2, dims, args.peaks, height_jitter=j, noise=args.noise, seed=args.seed)[0]
        imgs, _ = render(fam, dims, args.samples)
        curve = calibrate_epsilon(imgs, grid, w)
        print(f"jitter {j:.2f}: chosen eps {curve.chosen_epsilon:.2f}")
        lines += [f"{j},{e},{d}" for e, d in curve.points]
    if args.csv:
        Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
        Path(args.csv).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
