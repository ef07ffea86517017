"""Command-line front end: gen, calibrate, compare, classify, crossmatrix, report.

Parameters resolve as built-in defaults < ``--config`` JSON file < flags.
Reports embed the resolved configuration (minus ``threads``, which never
changes results) so any two runs with the same inputs and flags produce
byte-identical JSON.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .chromatogram import ChromatogramError, SourceLibrary, load_chromatogram, load_library
from .classify import (
    DEFAULT_EPS_GRID,
    block_means,
    cross_score_matrix,
    pca_for_batch,
    run_binary,
    score,
)
from .config import MethodId, RunConfig, field_defaults
from .quantize import make_alphabet
from .similarity import calibrate_epsilon
from .synth import gulf_families, make_benchmark

DISPLAY = {
    MethodId.QPTM: "QPTM",
    MethodId.SAX: "SAX",
    MethodId.PAA: "PAA",
    MethodId.L2: "L2 norm",
    MethodId.CORR2: "Correlation",
    MethodId.PCA: "PCA",
}

FLAG_HELP = {
    "method": "comparison method",
    "epsilon": "peak-ratio tolerance; peaks harmonize when their ratio <= 1 + epsilon",
    "theta": "percent-match threshold for predicting the target class",
    "alphabet_size": "SAX alphabet size",
    "word_length_divisor": "PAA/SAX word length is column length // divisor",
    "min_peak_height": "ignore column maxima below this height",
    "sax_table_semantics": "how SAX table entries enter the distance (squared or gap)",
    "paa_dist_scaled": "scale PAA distances by sqrt(n / w)",
    "znormalize": "standardize before SAX",
    "znorm_scope": "standardize each column or the whole image",
    "threads": "worker threads (results do not depend on it)",
}


class UsageError(Exception):
    """Bad arguments detected after parsing; reported with exit status 2."""


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _method(text: str) -> MethodId:
    try:
        return MethodId.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _methods(text: str) -> list[MethodId]:
    return [_method(t) for t in text.split(",") if t.strip()]


def _dims(text: str) -> tuple[int, int]:
    try:
        m, n = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must look like 200x100, got {text!r}") from None
    if m < 2 or n < 1:
        raise argparse.ArgumentTypeError(f"dims must be at least 2x1, got {text!r}")
    return m, n


def parse_grid(text: str) -> list[float]:
    """``start:step:stop`` (inclusive stop) or a comma list of epsilons."""
    try:
        if ":" in text:
            start, step, stop = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            if count < 1:
                raise ValueError
            return [round(start + k * step, 10) for k in range(count)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad epsilon grid {text!r}; use start:step:stop or a,b,c") from None


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run configuration")
    g.add_argument("--config", metavar="JSON", help="JSON file with configuration fields (flags override it)")
    defaults = field_defaults()
    types = {
        "method": _method,
        "epsilon": float,
        "theta": float,
        "alphabet_size": int,
        "word_length_divisor": int,
        "min_peak_height": float,
        "sax_table_semantics": str,
        "paa_dist_scaled": _bool,
        "znormalize": _bool,
        "znorm_scope": str,
        "threads": int,
    }
    choices = {"sax_table_semantics": ["squared", "gap"], "znorm_scope": ["image", "column"]}
    for name, default in defaults.items():
        g.add_argument(
            "--" + name.replace("_", "-"),
            dest=name,
            type=types[name],
            choices=choices.get(name),
            default=None,
            help=f"{FLAG_HELP[name]} (default: {default})",
        )


def resolve_config(args: argparse.Namespace, **overrides) -> RunConfig:
    cfg = RunConfig()
    try:
        if getattr(args, "config", None):
            cfg = RunConfig.from_file(args.config, cfg)
        flags = {k: getattr(args, k) for k in field_defaults() if getattr(args, k, None) is not None}
        flags.update(overrides)
        return cfg.replace(**flags)
    except (ValueError, TypeError, OSError) as exc:
        raise UsageError(f"configuration: {exc}") from None


def _dump_json(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_text(text: str, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _fmt(v) -> str:
    if v is None:
        return "NaN"
    if float(v).is_integer():
        return str(int(v))
    return f"{v:.4f}"


def format_confusion_table(runs: Sequence[dict]) -> str:
    lines = [f"{'Method':<12} Confusion Matrix"]
    for r in runs:
        (tp, fn), (fp, tn) = r["confusion"]
        name = DISPLAY[MethodId.parse(r["method"])]
        lines.append(f"{name:<12} [{tp:>3} {fn:>3}]")
        lines.append(f"{'':<12} [{fp:>3} {tn:>3}]")
    return "\n".join(lines)


def format_metrics_table(runs: Sequence[dict]) -> str:
    cols = ["accuracy", "precision", "sensitivity", "specificity", "f1"]
    head = ["Accuracy", "Precision", "Sensitivity", "Specificity", "F1 score"]
    lines = [f"{'Metric':<12}" + "".join(f"{h:>13}" for h in head)]
    for r in runs:
        name = DISPLAY[MethodId.parse(r["method"])]
        lines.append(f"{name:<12}" + "".join(f"{_fmt(r['metrics'][c]):>13}" for c in cols))
    return "\n".join(lines)


# ---- commands ---------------------------------------------------------------

def cmd_gen(args) -> int:
    fams = gulf_families(
        n_families=args.families,
        dims=args.dims,
        n_peaks=args.peaks,
        shared_fraction=args.shared_fraction,
        height_jitter=args.jitter,
        noise=args.noise,
        seed=args.seed,
    )
    bench = make_benchmark(fams, args.dims, args.per_family)
    bench.write(args.out)
    print(f"wrote {len(bench.samples)} samples ({args.families} families x {args.per_family}) to {args.out}")
    return 0


def _family(lib: SourceLibrary, region: str | None) -> tuple[str, list]:
    region = region if region is not None else lib.regions[0]
    members = [c for c in lib if c.region == region]
    if not members:
        raise UsageError(f"no samples with region {region!r}; have {sorted(set(lib.regions))}")
    return region, members


def cmd_calibrate(args) -> int:
    cfg = resolve_config(args)
    lib = load_library(args.manifest)
    region, members = _family(lib, args.family)
    if not 0 <= args.reference_index < len(members):
        raise UsageError(f"--reference-index must be in [0, {len(members) - 1}]")
    ref = members[args.reference_index]
    train = [c for k, c in enumerate(members) if k != args.reference_index]
    if args.training_count is not None:
        train = train[: args.training_count]
    family = [ref, *train]
    w = cfg.word_length(ref.m)
    curve = calibrate_epsilon(family, args.eps, w, 0, args.plateau_tol, cfg.min_peak_height, cfg.threads)
    summary = {
        "region": region,
        "reference": ref.sample_id,
        "training": [c.sample_id for c in train],
        "word_length": w,
        "plateau_tol": args.plateau_tol,
        "chosen_epsilon": curve.chosen_epsilon,
        "curve": [{"epsilon": e, "deviation": d} for e, d in curve.points],
        "config": cfg.to_dict(),
    }
    out = Path(args.out)
    _write_text(curve.to_csv(), out / "calibration.csv")
    _dump_json(summary, out / "calibration.json")
    print(f"{'epsilon':>8} {'deviation':>14}")
    for e, d in curve.points:
        print(f"{e:>8.3f} {d:>14.4f}")
    print(f"chosen epsilon: {curve.chosen_epsilon}")
    return 0


def cmd_compare(args) -> int:
    cfg = resolve_config(args)
    test = load_chromatogram(args.test)
    ref = load_chromatogram(args.ref)
    methods = [m for group in args.methods for m in group] if args.methods else [cfg.method]
    out = {}
    for m in methods:
        model = pca_for_batch([ref, test]) if m is MethodId.PCA else None
        out[m.value] = score(test, ref, m, cfg, pca_model=model)
        print(f"{DISPLAY[m]:<12} {out[m.value]:.6f}")
    if args.json:
        _dump_json({"test": test.sample_id, "ref": ref.sample_id, "raw": out, "config": cfg.to_dict()},
                   Path(args.json))
    return 0


def cmd_classify(args) -> int:
    base = resolve_config(args)
    lib = load_library(args.library)
    if not 0 <= args.target < len(lib):
        raise UsageError(f"--target must be in [0, {len(lib) - 1}]")
    tests = list(load_library(args.tests)) if args.tests else [c for k, c in enumerate(lib) if k != args.target]
    ref = lib[args.target]
    methods = [m for group in args.methods for m in group] if args.methods else [base.method]
    runs = []
    for m in dict.fromkeys(methods):
        runs.append(run_binary(tests, ref, base.replace(method=m)))
    cfg = base.to_dict()
    cfg.pop("method")
    report = {
        "reference": ref.sample_id,
        "target_region": ref.region,
        "n_tests": len(tests),
        "config": cfg,
        "runs": runs,
    }
    out = Path(args.out)
    _dump_json(report, out)
    if args.csv:
        lines = ["method,test_id,ref_id,raw,percent_match,target"]
        for r in runs:
            for row in r["rows"]:
                lines.append(f"{row['method']},{row['test_id']},{row['ref_id']},{row['raw']!r},"
                             f"{row['percent_match']!r},{int(row['target'])}")
        _write_text("\n".join(lines) + "\n", Path(args.csv))
    print(format_confusion_table(runs))
    print()
    print(format_metrics_table(runs))
    return 0


def cmd_crossmatrix(args) -> int:
    cfg = resolve_config(args)
    lib = load_library(args.manifest)
    matrix, row_eps = cross_score_matrix(lib, cfg, args.training_count, args.eps)
    lines = [",".join(repr(float(v)) for v in row) for row in matrix]
    _write_text("\n".join(lines) + "\n", Path(args.out))
    within, across = block_means(matrix, lib.regions)
    if args.json:
        _dump_json({
            "samples": [c.sample_id for c in lib],
            "regions": list(lib.regions),
            "row_epsilon": row_eps,
            "within_mean": within,
            "across_mean": across,
            "config": cfg.to_dict(),
        }, Path(args.json))
    print(f"{len(lib)}x{len(lib)} matrix written to {args.out}")
    print(f"within-family mean {within:.2f} %, across-family mean {across:.2f} %")
    return 0


def cmd_report(args) -> int:
    if args.table1:
        sys.stdout.write(make_alphabet(args.alphabet_size).to_csv())
        return 0
    if not args.reports:
        raise UsageError("give one or more classify reports, or --table1")
    runs = []
    for path in args.reports:
        with open(path, encoding="utf-8") as fh:
            runs.extend(json.load(fh)["runs"])
    print(format_confusion_table(runs))
    print()
    print(format_metrics_table(runs))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qptm", description="Quantized peak-topography fingerprinting of GCxGC images.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    g = sub.add_parser("gen", help="write a seeded synthetic multi-family benchmark", formatter_class=fmt)
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--families", type=int, default=3, help="number of families")
    g.add_argument("--per-family", type=int, default=7, help="samples per family (first is the template)")
    g.add_argument("--dims", type=_dims, default=(200, 100), help="image size as ROWSxCOLS")
    g.add_argument("--peaks", type=int, default=25, help="peaks per family")
    g.add_argument("--shared-fraction", type=float, default=0.8, help="fraction of peaks shared across families")
    g.add_argument("--jitter", type=float, default=0.3, help="maximum multiplicative height perturbation")
    g.add_argument("--noise", type=float, default=0.01, help="noise std as a fraction of the maximum height")
    g.add_argument("--seed", type=int, default=0, help="random seed")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("calibrate", help="sweep epsilon on one family and pick the plateau start")
    c.add_argument("--manifest", required=True, help="manifest JSON listing the samples")
    c.add_argument("--out", required=True, help="output directory for calibration.csv / calibration.json")
    c.add_argument("--family", help="region label of the family (default: region of the first entry)")
    c.add_argument("--reference-index", type=int, default=0, help="reference position within the family (default: 0)")
    c.add_argument("--training-count", type=int, default=None,
                   help="use only the first N other members as training images (default: all)")
    c.add_argument("--eps", type=parse_grid, default=list(DEFAULT_EPS_GRID),
                   help="epsilon grid, start:step:stop or a,b,c (default: 0.1:0.1:1.0)")
    c.add_argument("--plateau-tol", type=float, default=0.01,
                   help="relative tolerance defining the plateau (default: 0.01)")
    _add_config_flags(c)
    c.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("compare", help="raw score of one test image against one reference")
    s.add_argument("--test", required=True, help="test chromatogram CSV")
    s.add_argument("--ref", required=True, help="reference chromatogram CSV")
    s.add_argument("--methods", type=_methods, action="append",
                   help="comma list of methods, repeatable (default: --method)")
    s.add_argument("--json", help="also write the scores to this JSON file")
    _add_config_flags(s)
    s.set_defaults(func=cmd_compare)

    k = sub.add_parser("classify", help="target-vs-rest classification against one library entry")
    k.add_argument("--library", required=True, help="library manifest JSON")
    k.add_argument("--tests", help="test manifest JSON (default: every other library entry)")
    k.add_argument("--target", type=int, default=0, help="library index of the target reference (default: 0)")
    k.add_argument("--methods", type=_methods, action="append",
                   help="comma list of methods, repeatable (default: --method)")
    k.add_argument("--out", required=True, help="JSON report path")
    k.add_argument("--csv", help="also write every score row to this CSV")
    _add_config_flags(k)
    k.set_defaults(func=cmd_classify)

    x = sub.add_parser("crossmatrix", help="K x K percent-match matrix over a library")
    x.add_argument("--manifest", required=True, help="manifest JSON listing the samples")
    x.add_argument("--out", required=True, help="CSV path for the K x K matrix (no header)")
    x.add_argument("--json", help="also write sample ids, per-row epsilon and block means here")
    x.add_argument("--training-count", type=int, default=6,
                   help="family members used to calibrate each qptm row (default: 6)")
    x.add_argument("--eps", type=parse_grid, default=list(DEFAULT_EPS_GRID),
                   help="epsilon grid for per-row calibration (default: 0.1:0.1:1.0)")
    _add_config_flags(x)
    x.set_defaults(func=cmd_crossmatrix)

    r = sub.add_parser("report", help="print confusion and metric tables from classify reports")
    r.add_argument("reports", nargs="*", help="classify JSON reports")
    r.add_argument("--table1", action="store_true", help="print the SAX symbol-distance table instead")
    r.add_argument("--alphabet-size", type=int, default=10, help="alphabet size for --table1 (default: 10)")
    r.set_defaults(func=cmd_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qptm {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ChromatogramError, ValueError, OSError) as exc:
        print(f"qptm {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
