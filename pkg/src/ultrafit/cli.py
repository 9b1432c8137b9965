"""Command-line surface: CSV ingestion, fitting, comparison, evaluation.

Exit codes: 0 ok, 2 malformed input file, 3 unknown algorithm or format,
4 empty input, 5 leaf-count mismatch between dendrogram and points.
"""

import argparse
import json
import os
import sys

import numpy as np

from .core import PointSet, dedupe
from .dendro import (
    contract_duplicates,
    expand_duplicates,
    format_merge_list,
    normalize,
    parse_merge_list,
    to_merge_rows,
    to_newick,
)
from .evaluate import distortion
from .pipeline import ALGORITHMS, run_algorithm
from .spanner import SpannerConfig

FORMATS = ("merges", "newick", "json")

EXIT_BAD_INPUT = 2
EXIT_BAD_CHOICE = 3
EXIT_EMPTY = 4
EXIT_LEAF_MISMATCH = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def worker_cap() -> int:
    """Worker-count cap from ULTRAFIT_THREADS; the pipelines run on a
    single worker, so any positive cap is honored as-is."""
    raw = os.environ.get("ULTRAFIT_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def parse_points_csv(path: str) -> PointSet:
    """Comma-separated rows of float64 coordinates; optional header row.

    Accepts LF/CRLF, requires dot decimal separators, rejects non-finite
    values, and reports the offending row and column on failure.
    """
    try:
        with open(path, "rb") as fh:
            text = fh.read().decode("utf-8")
    except OSError as exc:
        raise CliError(EXIT_BAD_INPUT, f"cannot read {path}: {exc}") from None
    except UnicodeDecodeError as exc:
        raise CliError(EXIT_BAD_INPUT, f"{path} is not UTF-8: {exc}") from None
    rows: list[list[float]] = []
    width = None
    for ln, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cells = [c.strip() for c in line.split(",")]
        parsed: list[float] = []
        bad_col = None
        for ci, cell in enumerate(cells, start=1):
            try:
                val = float(cell)
                if not np.isfinite(val):
                    raise ValueError
                parsed.append(val)
            except ValueError:
                bad_col = ci
                break
        if bad_col is not None:
            if not rows and ln == 1:
                continue  # header row
            raise CliError(
                EXIT_BAD_INPUT, f"{path}: row {ln}, column {bad_col}: not a finite number"
            )
        if width is None:
            width = len(parsed)
        elif len(parsed) != width:
            raise CliError(
                EXIT_BAD_INPUT,
                f"{path}: row {ln}: expected {width} columns, got {len(parsed)}",
            )
        rows.append(parsed)
    if not rows:
        raise CliError(EXIT_EMPTY, f"{path}: no data rows")
    return PointSet(np.array(rows, dtype=np.float64))


def _spanner_config(args) -> SpannerConfig:
    return SpannerConfig(
        gamma=args.gamma, seed=args.seed, reps=args.reps, projections=args.projections
    )


def _write(path: str | None, payload: str):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _render(dendro, fmt: str, algorithm: str) -> str:
    if fmt == "merges":
        return format_merge_list(dendro)
    if fmt == "newick":
        return to_newick(dendro) + "\n"
    doc = {
        "n": dendro.n,
        "algorithm": algorithm,
        "merges": [list(r) for r in to_merge_rows(dendro)],
        "leaf_labels": [int(x) for x in dendro.leaf_labels],
    }
    return json.dumps(doc, sort_keys=True) + "\n"


def cmd_fit(args) -> int:
    if args.algo not in ALGORITHMS:
        raise CliError(EXIT_BAD_CHOICE, f"unknown algorithm {args.algo!r}; choose from {ALGORITHMS}")
    if args.format not in FORMATS:
        raise CliError(EXIT_BAD_CHOICE, f"unknown format {args.format!r}; choose from {FORMATS}")
    points = parse_points_csv(args.input)
    unique, groups = dedupe(points)
    result = run_algorithm(args.algo, unique, _spanner_config(args))
    dendro = result.dendrogram
    sidecar = {
        "n": points.n,
        "d": points.d,
        "algorithm": args.algo,
        "gamma": args.gamma,
        "seed": args.seed,
        "stage_timings_ms": result.timings_ms,
    }
    if unique.n != points.n:
        sidecar["n_unique"] = unique.n
    if args.normalize and unique.n > 1:
        dendro, scale = normalize(dendro, unique)
        report = distortion(unique, dendro, algorithm=args.algo)
        sidecar["scale"] = scale
        sidecar["max_distortion"] = report.max_ratio
    exported = expand_duplicates(dendro, groups) if unique.n != points.n else dendro
    _write(args.out, _render(exported, args.format, args.algo))
    if args.out:
        with open(args.out + ".json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(sidecar, fh, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_compare(args) -> int:
    import time

    algos = [a.strip() for a in args.algo.split(",") if a.strip()]
    for a in algos:
        if a not in ALGORITHMS:
            raise CliError(EXIT_BAD_CHOICE, f"unknown algorithm {a!r}; choose from {ALGORITHMS}")
    points = parse_points_csv(args.input)
    unique, _ = dedupe(points)
    cfg = _spanner_config(args)
    rows = []
    for name in algos:
        walls = []
        res = None
        for _ in range(max(1, args.repeats)):
            t0 = time.perf_counter()
            res = run_algorithm(name, unique, cfg)
            walls.append((time.perf_counter() - t0) * 1e3)
        rep = (
            distortion(unique, res.dendrogram, normalize_first=True, algorithm=name)
            if unique.n > 1
            else None
        )
        rows.append(
            {
                "algorithm": name,
                "max_distortion": rep.max_ratio if rep else None,
                "scale": rep.scale if rep else None,
                "mean_wall_ms": sum(walls) / len(walls),
                "stage_ms": res.timings_ms,
            }
        )
    header = f"{'algorithm':<10} {'max_distortion':>15} {'scale':>12} {'wall_ms':>12}"
    lines = [header, "-" * len(header)]
    for r in rows:
        md = f"{r['max_distortion']:.4f}" if r["max_distortion"] is not None else "-"
        sc = f"{r['scale']:.6g}" if r["scale"] is not None else "-"
        lines.append(f"{r['algorithm']:<10} {md:>15} {sc:>12} {r['mean_wall_ms']:>12.2f}")
    print("\n".join(lines))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            json.dump({"n": points.n, "d": points.d, "rows": rows}, fh, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_eval(args) -> int:
    points = parse_points_csv(args.input)
    try:
        with open(args.dendrogram, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_BAD_INPUT, f"cannot read {args.dendrogram}: {exc}") from None
    try:
        dendro = parse_merge_list(text)
    except ValueError as exc:
        raise CliError(EXIT_BAD_INPUT, f"{args.dendrogram}: {exc}") from None
    if dendro.n != points.n:
        raise CliError(
            EXIT_LEAF_MISMATCH,
            f"dendrogram has {dendro.n} leaves but {args.input} has {points.n} rows",
        )
    unique, groups = dedupe(points)
    if unique.n != points.n:
        dendro = contract_duplicates(dendro, groups)
    try:
        report = distortion(unique, dendro, normalize_first=args.normalize)
    except ValueError as exc:
        raise CliError(EXIT_BAD_INPUT, str(exc)) from None
    payload = json.dumps(report.to_dict(), sort_keys=True) + "\n"
    _write(args.out, payload)
    return 0


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--input", required=True, help="points CSV (rows = points)")
    p.add_argument("--gamma", type=float, default=2.5, help="target stretch (>= 1)")
    p.add_argument("--seed", type=int, default=0, help="hash seed")
    p.add_argument("--reps", type=int, default=None, help="hash repetitions per scale")
    p.add_argument("--projections", type=int, default=None, help="projections per repetition")
    p.add_argument("--out", default=None, help="output path (stdout if omitted)")
    p.add_argument("--normalize", action="store_true", help="scale output to dominate the metric")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ultrafit", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit an ultrametric and export the dendrogram")
    _add_common(fit)
    fit.add_argument("--algo", default="approx", help=f"one of {ALGORITHMS}")
    fit.add_argument("--format", default="merges", help=f"one of {FORMATS}")
    fit.set_defaults(func=cmd_fit)

    cmp_ = sub.add_parser("compare", help="normalized max distortion and timing per algorithm")
    _add_common(cmp_)
    cmp_.add_argument("--algo", default=",".join(ALGORITHMS), help="comma-separated algorithm list")
    cmp_.add_argument("--repeats", type=int, default=1, help="timing repetitions")
    cmp_.set_defaults(func=cmd_compare)

    ev = sub.add_parser("eval", help="distortion report for an exported merge list")
    _add_common(ev)
    ev.add_argument("--dendrogram", required=True, help="merge-list file from fit")
    ev.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    worker_cap()  # validate the env var early; pipelines are single-worker
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:  # invalid parameter values (e.g. gamma < 1)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
