"""Command-line driver.

    knightcount exact     --side 5 --target open-numberings
    knightcount estimate  --side 8 --alpha 1.5 --samples 1e6 --reps 21 --target closed-diagrams
    knightcount sweep     --side 5 --samples 5e5 --reps 21
    knightcount histogram --side 8 --alpha 1.5 --samples 1e6
    knightcount replay    run.csv.manifest.json

Tables go to stdout (or ``--out``) as CSV, single estimates as JSON.
Progress and warnings go to stderr.  Exit codes: 0 ok, 2 usage error,
3 exact enumeration refused by the size guard.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import platform
import sys
import time
from importlib import metadata

from . import _backend
from ._rng import ALGORITHM
from .board import Board, Square
from .exact import (
    DEFAULT_EXACT_LIMIT,
    HISTOGRAM_LIMIT,
    ExactLimitError,
    TourKind,
    exact_count,
    exact_violation_histogram,
)
from .sampler import SamplerConfig, parse_alpha, run_experiment
from .stats import (
    ConfigurationError,
    QuantityKind,
    estimate,
    estimate_violation_histogram,
)

DEFAULT_ALPHAS = (-1.0, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 8.0, 10.0)
CSV_COLUMNS = ("alpha", "min", "point", "max", "std_error", "cpu_seconds",
               "ci_low", "ci_high", "successes", "quantity")
EXIT_USAGE = 2
EXIT_GUARD = 3


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:.6E}"


def fmt_alpha(a: float) -> str:
    return "inf" if math.isinf(a) else f"{a:g}"


def count_arg(text: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_integer() or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def alpha_arg(text: str) -> float:
    try:
        return parse_alpha(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def alphas_arg(text: str) -> list[float]:
    return [alpha_arg(a) for a in text.split(",") if a.strip()]


def square_arg(text: str) -> Square:
    try:
        return Square.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def seed_arg(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="knightcount", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("exact", help="exact counts by backtracking")
    ex.add_argument("--side", type=int, required=True)
    ex.add_argument("--target", default="open-numberings",
                    choices=[k.value for k in TourKind])
    ex.add_argument("--start", type=square_arg)
    ex.add_argument("--violations", action="store_true",
                    help="emit the violation-count histogram of open numberings")
    ex.add_argument("--violation-min-over", choices=("all", "viable"), default="all")
    ex.add_argument("--exact-limit", type=int)
    ex.add_argument("--threads", type=int, default=1)
    ex.add_argument("--format", choices=("text", "csv", "json"), default="text")
    ex.add_argument("--out")
    ex.add_argument("--backend", choices=sorted(_backend.BACKENDS))

    def sampling(sp, alpha_required=True):
        sp.add_argument("--side", type=int, required=True)
        if alpha_required:
            sp.add_argument("--alpha", type=alpha_arg, required=True,
                            help="importance exponent (real or 'inf')")
        sp.add_argument("--samples", type=count_arg, required=True,
                        help="walks per start class per replication (accepts 5e5)")
        sp.add_argument("--reps", type=count_arg, default=1)
        sp.add_argument("--seed", type=seed_arg, default=0)
        sp.add_argument("--start", type=square_arg,
                        help="sample one start square instead of all classes")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--violation-min-over", choices=("all", "viable"), default="all")
        sp.add_argument("--assume-trivial-stabilizer", action="store_true",
                        help="allow N/16 conversion on boards other than 8x8")
        sp.add_argument("--timing", action="store_true",
                        help="fill the cpu_seconds column (makes output run-dependent)")
        sp.add_argument("--out")
        sp.add_argument("--manifest", help="manifest path (default: OUT.manifest.json)")
        sp.add_argument("--backend", choices=sorted(_backend.BACKENDS))

    targets = ("open-numberings", "open-diagrams", "open-geometric", "closed-diagrams")
    es = sub.add_parser("estimate", help="one importance-sampling estimate")
    sampling(es)
    es.add_argument("--target", choices=targets, default="open-numberings")
    es.add_argument("--format", choices=("csv", "json"), default="json")

    sw = sub.add_parser("sweep", help="estimates over a list of alpha values")
    sampling(sw, alpha_required=False)
    sw.add_argument("--alphas", type=alphas_arg, default=list(DEFAULT_ALPHAS))
    sw.add_argument("--target", choices=targets, default="open-numberings")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")

    hi = sub.add_parser("histogram", help="estimates split by violation count")
    sampling(hi)
    hi.add_argument("--format", choices=("csv", "json"), default="csv")

    rp = sub.add_parser("replay", help="re-run a manifest and compare its checksum")
    rp.add_argument("manifest")
    return p


# ------------------------------------------------------------------ helpers

def _progress(batch):
    print(f"  class {batch.start_class.representative} rep {batch.replication}: "
          f"{batch.successes}/{batch.samples} complete", file=sys.stderr)


def _config(args, alpha) -> SamplerConfig:
    try:
        return SamplerConfig(
            board_side=args.side, alpha=alpha, samples_per_replication=args.samples,
            replications=args.reps, base_seed=args.seed, start=args.start,
            violation_min_over=args.violation_min_over,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


def _check_target(args, kind: QuantityKind) -> None:
    if args.start is not None and kind in (QuantityKind.OPEN_GEOMETRIC,
                                           QuantityKind.OPEN_DIAGRAMS):
        raise UsageError(f"--target {kind.value} needs the whole board; drop --start")
    if (kind is QuantityKind.OPEN_GEOMETRIC and args.side != 8
            and not args.assume_trivial_stabilizer):
        raise UsageError("open-geometric is only defined for --side 8 "
                         "(or pass --assume-trivial-stabilizer)")


def _run(args, alpha):
    cfg = _config(args, alpha)
    print(f"sampling side={cfg.board_side} alpha={fmt_alpha(cfg.alpha)} "
          f"classes={len(cfg.classes())} reps={cfg.replications} "
          f"samples={cfg.samples_per_replication}", file=sys.stderr)
    batches = run_experiment(cfg, threads=args.threads, backend=args.backend,
                             progress=_progress)
    cpu = sum(b.cpu_seconds for b in batches) / cfg.replications
    return cfg, batches, cpu


def _warn_if_empty(e, kind):
    if e.successes == 0:
        what = "closed " if kind is QuantityKind.CLOSED_DIAGRAMS else ""
        msg = f"no successful {what}walks at alpha={fmt_alpha(e.alpha)}; estimate is 0"
        print(f"warning: {msg}", file=sys.stderr)
        return [msg]
    return []


def _row(e, cpu, timing):
    return [fmt_alpha(e.alpha), fmt(e.min), fmt(e.point), fmt(e.max), fmt(e.std_error),
            f"{cpu:.3f}" if timing else "", fmt(e.ci_low), fmt(e.ci_high),
            str(e.successes), e.kind.value]


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _estimate_json(e, cfg, warnings) -> dict:
    return {
        "quantity": e.kind.value, "side": cfg.board_side, "alpha": fmt_alpha(e.alpha),
        "point": e.point, "std_error": e.std_error, "sem": e.sem,
        "ci_low": e.ci_low, "ci_high": e.ci_high, "min": e.min, "max": e.max,
        "between_sd": None if math.isnan(e.between_sd) else e.between_sd,
        "within_sd": e.within_sd,
        "replications": e.replications,
        "samples_per_replication": cfg.samples_per_replication,
        "samples_total": e.samples_total, "successes": e.successes,
        "replicate_points": list(e.replicate_points), "warnings": warnings,
    }


# ------------------------------------------------------------------ commands

def cmd_exact(args):
    board = Board(args.side)
    start = board.check(args.start) if args.start is not None else None
    if args.violations:
        limit = args.exact_limit if args.exact_limit is not None else HISTOGRAM_LIMIT
        hist = exact_violation_histogram(
            board, viable_only=args.violation_min_over == "viable", limit=limit,
            threads=args.threads, backend=args.backend,
        )
        if args.format == "json":
            return json.dumps({"side": args.side, "histogram": hist}, indent=2) + "\n"
        return _csv(("k", "count"), sorted(hist.items()))
    limit = args.exact_limit if args.exact_limit is not None else DEFAULT_EXACT_LIMIT
    kind = TourKind(args.target)
    value = exact_count(board, kind, start, limit=limit, threads=args.threads,
                        backend=args.backend)
    if args.format == "json":
        return json.dumps({"side": args.side, "target": kind.value,
                           "start": str(start) if start else None, "value": value}) + "\n"
    if args.format == "csv":
        return _csv(("side", "target", "start", "value"),
                    [(args.side, kind.value, str(start) if start else "", value)])
    return f"{value}\n"


def cmd_estimate(args):
    kind = QuantityKind(args.target)
    _check_target(args, kind)
    cfg, batches, cpu = _run(args, args.alpha)
    e = estimate(batches, kind, assume_trivial_stabilizer=args.assume_trivial_stabilizer)
    warnings = _warn_if_empty(e, kind)
    if args.format == "csv":
        return _csv(CSV_COLUMNS, [_row(e, cpu, args.timing)]), cfg, cpu
    out = _estimate_json(e, cfg, warnings)
    if args.timing:
        out["cpu_seconds"] = cpu
    return json.dumps(out, indent=2) + "\n", cfg, cpu


def cmd_sweep(args):
    kind = QuantityKind(args.target)
    _check_target(args, kind)
    rows, blobs, cpus, cfg = [], [], [], None
    for alpha in args.alphas:
        cfg, batches, cpu = _run(args, alpha)
        e = estimate(batches, kind, assume_trivial_stabilizer=args.assume_trivial_stabilizer)
        warnings = _warn_if_empty(e, kind)
        rows.append(_row(e, cpu, args.timing))
        blobs.append(_estimate_json(e, cfg, warnings))
        cpus.append(cpu)
    if args.format == "json":
        return json.dumps(blobs, indent=2) + "\n", cfg, sum(cpus)
    return _csv(CSV_COLUMNS, rows), cfg, sum(cpus)


def cmd_histogram(args):
    if args.start is not None:
        raise UsageError("histogram covers the whole board; drop --start")
    cfg, batches, cpu = _run(args, args.alpha)
    h = estimate_violation_histogram(
        batches, assume_trivial_stabilizer=args.assume_trivial_stabilizer
    )
    _warn_if_empty(h.total, QuantityKind.OPEN_NUMBERINGS)
    if args.format == "json":
        out = {
            "units": h.total.kind.value, "alpha": fmt_alpha(cfg.alpha),
            "total": h.total.point, "total_std_error": h.total.std_error,
            "rows": [{"k": k, "point": e.point, "std_error": e.std_error}
                     for k, e in h.per_k.items()],
        }
        return json.dumps(out, indent=2) + "\n", cfg, cpu
    rows = [(k, fmt(e.point), fmt(e.std_error)) for k, e in h.per_k.items()]
    return _csv(("k", "point", "std_error"), rows), cfg, cpu


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _manifest(args, argv, text, cfg, wall, cpu) -> dict:
    return {
        "tool": "knightcount",
        "version": _version(),
        "command": args.command,
        "argv": list(argv),
        "config": {
            "board_side": cfg.board_side,
            "alpha": [fmt_alpha(a) for a in args.alphas] if args.command == "sweep"
            else fmt_alpha(cfg.alpha),
            "samples_per_replication": cfg.samples_per_replication,
            "replications": cfg.replications,
            "base_seed": cfg.base_seed,
            "start": str(cfg.start) if cfg.start is not None else "all-classes",
            "violation_min_over": cfg.violation_min_over,
            "target": getattr(args, "target", "open-numberings"),
        },
        "prng": ALGORITHM,
        "seed_derivation": "mix64(mix64(mix64(base) ^ class) ^ rep * 0xD1B54A32D192ED03)",
        "backend": args.backend or _backend.NAME,
        "python": platform.python_version(),
        "threads": args.threads,
        "wall_seconds": wall,
        "cpu_seconds_per_replication": cpu,
        "output_sha256": hashlib.sha256(text.encode()).hexdigest(),
    }


def _strip_outputs(argv):
    """argv without --out/--manifest (and their values)."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a in ("--out", "--manifest"):
            skip = True
            continue
        if a.startswith(("--out=", "--manifest=")):
            continue
        out.append(a)
    return out


def cmd_replay(args):
    with open(args.manifest) as fh:
        man = json.load(fh)
    argv = _strip_outputs(man["argv"])
    parser = build_parser()
    inner = parser.parse_args(argv)
    text, _, _ = COMMANDS[inner.command](inner)
    digest = hashlib.sha256(text.encode()).hexdigest()
    ok = digest == man["output_sha256"]
    print(json.dumps({"manifest": args.manifest, "expected": man["output_sha256"],
                      "got": digest, "match": ok}))
    return 0 if ok else 1


COMMANDS = {"estimate": cmd_estimate, "sweep": cmd_sweep, "histogram": cmd_histogram}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "exact":
            _emit(cmd_exact(args), args.out)
            return 0
        if args.command == "replay":
            return cmd_replay(args)
        t0 = time.perf_counter()
        text, cfg, cpu = COMMANDS[args.command](args)
        wall = time.perf_counter() - t0
        _emit(text, args.out)
        path = args.manifest or (f"{args.out}.manifest.json" if args.out else None)
        if path:
            with open(path, "w") as fh:
                json.dump(_manifest(args, argv, text, cfg, wall, cpu), fh, indent=2)
                fh.write("\n")
        return 0
    except ExactLimitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, ConfigurationError, ValueError) as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
