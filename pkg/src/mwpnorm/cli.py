"""Batch command-line interface.

Subcommands: preprocess, normalize, score, ensemble, stats, split,
oracle-check. Progress and human summaries go to stderr; machine output
goes to files or stdout only. Exit status: 0 success, 1 bad input,
2 internal failure. Identical inputs and flags produce byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dataset as ds
from . import ensemble as ens
from .expr import ParseError, parse_infix, postorder_string, to_infix
from .normalize import NormalizeConfig, equivalent_by_oracle, normalize

DEFAULT_SEED = 42
DEFAULT_TOLERANCE = 1e-4
DEFAULT_TRIALS = 20


class _Parser(argparse.ArgumentParser):
    # usage mistakes are input errors, not internal ones
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self.prog + ": error: " + message)


def _add_pass_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--se", action=argparse.BooleanOptionalAction, default=True,
                   help="cancel complementary terms/factors (default on)")
    p.add_argument("--oe", action=argparse.BooleanOptionalAction, default=True,
                   help="reorder chain operands canonically (default on)")
    p.add_argument("--eb", action=argparse.BooleanOptionalAction, default=True,
                   help="re-associate chains to a bracket-free shape (default on)")


def _cfg(args) -> NormalizeConfig:
    return NormalizeConfig(se=args.se, oe=args.oe, eb=args.eb)


def _progress(message: str) -> None:
    print(message, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mwpnorm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="raw dataset -> processed records + stats")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="FILE")
    p.add_argument("--out", required=True, help="processed records (JSON lines)")
    p.add_argument("--stats", help="stats JSON (default: <out>.stats.json)")
    _add_pass_flags(p)
    p.add_argument("--lenient", action="store_true",
                   help="skip malformed raw records instead of failing")
    p.add_argument("--drop-uncovered", action="store_true",
                   help="omit records whose equation has unmatched literals "
                        "(they are always counted in the stats)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)

    p = sub.add_parser("normalize", help="normalize one infix template")
    p.add_argument("--expr", required=True)
    _add_pass_flags(p)

    p = sub.add_parser("score", help="solution accuracy of predicted sequences")
    p.add_argument("--gold", required=True, help="processed records file")
    p.add_argument("--pred", required=True, help="prediction rows {id, postorder|tokens}")
    p.add_argument("--out", help="report destination (default: stdout)")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)

    p = sub.add_parser("ensemble", help="pick the most probable candidate per problem")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="FILE")
    p.add_argument("--priority", nargs="*", default=[],
                   help="model ids that win exact ties, most preferred first")
    p.add_argument("--out", help="selection rows destination (default: stdout)")

    p = sub.add_parser("stats", help="dedup/coverage report for a processed file")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--out", help="stats JSON destination (default: stdout)")
    _add_pass_flags(p)

    p = sub.add_parser("split", help="carve train/validation (+pass-through test)")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--test", help="test partition file, passed through untouched")
    p.add_argument("--val-size", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--lenient", action="store_true")

    p = sub.add_parser("oracle-check", help="randomized equivalence of two templates")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    return parser


def cmd_preprocess(args) -> int:
    records: list[ds.RawRecord] = []
    report: list[str] = []
    for path in args.inputs:
        recs, rep = ds.load_math23k(path, lenient=args.lenient)
        records.extend(recs)
        report.extend(rep)
    for line in report:
        _progress(line)
    processed, stats = ds.preprocess(records, _cfg(args), workers=args.workers)
    if args.drop_uncovered:
        processed = [r for r in processed if r.coverage]
    ds.write_processed(args.out, processed)
    stats_path = args.stats or args.out + ".stats.json"
    # workers deliberately unrecorded: the count must never affect output
    ds.write_stats(
        stats_path,
        stats,
        extra={
            "seed": args.seed,
            "tolerance": args.tolerance,
            "trials": args.trials,
            "lenient": args.lenient,
        },
    )
    _progress(
        f"processed {stats.processed}/{stats.records} records "
        f"(coverage {stats.coverage_rate:.1%}, "
        f"templates {stats.distinct_raw} raw / {stats.distinct_normalized} normalized) "
        f"-> {args.out}"
    )
    return 0


def cmd_normalize(args) -> int:
    tree = normalize(parse_infix(args.expr), _cfg(args))
    print(postorder_string(tree))
    print(to_infix(tree))
    return 0


def cmd_score(args) -> int:
    gold = ds.read_processed(args.gold)
    predictions = ds.read_predictions(args.pred)
    report = ds.score_predictions(gold, predictions, tolerance=args.tolerance)
    ds.write_score_report(args.out or sys.stdout, report)
    _progress(
        f"accuracy {report.accuracy:.1%} ({report.correct}/{report.total}); "
        + ", ".join(f"{k}={v}" for k, v in sorted(report.breakdown.items()))
    )
    return 0


def cmd_ensemble(args) -> int:
    candidates = []
    for path in args.inputs:
        candidates.extend(ens.read_candidates(path))
    chosen = ens.select(candidates, ens.EnsembleConfig(priority=tuple(args.priority)))
    ens.write_selection(args.out or sys.stdout, chosen)
    _progress(f"selected {len(chosen)} of {len(candidates)} candidates")
    return 0


def cmd_stats(args) -> int:
    processed = ds.read_processed(args.input)
    stats = ds.recompute_stats(processed, _cfg(args))
    ds.write_stats(args.out or sys.stdout, stats)
    _progress(
        f"{stats.processed} records, coverage {stats.coverage_rate:.1%}, "
        f"distinct raw {stats.distinct_raw} / normalized {stats.distinct_normalized}"
    )
    return 0


def cmd_split(args) -> int:
    records, report = ds.load_math23k(args.input, lenient=args.lenient)
    for line in report:
        _progress(line)
    test_records: list[ds.RawRecord] = []
    if args.test:
        test_records, rep = ds.load_math23k(args.test, lenient=args.lenient)
        for line in rep:
            _progress(line)
    train, valid, test = ds.split(records, args.val_size, args.seed, test_records)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ds.write_raw_records(out / "train.json", train)
    ds.write_raw_records(out / "valid.json", valid)
    ds.write_raw_records(out / "test.json", test)
    _progress(f"split -> train {len(train)}, valid {len(valid)}, test {len(test)}")
    return 0


def cmd_oracle_check(args) -> int:
    a = parse_infix(args.a)
    b = parse_infix(args.b)
    verdict = equivalent_by_oracle(a, b, trials=args.trials, seed=args.seed)
    print(json.dumps({"equivalent": verdict, "trials": args.trials, "seed": args.seed}))
    return 0


_COMMANDS = {
    "preprocess": cmd_preprocess,
    "normalize": cmd_normalize,
    "score": cmd_score,
    "ensemble": cmd_ensemble,
    "stats": cmd_stats,
    "split": cmd_split,
    "oracle-check": cmd_oracle_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ValueError) as exc:  # ParseError/EvaluationError included
        print(f"mwpnorm {args.command}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - report, don't traceback-spam
        print(f"mwpnorm {args.command}: internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
