"""Command-line entry point: ``phasebal <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time

from . import fileio, grnn, harness
from .balancing import SOLVERS, greedy_balance
from .model import balance_report, total_power_loss, validate_assignment

log = logging.getLogger("phasebal")


def _spread_arg(text: str):
    if text in harness.SPREAD_NAMES:
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number or one of {harness.SPREAD_NAMES}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("spread must be positive")
    return value


def cmd_balance(args) -> int:
    instances = fileio.read_instances(args.input)
    solve = SOLVERS[args.method]
    entries = []
    t0 = time.perf_counter()
    for row, loads in enumerate(instances, start=1):
        entry = fileio.instance_entry(row, loads)
        entry["methods"][args.method] = fileio.method_entry(loads, solve(loads))
        entries.append(entry)
    maxes = [e["methods"][args.method]["max_diff"] for e in entries]
    summary = {
        "method": args.method,
        "instances": len(entries),
        "mean_max_diff": sum(maxes) / len(maxes),
        "seconds": time.perf_counter() - t0,
    }
    fileio.write_json(args.output, {"instances": entries, "summary": summary})
    return 0


def cmd_train(args) -> int:
    instances = fileio.read_instances(args.input)
    labeled = harness.label_instances(instances, args.labels)
    model = grnn.train(labeled, args.spread, augment=args.augment)
    fileio.save_model(model, args.model)
    log.info("stored %d samples of %d loads, spread %.6g", model.n_samples, model.n_loads, model.spread)
    return 0


def cmd_predict(args) -> int:
    model = fileio.load_model(args.model)
    instances = fileio.read_instances(args.input)
    for row, loads in enumerate(instances, start=1):
        if len(loads) != model.n_loads:
            raise fileio.InputError(f"row {row}: {len(loads)} loads but the model was trained on {model.n_loads}")
    entries = []
    for row, loads in enumerate(instances, start=1):
        raw = grnn.predict_assignment(model, loads)
        nn = grnn.repair_assignment(raw, loads) if args.repair else raw
        heu = greedy_balance(loads)
        entry = fileio.instance_entry(row, loads)
        entry["methods"]["nn"] = fileio.method_entry(loads, nn)
        if args.repair:
            entry["methods"]["nn_raw"] = fileio.method_entry(loads, raw)
        entry["methods"]["greedy"] = fileio.method_entry(loads, heu)
        valid = bool(validate_assignment(nn, len(loads)))
        entry["category"] = grnn.classify_outcome(balance_report(loads, nn), balance_report(loads, heu), valid).value
        entries.append(entry)
    summary = harness.summarize_categories([e["category"] for e in entries])
    summary["spread"] = model.spread
    summary["repair"] = args.repair
    fileio.write_json(args.output, {"instances": entries, "summary": summary})
    return 0


def _plot_table(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "heuristic_max_diff", "nn_max_diff", "exact_max_diff", "nn_valid", "outcome"])
    for i, r in enumerate(records, start=1):
        w.writerow([i, r.heuristic_max_diff, r.nn_max_diff, r.exact_max_diff, int(r.nn_valid), r.outcome])
    return buf.getvalue()


def cmd_experiment(args) -> int:
    config = harness.ExperimentConfig(
        n_loads=args.n_loads,
        train_count=args.train_count,
        test_count=args.test_count,
        current_min=args.min_a,
        current_max=args.max_a,
        seed=args.seed,
        spread=args.spread,
        label_source=args.labels,
        repair=args.repair,
        augment=args.augment,
    )
    summary = harness.run_experiment(config)
    payload = {"config": config.__dict__, **summary.to_dict()}
    table = args.table or str(args.output).rsplit(".", 1)[0] + ".csv"
    fileio.write_text(table, _plot_table(summary.records))
    fileio.write_json(args.output, payload)
    pct = summary.percentages
    print(" ".join(f"{k}={pct[k]:g}%" for k in pct), f"({summary.seconds:.2f} s)")
    return 0


def cmd_loss(args) -> int:
    branches = fileio.read_branches(args.input)
    watts = total_power_loss(branches)
    print(repr(watts) if not float(watts).is_integer() else int(watts))
    if args.output:
        fileio.write_json(args.output, {"branches": len(branches), "total_power_loss_w": watts})
    return 0


def cmd_reproduce_tables(args) -> int:
    try:
        report = harness.reproduce_tables()
    except harness.TableMismatch as exc:
        print(f"table mismatch: {exc}", file=sys.stderr)
        return 1
    for t in report["tables"]:
        sums, diffs = t["phase_sums"], t["pairwise_diffs"]
        print(f"data {t['data']} {t['method']:<3} labels {t['labels']} phase {sums} diffs {diffs}  ok")
    for s in report["solvers"]:
        flag = "matches" if s["matches_published_heuristic"] else "differs from"
        print(f"data {s['data']} {s['solver']:<6} sums {s['phase_sums']} max_diff {s['max_diff']} ({flag} published HEU)")
    if args.output:
        fileio.write_json(args.output, report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasebal", description="Three-phase feeder load balancing.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("balance", help="solve every instance in a CSV file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--method", choices=sorted(SOLVERS), default="greedy")
    p.set_defaults(func=cmd_balance)

    p = sub.add_parser("train", help="label instances with a solver and store a GRNN model")
    p.add_argument("--input", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--labels", choices=sorted(SOLVERS), default="greedy")
    p.add_argument("--spread", type=_spread_arg, default="default")
    p.add_argument("--augment", action="store_true", help="also store every load reordering (N <= 6)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict switching sequences with a stored model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--repair", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("experiment", help="simulated train/test comparison of GRNN and heuristic")
    p.add_argument("--output", required=True, help="summary JSON")
    p.add_argument("--table", help="per-instance CSV (default: output path with .csv)")
    p.add_argument("--n-loads", type=int, default=6)
    p.add_argument("--train-count", type=int, default=400)
    p.add_argument("--test-count", type=int, default=100)
    p.add_argument("--min-a", type=int, default=0)
    p.add_argument("--max-a", type=int, default=120)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--spread", type=_spread_arg, default="default")
    p.add_argument("--labels", choices=sorted(SOLVERS), default="greedy")
    p.add_argument("--repair", action="store_true")
    p.add_argument("--no-augment", dest="augment", action="store_false")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("loss", help="total branch power loss from a 4-column CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("reproduce-tables", help="recompute the published six-load tables")
    p.add_argument("--output")
    p.set_defaults(func=cmd_reproduce_tables)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (fileio.InputError, ValueError, ZeroDivisionError) as exc:
        print(f"phasebal {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
