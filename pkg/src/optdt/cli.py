"""Command line front end.

Exit codes: 0 success, 2 no tree within the depth cap, 3 timeout,
4 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import cnf
from .dataset import BinaryDataset, RawDataset, binarize, load_csv, validate
from .errors import (DepthCapExceeded, GeneratorError, InferenceTimeout, InfeasibleDatasetError,
                     InputError)
from .harness import (GeneratorSpec, dataset_to_csv, generate_random_instance, infer,
                      kfold_cross_validate, scaling_sweep, sweep_to_csv)
from .inference import InferenceConfig
from .tree import serialize, to_dot

EXIT_OK = 0
EXIT_NO_SOLUTION = 2
EXIT_TIMEOUT = 3
EXIT_INPUT = 4

log = logging.getLogger("optdt")


def _read_raw(path: str, class_column: str | None) -> RawDataset:
    if path == "-":
        return load_csv(sys.stdin.buffer, class_column)
    try:
        with open(path, "rb") as fh:
            return load_csv(fh, class_column)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _load_training(args) -> tuple[BinaryDataset, int]:
    raw = _read_raw(args.data, args.class_column)
    data, schema = binarize(raw)
    if args.schema_out:
        Path(args.schema_out).write_text(schema.to_json())
    report = validate(data)
    if not report.feasible:
        raise InfeasibleDatasetError(report.contradictions)
    return report.dataset, report.duplicates


def _config(args) -> InferenceConfig:
    return InferenceConfig(
        policy=args.policy,
        seed=args.seed,
        time_budget=args.timeout,
        start_depth=args.start_depth,
        max_depth=args.max_depth,
    )


def cmd_infer(args) -> int:
    data, duplicates = _load_training(args)
    tree, report = infer(data, args.mode, _config(args))
    stats = {"mode": args.mode, "seed": args.seed, "n": data.n, "m": data.m, "c": data.c,
             "duplicates": duplicates, **report.stats()}
    _write(args.out_tree, serialize(tree) + "\n")
    _write(args.out_dot, to_dot(tree, data.feature_names, data.class_names))
    _write(args.stats or "-", _dump(stats))
    return EXIT_OK if report.complete else EXIT_TIMEOUT


def cmd_cv(args) -> int:
    raw = _read_raw(args.data, args.class_column)
    result = kfold_cross_validate(raw, args.folds, args.mode, args.seed, _config(args))
    folds = []
    for fr in result.folds:
        entry = {"fold": fr.fold, "train": fr.train_size, "test": fr.test_size,
                 "accuracy": fr.accuracy, "error": fr.error}
        if fr.report is not None:
            entry.update(fr.report.stats())
        folds.append(entry)
    stats = {"mode": args.mode, "seed": args.seed, "folds": args.folds,
             "accuracy": None if math.isnan(result.accuracy) else result.accuracy,
             "failed_folds": len(result.failed_folds), "per_fold": folds}
    _write(args.stats or "-", _dump(stats))
    if any(fr.timed_out for fr in result.folds):
        return EXIT_TIMEOUT
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = GeneratorSpec(args.k, args.f, args.c, args.n, args.seed, distinct=not args.replace)
    data, tree = generate_random_instance(spec)
    _write(args.out or "-", dataset_to_csv(data))
    _write(args.out_tree, serialize(tree) + "\n")
    return EXIT_OK


def cmd_encode(args) -> int:
    data, _ = _load_training(args)
    k = args.depth
    vm = cnf.VarMap()
    buf = cnf.CnfBuffer()
    vm.add_tree(k, data.m, data.c)
    buf.extend(cnf.node_feature_clauses(vm, k, data.m))
    for i in range(data.n):
        vm.add_example(i, k)
        buf.extend(cnf.feature_clauses(vm, data.X[i], i, k))
        buf.extend(cnf.class_clauses(vm, i, int(data.y[i]), k, data.c))
    if args.max_nodes is not None:
        leaves = min(cnf.max_leaves_for_nodes(args.max_nodes), 2 ** k)
        vm.add_counter(k)
        buf.extend(cnf.cardinality_clauses(vm, k, data.c))
        buf.add([cnf.leaf_bound_literal(vm, k, leaves)])
    _write(args.out or "-", cnf.to_dimacs(buf, vm))
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = GeneratorSpec(args.k, args.f, args.c, args.n, args.seed, distinct=not args.replace)
    cfg = InferenceConfig(policy=args.policy, seed=args.seed, time_budget=args.timeout)
    rows = scaling_sweep(base, args.vary, args.points, args.runs, args.mode, cfg)
    _write(args.out or "-", sweep_to_csv(rows, args.vary))
    return EXIT_OK


def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="CSV file with a header row ('-' for stdin)")
    p.add_argument("--class", dest="class_column", default=None,
                   help="name of the class column (default: last column)")
    p.add_argument("--schema-out", default=None, help="write the binarization schema JSON here")


def _add_inference_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=["depth", "size"], default="depth")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timeout", type=float, default=None, help="time budget in seconds")
    p.add_argument("--policy", choices=["first", "random"], default="first",
                   help="which misclassified example to encode next")
    p.add_argument("--start-depth", type=int, default=1)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--stats", default=None, help="stats JSON path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optdt", description="Optimal decision trees via SAT")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="infer a minimal tree from a CSV dataset")
    _add_data_args(p)
    _add_inference_args(p)
    p.add_argument("--out-tree", default=None, help="write tree JSON here")
    p.add_argument("--out-dot", default=None, help="write Graphviz DOT here")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("cv", help="k-fold cross-validation")
    _add_data_args(p)
    _add_inference_args(p)
    p.add_argument("--folds", type=int, required=True)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("gen", help="random tree and examples labelled by it, as CSV")
    p.add_argument("--k", type=int, required=True, help="tree depth")
    p.add_argument("--f", type=int, required=True, help="feature count")
    p.add_argument("--c", type=int, required=True, help="class count")
    p.add_argument("--n", type=int, required=True, help="example count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--out-tree", default=None, help="write the generating tree JSON here")
    p.add_argument("--replace", action="store_true",
                   help="sample examples with replacement (allows n > 2^f)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("encode", help="full DIMACS formula for a fixed depth")
    _add_data_args(p)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--max-nodes", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("sweep", help="average runtime while one generator parameter varies")
    p.add_argument("--vary", choices=["k", "f", "c", "n"], required=True)
    p.add_argument("--points", type=int, nargs="+", required=True)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--f", type=int, default=10)
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--mode", choices=["depth", "size"], default="depth")
    p.add_argument("--policy", choices=["first", "random"], default="first")
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--replace", action="store_true",
                   help="sample examples with replacement (allows n > 2^f)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InfeasibleDatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for vector, labels in exc.contradictions:
            bits = "".join("1" if b else "0" for b in vector)
            print(f"  {bits} labelled {labels}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, GeneratorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DepthCapExceeded as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except InferenceTimeout as exc:
        print(f"timeout: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
