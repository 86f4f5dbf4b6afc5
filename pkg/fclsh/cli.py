"""
Command line harness.

    fclsh gen --n 10000 --d 128 --queries 50 --planted 6:4 --out-data data.fcl ...
    fclsh bench --data data.fcl --queries queries.fcl --method fclsh --method mih --r 6
    fclsh summary --in metrics.csv
"""

import argparse
import json
import logging
import sys

import numpy as np
import pandas as pd

from . import __version__
from .bench import (LINEAR, METHODS, MIH, ExperimentConfig, bench_hashing, preset_configs, run_sweep,
                    summarize)
from .config import get_settings
from .covering import AUTO, GENERAL, SPECIFIC
from .datafiles import TRUTH_COLUMNS, read_dataset, read_ground_truth, write_dataset, write_ground_truth
from .errors import FclshError, UsageError
from .index import (CLASSIC, COVERING_METHODS, FamilyConfig, build_index, linear_scan, query_c_r_nn,
                    query_r_nn)
from .mih import build_mih, query_mih
from .presets import Experiment
from .transform import IDENTITY, PARTITION, REPLICATE, make_plan
from .workloads import (HYPERPLANE, THRESHOLD, binarize, distance_histogram, gen_synthetic,
                        holdout_queries, oracle_scan, read_vectors)

logger = logging.getLogger(__name__)

HASHTIME_RADII = [3, 4, 5, 6, 7]
HASHTIME_DIMS = [32, 64, 128, 256, 512]


def _planted(values: list) -> dict:
    planted = {}
    for item in values or []:
        dist, _, count = item.partition(":")
        try:
            planted[int(dist)] = int(count or 1)
        except ValueError:
            raise UsageError(f"--planted expects DIST:COUNT, got {item!r}") from None
    return planted


def _write_frame(frame: pd.DataFrame, path: str | None) -> None:
    if path in (None, "-"):
        frame.to_csv(sys.stdout, index=False)
    else:
        frame.to_csv(path, index=False)
        logger.info("wrote %d rows to %s", len(frame), path)


def _progress(args) -> bool:
    return not args.no_progress and args.verbose >= 0


def cmd_gen(args) -> None:
    if args.source:
        if not args.holdout:
            raise UsageError("--from needs --holdout N")
        dataset, queries = holdout_queries(read_dataset(args.source), args.holdout, seed=args.seed)
        truth = oracle_scan(dataset, queries, args.truth_r if args.truth_r is not None else 0)
    else:
        n, d, count, planted = args.n, args.d, args.queries, _planted(args.planted)
        if args.preset:
            experiment = Experiment(args.preset).require()
            d = d or experiment.get_dims()
            n = n or (experiment.get_sizes() or [None])[0]
            count = count or experiment.get_query_count()
            planted = planted or experiment.get_planted()
        if not n or not d or not count:
            raise UsageError("gen needs --n, --d and --queries (or a synthetic --preset)")
        dataset, queries, truth = gen_synthetic(n, d, count, planted, seed=args.seed,
                                                truth_radius=args.truth_r)
    write_dataset(dataset, args.out_data, text=args.text)
    write_dataset(queries, args.out_queries, text=args.text)
    if args.out_truth:
        write_ground_truth(truth, args.out_truth)


def cmd_binarize(args) -> None:
    vectors = read_vectors(args.source)
    if args.preset and args.mode == HYPERPLANE and args.bits is None:
        args.bits = Experiment(args.preset).require().get_dims()
    if args.preset and args.mode == THRESHOLD and args.threshold is None:
        args.threshold = Experiment(args.preset).require().get_threshold()
    dataset = binarize(vectors, bits=args.bits, seed=args.seed, mode=args.mode,
                       threshold=0.0 if args.threshold is None else args.threshold)
    write_dataset(dataset, args.out, text=args.text)


def cmd_oracle(args) -> None:
    frame = oracle_scan(read_dataset(args.data), read_dataset(args.queries), args.r)
    _write_frame(frame, args.out)


def _family_config(args, seed: int) -> FamilyConfig:
    return FamilyConfig(method=args.method, seed=seed, kind=args.kind, delta=args.delta,
                        tables=args.tables, k=args.k, include_zero_column=args.include_zero_column)


def _build(args, dataset):
    if args.method == MIH:
        return build_mih(dataset, args.parts)
    if args.method not in (*COVERING_METHODS, CLASSIC):
        raise UsageError(f"{args.method} has no index to build")
    plan = make_plan(dataset.dims, args.r, args.c, max(dataset.n, 2), override_t=args.t,
                     kind=args.plan, seed=args.seed)
    return build_index(dataset, _family_config(args, args.seed), plan)


def cmd_build(args) -> None:
    index = _build(args, read_dataset(args.data))
    print(json.dumps(index.stats(), indent=2))


def cmd_query(args) -> None:
    dataset, queries = read_dataset(args.data), read_dataset(args.queries)
    if args.strategy == 1 and args.method in (MIH, LINEAR):
        raise UsageError("strategy 1 needs an LSH method")
    index = None if args.method == LINEAR else _build(args, dataset)
    frames = []
    for qid, q in enumerate(queries):
        if args.method == LINEAR:
            ids, _ = linear_scan(dataset, q, args.r)
        elif args.method == MIH:
            ids, _ = query_mih(index, q, args.r)
        elif args.strategy == 1:
            best, _ = query_c_r_nn(index, q, args.r)
            ids = np.array([] if best is None else [best], dtype=np.int64)
        else:
            ids, _ = query_r_nn(index, q, args.r)
        frames.append(pd.DataFrame({"query_id": qid, "point_id": ids,
                                    "distance": dataset.distances_to(q, ids)}))
    frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=TRUTH_COLUMNS)
    _write_frame(frame.astype("int64"), args.out)


def _bench_configs(args, common: dict) -> list:
    if not args.method or not args.r:
        raise UsageError("bench needs --preset or at least one --method and --r")
    default_delta = [get_settings().delta]
    configs = []
    for method in args.method:
        lsh = method in (*COVERING_METHODS, CLASSIC)
        deltas = (args.delta or default_delta) if method == CLASSIC else default_delta
        for r in args.r:
            for delta in deltas:
                config = ExperimentConfig(method=method, r=r, delta=delta, **common)
                if method == CLASSIC:
                    config.tables, config.k = args.tables, args.k
                if method == MIH:
                    config.parts = args.parts
                if lsh:
                    config.t, config.plan_kind = args.t, args.plan
                configs.append(config.validate())
    return configs


def cmd_bench(args) -> None:
    dataset, queries = read_dataset(args.data), read_dataset(args.queries)
    truth = read_ground_truth(args.truth) if args.truth else None
    common = {"seed": args.seed, "repeats": args.repeats or get_settings().repeats,
              "fresh_seeds": not args.identical_seeds, "workers": args.workers, "c": args.c}
    configs = preset_configs(args.preset, **common) if args.preset else _bench_configs(args, common)
    metrics = run_sweep(configs, dataset, queries, truth, progress=_progress(args))
    _write_frame(metrics, args.out)


def cmd_hashtime(args) -> None:
    progress = _progress(args)
    if args.dims or args.radii:
        frame = bench_hashing(args.dims or [128], args.radii or [5], args.queries, args.seed, progress)
    else:
        frame = pd.concat([
            bench_hashing([128], HASHTIME_RADII, args.queries, args.seed, progress),
            bench_hashing(HASHTIME_DIMS, [5], args.queries, args.seed, progress),
        ], ignore_index=True)
    _write_frame(frame, args.out)


def cmd_hist(args) -> None:
    frame = distance_histogram(read_dataset(args.data), read_dataset(args.queries),
                               sample=args.sample, seed=args.seed)
    _write_frame(frame, args.out)


def cmd_summary(args) -> None:
    _write_frame(summarize(pd.read_csv(args.source)), args.out)


def cmd_presets(args) -> None:
    for name in Experiment.get_experiment_names():
        experiment = Experiment(name)
        radii = ",".join(map(str, experiment.get_radii()))
        print(f"{name:22} r={radii:24} {experiment.get_description()}")


def _index_flags(p) -> None:
    p.add_argument("--method", default="fclsh", choices=METHODS)
    p.add_argument("--r", type=int, required=True, help="Query radius")
    p.add_argument("--c", type=float, default=1.0, help="Approximation ratio used by the plan choice")
    p.add_argument("--delta", type=float, default=0.1, help="Classic LSH false-negative target")
    p.add_argument("--tables", type=int, help="Classic LSH table count")
    p.add_argument("--k", type=int, help="Classic LSH bits per table")
    p.add_argument("--parts", type=int, help="MIH substring count")
    p.add_argument("--t", type=int, help="Replication factor or partition count")
    p.add_argument("--plan", choices=[IDENTITY, REPLICATE, PARTITION], help="Force a pre-processing plan")
    p.add_argument("--kind", default=AUTO, choices=[AUTO, GENERAL, SPECIFIC], help="Covering construction")
    p.add_argument("--include-zero-column", action="store_true",
                   help="Let the general construction map dimensions to the all-zero code column")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fclsh", description="Exact Hamming r-NN search with covering LSH")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    parser.add_argument("-q", "--quiet", action="store_true", help="Only report errors")
    parser.add_argument("--no-progress", action="store_true", help="Hide progress bars")
    parser.add_argument("--seed", type=int, default=None, help="Master seed for every random stream")
    # per-command --seed; SUPPRESS keeps the global value when only that one is given
    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="Master seed for every random stream")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[seeded], help="Generate a planted synthetic workload or hold out queries")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--queries", type=int)
    p.add_argument("--planted", action="append", metavar="DIST:COUNT", help="Planted points per query")
    p.add_argument("--truth-r", type=int, help="Radius of the written ground truth")
    p.add_argument("--preset", help="Take n, d, queries and planted counts from a preset")
    p.add_argument("--from", dest="source", help="Existing dataset to hold queries out of")
    p.add_argument("--holdout", type=int, help="Number of points to remove as queries")
    p.add_argument("--out-data", required=True)
    p.add_argument("--out-queries", required=True)
    p.add_argument("--out-truth")
    p.add_argument("--text", action="store_true", help="Write '0'/'1' text rows")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("binarize", parents=[seeded], help="Binarize real-valued vectors (.npy, .fvecs, CSV)")
    p.add_argument("--in", dest="source", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bits", type=int)
    p.add_argument("--mode", default=HYPERPLANE, choices=[HYPERPLANE, THRESHOLD])
    p.add_argument("--threshold", type=float)
    p.add_argument("--preset", help="Take bits or threshold from a preset")
    p.add_argument("--text", action="store_true")
    p.set_defaults(func=cmd_binarize)

    p = sub.add_parser("oracle", help="Ground truth by linear scan")
    p.add_argument("--data", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("build", parents=[seeded], help="Build an index and print its statistics")
    p.add_argument("--data", required=True)
    _index_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", parents=[seeded], help="Answer queries with one method")
    p.add_argument("--data", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--strategy", type=int, default=2, choices=[1, 2])
    p.add_argument("--out")
    _index_flags(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", parents=[seeded], help="Per-query metrics averaged over repeats")
    p.add_argument("--data", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--truth", help="Ground-truth CSV (computed when omitted)")
    p.add_argument("--preset")
    p.add_argument("--method", action="append", choices=METHODS)
    p.add_argument("--r", type=int, action="append")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--delta", type=float, action="append")
    p.add_argument("--tables", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--parts", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--plan", choices=[IDENTITY, REPLICATE, PARTITION])
    p.add_argument("--repeats", type=int)
    p.add_argument("--identical-seeds", action="store_true", help="Reuse the family seed in every repeat")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("hashtime", parents=[seeded], help="fcLSH against bcLSH hash time")
    p.add_argument("--dims", type=int, action="append")
    p.add_argument("--radii", type=int, action="append")
    p.add_argument("--queries", type=int, default=1000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_hashtime)

    p = sub.add_parser("hist", parents=[seeded], help="Query-to-point distance histogram")
    p.add_argument("--data", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--sample", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_hist)

    p = sub.add_parser("summary", help="Per (method, r, delta) means of a metrics CSV")
    p.add_argument("--in", dest="source", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("presets", help="List the packaged experiment presets")
    p.set_defaults(func=cmd_presets)
    return parser


def _setup_logging(args) -> None:
    if args.quiet:
        args.verbose = -1
    level = {-1: logging.ERROR, 0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv: list | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    _setup_logging(args)
    if args.seed is None:
        args.seed = get_settings().seed
    try:
        args.func(args)
    except FclshError as e:
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
