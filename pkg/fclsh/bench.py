"""
Measurement protocol: run every query of a workload against one method,
score it against the linear-scan ground truth and average over repeats.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np
import pandas as pd
from tqdm import tqdm

from . import covering
from .bitvectors import BitVector, Dataset
from .config import SeedStreams, get_settings
from .datafiles import truth_sets
from .errors import UsageError, check_same_dims
from .index import CLASSIC, COVERING_METHODS, FamilyConfig, build_index, linear_scan, query_c_r_nn, query_r_nn
from .mih import build_mih, query_mih
from .presets import Experiment
from .transform import make_plan
from .workloads import oracle_scan

logger = logging.getLogger(__name__)

MIH = "mih"
LINEAR = "linear"
METHODS = (*COVERING_METHODS, CLASSIC, MIH, LINEAR)
RANDOMIZED = (*COVERING_METHODS, CLASSIC)


@dataclass
class ExperimentConfig:
    """One method at one radius; repeats are averaged."""

    method: str = "fclsh"
    r: int = 1
    c: float = 1.0
    delta: float = 0.1
    tables: int | None = None
    k: int | None = None
    parts: int | None = None
    t: int | None = None
    plan_kind: str | None = None
    strategy: int = 2
    seed: int = 0
    repeats: int = 5
    fresh_seeds: bool = True
    workers: int = 1
    include_zero_column: bool = False

    def validate(self) -> "ExperimentConfig":
        if self.method not in METHODS:
            raise UsageError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.r < 0 or (self.method in RANDOMIZED and self.r < 1):
            raise UsageError(f"radius {self.r} is not valid for {self.method}")
        if self.c < 1:
            raise UsageError(f"c must be >= 1, got {self.c}")
        if not 0 < self.delta < 1:
            raise UsageError(f"delta must lie in (0, 1), got {self.delta}")
        if self.repeats < 1 or self.workers < 1:
            raise UsageError("repeats and workers must be positive")
        if self.strategy not in (1, 2):
            raise UsageError(f"strategy must be 1 or 2, got {self.strategy}")
        if self.strategy == 1 and self.method not in RANDOMIZED:
            raise UsageError(f"strategy 1 needs an LSH method, not {self.method}")
        if self.parts is not None and self.method != MIH:
            raise UsageError("--parts applies to mih only")
        if (self.tables is not None or self.k is not None) and self.method != CLASSIC:
            raise UsageError("--tables and --k apply to classic only")
        if (self.t is not None or self.plan_kind is not None) and self.method not in RANDOMIZED:
            raise UsageError(f"pre-processing plans do not apply to {self.method}")
        return self

    def repeat_seed(self, repeat: int) -> int:
        if self.fresh_seeds and self.method in RANDOMIZED:
            return SeedStreams(self.seed).child_seed("family", repeat)
        return self.seed


@dataclass
class MetricsRow:
    """Per-query result; times are microseconds."""

    query_id: int
    method: str
    r: int
    delta: float
    collisions: float
    candidates: float
    found: float
    true_near: int
    precision: float
    recall: float
    time_s1_us: float
    time_s2_us: float
    time_s3_us: float


METRIC_COLUMNS = [f.name for f in fields(MetricsRow)]
SUMMARY_COLUMNS = ["recall", "precision", "collisions", "candidates", "found",
                   "time_s1_us", "time_s2_us", "time_s3_us"]


def score(found_ids, truth: set, candidates: int) -> tuple:
    """
    (precision, recall) with both defined as 1.0 when their denominator is 0.

    :param found_ids: Reported ids
    :param truth: True ids within r
    :param candidates: Distinct candidates verified
    :return: (precision, recall)
    """
    hits = len(truth.intersection(int(i) for i in found_ids))
    recall = hits / len(truth) if truth else 1.0
    precision = hits / candidates if candidates else 1.0
    return precision, recall


def prepare(config: ExperimentConfig, dataset: Dataset, seed: int):
    """
    Build the structure for one repeat and return a per-query callable.

    :return: Function q -> (ids, QueryReport)
    """
    r = config.r
    if config.method == LINEAR:
        return lambda q: linear_scan(dataset, q, r)
    if config.method == MIH:
        index = build_mih(dataset, config.parts)
        return lambda q: query_mih(index, q, r)
    plan = make_plan(dataset.dims, r, config.c, max(dataset.n, 2), override_t=config.t,
                     kind=config.plan_kind, seed=seed)
    family = FamilyConfig(method=config.method, seed=seed, delta=config.delta, tables=config.tables,
                          k=config.k, include_zero_column=config.include_zero_column)
    index = build_index(dataset, family, plan)
    if config.strategy == 1:
        def strategy1(q):
            best, report = query_c_r_nn(index, q, r)
            return np.array([] if best is None else [best], dtype=np.int64), report
        return strategy1
    return lambda q: query_r_nn(index, q, r)


def _map(fn, items, workers: int):
    if workers == 1:
        return map(fn, items)
    pool = ThreadPoolExecutor(max_workers=workers)
    try:
        return list(pool.map(fn, items))
    finally:
        pool.shutdown()


def run_experiment(config: ExperimentConfig, dataset: Dataset, queries: Dataset,
                   truth: pd.DataFrame | None = None, progress: bool = False) -> pd.DataFrame:
    """
    Run every query config.repeats times and average the metrics per query.

    :param config: Validated experiment
    :param dataset: Points (queries already removed)
    :param queries: Query points
    :param truth: Ground truth holding at least radius config.r (computed when None)
    :param progress: Show a tqdm bar over repeats
    :return: DataFrame with METRIC_COLUMNS, one row per query
    """
    config.validate()
    check_same_dims(dataset.dims, queries.dims, "dataset and queries")
    if truth is None:
        truth = oracle_scan(dataset, queries, config.r)
    near = truth_sets(truth, config.r, queries.n)
    mode = "fresh" if config.fresh_seeds and config.method in RANDOMIZED else "identical"
    logger.info("running %s at r=%d over %d queries, %d repeats with %s seeds",
                config.method, config.r, queries.n, config.repeats, mode)

    rows = []
    for repeat in tqdm(range(config.repeats), desc=f"{config.method} r={config.r}",
                       disable=not progress, leave=False):
        query = prepare(config, dataset, config.repeat_seed(repeat))
        for qid, (ids, report) in enumerate(_map(query, list(queries), config.workers)):
            precision, recall = score(ids, near[qid], report.candidates)
            rows.append(MetricsRow(
                query_id=qid, method=config.method, r=config.r, delta=config.delta,
                collisions=report.collisions, candidates=report.candidates, found=report.found,
                true_near=len(near[qid]), precision=precision, recall=recall,
                time_s1_us=report.time_s1 * 1e6, time_s2_us=report.time_s2 * 1e6,
                time_s3_us=report.time_s3 * 1e6,
            ))
    frame = pd.DataFrame([asdict(row) for row in rows], columns=METRIC_COLUMNS)
    keys = ["query_id", "method", "r", "delta"]
    return frame.groupby(keys, as_index=False, sort=False).mean(numeric_only=True)[METRIC_COLUMNS]


def preset_configs(name: str, **overrides) -> list:
    """
    Expand a named preset into one ExperimentConfig per (method, r, delta).

    Classic is run once per delta; other methods once per radius.
    """
    experiment = Experiment(name).require()
    configs = []
    for r in experiment.get_radii():
        plan = experiment.get_plan_for(r)
        for method in experiment.get_methods():
            deltas = experiment.get_deltas() if method == CLASSIC else [get_settings().delta]
            for delta in deltas:
                config = ExperimentConfig(method=method, r=r, delta=delta, **overrides)
                if method in RANDOMIZED and plan:
                    config.plan_kind, config.t = plan["kind"], plan["t"]
                if method == MIH:
                    config.parts = experiment.get_mih_parts()
                configs.append(config.validate())
    return configs


def run_sweep(configs: list, dataset: Dataset, queries: Dataset, truth: pd.DataFrame | None = None,
              progress: bool = False) -> pd.DataFrame:
    """Run several experiments and stack their metrics."""
    if truth is None and configs:
        truth = oracle_scan(dataset, queries, max(c.r for c in configs))
    frames = [run_experiment(c, dataset, queries, truth, progress=progress)
              for c in tqdm(configs, desc="experiments", disable=not progress)]
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=METRIC_COLUMNS)


def summarize(metrics: pd.DataFrame) -> pd.DataFrame:
    """
    Per (method, r, delta) means of the per-query metrics.

    :param metrics: Frame with METRIC_COLUMNS
    :return: Frame with method, r, delta, queries and the mean columns
    """
    missing = set(METRIC_COLUMNS) - set(metrics.columns)
    if missing:
        raise UsageError(f"metrics are missing columns {sorted(missing)}")
    grouped = metrics.groupby(["method", "r", "delta"], sort=False, dropna=False)
    summary = grouped[SUMMARY_COLUMNS].mean().reset_index()
    summary.insert(3, "queries", grouped.size().to_numpy())
    return summary


def _time_calls(fn, family, batch: list) -> tuple:
    outputs = []
    started = time.perf_counter()
    for q in batch:
        outputs.append(fn(family, q))
    return (time.perf_counter() - started) / len(batch), outputs


def bench_hashing(dims: list, radii: list, queries: int = 1000, seed: int = 0,
                  progress: bool = False) -> pd.DataFrame:
    """
    Mean per-query time of hash_fast against hash_slow for every (d, r).

    :param dims: Dimensionalities to sweep
    :param radii: Radii to sweep
    :param queries: Random queries per point of the sweep
    :param seed: Seed for families and queries
    :return: DataFrame with d, r, tables, fast_us, slow_us, speedup, equal
    """
    if queries < 1:
        raise UsageError("bench_hashing needs at least one query")
    streams = SeedStreams(seed)
    grid = [(d, r) for d in dims for r in radii]
    rows = []
    for d, r in tqdm(grid, desc="hash timing", disable=not progress):
        family = covering.build_family(d, r, rng=streams.child_seed("family", d, r))
        bits = streams.generator("queries", d, r).integers(0, 2, size=(queries, d), dtype=np.uint8)
        batch = [BitVector.from_bits(row) for row in bits]
        # compile both kernels outside the timed loops
        covering.hash_fast(family, batch[0])
        covering.hash_slow(family, batch[0])
        fast, fast_out = _time_calls(covering.hash_fast, family, batch)
        slow, slow_out = _time_calls(covering.hash_slow, family, batch)
        equal = all(np.array_equal(a, b) for a, b in zip(fast_out, slow_out))
        rows.append({"d": d, "r": r, "tables": family.table_count, "fast_us": fast * 1e6,
                     "slow_us": slow * 1e6, "speedup": slow / fast if fast else float("inf"),
                     "equal": equal})
        logger.info("d=%d r=%d: fast %.1fus slow %.1fus", d, r, fast * 1e6, slow * 1e6)
    return pd.DataFrame(rows, columns=["d", "r", "tables", "fast_us", "slow_us", "speedup", "equal"])
