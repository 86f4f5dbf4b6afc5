"""
Benchmark workloads: planted synthetic data, binarization of real-valued
vectors, query hold-out and the linear-scan ground truth.
"""

import logging
import os

import numpy as np
import pandas as pd

from .bitvectors import MAX_DIMS, Dataset
from .config import SeedStreams
from .datafiles import TRUTH_COLUMNS
from .errors import DataError, UsageError, check_same_dims

logger = logging.getLogger(__name__)

HYPERPLANE = "hyperplane"
THRESHOLD = "threshold"


def gen_synthetic(n: int, d: int, queries: int, planted: dict | None = None, seed: int = 0,
                  truth_radius: int | None = None) -> tuple:
    """
    Uniform background points plus, for every query, planted points at exact distances.

    :param n: Total number of points (background plus planted)
    :param d: Dimensions
    :param queries: Number of uniform random queries
    :param planted: {distance: points per query}
    :param seed: Seed for the data and queries streams
    :param truth_radius: Radius of the returned ground truth (largest planted distance when None)
    :return: (Dataset, query Dataset, ground-truth DataFrame)
    """
    planted = {int(k): int(v) for k, v in (planted or {}).items()}
    if not 1 <= d <= MAX_DIMS:
        raise UsageError(f"dims must be in [1, {MAX_DIMS}], got {d}")
    if queries < 1:
        raise UsageError("at least one query is required")
    if any(dist < 0 or dist > d or count < 0 for dist, count in planted.items()):
        raise UsageError(f"planted distances must lie in [0, {d}] with non-negative counts")
    per_query = sum(planted.values())
    background = n - queries * per_query
    if background < 0:
        raise UsageError(f"{queries} queries x {per_query} planted points exceed n = {n}")

    streams = SeedStreams(seed)
    query_bits = streams.generator("queries").integers(0, 2, size=(queries, d), dtype=np.uint8)
    rng = streams.generator("data")
    rows = [rng.integers(0, 2, size=(background, d), dtype=np.uint8)]
    for qi in range(queries):
        for dist, count in sorted(planted.items()):
            for _ in range(count):
                point = query_bits[qi].copy()
                point[rng.choice(d, size=dist, replace=False)] ^= 1
                rows.append(point[None, :])
    bits = np.concatenate(rows)[rng.permutation(n)]

    dataset = Dataset.from_bits(bits)
    query_set = Dataset.from_bits(query_bits)
    if truth_radius is None:
        truth_radius = max(planted) if planted else 0
    truth = oracle_scan(dataset, query_set, truth_radius)
    logger.info("generated n=%d d=%d with %d queries, %d planted per query", n, d, queries, per_query)
    return dataset, query_set, truth


def read_vectors(path: str) -> np.ndarray:
    """
    Load a real-valued matrix from .npy, .fvecs or a headerless CSV.

    :param path: Source file
    :return: float64 array of shape (rows, dims)
    """
    if not os.path.isfile(path):
        raise UsageError(f"no such file: {path}")
    if path.endswith(".npy"):
        return np.asarray(np.load(path), dtype=np.float64)
    if path.endswith(".fvecs"):
        raw = np.fromfile(path, dtype="<i4")
        if raw.size == 0:
            raise DataError(f"{path}: empty fvecs file")
        dims = int(raw[0])
        if dims < 1 or raw.size % (dims + 1):
            raise DataError(f"{path}: inconsistent fvecs record size")
        return raw.reshape(-1, dims + 1)[:, 1:].view("<f4").astype(np.float64)
    try:
        return pd.read_csv(path, header=None).to_numpy(dtype=np.float64)
    except ValueError as e:
        raise DataError(f"{path}: {e}") from None


def binarize(vectors: np.ndarray, bits: int | None = None, seed: int = 0, mode: str = HYPERPLANE,
             threshold: float = 0.0) -> Dataset:
    """
    Turn real-valued rows into binary codes.

    hyperplane: bit j = <row, h_j> >= 0 for Gaussian (spherically symmetric) h_j
    threshold:  bit j = row[j] > threshold

    :param vectors: Array of shape (rows, dims)
    :param bits: Output length for hyperplane mode
    :param seed: Seed of the hyperplanes stream
    :param mode: "hyperplane" or "threshold"
    :param threshold: Cut-off for threshold mode
    :return: Dataset
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] == 0:
        raise UsageError("binarize needs a non-empty two-dimensional matrix")
    if not np.all(np.isfinite(vectors)):
        raise DataError("input contains NaN or infinite values")
    if mode == THRESHOLD:
        return Dataset.from_bits(vectors > threshold)
    if mode != HYPERPLANE:
        raise UsageError(f"unknown binarization mode {mode!r}")
    if bits is None or bits < 1:
        raise UsageError("hyperplane binarization needs bits >= 1")
    planes = SeedStreams(seed).generator("hyperplanes").standard_normal((vectors.shape[1], bits))
    return Dataset.from_bits(vectors @ planes >= 0)


def holdout_queries(dataset: Dataset, count: int, seed: int = 0) -> tuple:
    """
    Remove random points to serve as queries.

    :param dataset: Source points
    :param count: Number of queries, 1 <= count < n
    :param seed: Seed of the queries stream
    :return: (remaining Dataset, query Dataset)
    """
    if not 1 <= count < dataset.n:
        raise UsageError(f"cannot hold out {count} of {dataset.n} points")
    ids = np.sort(SeedStreams(seed).generator("queries").choice(dataset.n, size=count, replace=False))
    return dataset.without(ids), dataset.subset(ids)


def oracle_scan(dataset: Dataset, queries: Dataset, r: int) -> pd.DataFrame:
    """
    Exact ids within distance r of every query, by linear scan.

    :param dataset: Points
    :param queries: Queries
    :param r: Radius
    :return: DataFrame with columns query_id, point_id, distance
    """
    check_same_dims(dataset.dims, queries.dims, "dataset and queries")
    frames = []
    for qid, q in enumerate(queries):
        distances = dataset.distances_to(q)
        ids = np.flatnonzero(distances <= r)
        frames.append(pd.DataFrame({"query_id": qid, "point_id": ids, "distance": distances[ids]}))
    if not frames:
        return pd.DataFrame({c: pd.Series(dtype="int64") for c in TRUTH_COLUMNS})
    return pd.concat(frames, ignore_index=True).astype("int64")


def distance_histogram(dataset: Dataset, queries: Dataset, sample: int | None = None,
                       seed: int = 0) -> pd.DataFrame:
    """
    Counts of query-to-point distances 0..d, optionally over a random point sample.

    :param dataset: Points
    :param queries: Queries
    :param sample: Number of points to sample (all when None)
    :param seed: Seed of the data stream
    :return: DataFrame with columns distance, count
    """
    check_same_dims(dataset.dims, queries.dims, "dataset and queries")
    if sample is not None and sample < dataset.n:
        ids = SeedStreams(seed).generator("data").choice(dataset.n, size=sample, replace=False)
        dataset = dataset.subset(np.sort(ids))
    counts = np.zeros(dataset.dims + 1, dtype=np.int64)
    for q in queries:
        counts += np.bincount(dataset.distances_to(q), minlength=dataset.dims + 1)
    return pd.DataFrame({"distance": np.arange(dataset.dims + 1), "count": counts})
