"""
L-table index over covering or bit-sampling families.

A query runs three timed steps:
    S1  hash the (pre-processed) query for every table of every partition
    S2  collect bucket postings, dropping duplicates with an n-bit bitmap
    S3  verify Hamming distances of the distinct candidates
"""

import logging
import threading
import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import classic, covering
from .bitvectors import BitVector, Dataset
from .config import SeedStreams, get_settings
from .errors import ResourceError, UsageError, check_same_dims
from .transform import PreprocessPlan, identity_plan

logger = logging.getLogger(__name__)

FCLSH = "fclsh"
BCLSH = "bclsh"
CLASSIC = "classic"
COVERING_METHODS = (FCLSH, BCLSH)
INDEX_METHODS = (FCLSH, BCLSH, CLASSIC)


@dataclass
class QueryReport:
    """Per-query cost counters; times are seconds."""

    collisions: int = 0
    candidates: int = 0
    found: int = 0
    time_s1: float = 0.0
    time_s2: float = 0.0
    time_s3: float = 0.0

    def as_dict(self) -> dict:
        return {
            "collisions": self.collisions,
            "candidates": self.candidates,
            "found": self.found,
            "time_s1": self.time_s1,
            "time_s2": self.time_s2,
            "time_s3": self.time_s3,
        }

    def counters(self) -> tuple:
        """Everything except the timings, for determinism checks."""
        return self.collisions, self.candidates, self.found


@njit(cache=True)
def _probe(keys, ids, hashes):
    tables = keys.shape[0]
    lo = np.empty(tables, dtype=np.int64)
    hi = np.empty(tables, dtype=np.int64)
    total = 0
    for j in range(tables):
        lo[j] = np.searchsorted(keys[j], hashes[j], side="left")
        hi[j] = np.searchsorted(keys[j], hashes[j], side="right")
        total += hi[j] - lo[j]
    out = np.empty(total, dtype=np.int64)
    pos = 0
    for j in range(tables):
        for k in range(lo[j], hi[j]):
            out[pos] = ids[j, k]
            pos += 1
    return out


@njit(cache=True)
def _mark_new(postings, stamp, epoch):
    fresh = np.empty(postings.shape[0], dtype=np.int64)
    count = 0
    for k in range(postings.shape[0]):
        i = postings[k]
        if stamp[i] != epoch:
            stamp[i] = epoch
            fresh[count] = i
            count += 1
    return fresh[:count]


class DedupBitmap:
    """
    n-bit "seen" set cleared in O(1) per query by bumping an epoch.

    Usage Example:
        bitmap = DedupBitmap(1000)
        bitmap.start()
        new_ids = bitmap.add(np.array([3, 5, 3]))   # [3, 5]
    """

    def __init__(self, n: int):
        self._stamp = np.zeros(n, dtype=np.int64)
        self._epoch = 0

    def start(self) -> None:
        self._epoch += 1

    def add(self, postings: np.ndarray) -> np.ndarray:
        """
        Insert postings and return the ids not seen earlier in this query.

        :param postings: int64 id array, duplicates allowed
        :return: int64 array of first-seen ids in posting order
        """
        return _mark_new(np.asarray(postings, dtype=np.int64), self._stamp, self._epoch)


class HashTables:
    """
    L sparse bucket maps. Row j holds table j's keys in sorted order and the
    matching point ids; a bucket is the run of equal keys. Only non-empty
    buckets exist.
    """

    def __init__(self, hashes: np.ndarray):
        """
        :param hashes: uint64 array of shape (n, L), one hash per point per table
        """
        order = np.argsort(hashes, axis=0, kind="stable")
        self.keys = np.ascontiguousarray(np.take_along_axis(hashes, order, axis=0).T)
        self.ids = np.ascontiguousarray(order.T.astype(np.int64))

    @property
    def table_count(self) -> int:
        return int(self.keys.shape[0])

    def probe(self, hashes: np.ndarray) -> np.ndarray:
        """
        Postings of the query's bucket in every table, table-major.

        :param hashes: uint64 array of length L
        :return: int64 id array (duplicates across tables kept)
        """
        return _probe(self.keys, self.ids, np.ascontiguousarray(hashes, dtype=np.uint64))

    def bucket(self, table: int, key: int) -> np.ndarray:
        row = self.keys[table]
        lo = np.searchsorted(row, np.uint64(key), side="left")
        hi = np.searchsorted(row, np.uint64(key), side="right")
        return self.ids[table, lo:hi]

    def bucket_sizes(self) -> np.ndarray:
        """Sizes of every non-empty bucket of every table."""
        if self.keys.shape[1] == 0:
            return np.zeros(0, dtype=np.int64)
        sizes = []
        for row in self.keys:
            starts = np.flatnonzero(np.concatenate(([True], row[1:] != row[:-1])))
            sizes.append(np.diff(np.append(starts, row.shape[0])))
        return np.concatenate(sizes)

    def nbytes(self) -> int:
        return int(self.keys.nbytes + self.ids.nbytes)


@dataclass
class FamilyConfig:
    """Which hash family to build and how."""

    method: str = FCLSH
    seed: int = 0
    kind: str = covering.AUTO
    include_zero_column: bool = False
    delta: float = 0.1
    tables: int | None = None
    k: int | None = None
    prime: int | None = None

    def __post_init__(self):
        if self.method not in INDEX_METHODS:
            raise UsageError(f"unknown index method {self.method!r}; expected one of {INDEX_METHODS}")


@dataclass(eq=False)
class IndexSet:
    """Hash tables for every partition of a plan over one dataset."""

    dataset: Dataset
    plan: PreprocessPlan
    config: FamilyConfig
    families: list
    tables: list
    _local: threading.local = field(default_factory=threading.local, repr=False)

    @property
    def method(self) -> str:
        return self.config.method

    @property
    def total_tables(self) -> int:
        return sum(t.table_count for t in self.tables)

    def bitmap(self) -> DedupBitmap:
        """The calling thread's own dedup bitmap."""
        bitmap = getattr(self._local, "bitmap", None)
        if bitmap is None:
            bitmap = DedupBitmap(self.dataset.n)
            self._local.bitmap = bitmap
        return bitmap

    def hash_query(self, q: BitVector) -> list:
        """
        Step S1: one hash batch per partition.

        :param q: Query in the original space
        :return: List of uint64 arrays
        """
        check_same_dims(self.dataset.dims, q.dims, "index and query")
        parts = self.plan.transform_bits(q.to_bits()[None, :])
        batches = []
        for family, bits in zip(self.families, parts):
            if self.method == CLASSIC:
                batches.append(classic.hash_rows(family, bits)[0])
            else:
                batches.append(covering.hash_rows(family, bits, fast=self.method == FCLSH)[0])
        return batches

    def stats(self) -> dict:
        sizes = np.concatenate([t.bucket_sizes() for t in self.tables]) if self.tables else np.zeros(0)
        return {
            "method": self.method,
            "n": self.dataset.n,
            "dims": self.dataset.dims,
            "plan": self.plan.describe(),
            "families": [f.describe() for f in self.families],
            "tables": self.total_tables,
            "buckets": int(sizes.size),
            "largest_bucket": int(sizes.max()) if sizes.size else 0,
            "postings": int(sizes.sum()),
            "bytes": sum(t.nbytes() for t in self.tables),
        }


def _build_family(config: FamilyConfig, part: int, dims: int, radius: int, part_tables: int):
    seed = SeedStreams(config.seed).child_seed("family", part)
    if config.method == CLASSIC:
        tables = config.tables or part_tables
        return classic.build_classic(dims, radius, config.delta, tables=tables, k=config.k,
                                     rng=seed, prime=config.prime)
    return covering.build_family(dims, radius, kind=config.kind, rng=seed, prime=config.prime,
                                 include_zero_column=config.include_zero_column)


def build_index(dataset: Dataset, config: FamilyConfig | None = None,
                plan: PreprocessPlan | None = None, r: int | None = None) -> IndexSet:
    """
    Hash every point into every table of every partition.

    :param dataset: Points, n >= 1
    :param config: Family configuration (fcLSH defaults)
    :param plan: Pre-processing plan; identity with radius r when None
    :param r: Radius for the identity plan
    :return: IndexSet
    """
    dataset.require_points()
    config = config or FamilyConfig()
    if plan is None:
        if r is None:
            raise UsageError("build_index needs a plan or a radius")
        plan = identity_plan(dataset.dims, r)
    check_same_dims(plan.dims, dataset.dims, "plan and dataset")
    settings = get_settings()

    if config.method == CLASSIC:
        # bit sampling needs no rescaling; keep the table count of the covering plan
        part_tables = plan.total_tables()
        plan = identity_plan(dataset.dims, plan.radius)
    else:
        part_tables = plan.tables_per_part()
    planned = config.tables or part_tables * plan.part_count
    if planned > settings.table_budget:
        raise ResourceError(f"{planned} tables exceed the table budget {settings.table_budget}")

    started = time.perf_counter()
    families, tables = [], []
    for part, bits in enumerate(plan.transform_bits(dataset.bits())):
        family = _build_family(config, part, bits.shape[1], plan.per_part_radius, part_tables)
        if config.method == CLASSIC:
            hashes = classic.hash_rows(family, bits)
        else:
            hashes = covering.hash_rows(family, bits, fast=True)
        families.append(family)
        tables.append(HashTables(hashes))
    index = IndexSet(dataset, plan, config, families, tables)
    logger.info("built %s index: n=%d tables=%d in %.2fs", config.method, dataset.n,
                index.total_tables, time.perf_counter() - started)
    return index


def query_r_nn(index: IndexSet, q: BitVector, r: int | None = None) -> tuple:
    """
    Strategy 2: report every point within distance r.

    :param index: IndexSet
    :param q: Query
    :param r: Radius (the index radius when None)
    :return: (sorted int64 id array, QueryReport)
    """
    r = index.plan.radius if r is None else r
    if r > index.plan.radius and index.method in COVERING_METHODS:
        logger.warning("query radius %d exceeds the covering radius %d; results may miss points",
                       r, index.plan.radius)
    report = QueryReport()

    started = time.perf_counter()
    batches = index.hash_query(q)
    report.time_s1 = time.perf_counter() - started

    started = time.perf_counter()
    bitmap = index.bitmap()
    bitmap.start()
    fresh = []
    for tables, batch in zip(index.tables, batches):
        postings = tables.probe(batch)
        report.collisions += int(postings.size)
        fresh.append(bitmap.add(postings))
    candidates = np.concatenate(fresh) if fresh else np.zeros(0, dtype=np.int64)
    report.candidates = int(candidates.size)
    report.time_s2 = time.perf_counter() - started

    started = time.perf_counter()
    distances = index.dataset.distances_to(q, candidates)
    found = np.sort(candidates[distances <= r])
    report.found = int(found.size)
    report.time_s3 = time.perf_counter() - started
    return found, report


def query_c_r_nn(index: IndexSet, q: BitVector, r: int | None = None, L: int | None = None) -> tuple:
    """
    Strategy 1: stop after 3L retrieved postings (duplicates counted) and
    return the closest one retrieved. Ties go to the lowest id.

    :param index: IndexSet
    :param q: Query
    :param r: Radius (only logged; the answer is whatever is closest)
    :param L: Table count used for the 3L limit (the index's total when None)
    :return: (point id or None, QueryReport)
    """
    limit = get_settings().strategy1_factor * (L or index.total_tables)
    report = QueryReport()

    started = time.perf_counter()
    batches = index.hash_query(q)
    report.time_s1 = time.perf_counter() - started

    started = time.perf_counter()
    retrieved = []
    remaining = limit
    for tables, batch in zip(index.tables, batches):
        for j in range(tables.table_count):
            if remaining <= 0:
                break
            bucket = tables.bucket(j, batch[j])[:remaining]
            retrieved.append(bucket)
            remaining -= bucket.size
    postings = np.concatenate(retrieved) if retrieved else np.zeros(0, dtype=np.int64)
    report.collisions = int(postings.size)
    bitmap = index.bitmap()
    bitmap.start()
    candidates = bitmap.add(postings)
    report.candidates = int(candidates.size)
    report.time_s2 = time.perf_counter() - started

    started = time.perf_counter()
    best = None
    if candidates.size:
        distances = index.dataset.distances_to(q, candidates)
        order = np.lexsort((candidates, distances))
        best = int(candidates[order[0]])
        report.found = 1
        logger.debug("strategy 1 (r=%s): best id %d at distance %d", r, best, distances[order[0]])
    report.time_s3 = time.perf_counter() - started
    return best, report


def linear_scan(dataset: Dataset, q: BitVector, r: int) -> tuple:
    """
    The exact oracle: every point is a candidate.

    :param dataset: Points
    :param q: Query
    :param r: Radius
    :return: (sorted int64 id array, QueryReport)
    """
    report = QueryReport(collisions=dataset.n, candidates=dataset.n)
    started = time.perf_counter()
    distances = dataset.distances_to(q)
    found = np.flatnonzero(distances <= r)
    report.found = int(found.size)
    report.time_s3 = time.perf_counter() - started
    return found, report
