"""
Radius rescaling so that c * r is close to log2 n.

    replicate  - concatenate t copies of every vector, radius becomes t * r
    partition  - permute the dimensions, split into t contiguous parts,
                 each part searched with radius floor(r / t) (pigeonhole)
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .bitvectors import BitVector
from .config import SeedStreams, get_settings
from .errors import ResourceError, UsageError, check_same_dims

logger = logging.getLogger(__name__)

IDENTITY = "identity"
REPLICATE = "replicate"
PARTITION = "partition"


def split_bounds(d: int, t: int) -> list:
    """
    Contiguous, non-overlapping slices of [0, d) whose sizes differ by at most one.

    The larger parts come last.

    :param d: Number of dimensions
    :param t: Number of parts, 1 <= t <= d
    :return: List of (start, stop) tuples
    """
    if not 1 <= t <= d:
        raise UsageError(f"cannot split {d} dimensions into {t} parts")
    base, extra = divmod(d, t)
    bounds, start = [], 0
    for part in range(t):
        size = base + (1 if part >= t - extra else 0)
        bounds.append((start, start + size))
        start += size
    return bounds


@dataclass(frozen=True, eq=False)
class PreprocessPlan:
    """How points and queries are rewritten before hashing."""

    kind: str
    t: int
    dims: int
    radius: int
    per_part_radius: int
    permutation: np.ndarray | None = None
    part_bounds: tuple = ()

    @property
    def part_count(self) -> int:
        return self.t if self.kind == PARTITION else 1

    def part_dims(self) -> list:
        """Dimensionality of each transformed part."""
        if self.kind == REPLICATE:
            return [self.t * self.dims]
        if self.kind == PARTITION:
            return [stop - start for start, stop in self.part_bounds]
        return [self.dims]

    def tables_per_part(self) -> int:
        return (1 << (self.per_part_radius + 1)) - 1

    def total_tables(self) -> int:
        return self.part_count * self.tables_per_part()

    def transform_bits(self, bits: np.ndarray) -> list:
        """
        Rewrite a (rows, d) 0/1 matrix into one matrix per part.

        :param bits: uint8 array
        :return: List of uint8 arrays
        """
        check_same_dims(self.dims, bits.shape[-1], "plan and data")
        if self.kind == REPLICATE:
            return [np.tile(bits, self.t)]
        if self.kind == PARTITION:
            permuted = bits[..., self.permutation]
            return [np.ascontiguousarray(permuted[..., a:b]) for a, b in self.part_bounds]
        return [bits]

    def transform(self, q: BitVector) -> list:
        return [BitVector.from_bits(part) for part in self.transform_bits(q.to_bits())]

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "t": self.t,
            "per_part_radius": self.per_part_radius,
            "parts": self.part_dims(),
            "tables": self.total_tables(),
        }


def identity_plan(d: int, r: int) -> PreprocessPlan:
    return PreprocessPlan(IDENTITY, 1, d, r, r)


def replicate_plan(d: int, r: int, t: int) -> PreprocessPlan:
    if t < 1:
        raise UsageError(f"replication factor must be >= 1, got {t}")
    if t == 1:
        return identity_plan(d, r)
    return PreprocessPlan(REPLICATE, t, d, r, t * r)


def partition_plan(d: int, r: int, t: int, permutation=None, seed: int = 0) -> PreprocessPlan:
    """
    Permute-then-partition plan with per-part radius floor(r / t).

    :param d: Dimensions
    :param r: Query radius
    :param t: Number of parts, 1 <= t <= min(r, d)
    :param permutation: Explicit dimension permutation (random from seed when None)
    :param seed: Seed for the permutation stream
    :return: PreprocessPlan
    """
    if t < 1:
        raise UsageError(f"partition count must be >= 1, got {t}")
    if t > r:
        raise UsageError(f"{t} parts would leave a per-part radius of 0 for r = {r}")
    if t == 1:
        return identity_plan(d, r)
    if permutation is None:
        permutation = SeedStreams(seed).generator("permutation").permutation(d)
    permutation = np.asarray(permutation, dtype=np.int64)
    if permutation.shape != (d,) or not np.array_equal(np.sort(permutation), np.arange(d)):
        raise UsageError("permutation must be a permutation of range(d)")
    permutation.flags.writeable = False
    return PreprocessPlan(PARTITION, t, d, r, r // t, permutation, tuple(split_bounds(d, t)))


def make_plan(d: int, r: int, c: float, n: int, override_t: int | None = None,
              kind: str | None = None, seed: int = 0, table_budget: int | None = None) -> PreprocessPlan:
    """
    Choose replication or partitioning from c * r against log2 n.

    :param d: Dimensions
    :param r: Query radius
    :param c: Approximation ratio
    :param n: Dataset size
    :param override_t: Fixed replication factor / part count
    :param kind: Force "identity", "replicate" or "partition". Without it, a given
        override_t replicates when override_t * c * r <= log2 n and partitions otherwise
    :param seed: Seed for the partition permutation
    :param table_budget: Largest table count a replication may create
    :return: PreprocessPlan
    """
    if r < 1 or c < 1 or n < 2:
        raise UsageError(f"make_plan needs r >= 1, c >= 1, n >= 2 (got r={r}, c={c}, n={n})")
    if override_t is not None and override_t < 1:
        raise UsageError("override_t must be a positive count")
    if kind not in (None, IDENTITY, REPLICATE, PARTITION):
        raise UsageError(f"unknown plan kind {kind!r}")
    budget = table_budget or get_settings().table_budget
    log_n = math.log2(n)
    cr = c * r

    if kind is None and override_t is not None:
        # a fixed factor replicates only while the lifted radius stays within log2 n
        kind = REPLICATE if override_t * cr <= log_n else PARTITION
    elif kind is None:
        if math.isclose(cr, log_n):
            kind = IDENTITY
        else:
            kind = REPLICATE if cr < log_n else PARTITION

    if kind == IDENTITY:
        plan = identity_plan(d, r)
    elif kind == REPLICATE:
        if override_t is not None:
            t = override_t
            if (1 << (t * r + 1)) - 1 > budget:
                raise ResourceError(f"replicating {t} times needs 2^{t * r + 1} - 1 tables, over budget {budget}")
        else:
            t = max(1, math.floor(log_n / cr))
            while t > 1 and (1 << (t * r + 1)) - 1 > budget:
                t -= 1
        plan = replicate_plan(d, r, t)
    else:
        t = override_t if override_t is not None else min(math.ceil(cr / log_n), r, d)
        plan = partition_plan(d, r, t, seed=seed)
    logger.debug("plan for d=%d r=%d c=%s n=%d: %s", d, r, c, n, plan.describe())
    return plan


def apply_replicate(q: BitVector, t: int) -> BitVector:
    """
    Concatenate t copies of q.

    :param q: Vector
    :param t: Copies, >= 1
    :return: BitVector of dims t * q.dims
    """
    if t < 1:
        raise UsageError(f"replication factor must be >= 1, got {t}")
    return BitVector.from_bits(np.tile(q.to_bits(), t))


def apply_partition(q: BitVector, plan: PreprocessPlan) -> list:
    """
    Permute q with the plan's permutation and cut it into the plan's parts.

    :param q: Vector with q.dims == plan.dims
    :param plan: A partition (or identity) plan
    :return: List of BitVectors, one per part
    """
    if plan.kind == REPLICATE:
        raise UsageError("apply_partition needs a partition plan")
    check_same_dims(plan.dims, q.dims, "plan and query")
    return plan.transform(q)
