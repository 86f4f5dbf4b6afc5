"""
Classic bit-sampling LSH: table j hashes k sampled bits with a universal hash.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .bitvectors import BitVector
from .config import SeedStreams, get_settings
from .errors import ResourceError, UsageError, check_same_dims
from .modular import ZERO, addmod, check_prime

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BitSampleFamily:
    """
    L tables of k positions each, sampled uniformly with replacement.

    positions[j, s] is the s-th sampled bit of table j; seeds[j, s] its multiplier.
    """

    dims: int
    positions: np.ndarray
    seeds: np.ndarray
    prime: int

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=np.int64)
        seeds = np.asarray([int(s) for s in np.asarray(self.seeds).reshape(-1)], dtype=np.uint64)
        if positions.ndim != 2 or positions.size == 0:
            raise UsageError("positions must be a non-empty L x k matrix")
        if seeds.size != positions.size:
            raise UsageError("one seed per sampled position is required")
        if positions.min() < 0 or positions.max() >= self.dims:
            raise UsageError(f"sampled positions must lie in [0, {self.dims})")
        check_prime(self.prime)
        if int(seeds.max()) >= self.prime:
            raise UsageError("seeds must lie in [0, P)")
        seeds = seeds.reshape(positions.shape)
        positions.flags.writeable = False
        seeds.flags.writeable = False
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "seeds", seeds)

    @property
    def table_count(self) -> int:
        return int(self.positions.shape[0])

    @property
    def samples_per_table(self) -> int:
        return int(self.positions.shape[1])

    def describe(self) -> dict:
        return {"kind": "bit-sampling", "dims": self.dims, "tables": self.table_count,
                "k": self.samples_per_table, "prime": self.prime}


def choose_k(d: int, r: int, L: int, delta: float) -> int:
    """
    k = ceil(log(1 - delta^(1/L)) / log(1 - r/d)), clamped to [1, 4d].

    The ratio of logarithms does not depend on the base. k grows with delta:
    delta near 1 hits the 4d clamp and delta near 0 gives k = 1.

    :param d: Dimensions
    :param r: Radius, 1 <= r < d
    :param L: Number of tables
    :param delta: Target false-negative probability, 0 < delta < 1
    :return: Bits sampled per table
    """
    if not 0 < delta < 1:
        raise UsageError(f"delta must lie in (0, 1), got {delta}")
    if r >= d:
        raise UsageError(f"r must be smaller than d (r={r}, d={d})")
    if r < 1 or L < 1:
        raise UsageError("choose_k needs r >= 1 and L >= 1")
    miss = 1.0 - delta ** (1.0 / L)
    if miss <= 0.0:
        return 4 * d
    ratio = math.log(miss) / math.log(1.0 - r / d)
    k = math.ceil(ratio - 1e-9)
    return int(min(max(k, 1), 4 * d))


def build_bit_sampling(d: int, tables: int, k: int, rng=None, prime: int | None = None) -> BitSampleFamily:
    """
    Draw a bit-sampling family.

    :param d: Dimensions
    :param tables: L
    :param k: Samples per table
    :param rng: Integer seed or numpy Generator
    :param prime: Hashing prime
    :return: BitSampleFamily
    """
    if tables < 1 or k < 1:
        raise UsageError("tables and k must be positive")
    if tables > get_settings().table_budget:
        raise ResourceError(f"{tables} tables exceed the table budget")
    prime = int(get_settings().prime if prime is None else prime)
    if not isinstance(rng, np.random.Generator):
        rng = SeedStreams(0 if rng is None else int(rng)).generator("family")
    positions = rng.integers(0, d, size=(tables, k), dtype=np.int64)
    seeds = rng.integers(0, prime, size=(tables, k), dtype=np.uint64)
    logger.debug("built bit-sampling family d=%d L=%d k=%d", d, tables, k)
    return BitSampleFamily(d, positions, seeds, prime)


def build_classic(d: int, r: int, delta: float, tables: int | None = None, k: int | None = None,
                  rng=None, prime: int | None = None) -> BitSampleFamily:
    """
    The comparison setting: L = 2^(r+1) - 1 tables unless given, k from choose_k unless given.
    """
    tables = tables or (1 << (r + 1)) - 1
    k = k or choose_k(d, r, tables, delta)
    return build_bit_sampling(d, tables, k, rng=rng, prime=prime)


@njit(cache=True)
def _sample_rows(bits, positions, seeds, p):
    rows = bits.shape[0]
    tables, k = positions.shape
    out = np.zeros((rows, tables), dtype=np.uint64)
    for row in range(rows):
        for j in range(tables):
            acc = ZERO
            for s in range(k):
                if bits[row, positions[j, s]]:
                    acc = addmod(acc, seeds[j, s], p)
            out[row, j] = acc
    return out


def hash_all(family: BitSampleFamily, q: BitVector) -> np.ndarray:
    """
    Universal hash of the sampled bits for every table.

    :param family: Bit-sampling family
    :param q: Query
    :return: uint64 array of length L
    """
    check_same_dims(family.dims, q.dims, "family and query")
    return _sample_rows(q.to_bits()[None, :], family.positions, family.seeds, np.uint64(family.prime))[0]


def hash_rows(family: BitSampleFamily, bits: np.ndarray, chunk_rows: int | None = None) -> np.ndarray:
    check_same_dims(family.dims, bits.shape[1], "family and data")
    chunk_rows = chunk_rows or get_settings().chunk_rows
    p = np.uint64(family.prime)
    out = np.empty((bits.shape[0], family.table_count), dtype=np.uint64)
    for start in range(0, bits.shape[0], chunk_rows):
        chunk = np.ascontiguousarray(bits[start:start + chunk_rows])
        out[start:start + chunk_rows] = _sample_rows(chunk, family.positions, family.seeds, p)
    return out
