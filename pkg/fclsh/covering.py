"""
The r-covering LSH family built from Hadamard codes.

Every dimension i of the data is assigned a code column m(i) in [0, 2^(r+1)).
Hash function g_v (v = 1 .. 2^(r+1) - 1) keeps bit i iff parity(v AND m(i)),
and its integer value is sum_i b_i * q_i * g_v[i] mod P.

Two evaluation paths produce identical values:
    hash_slow  - bcLSH, every g_v evaluated separately, O(nnz(q) * L)
    hash_fast  - fcLSH, scatter into a sketch and one modular FHT, O(nnz(q) + L log L)
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .bitvectors import BitVector
from .config import SeedStreams, get_settings
from .errors import ResourceError, UsageError, check_same_dims
from .modular import ZERO, addmod, check_prime, fht_mod_1d, halvemod, parity, submod

logger = logging.getLogger(__name__)

GENERAL = "general"
SPECIFIC = "specific"
AUTO = "auto"


@dataclass(frozen=True, eq=False)
class CoveringFamily:
    """
    L = 2^(r+1) - 1 correlated hash functions over d dimensions.

    mapping[i] is the code column of dimension i. For the specific construction
    mapping is the first d entries of a permutation of the code columns, which
    is the same as permuting the zero-padded query.
    """

    radius: int
    mapping: np.ndarray
    seeds: np.ndarray
    prime: int
    kind: str
    permutation: np.ndarray | None = None
    include_zero_column: bool = True
    _masks: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dims(self) -> int:
        return int(self.mapping.shape[0])

    @property
    def order_log(self) -> int:
        return self.radius + 1

    @property
    def code_order(self) -> int:
        return 1 << (self.radius + 1)

    @property
    def table_count(self) -> int:
        return self.code_order - 1

    def masks(self) -> np.ndarray:
        """
        The L x d matrix whose row v-1 is g_v.

        :return: uint8 array
        """
        cached = self._masks.get("all")
        if cached is None:
            vs = np.arange(1, self.code_order, dtype=np.int64)
            cached = (np.bitwise_count(vs[:, None] & self.mapping[None, :]) & 1).astype(np.uint8)
            cached.flags.writeable = False
            self._masks["all"] = cached
        return cached

    def mask(self, v: int) -> BitVector:
        """
        g_v as a BitVector.

        :param v: Function index in 1..L
        :return: BitVector of dims d
        """
        if not 1 <= v <= self.table_count:
            raise UsageError(f"hash function index {v} outside 1..{self.table_count}")
        return BitVector.from_bits(self.masks()[v - 1])

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "dims": self.dims,
            "radius": self.radius,
            "tables": self.table_count,
            "prime": self.prime,
            "include_zero_column": self.include_zero_column,
        }


def _check_radius(r: int) -> None:
    if r < 1:
        raise UsageError(f"radius must be >= 1, got {r}")
    settings = get_settings()
    if r + 1 > settings.code_order_budget:
        raise ResourceError(f"code length 2^{r + 1} exceeds the budget 2^{settings.code_order_budget}")
    if (1 << (r + 1)) - 1 > settings.table_budget:
        raise ResourceError(f"{(1 << (r + 1)) - 1} tables exceed the table budget {settings.table_budget}")


def _streams(rng) -> tuple:
    if isinstance(rng, np.random.Generator):
        return rng, rng
    streams = SeedStreams(0 if rng is None else int(rng))
    return streams.generator("mapping"), streams.generator("family")


def build_family(d: int, r: int, kind: str = AUTO, rng=None, prime: int | None = None,
                 include_zero_column: bool = False) -> CoveringFamily:
    """
    Draw a random r-covering family for d-dimensional data.

    :param d: Dimensionality of the (pre-processed) data
    :param r: Covering radius
    :param kind: "general" (d > 2^(r+1)), "specific" (d <= 2^(r+1)) or "auto"
    :param rng: Integer seed or numpy Generator
    :param prime: Hashing prime, defaults to the configured P
    :param include_zero_column: General case only; let the mapping hit the all-zero column
    :return: CoveringFamily
    """
    _check_radius(r)
    if d < 1:
        raise UsageError(f"dims must be >= 1, got {d}")
    code_order = 1 << (r + 1)
    if kind == AUTO:
        kind = SPECIFIC if d <= code_order else GENERAL
    if kind == SPECIFIC and d > code_order:
        raise UsageError(f"specific construction needs d <= 2^(r+1) = {code_order}, got d = {d}")
    if kind == GENERAL and d <= code_order:
        raise UsageError(f"general construction needs d > 2^(r+1) = {code_order}, got d = {d}")
    if kind not in (GENERAL, SPECIFIC):
        raise UsageError(f"unknown construction kind {kind!r}")

    prime = int(get_settings().prime if prime is None else prime)
    check_prime(prime)
    mapping_rng, seed_rng = _streams(rng)

    permutation = None
    if kind == SPECIFIC:
        permutation = mapping_rng.permutation(code_order).astype(np.int64)
        mapping = permutation[:d].copy()
        include_zero_column = True
    else:
        low = 0 if include_zero_column else 1
        mapping = mapping_rng.integers(low, code_order, size=d, dtype=np.int64)
    seeds = seed_rng.integers(0, prime, size=d, dtype=np.uint64)
    family = _freeze(r, mapping, seeds, prime, kind, permutation, include_zero_column)
    logger.debug("built %s covering family d=%d r=%d L=%d", kind, d, r, family.table_count)
    return family


def family_from_mapping(mapping, r: int, seeds=None, prime: int | None = None) -> CoveringFamily:
    """
    Build a family from an explicit column mapping (worked examples, tests).

    :param mapping: Code column for each dimension
    :param r: Covering radius
    :param seeds: Universal-hash seeds b_i (all ones when None)
    :param prime: Hashing prime
    :return: CoveringFamily; "specific" when the mapping is injective and d <= 2^(r+1)
    """
    _check_radius(r)
    mapping = np.asarray(mapping, dtype=np.int64)
    code_order = 1 << (r + 1)
    if mapping.ndim != 1 or mapping.size == 0:
        raise UsageError("mapping must be a non-empty vector")
    if mapping.min() < 0 or mapping.max() >= code_order:
        raise UsageError(f"mapping entries must lie in [0, {code_order})")
    prime = int(get_settings().prime if prime is None else prime)
    check_prime(prime)
    if seeds is None:
        seeds = np.ones(mapping.size, dtype=np.uint64)
    seeds = np.asarray([int(s) for s in seeds], dtype=object)
    if seeds.size != mapping.size or any(not 0 <= s < prime for s in seeds):
        raise UsageError("seeds must have one entry per dimension, each in [0, P)")
    injective = np.unique(mapping).size == mapping.size
    kind = SPECIFIC if injective and mapping.size <= code_order else GENERAL
    return _freeze(r, mapping, seeds.astype(np.uint64), prime, kind, None, bool(np.any(mapping == 0)))


def _freeze(r, mapping, seeds, prime, kind, permutation, include_zero_column) -> CoveringFamily:
    for arr in (mapping, seeds, permutation):
        if arr is not None:
            arr.flags.writeable = False
    return CoveringFamily(radius=r, mapping=mapping, seeds=seeds, prime=prime, kind=kind,
                          permutation=permutation, include_zero_column=include_zero_column)


@njit(cache=True)
def _slow_rows(indptr, indices, mapping, seeds, tables, p):
    rows = indptr.shape[0] - 1
    out = np.zeros((rows, tables), dtype=np.uint64)
    for row in range(rows):
        for v in range(1, tables + 1):
            acc = ZERO
            for k in range(indptr[row], indptr[row + 1]):
                i = indices[k]
                if parity(v & mapping[i]):
                    acc = addmod(acc, seeds[i], p)
            out[row, v - 1] = acc
    return out


@njit(cache=True)
def _sketch_rows(indptr, indices, mapping, seeds, code_order, p):
    rows = indptr.shape[0] - 1
    t = np.zeros((rows, code_order), dtype=np.uint64)
    l1 = np.zeros(rows, dtype=np.uint64)
    for row in range(rows):
        acc = ZERO
        for k in range(indptr[row], indptr[row + 1]):
            i = indices[k]
            c = mapping[i]
            t[row, c] = addmod(t[row, c], seeds[i], p)
            acc = addmod(acc, seeds[i], p)
        l1[row] = acc
    return t, l1


@njit(cache=True)
def _fast_rows(indptr, indices, mapping, seeds, code_order, p):
    rows = indptr.shape[0] - 1
    out = np.zeros((rows, code_order - 1), dtype=np.uint64)
    t = np.zeros(code_order, dtype=np.uint64)
    for row in range(rows):
        t[:] = ZERO
        l1 = ZERO
        for k in range(indptr[row], indptr[row + 1]):
            i = indices[k]
            c = mapping[i]
            t[c] = addmod(t[c], seeds[i], p)
            l1 = addmod(l1, seeds[i], p)
        fht_mod_1d(t, p)
        for v in range(1, code_order):
            out[row, v - 1] = halvemod(submod(l1, t[v], p), p)
    return out


def ones_csr(bits: np.ndarray) -> tuple:
    """
    Row pointers and column indices of the set bits of a 0/1 matrix.

    :param bits: uint8 array of shape (rows, d)
    :return: (indptr, indices) as int64 arrays
    """
    rows, cols = np.nonzero(bits)
    counts = np.bincount(rows, minlength=bits.shape[0])
    indptr = np.zeros(bits.shape[0] + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, cols.astype(np.int64)


def _query_csr(family: CoveringFamily, q: BitVector) -> tuple:
    check_same_dims(family.dims, q.dims, "family and query")
    ones = q.ones_positions().astype(np.int64)
    return np.array([0, ones.size], dtype=np.int64), ones


def sketch(family: CoveringFamily, q: BitVector) -> tuple:
    """
    The sketch t (t_j = sum of b_i q_i over m(i) = j) and ||b * q||_1, both mod P.

    :param family: Covering family
    :param q: Query
    :return: (t as uint64 array of length 2^(r+1), l1 as int)
    """
    indptr, ones = _query_csr(family, q)
    t, l1 = _sketch_rows(indptr, ones, family.mapping, family.seeds, family.code_order,
                         np.uint64(family.prime))
    return t[0], int(l1[0])


def hash_slow(family: CoveringFamily, q: BitVector) -> np.ndarray:
    """
    bcLSH: evaluate every g_v separately with the universal hash.

    :param family: Covering family
    :param q: Query with dims == family.dims
    :return: HashBatch, uint64 array of length L (index v-1 holds g_v)
    """
    indptr, ones = _query_csr(family, q)
    return _slow_rows(indptr, ones, family.mapping, family.seeds, family.table_count,
                      np.uint64(family.prime))[0]


def hash_fast(family: CoveringFamily, q: BitVector) -> np.ndarray:
    """
    fcLSH: sketch, modular FHT, halve, drop the zero row.

    Fuses sketch() and batch_hash_kernel() into one compiled pass.

    :param family: Covering family
    :param q: Query with dims == family.dims
    :return: HashBatch equal to hash_slow(family, q)
    """
    indptr, ones = _query_csr(family, q)
    return _fast_rows(indptr, ones, family.mapping, family.seeds, family.code_order,
                      np.uint64(family.prime))[0]


def hash_rows(family: CoveringFamily, bits: np.ndarray, fast: bool = True,
              chunk_rows: int | None = None) -> np.ndarray:
    """
    Hash every row of a 0/1 matrix; used to build indexes.

    :param family: Covering family
    :param bits: uint8 array of shape (n, d)
    :param fast: fcLSH path when True, bcLSH path otherwise
    :param chunk_rows: Rows per compiled call (bounds the CSR size)
    :return: uint64 array of shape (n, L)
    """
    check_same_dims(family.dims, bits.shape[1], "family and data")
    chunk_rows = chunk_rows or get_settings().chunk_rows
    p = np.uint64(family.prime)
    out = np.empty((bits.shape[0], family.table_count), dtype=np.uint64)
    for start in range(0, bits.shape[0], chunk_rows):
        indptr, indices = ones_csr(bits[start:start + chunk_rows])
        if fast:
            out[start:start + chunk_rows] = _fast_rows(indptr, indices, family.mapping, family.seeds,
                                                       family.code_order, p)
        else:
            out[start:start + chunk_rows] = _slow_rows(indptr, indices, family.mapping, family.seeds,
                                                       family.table_count, p)
    return out


def collision_count(family: CoveringFamily, x: BitVector, y: BitVector) -> int:
    """
    Number of g_v with g_v AND x == g_v AND y, compared on the masks themselves.

    :param family: Covering family
    :param x: First point
    :param y: Second point
    :return: Count in [0, L]
    """
    check_same_dims(x.dims, y.dims)
    check_same_dims(family.dims, x.dims, "family and points")
    return int(collision_counts(family, (x ^ y).to_bits()[None, :])[0])


def collision_counts(family: CoveringFamily, diffs: np.ndarray) -> np.ndarray:
    """
    Vectorised collision_count for many difference patterns z = x XOR y.

    :param family: Covering family
    :param diffs: uint8 array of shape (pairs, d)
    :return: int64 array of counts
    """
    masks = family.masks().astype(np.int64)
    touched = np.asarray(diffs, dtype=np.int64) @ masks.T
    return (touched == 0).sum(axis=1)
