"""
Multi-index hashing: split every vector into m substrings, index each
substring exactly, and probe every substring value within floor(r / m) of
the query's substring. By pigeonhole any point within r matches one part.
"""

import logging
import math
import threading
import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np
from numba import njit

from .bitvectors import WORD_BITS, BitVector, Dataset, pack_bits
from .config import get_settings
from .errors import ResourceError, UsageError, check_same_dims
from .index import DedupBitmap, QueryReport
from .transform import split_bounds

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class MihIndex:
    """Per-substring sorted key arrays with matching point ids."""

    dataset: Dataset
    bounds: list
    keys: list
    ids: list
    _local: threading.local = field(default_factory=threading.local, repr=False)

    @property
    def parts(self) -> int:
        return len(self.bounds)

    def part_widths(self) -> list:
        return [stop - start for start, stop in self.bounds]

    def bitmap(self) -> DedupBitmap:
        bitmap = getattr(self._local, "bitmap", None)
        if bitmap is None:
            bitmap = DedupBitmap(self.dataset.n)
            self._local.bitmap = bitmap
        return bitmap

    def stats(self) -> dict:
        return {
            "method": "mih",
            "n": self.dataset.n,
            "dims": self.dataset.dims,
            "parts": self.parts,
            "widths": self.part_widths(),
            "postings": int(sum(i.size for i in self.ids)),
            "distinct_keys": [int(np.unique(k).size) for k in self.keys],
        }


def default_parts(d: int, n: int) -> int:
    """ceil(d / log2 n), at least one part."""
    if n < 2:
        return 1
    return max(1, min(d, math.ceil(d / math.log2(n))))


def substring_keys(bits: np.ndarray, bounds: list) -> list:
    """
    Integer value of each substring; bit j of a part is bit j of its key.

    :param bits: uint8 array of shape (rows, d)
    :param bounds: (start, stop) pairs, each at most 64 wide
    :return: One uint64 array of length rows per part
    """
    return [pack_bits(bits[:, start:stop])[:, 0] for start, stop in bounds]


def build_mih(dataset: Dataset, m: int | None = None) -> MihIndex:
    """
    Build m exact substring tables.

    :param dataset: Points
    :param m: Number of substrings (ceil(d / log2 n) when None)
    :return: MihIndex
    """
    dataset.require_points()
    d = dataset.dims
    m = default_parts(d, dataset.n) if m is None else m
    if not 1 <= m <= d:
        raise UsageError(f"MIH needs 1 <= m <= d, got m={m}, d={d}")
    bounds = split_bounds(d, m)
    widest = max(stop - start for start, stop in bounds)
    if widest > WORD_BITS:
        raise UsageError(f"substrings are {widest} bits wide; use at least {math.ceil(d / WORD_BITS)} parts")

    keys, ids = [], []
    for part in substring_keys(dataset.bits(), bounds):
        order = np.argsort(part, kind="stable")
        keys.append(part[order])
        ids.append(order.astype(np.int64))
    logger.info("built MIH index: n=%d d=%d m=%d", dataset.n, d, m)
    return MihIndex(dataset, bounds, keys, ids)


def ball_size(dims: int, radius: int) -> int:
    return sum(math.comb(dims, i) for i in range(min(radius, dims) + 1))


def _check_ball(dims: int, radius: int, budget: int | None) -> None:
    if radius < 0:
        raise UsageError(f"radius must be >= 0, got {radius}")
    budget = get_settings().ball_budget if budget is None else budget
    size = ball_size(dims, radius)
    if size > budget:
        raise ResourceError(f"Hamming ball of {size} points exceeds the budget {budget}; prefer a linear scan")


def enumerate_ball(center: BitVector, radius: int, budget: int | None = None) -> list:
    """
    Every vector within Hamming distance radius of center, by increasing distance.

    :param center: Center of the ball
    :param radius: 0 <= radius <= center.dims
    :param budget: Largest ball to enumerate
    :return: List of BitVectors
    """
    if radius > center.dims:
        raise UsageError(f"radius {radius} exceeds dims {center.dims}")
    _check_ball(center.dims, radius, budget)
    bits = center.to_bits()
    ball = []
    for weight in range(radius + 1):
        for flip in combinations(range(center.dims), weight):
            point = bits.copy()
            point[list(flip)] ^= 1
            ball.append(BitVector.from_bits(point))
    return ball


@lru_cache(maxsize=64)
def flip_masks(width: int, radius: int) -> np.ndarray:
    """
    XOR masks of weight 0..radius over width bits, width <= 64.

    :return: Read-only uint64 array
    """
    masks = [np.zeros(1, dtype=np.uint64)]
    for weight in range(1, min(radius, width) + 1):
        flips = np.array(list(combinations(range(width), weight)), dtype=np.uint64)
        masks.append(np.bitwise_or.reduce(np.left_shift(np.uint64(1), flips), axis=1))
    out = np.concatenate(masks)
    out.flags.writeable = False
    return out


@njit(cache=True)
def _lookup(keys, ids, probes):
    lo = np.searchsorted(keys, probes, side="left")
    hi = np.searchsorted(keys, probes, side="right")
    total = 0
    for k in range(probes.shape[0]):
        total += hi[k] - lo[k]
    out = np.empty(total, dtype=np.int64)
    pos = 0
    for k in range(probes.shape[0]):
        for j in range(lo[k], hi[k]):
            out[pos] = ids[j]
            pos += 1
    return out


def query_mih(index: MihIndex, q: BitVector, r: int, budget: int | None = None) -> tuple:
    """
    Exact r-NN: probe each part's ball of radius floor(r / m), then verify.

    :param index: MihIndex
    :param q: Query
    :param r: Radius
    :param budget: Ball budget per part
    :return: (sorted int64 id array, QueryReport)
    """
    check_same_dims(index.dataset.dims, q.dims, "index and query")
    if r < 0:
        raise UsageError(f"radius must be >= 0, got {r}")
    part_radius = r // index.parts
    report = QueryReport()

    started = time.perf_counter()
    query_keys = substring_keys(q.to_bits()[None, :], index.bounds)
    probes = []
    for (start, stop), key in zip(index.bounds, query_keys):
        _check_ball(stop - start, part_radius, budget)
        probes.append(np.sort(key[0] ^ flip_masks(stop - start, part_radius)))
    report.time_s1 = time.perf_counter() - started

    started = time.perf_counter()
    bitmap = index.bitmap()
    bitmap.start()
    fresh = []
    for keys, ids, probe in zip(index.keys, index.ids, probes):
        postings = _lookup(keys, ids, probe)
        report.collisions += int(postings.size)
        fresh.append(bitmap.add(postings))
    candidates = np.concatenate(fresh)
    report.candidates = int(candidates.size)
    report.time_s2 = time.perf_counter() - started

    started = time.perf_counter()
    distances = index.dataset.distances_to(q, candidates)
    found = np.sort(candidates[distances <= r])
    report.found = int(found.size)
    report.time_s3 = time.perf_counter() - started
    return found, report
