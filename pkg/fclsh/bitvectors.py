"""
Bit-packed binary vectors and the in-memory dataset store.

Bit i of a vector lives in 64-bit word i // 64 at offset i % 64. All bits at
positions >= dims are zero.
"""

import logging
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, UsageError, check_same_dims

logger = logging.getLogger(__name__)

WORD_BITS = 64
MAX_DIMS = 1 << 20


def word_count(dims: int) -> int:
    return (dims + WORD_BITS - 1) // WORD_BITS


def _check_dims(dims: int) -> int:
    dims = int(dims)
    if dims < 1 or dims > MAX_DIMS:
        raise UsageError(f"dims must be in [1, {MAX_DIMS}], got {dims}")
    return dims


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """
    Pack a 0/1 array of shape (..., d) into uint64 words of shape (..., W).

    :param bits: Array of zeros and ones, last axis is the bit index
    :return: uint64 array with canonical zero padding
    """
    bits = np.asarray(bits, dtype=np.uint8)
    dims = bits.shape[-1]
    pad = word_count(dims) * WORD_BITS - dims
    if pad:
        widths = [(0, 0)] * (bits.ndim - 1) + [(0, pad)]
        bits = np.pad(bits, widths)
    packed = np.packbits(bits, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def unpack_words(words: np.ndarray, dims: int) -> np.ndarray:
    """
    Inverse of pack_bits.

    :param words: uint64 array of shape (..., W)
    :param dims: Number of logical bits d
    :return: uint8 array of shape (..., d)
    """
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, axis=-1, bitorder="little")[..., :dims]


def _padding_mask(dims: int) -> np.uint64:
    tail = dims % WORD_BITS
    if tail == 0:
        return np.uint64(0)
    return np.uint64(~((1 << tail) - 1) & 0xFFFFFFFFFFFFFFFF)


class BitVector:
    """
    An immutable point in {0,1}^d.

    Usage Example:
        x = BitVector.from_string("0011")
        q = BitVector.from_string("1010")
        print(hamming_distance(x, q))   # 2
    """

    __slots__ = ("_words", "_dims")

    def __init__(self, words: np.ndarray, dims: int):
        """
        Wrap packed words. The words are copied and frozen.

        :param words: uint64 array of length ceil(dims / 64)
        :param dims: Number of logical bits
        """
        dims = _check_dims(dims)
        words = np.array(words, dtype=np.uint64).reshape(-1)
        if words.shape[0] != word_count(dims):
            raise UsageError(f"{dims} bits need {word_count(dims)} words, got {words.shape[0]}")
        if words[-1] & _padding_mask(dims):
            raise DataError("padding bits beyond dims must be zero")
        words.flags.writeable = False
        self._words = words
        self._dims = dims

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        if isinstance(bits, np.ndarray):
            arr = (bits != 0).astype(np.uint8).reshape(-1)
        else:
            arr = np.fromiter((1 if b else 0 for b in bits), dtype=np.uint8)
        return cls(pack_bits(arr), arr.shape[0])

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """
        Parse a string of '0'/'1' characters; character i is bit i.

        :param text: Bit string such as "00110011"
        :return: BitVector
        """
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise DataError(f"not a bit string: {text!r}")
        return cls.from_bits(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    @classmethod
    def zeros(cls, dims: int) -> "BitVector":
        return cls(np.zeros(word_count(dims), dtype=np.uint64), dims)

    @classmethod
    def ones(cls, dims: int) -> "BitVector":
        return cls.from_bits(np.ones(dims, dtype=np.uint8))

    @property
    def dims(self) -> int:
        return self._dims

    @property
    def words(self) -> np.ndarray:
        return self._words

    def to_bits(self) -> np.ndarray:
        """Return the bits as a uint8 array of length dims."""
        return unpack_words(self._words, self._dims)

    def ones_positions(self) -> np.ndarray:
        return np.flatnonzero(self.to_bits())

    def __len__(self) -> int:
        return self._dims

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self._dims == other._dims and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self._dims, self._words.tobytes()))

    def __xor__(self, other: "BitVector") -> "BitVector":
        check_same_dims(self._dims, other._dims)
        return BitVector(self._words ^ other._words, self._dims)

    def __and__(self, other: "BitVector") -> "BitVector":
        return and_mask(self, other)

    def __str__(self) -> str:
        return self.to_bits().tobytes().translate(bytes.maketrans(b"\x00\x01", b"01")).decode("ascii")

    def __repr__(self) -> str:
        if self._dims <= 64:
            return f"BitVector('{self}')"
        return f"BitVector(dims={self._dims}, popcount={popcount(self)})"


def hamming_distance(a: BitVector, b: BitVector) -> int:
    """
    Number of positions where a and b differ.

    :param a: First vector
    :param b: Second vector, same dims
    :return: Distance in [0, dims]
    """
    check_same_dims(a.dims, b.dims)
    return int(np.bitwise_count(a.words ^ b.words).sum())


def and_mask(v: BitVector, mask: BitVector) -> BitVector:
    """
    Bitwise AND, the covering hash value g_v(x) = g_v AND x.

    :param v: Vector
    :param mask: Mask with the same dims
    :return: New BitVector
    """
    check_same_dims(v.dims, mask.dims)
    return BitVector(v.words & mask.words, v.dims)


def popcount(v: BitVector) -> int:
    return int(np.bitwise_count(v.words).sum())


class Dataset:
    """
    An ordered set S of n points in {0,1}^d; ids are 0..n-1.

    Usage Example:
        ds = Dataset.from_strings(["0011", "1010"])
        print(ds.n, ds.dims)
        print(ds.distances_to(BitVector.from_string("0010")))
    """

    def __init__(self, words: np.ndarray, dims: int):
        """
        :param words: uint64 matrix of shape (n, ceil(dims / 64))
        :param dims: Number of bits per point
        """
        dims = _check_dims(dims)
        words = np.array(words, dtype=np.uint64, ndmin=2)
        if words.shape[1] != word_count(dims):
            raise UsageError(f"{dims} bits need {word_count(dims)} words per row, got {words.shape[1]}")
        if words.shape[0] and np.any(words[:, -1] & _padding_mask(dims)):
            raise DataError("padding bits beyond dims must be zero")
        words.flags.writeable = False
        self._words = words
        self._dims = dims
        self._bits = None

    @classmethod
    def from_bits(cls, bits: np.ndarray) -> "Dataset":
        bits = (np.asarray(bits) != 0).astype(np.uint8)
        if bits.ndim != 2:
            raise UsageError("bit matrix must be two-dimensional")
        return cls(pack_bits(bits), bits.shape[1])

    @classmethod
    def from_vectors(cls, points: Sequence[BitVector]) -> "Dataset":
        if not points:
            raise UsageError("cannot infer dims of an empty point list")
        dims = points[0].dims
        for p in points:
            check_same_dims(dims, p.dims, "dataset points")
        return cls(np.stack([p.words for p in points]), dims)

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "Dataset":
        return cls.from_vectors([BitVector.from_string(r) for r in rows])

    @property
    def n(self) -> int:
        return self._words.shape[0]

    @property
    def dims(self) -> int:
        return self._dims

    @property
    def words(self) -> np.ndarray:
        return self._words

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> BitVector:
        return BitVector(self._words[i], self._dims)

    def __iter__(self):
        for i in range(self.n):
            yield self[i]

    def bits(self) -> np.ndarray:
        """Unpacked (n, d) uint8 matrix, computed once."""
        if self._bits is None:
            bits = unpack_words(self._words, self._dims)
            bits.flags.writeable = False
            self._bits = bits
        return self._bits

    def distances_to(self, q: BitVector, ids: np.ndarray | None = None) -> np.ndarray:
        """
        Hamming distances from q to every point (or to the given ids).

        :param q: Query vector
        :param ids: Optional id array restricting the computation
        :return: int64 array of distances
        """
        check_same_dims(self._dims, q.dims, "dataset and query")
        rows = self._words if ids is None else self._words[ids]
        return np.bitwise_count(rows ^ q.words).sum(axis=1, dtype=np.int64)

    def subset(self, ids: Sequence[int]) -> "Dataset":
        return Dataset(self._words[np.asarray(ids, dtype=np.int64)], self._dims)

    def without(self, ids: Sequence[int]) -> "Dataset":
        keep = np.ones(self.n, dtype=bool)
        keep[np.asarray(ids, dtype=np.int64)] = False
        return Dataset(self._words[keep], self._dims)

    def require_points(self) -> "Dataset":
        if self.n < 1:
            raise UsageError("index construction needs at least one point")
        return self
