"""
Sylvester-ordered Hadamard codes and the fast Hadamard transform.

Ordering convention: C[v][i] = parity(popcount(v AND i)), i.e. C = (1 - H) / 2
entry-wise for the Sylvester matrix H[v][i] = (-1)^popcount(v AND i).
"""

import logging

import numpy as np

from .bitvectors import BitVector, pack_bits
from .errors import ResourceError, UsageError
from .modular import check_prime, fht_mod_rows, halve_difference_rows, reduce_array

logger = logging.getLogger(__name__)

# a dense code matrix holds 4^order_log bits
DENSE_ORDER_LIMIT = 14


def is_power_of_two(n: int) -> bool:
    return n >= 1 and not n & (n - 1)


def _check_length(n: int) -> int:
    if not is_power_of_two(n):
        raise UsageError(f"length must be a power of two, got {n}")
    return n.bit_length() - 1


def code_bits(order_log: int, rows: np.ndarray | None = None) -> np.ndarray:
    """
    Code matrix entries as uint8, optionally only for selected rows.

    :param order_log: m, the code length is 2^m
    :param rows: Row indices to compute (all 2^m rows when None)
    :return: uint8 array of shape (len(rows), 2^m)
    """
    size = 1 << order_log
    rows = np.arange(size, dtype=np.int64) if rows is None else np.asarray(rows, dtype=np.int64)
    cols = np.arange(size, dtype=np.int64)
    return (np.bitwise_count(rows[:, None] & cols[None, :]) & 1).astype(np.uint8)


class HadamardCodeMatrix:
    """
    The 2^m x 2^m binary Hadamard code matrix, row 0 included.

    Usage Example:
        c = generate_code_matrix(3)
        print(c.row(3))            # 01100110
        print(c.without_zero_row().shape)
    """

    def __init__(self, order_log: int, bits: np.ndarray):
        self.order_log = order_log
        self.size = 1 << order_log
        bits = np.asarray(bits, dtype=np.uint8)
        bits.flags.writeable = False
        self._bits = bits

    def row(self, v: int) -> BitVector:
        """
        Return Had(v) as a BitVector of dims 2^m.

        :param v: Row index in [0, 2^m)
        :return: BitVector
        """
        if not 0 <= v < self.size:
            raise UsageError(f"row {v} outside [0, {self.size})")
        return BitVector(pack_bits(self._bits[v]), self.size)

    def to_bits(self) -> np.ndarray:
        return self._bits

    def without_zero_row(self) -> np.ndarray:
        """The (2^m - 1) x 2^m family matrix used for hashing."""
        return self._bits[1:]


def generate_code_matrix(order_log: int) -> HadamardCodeMatrix:
    """
    Generate the Hadamard code matrix of length 2^order_log.

    :param order_log: m >= 1
    :return: HadamardCodeMatrix
    """
    if order_log < 1:
        raise UsageError(f"order_log must be >= 1, got {order_log}")
    if order_log > DENSE_ORDER_LIMIT:
        raise ResourceError(f"a dense code matrix of order 2^{order_log} exceeds the memory budget")
    return HadamardCodeMatrix(order_log, code_bits(order_log))


def fht_in_place(v: np.ndarray) -> np.ndarray:
    """
    Exact Sylvester transform H v along the last axis, in len * log2(len) add/sub steps.

    Integer dtypes are transformed in place; use dtype=object for values that
    could overflow int64.

    :param v: Array whose last axis has power-of-two length
    :return: The same array, transformed
    """
    if not isinstance(v, np.ndarray):
        v = np.array(v, dtype=np.int64)
    n = v.shape[-1]
    _check_length(n)
    lead = v.shape[:-1]
    work = v if v.flags.c_contiguous else np.ascontiguousarray(v)
    h = 1
    while h < n:
        view = work.reshape(*lead, n // (2 * h), 2, h)
        a = view[..., 0, :].copy()
        view[..., 0, :] += view[..., 1, :]
        view[..., 1, :] = a - view[..., 1, :]
        h *= 2
    if work is not v:
        v[...] = work
    return v


def fht_mod(v, p: int) -> np.ndarray:
    """
    FHT reduced mod p, computed entirely in modular arithmetic.

    :param v: Integer vector (or batch of rows) of power-of-two length
    :param p: Odd prime below 2^63
    :return: New uint64 array equal to fht_in_place(v) mod p
    """
    pu = check_prime(p)
    arr = np.asarray(v)
    _check_length(arr.shape[-1])
    if arr.dtype == np.uint64 and (arr.size == 0 or arr.max() < pu):
        work = np.array(arr, dtype=np.uint64)
    else:
        work = reduce_array(arr, int(p))
    rows = work.reshape(-1, work.shape[-1])
    fht_mod_rows(rows, pu)
    return rows.reshape(work.shape)


def batch_hash_kernel(t, l1_norm, p: int) -> np.ndarray:
    """
    h[v] = inv2 * (l1_norm - FHT(t)[v]) mod p for every code row v.

    h[0] belongs to the all-zero code row; callers drop it.

    :param t: Sketch vector (or rows), entries reduced mod p
    :param l1_norm: The l1 norm of the seeded query mod p (scalar or one per row)
    :param p: Odd prime below 2^63
    :return: uint64 array shaped like t
    """
    pu = check_prime(p)
    transformed = fht_mod(t, p)
    rows = transformed.reshape(-1, transformed.shape[-1])
    l1 = reduce_array(np.broadcast_to(np.asarray(l1_norm, dtype=object), (rows.shape[0],)), int(p))
    halve_difference_rows(rows, l1, pu)
    return rows.reshape(transformed.shape)
