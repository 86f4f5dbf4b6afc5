"""
Modular arithmetic on uint64 for primes 3 <= P < 2^63.

Hashing only ever needs sums of seed values, the FHT butterfly and a
division by two, so every kernel here is built from add, sub and halve.
a + b never wraps because both operands are below P < 2^63.
"""

import numpy as np
from numba import njit
from sympy import isprime

from .errors import UsageError

ZERO = np.uint64(0)
ONE = np.uint64(1)

PRIME_LIMIT = 1 << 63


def check_prime(p: int) -> np.uint64:
    """
    Validate a hashing prime and return it as uint64.

    :param p: Odd prime below 2^63
    :return: p as numpy uint64
    """
    p = int(p)
    if p <= 2 or p % 2 == 0:
        raise UsageError(f"P must be an odd prime, got {p}")
    if p >= PRIME_LIMIT:
        raise UsageError(f"P must be below 2^63, got {p}")
    if not isprime(p):
        raise UsageError(f"P is not prime: {p}")
    return np.uint64(p)


def reduce_array(values, p: int) -> np.ndarray:
    """Reduce arbitrary (possibly negative or huge) integers mod p into uint64."""
    arr = np.asarray(values)
    flat = [int(x) % int(p) for x in arr.reshape(-1)]
    return np.array(flat, dtype=np.uint64).reshape(arr.shape)


@njit(cache=True, inline="always")
def addmod(a, b, p):
    s = a + b
    if s >= p:
        s -= p
    return s


@njit(cache=True, inline="always")
def submod(a, b, p):
    s = a + (p - b)
    if s >= p:
        s -= p
    return s


@njit(cache=True, inline="always")
def halvemod(x, p):
    if x & ONE:
        return (x + p) >> ONE
    return x >> ONE


@njit(cache=True)
def fht_mod_1d(t, p):
    """In-place Sylvester butterfly mod p on a power-of-two length uint64 array."""
    length = t.shape[0]
    h = 1
    while h < length:
        for i in range(0, length, 2 * h):
            for j in range(i, i + h):
                a = t[j]
                b = t[j + h]
                t[j] = addmod(a, b, p)
                t[j + h] = submod(a, b, p)
        h *= 2


@njit(cache=True)
def fht_mod_rows(rows, p):
    for r in range(rows.shape[0]):
        fht_mod_1d(rows[r], p)


@njit(cache=True)
def halve_difference_rows(rows, l1, p):
    """rows[r, v] <- (l1[r] - rows[r, v]) / 2 mod p, in place."""
    for r in range(rows.shape[0]):
        for v in range(rows.shape[1]):
            rows[r, v] = halvemod(submod(l1[r], rows[r, v], p), p)


@njit(cache=True)
def parity(x):
    x ^= x >> 32
    x ^= x >> 16
    x ^= x >> 8
    x ^= x >> 4
    x ^= x >> 2
    x ^= x >> 1
    return x & 1
