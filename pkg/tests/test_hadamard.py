import numpy as np
import pytest

from conftest import C78
from fclsh.errors import ResourceError, UsageError
from fclsh.hadamard import batch_hash_kernel, fht_in_place, fht_mod, generate_code_matrix


def sylvester(m):
    h = np.array([[1]], dtype=np.int64)
    for _ in range(m):
        h = np.block([[h, h], [h, -h]])
    return h


def test_printed_matrix_without_zero_row():
    c = generate_code_matrix(3)
    assert ["".join(map(str, row)) for row in c.without_zero_row()] == C78
    assert str(c.row(1)) == "01010101"
    assert str(c.row(3)) == "01100110"


def test_code_matrix_structure():
    for m in range(1, 7):
        c = generate_code_matrix(m).to_bits()
        assert not c[0].any()
        np.testing.assert_array_equal(c[1:].sum(axis=1), np.full(2**m - 1, 2 ** (m - 1)))
        np.testing.assert_array_equal(c, c.T)
        np.testing.assert_array_equal(c, (1 - sylvester(m)) // 2)


def test_code_matrix_rows_are_dot_products_mod_two():
    m = 4
    c = generate_code_matrix(m).to_bits()
    for v in range(2**m):
        for i in range(2**m):
            dot = sum(((v >> b) & 1) * ((i >> b) & 1) for b in range(m)) % 2
            assert c[v, i] == dot


def test_code_matrix_limits():
    with pytest.raises(UsageError):
        generate_code_matrix(0)
    with pytest.raises(ResourceError):
        generate_code_matrix(30)


def test_fht_examples():
    np.testing.assert_array_equal(fht_in_place(np.array([1, 0, 0, 0])), [1, 1, 1, 1])
    np.testing.assert_array_equal(fht_in_place(np.array([1, 1, 1, 1])), [4, 0, 0, 0])
    np.testing.assert_array_equal(fht_in_place(np.array([1, 2, 3, 4])), [10, -2, -4, 0])


def test_fht_rejects_bad_length():
    with pytest.raises(UsageError):
        fht_in_place(np.array([1, 2, 3]))


def test_fht_matches_matrix_and_is_an_involution(rng):
    for m in range(0, 7):
        h = sylvester(m)
        for _ in range(30):
            v = rng.integers(-1000, 1000, size=2**m)
            out = fht_in_place(v.copy())
            np.testing.assert_array_equal(out, h @ v)
            np.testing.assert_array_equal(fht_in_place(out), (2**m) * v)
    v = rng.integers(-5, 5, size=2**10)
    np.testing.assert_array_equal(fht_in_place(fht_in_place(v.copy())), (2**10) * v)


def test_fht_handles_strided_input():
    v = np.arange(16, dtype=np.int64).reshape(2, 8)[:, ::2]
    expected = sylvester(2) @ np.array([0, 2, 4, 6])
    fht_in_place(v)
    np.testing.assert_array_equal(v[0], expected)


def test_fht_mod_examples():
    np.testing.assert_array_equal(fht_mod([1, 0, 0, 0], 7), [1, 1, 1, 1])
    np.testing.assert_array_equal(fht_mod([1, 1, 1, 1], 3), [1, 0, 0, 0])
    np.testing.assert_array_equal(fht_mod([1, 2, 3, 4], 5), [0, 3, 1, 0])


def test_fht_mod_rejects_bad_primes():
    for p in (2, 4, 9, 1 << 63):
        with pytest.raises(UsageError):
            fht_mod([1, 0], p)


def test_fht_mod_agrees_with_exact_transform_for_large_prime(rng):
    p = (1 << 61) - 1
    for m in range(1, 8):
        v = rng.integers(0, p, size=2**m, dtype=np.uint64)
        exact = fht_in_place(v.astype(object))
        np.testing.assert_array_equal(fht_mod(v, p), np.array([x % p for x in exact], dtype=np.uint64))


def test_batch_hash_kernel_examples():
    np.testing.assert_array_equal(batch_hash_kernel(np.array([0, 0, 1, 1]), 2, 101), [0, 1, 2, 1])
    np.testing.assert_array_equal(batch_hash_kernel(np.zeros(8, dtype=np.int64), 0, 101), np.zeros(8))


def test_batch_hash_kernel_all_ones_query():
    for r in range(1, 5):
        size = 2 ** (r + 1)
        h = batch_hash_kernel(np.ones(size, dtype=np.int64), size, 1009)
        np.testing.assert_array_equal(h[1:], np.full(size - 1, 2**r % 1009))


def test_batch_hash_kernel_matches_direct_universal_hash(rng):
    for m in range(1, 7):
        c = generate_code_matrix(m).to_bits().astype(object)
        for p in (3, 101, (1 << 61) - 1):
            b = [int(x) for x in rng.integers(0, p, size=2**m, dtype=np.uint64)]
            q = rng.integers(0, 2, size=2**m)
            t = np.array([bi * qi % p for bi, qi in zip(b, q)], dtype=np.uint64)
            l1 = sum(bi * qi for bi, qi in zip(b, q)) % p
            expected = [sum(b[i] * q[i] * c[v, i] for i in range(2**m)) % p for v in range(2**m)]
            np.testing.assert_array_equal(batch_hash_kernel(t, l1, p), np.array(expected, dtype=np.uint64))
