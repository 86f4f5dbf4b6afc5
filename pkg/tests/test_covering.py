import math

import numpy as np
import pytest

from conftest import C78, EXAMPLE_MAPPING, EXAMPLE_MASKS, flip
from fclsh.bitvectors import BitVector
from fclsh.covering import (GENERAL, SPECIFIC, build_family, collision_count, collision_counts,
                            family_from_mapping, hash_fast, hash_rows, hash_slow, sketch)
from fclsh.errors import ResourceError, UsageError


def masks_as_strings(family):
    return ["".join(map(str, row)) for row in family.masks()]


def test_identity_specific_family_is_the_printed_matrix():
    family = family_from_mapping(range(8), 2)
    assert family.kind == SPECIFIC
    assert family.table_count == 7
    assert masks_as_strings(family) == C78


def test_small_example_masks_pin_big_endian_columns():
    family = family_from_mapping(EXAMPLE_MAPPING, 2)
    assert masks_as_strings(family) == EXAMPLE_MASKS
    assert str(family.mask(4)) == "0110"


def test_little_endian_reading_does_not_reproduce_the_masks():
    little = [int(s[::-1], 2) for s in ("011", "100", "101", "001")]
    assert little == [6, 1, 5, 4]
    assert masks_as_strings(family_from_mapping(little, 2)) != EXAMPLE_MASKS


def test_small_example_single_collision_at_g4(bv, rng):
    seeds = rng.integers(1, (1 << 61) - 1, size=4, dtype=np.uint64)
    family = family_from_mapping(EXAMPLE_MAPPING, 2, seeds=seeds)
    x, q = bv("0011"), bv("1010")
    for fn in (hash_slow, hash_fast):
        equal = np.flatnonzero(fn(family, x) == fn(family, q)) + 1
        np.testing.assert_array_equal(equal, [4])
    assert collision_count(family, x, q) == 1


def test_eight_bit_example_collides_on_third_row_only(bv, rng):
    seeds = rng.integers(1, (1 << 61) - 1, size=8, dtype=np.uint64)
    family = family_from_mapping(range(8), 2, seeds=seeds)
    x, y, q = bv("00110011"), bv("00110001"), bv("00111010")
    np.testing.assert_array_equal(np.flatnonzero(hash_fast(family, x) == hash_fast(family, q)) + 1, [3])
    assert str(family.mask(3) & x) == str(family.mask(3) & q) == "00100010"
    assert collision_count(family, x, q) == 1
    assert collision_count(family, y, q) == 0
    assert collision_count(family, x, x) == family.table_count


def test_fast_hash_small_example():
    family = family_from_mapping(range(4), 1)
    q = BitVector.from_string("0011")
    np.testing.assert_array_equal(hash_fast(family, q), [1, 2, 1])
    np.testing.assert_array_equal(hash_slow(family, q), [1, 2, 1])
    t, l1 = sketch(family, q)
    np.testing.assert_array_equal(t, [0, 0, 1, 1])
    assert l1 == 2


def test_zero_query_hashes_to_zero():
    family = build_family(40, 3, rng=1)
    zero = BitVector.zeros(40)
    assert not hash_fast(family, zero).any()
    assert not hash_slow(family, zero).any()


def test_build_is_deterministic_per_seed():
    a, b, c = build_family(100, 4, rng=9), build_family(100, 4, rng=9), build_family(100, 4, rng=10)
    np.testing.assert_array_equal(a.mapping, b.mapping)
    np.testing.assert_array_equal(a.seeds, b.seeds)
    assert not np.array_equal(a.mapping, c.mapping)


def test_construction_kinds():
    specific = build_family(12, 3, rng=2)
    assert specific.kind == SPECIFIC
    assert np.unique(specific.mapping).size == 12
    np.testing.assert_array_equal(specific.mapping, specific.permutation[:12])
    general = build_family(200, 3, rng=2)
    assert general.kind == GENERAL
    assert general.mapping.min() >= 1 and general.mapping.max() < 16
    assert build_family(2000, 2, rng=2, include_zero_column=True).mapping.min() == 0
    assert (general.seeds < np.uint64(general.prime)).all()


def test_construction_errors():
    with pytest.raises(UsageError):
        build_family(17, 3, kind=SPECIFIC)
    with pytest.raises(UsageError):
        build_family(16, 3, kind=GENERAL)
    with pytest.raises(UsageError):
        build_family(16, 0)
    with pytest.raises(ResourceError):
        build_family(64, 40)
    with pytest.raises(UsageError):
        family_from_mapping([0, 9], 2)


def test_dimension_mismatch():
    family = build_family(10, 2, rng=0)
    with pytest.raises(UsageError):
        hash_fast(family, BitVector.zeros(11))
    with pytest.raises(UsageError):
        hash_slow(family, BitVector.zeros(9))


def test_fast_equals_slow_on_random_pairs(rng):
    for trial in range(60):
        r = int(rng.integers(1, 8))
        d = int(rng.integers(4, 2 ** (r + 1) + 1)) if trial % 2 else int(rng.integers(2 ** (r + 1) + 1, 513))
        family = build_family(d, r, rng=trial)
        for _ in range(5):
            q = BitVector.from_bits(rng.integers(0, 2, d))
            np.testing.assert_array_equal(hash_fast(family, q), hash_slow(family, q))


@pytest.mark.slow
def test_fast_equals_slow_on_ten_thousand_pairs(rng):
    for trial in range(200):
        r = int(rng.integers(1, 8))
        d = int(rng.integers(4, 2 ** (r + 1) + 1)) if trial % 2 else int(rng.integers(2 ** (r + 1) + 1, 513))
        family = build_family(d, r, rng=1000 + trial)
        bits = rng.integers(0, 2, size=(50, d), dtype=np.uint8)
        for row in bits:
            q = BitVector.from_bits(row)
            np.testing.assert_array_equal(hash_fast(family, q), hash_slow(family, q))


def test_batched_hashing_matches_single_queries(rng):
    family = build_family(150, 4, rng=3)
    bits = rng.integers(0, 2, size=(23, 150), dtype=np.uint8)
    fast = hash_rows(family, bits, chunk_rows=7)
    slow = hash_rows(family, bits, fast=False, chunk_rows=5)
    np.testing.assert_array_equal(fast, slow)
    np.testing.assert_array_equal(fast[11], hash_fast(family, BitVector.from_bits(bits[11])))


def test_covering_small_scale(rng):
    for r in range(1, 6):
        for d in (8, 33, 64):
            for seed in range(10):
                kind_d = min(d, 2 ** (r + 1)) if seed % 2 else d
                family = build_family(kind_d, r, rng=seed)
                weights = rng.integers(1, r + 1, size=50)
                diffs = np.zeros((50, kind_d), dtype=np.uint8)
                for row, w in zip(diffs, weights):
                    row[rng.choice(kind_d, size=min(w, kind_d), replace=False)] = 1
                assert (collision_counts(family, diffs) >= 1).all()


@pytest.mark.slow
def test_covering_property_exhaustively_sampled(rng):
    violations = 0
    for r in range(1, 6):
        for seed in range(50):
            d = int(rng.integers(r + 1, 65))
            family = build_family(d, r, rng=1000 * r + seed)
            x = rng.integers(0, 2, size=d, dtype=np.uint8)
            ys = np.stack([flip(rng, x, int(rng.integers(0, r + 1))) for _ in range(200)])
            violations += int((collision_counts(family, ys ^ x) == 0).sum())
    assert violations == 0


def mean_collisions(d, r, distance, families, include_zero_column, rng):
    x = rng.integers(0, 2, size=d, dtype=np.uint8)
    y = flip(rng, x, distance)
    bx, by = BitVector.from_bits(x), BitVector.from_bits(y)
    counts = np.array([collision_count(build_family(d, r, kind=GENERAL, rng=seed,
                                                    include_zero_column=include_zero_column), bx, by)
                       for seed in range(families)])
    return counts.mean(), counts.std() / math.sqrt(families)


@pytest.mark.slow
@pytest.mark.parametrize("d", [64, 128])
@pytest.mark.parametrize("r", [2, 3, 4])
def test_far_pairs_rarely_collide(d, r, rng):
    for distance in range(r + 1, r + 7):
        mean, _ = mean_collisions(d, r, distance, 4000, True, rng)
        assert mean < 1.25 * 2.0 ** (r + 1 - distance)


@pytest.mark.slow
@pytest.mark.parametrize("r", [2, 3, 4])
def test_excluding_zero_column_matches_sharper_expectation(r, rng):
    size = 2 ** (r + 1)
    for distance in range(r + 1, r + 4):
        exact = (size - 1) * ((size / 2 - 1) / (size - 1)) ** distance
        assert exact < (size - 1) * 2.0 ** -distance < 2.0 ** (r + 1 - distance)
        mean, se = mean_collisions(128, r, distance, 4000, False, rng)
        assert abs(mean - exact) < 5 * se + 1e-9
        assert mean < 2.0 ** (r + 1 - distance)


def test_specific_construction_is_within_factor_two_of_optimal():
    for r in range(2, 11):
        tables = 2 ** (r + 1) - 1
        lower = math.comb(2 ** (r + 1), r) / math.comb(2**r, r)
        assert tables < 2 * 2**r
        assert lower > 2**r
