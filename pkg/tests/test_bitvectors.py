import numpy as np
import pytest

from fclsh.bitvectors import BitVector, Dataset, and_mask, hamming_distance, pack_bits, popcount, unpack_words
from fclsh.errors import DataError, UsageError


def test_hamming_distance_examples(bv):
    assert hamming_distance(bv("0011"), bv("1010")) == 2
    assert hamming_distance(bv("00110001"), bv("00111010")) == 3
    v = bv("0110")
    assert hamming_distance(v, v) == 0


def test_and_mask_examples(bv):
    assert str(and_mask(bv("0110"), bv("0011"))) == "0010"
    assert str(bv("01100110") & bv("00110011")) == "00100010"
    v = bv("1011001")
    assert and_mask(v, BitVector.ones(7)) == v


def test_popcount_examples(bv):
    assert popcount(bv("0011")) == 2
    assert popcount(BitVector.zeros(130)) == 0
    assert popcount(bv("11111111")) == 8


def test_dimension_mismatch_is_usage_error(bv):
    with pytest.raises(UsageError):
        hamming_distance(bv("01"), bv("011"))
    with pytest.raises(UsageError):
        and_mask(bv("01"), bv("011"))


def test_character_i_is_bit_i(bv):
    v = bv("1000000001")
    np.testing.assert_array_equal(v.ones_positions(), [0, 9])
    assert int(v.words[0]) == 1 + (1 << 9)


def test_pack_round_trip_every_width(rng):
    for dims in range(1, 513):
        bits = rng.integers(0, 2, size=(3, dims), dtype=np.uint8)
        words = pack_bits(bits)
        assert words.shape == (3, (dims + 63) // 64)
        np.testing.assert_array_equal(unpack_words(words, dims), bits)


def test_distance_equals_popcount_of_xor_and_triangle(rng):
    for dims in (5, 64, 65, 300):
        a, b, c = (BitVector.from_bits(rng.integers(0, 2, dims)) for _ in range(3))
        assert hamming_distance(a, b) == popcount(a ^ b)
        assert hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c)
        assert hamming_distance(a, b) == hamming_distance(b, a)


def test_dirty_padding_rejected():
    with pytest.raises(DataError):
        BitVector(np.array([1 << 5], dtype=np.uint64), 4)


def test_bad_strings_rejected():
    with pytest.raises(DataError):
        BitVector.from_string("01a1")
    with pytest.raises(DataError):
        BitVector.from_string("")


def test_vectors_are_immutable_and_hashable(bv):
    v = bv("0101")
    with pytest.raises(ValueError):
        v.words[0] = 0
    assert len({v, bv("0101"), bv("0110")}) == 2


def test_dataset_distances_and_subsets(bv):
    ds = Dataset.from_strings(["0011", "1010", "1111"])
    assert ds.n == 3 and ds.dims == 4
    np.testing.assert_array_equal(ds.distances_to(bv("0011")), [0, 2, 2])
    np.testing.assert_array_equal(ds.distances_to(bv("0011"), np.array([2, 0])), [2, 0])
    assert [str(p) for p in ds.without([1])] == ["0011", "1111"]
    assert str(ds.subset([2])[0]) == "1111"
    np.testing.assert_array_equal(ds.bits()[1], [1, 0, 1, 0])


def test_dataset_rejects_mixed_dims(bv):
    with pytest.raises(UsageError):
        Dataset.from_vectors([bv("01"), bv("011")])


def test_empty_dataset_cannot_be_indexed():
    ds = Dataset(np.zeros((0, 1), dtype=np.uint64), 8)
    with pytest.raises(UsageError):
        ds.require_points()
