import numpy as np
import pytest

from fclsh.bitvectors import Dataset
from fclsh.datafiles import TRUTH_COLUMNS, truth_sets
from fclsh.errors import DataError, UsageError
from fclsh.workloads import (THRESHOLD, binarize, distance_histogram, gen_synthetic, holdout_queries, oracle_scan,
                             read_vectors)


def test_planted_points_sit_at_their_distances(planted_workload):
    dataset, queries, truth = planted_workload
    assert dataset.n == 3000 and dataset.dims == 128 and queries.n == 10
    assert list(truth.columns) == TRUTH_COLUMNS
    for qid, q in enumerate(queries):
        distances = dataset.distances_to(q)
        counts = np.bincount(distances[distances <= 6], minlength=7)
        # uniform background points land near 64, never within 6
        np.testing.assert_array_equal(counts[1:], [1, 1, 1, 1, 1, 2])
        assert set(truth[truth["query_id"] == qid]["point_id"]) == set(np.flatnonzero(distances <= 9).tolist())


def test_same_seed_same_workload():
    a = gen_synthetic(500, 64, 3, {2: 2}, seed=4)
    b = gen_synthetic(500, 64, 3, {2: 2}, seed=4)
    c = gen_synthetic(500, 64, 3, {2: 2}, seed=5)
    np.testing.assert_array_equal(a[0].words, b[0].words)
    np.testing.assert_array_equal(a[1].words, b[1].words)
    assert a[2].equals(b[2])
    assert not np.array_equal(a[0].words, c[0].words)


def test_gen_synthetic_errors():
    with pytest.raises(UsageError):
        gen_synthetic(10, 32, 5, {1: 3})
    with pytest.raises(UsageError):
        gen_synthetic(100, 32, 0)
    with pytest.raises(UsageError):
        gen_synthetic(100, 32, 2, {40: 1})


def test_hyperplane_codes_depend_only_on_direction(rng):
    vectors = rng.standard_normal((20, 10))
    codes = binarize(vectors, bits=64, seed=3)
    assert codes.dims == 64 and codes.n == 20
    np.testing.assert_array_equal(binarize(3.5 * vectors, bits=64, seed=3).words, codes.words)
    flipped = binarize(-vectors, bits=64, seed=3).bits()
    np.testing.assert_array_equal(flipped, 1 - codes.bits())


def test_identical_rows_get_identical_codes(rng):
    vectors = rng.standard_normal((5, 8))
    vectors[4] = vectors[1]
    codes = binarize(vectors, bits=32, seed=0)
    assert codes[1] == codes[4]


def test_threshold_mode():
    codes = binarize(np.array([[0.5, -1.0, 2.0], [0.0, 0.2, 0.1]]), mode=THRESHOLD, threshold=0.1)
    assert [str(v) for v in codes] == ["101", "010"]


def test_binarize_errors():
    with pytest.raises(DataError):
        binarize(np.array([[1.0, np.nan]]), bits=8)
    with pytest.raises(UsageError):
        binarize(np.ones((2, 2)))
    with pytest.raises(UsageError):
        binarize(np.ones((2, 2)), bits=4, mode="median")


def test_read_vectors_formats(tmp_path):
    matrix = np.arange(6, dtype=np.float32).reshape(2, 3)
    np.save(tmp_path / "v.npy", matrix)
    np.testing.assert_array_equal(read_vectors(str(tmp_path / "v.npy")), matrix)

    records = np.hstack([np.full((2, 1), 3, dtype="<i4"), matrix.view("<i4")])
    records.tofile(tmp_path / "v.fvecs")
    np.testing.assert_array_equal(read_vectors(str(tmp_path / "v.fvecs")), matrix)

    (tmp_path / "v.csv").write_text("0,1,2\n3,4,5\n")
    np.testing.assert_array_equal(read_vectors(str(tmp_path / "v.csv")), matrix)

    with pytest.raises(UsageError):
        read_vectors(str(tmp_path / "missing.npy"))


def test_holdout_queries(rng):
    dataset = Dataset.from_bits(rng.integers(0, 2, size=(40, 16)))
    rest, queries = holdout_queries(dataset, 5, seed=1)
    assert rest.n == 35 and queries.n == 5
    rows = sorted(map(tuple, np.vstack([rest.words, queries.words]).tolist()))
    assert rows == sorted(map(tuple, dataset.words.tolist()))
    with pytest.raises(UsageError):
        holdout_queries(dataset, 40)


def test_oracle_scan_edges(rng):
    dataset = Dataset.from_bits(rng.integers(0, 2, size=(30, 12)))
    queries = Dataset.from_bits(rng.integers(0, 2, size=(4, 12)))
    everything = oracle_scan(dataset, queries, 12)
    assert len(everything) == 30 * 4
    exact = oracle_scan(dataset, dataset.subset([7]), 0)
    assert 7 in exact["point_id"].tolist()
    assert (exact["distance"] == 0).all()
    sets = truth_sets(everything, 3, 4)
    assert all(all(dataset.distances_to(q, np.array(sorted(s))) <= 3) for q, s in zip(queries, sets) if s)


def test_distance_histogram_counts_every_pair(planted_workload):
    dataset, queries, _ = planted_workload
    hist = distance_histogram(dataset, queries)
    assert hist["count"].sum() == dataset.n * queries.n
    assert len(hist) == dataset.dims + 1
    sampled = distance_histogram(dataset, queries, sample=100, seed=2)
    assert sampled["count"].sum() == 100 * queries.n
