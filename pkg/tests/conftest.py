import numpy as np
import pytest

from fclsh.bitvectors import BitVector
from fclsh.workloads import gen_synthetic

# Column indices of the four dimensions in the small worked example, read as
# big-endian binary strings 011, 100, 101, 001.
EXAMPLE_MAPPING = [3, 4, 5, 1]
EXAMPLE_MASKS = ["1011", "1000", "0011", "0110", "1101", "1110", "0101"]

C78 = [
    "01010101",
    "00110011",
    "01100110",
    "00001111",
    "01011010",
    "00111100",
    "01101001",
]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: statistical or acceptance-scale test")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def bv():
    return BitVector.from_string


@pytest.fixture(scope="session")
def planted_workload():
    """Small 128-bit workload with neighbours planted at distances 1..6."""
    return gen_synthetic(3000, 128, 10, {1: 1, 2: 1, 3: 1, 4: 1, 5: 1, 6: 2}, seed=11, truth_radius=9)


def random_bits(rng, rows, dims):
    return rng.integers(0, 2, size=(rows, dims), dtype=np.uint8)


def flip(rng, bits, count):
    out = bits.copy()
    out[rng.choice(bits.shape[0], size=count, replace=False)] ^= 1
    return out
