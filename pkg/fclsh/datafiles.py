"""
On-disk containers: DatasetFile (binary and text) and ground-truth CSV.

Binary layout: b"FCL1", little-endian u64 n, little-endian u64 d, then n rows
of ceil(d/8) bytes with bit j at byte j // 8, offset j % 8, padding zero.
"""

import logging
import os
import struct

import numpy as np
import pandas as pd

from .bitvectors import Dataset, MAX_DIMS, pack_bits
from .errors import DataError, UsageError

logger = logging.getLogger(__name__)

MAGIC = b"FCL1"
_HEADER = struct.Struct("<4sQQ")

TRUTH_COLUMNS = ["query_id", "point_id", "distance"]


def _require_file(path: str) -> None:
    if not os.path.isfile(path):
        raise UsageError(f"no such file: {path}")


def row_bytes(dims: int) -> int:
    return (dims + 7) // 8


def write_dataset(dataset: Dataset, path: str, text: bool = False) -> None:
    """
    Write a dataset in the binary format, or as '0'/'1' lines when text=True.

    :param dataset: Points to write
    :param path: Destination file
    :param text: Use the plain-text alternate
    """
    bits = dataset.bits()
    if text:
        table = bytes.maketrans(b"\x00\x01", b"01")
        with open(path, "w", encoding="ascii") as f:
            for row in bits:
                f.write(row.tobytes().translate(table).decode("ascii"))
                f.write("\n")
    else:
        packed = np.packbits(bits, axis=1, bitorder="little")
        with open(path, "wb") as f:
            f.write(_HEADER.pack(MAGIC, dataset.n, dataset.dims))
            f.write(np.ascontiguousarray(packed).tobytes())
    logger.debug("wrote %d x %d dataset to %s", dataset.n, dataset.dims, path)


def read_dataset(path: str) -> Dataset:
    """
    Read a dataset, detecting the binary magic or falling back to text rows.

    :param path: Source file
    :return: Dataset
    """
    _require_file(path)
    with open(path, "rb") as f:
        head = f.read(len(MAGIC))
    if head == MAGIC:
        return _read_binary(path)
    return _read_text(path)


def _read_binary(path: str) -> Dataset:
    with open(path, "rb") as f:
        header = f.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise DataError(f"{path}: truncated header")
        _, n, dims = _HEADER.unpack(header)
        if dims < 1 or dims > MAX_DIMS:
            raise DataError(f"{path}: unsupported dims {dims}")
        width = row_bytes(dims)
        payload = f.read()
    if len(payload) != n * width:
        raise DataError(f"{path}: expected {n * width} payload bytes, found {len(payload)}")
    rows = np.frombuffer(payload, dtype=np.uint8).reshape(n, width)
    tail = dims % 8
    if tail and n and np.any(rows[:, -1] >> tail):
        raise DataError(f"{path}: non-zero padding bits")
    bits = np.unpackbits(rows, axis=1, bitorder="little")[:, :dims]
    logger.debug("read %d x %d binary dataset from %s", n, dims, path)
    return Dataset(pack_bits(bits), dims)


def _read_text(path: str) -> Dataset:
    try:
        with open(path, "r", encoding="ascii") as f:
            lines = [line.strip() for line in f if line.strip()]
    except UnicodeDecodeError:
        raise DataError(f"{path}: neither an FCL1 file nor '0'/'1' text") from None
    if not lines:
        raise DataError(f"{path}: empty dataset")
    dims = len(lines[0])
    if any(len(line) != dims for line in lines):
        raise DataError(f"{path}: rows of unequal length")
    raw = np.frombuffer("".join(lines).encode("ascii"), dtype=np.uint8).reshape(len(lines), dims)
    if np.any((raw != ord("0")) & (raw != ord("1"))):
        raise DataError(f"{path}: rows must contain only '0' and '1'")
    return Dataset.from_bits(raw - ord("0"))


def write_ground_truth(frame: pd.DataFrame, path: str) -> None:
    frame.loc[:, TRUTH_COLUMNS].to_csv(path, index=False)


def read_ground_truth(path: str) -> pd.DataFrame:
    """
    Read a (query_id, point_id, distance) CSV.

    :param path: Source file
    :return: DataFrame with integer columns
    """
    _require_file(path)
    frame = pd.read_csv(path)
    missing = set(TRUTH_COLUMNS) - set(frame.columns)
    if missing:
        raise DataError(f"{path}: missing columns {sorted(missing)}")
    return frame.astype({c: "int64" for c in TRUTH_COLUMNS})


def truth_sets(frame: pd.DataFrame, r: int, query_count: int) -> list[set]:
    """
    Per-query id sets within distance r.

    :param frame: Ground-truth frame (may hold a larger radius)
    :param r: Radius
    :param query_count: Number of queries, so queries without neighbours get an empty set
    :return: List of sets indexed by query id
    """
    sets = [set() for _ in range(query_count)]
    near = frame[frame["distance"] <= r]
    for qid, pid in zip(near["query_id"].to_numpy(), near["point_id"].to_numpy()):
        sets[int(qid)].add(int(pid))
    return sets
