"""Matrix and table serialization: headered CSV and the KFM1 binary format.

CSV files carry a single header row of column names and full-precision
(%.17g) decimal values, so a write/read round trip is exact.  The binary
format is the magic bytes "KFM1", then row and column counts as
little-endian u64, then float64 values row-major, little-endian.
"""

import struct

import numpy as np

from .errors import DataError

MAGIC = b"KFM1"

__all__ = [
    "save_matrix_csv",
    "load_matrix_csv",
    "save_matrix_kfm",
    "load_matrix_kfm",
    "save_labels_csv",
    "load_labels_csv",
    "save_columns_csv",
]


def save_matrix_csv(path, m: np.ndarray, prefix: str = "c") -> None:
    m = np.atleast_2d(np.asarray(m, dtype=np.float64))
    header = ",".join(f"{prefix}{j}" for j in range(m.shape[1]))
    np.savetxt(path, m, fmt="%.17g", delimiter=",", header=header, comments="")


def load_matrix_csv(path) -> np.ndarray:
    try:
        return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=np.float64)
    except ValueError as exc:
        raise DataError(f"{path}: not a readable headered CSV matrix ({exc})") from exc


def save_matrix_kfm(path, m: np.ndarray) -> None:
    m = np.atleast_2d(np.ascontiguousarray(m, dtype=np.float64))
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<QQ", m.shape[0], m.shape[1]))
        f.write(m.astype("<f8").tobytes(order="C"))


def load_matrix_kfm(path) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != MAGIC:
            raise DataError(f"{path}: bad magic bytes {magic!r}, expected {MAGIC!r}")
        rows, cols = struct.unpack("<QQ", f.read(16))
        data = np.frombuffer(f.read(rows * cols * 8), dtype="<f8")
    if data.size != rows * cols:
        raise DataError(f"{path}: truncated payload, expected {rows}x{cols} float64")
    return data.reshape(rows, cols).astype(np.float64)


def save_labels_csv(path, labels) -> None:
    labels = np.asarray(labels).astype(np.int64).ravel()
    with open(path, "w") as f:
        f.write("label\n")
        f.writelines(f"{v}\n" for v in labels)


def load_labels_csv(path) -> np.ndarray:
    try:
        return np.loadtxt(path, skiprows=1, ndmin=1, dtype=np.int64)
    except ValueError as exc:
        raise DataError(f"{path}: not a readable label CSV ({exc})") from exc


def save_columns_csv(path, names, columns, fmts=None) -> None:
    """Write named columns of equal length; fmts defaults to %.17g each."""
    columns = [np.asarray(c) for c in columns]
    if len(names) != len(columns):
        raise DataError(f"{len(names)} names for {len(columns)} columns")
    fmts = fmts or ["%.17g"] * len(columns)
    with open(path, "w") as f:
        f.write(",".join(names) + "\n")
        for row in zip(*columns):
            f.write(",".join(fmt % val for fmt, val in zip(fmts, row)) + "\n")
