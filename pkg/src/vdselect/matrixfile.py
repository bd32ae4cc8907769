"""Binary matrix container with memory-mapped column access.

Layout: 4-byte magic ``VDMX``, unsigned 32-bit little-endian version (= 1),
unsigned 32-bit flags (bit 0 marks pre-standardized columns), unsigned
64-bit n and p, then n*p float64 little-endian values in column-major
order. Total size is exactly 28 + 8*n*p bytes.
"""

from __future__ import annotations

import csv
import os
import struct

import numpy as np

from .errors import BadMagic, BadVersion, SizeMismatch, TruncatedFile

MAGIC = b"VDMX"
VERSION = 1
HEADER_SIZE = 28
FLAG_STANDARDIZED = 1

_HEADER = struct.Struct("<4sIIQQ")


def matrix_write(path, data: np.ndarray, flags: int = 0) -> None:
    """Write a dense matrix; bit-exact round trip with matrix_read."""
    data = np.asarray(data, dtype="<f8")
    if data.ndim != 2:
        raise ValueError("expected a 2-d array")
    n, p = data.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, flags, n, p))
        fh.write(np.asfortranarray(data).tobytes(order="F"))


def _read_header(path):
    size = os.path.getsize(path)
    if size < HEADER_SIZE:
        raise TruncatedFile(f"{path}: {size} bytes is shorter than the header")
    with open(path, "rb") as fh:
        magic, version, flags, n, p = _HEADER.unpack(fh.read(HEADER_SIZE))
    if magic != MAGIC:
        raise BadMagic(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise BadVersion(f"{path}: unsupported version {version}")
    expected = HEADER_SIZE + 8 * n * p
    if size != expected:
        raise SizeMismatch(f"{path}: size {size}, header implies {expected}")
    return flags, n, p


class MappedColumns:
    """Column provider backed by a memory map; column j never materializes
    the rest of the payload."""

    def __init__(self, path):
        self.flags, self.n, self.p = _read_header(path)
        self._map = np.memmap(
            path, dtype="<f8", mode="r", offset=HEADER_SIZE, shape=(self.n, self.p), order="F"
        )

    @property
    def standardized(self) -> bool:
        return bool(self.flags & FLAG_STANDARDIZED)

    def column(self, j: int) -> np.ndarray:
        return np.array(self._map[:, j], dtype=float)

    def dot_all(self, v: np.ndarray) -> np.ndarray:
        return self._map.T @ v

    def load(self) -> np.ndarray:
        return np.array(self._map, dtype=float)


def matrix_read(path, mmap: bool = True):
    """Open a matrix file; mapped provider by default, dense array otherwise."""
    provider = MappedColumns(path)
    if mmap:
        return provider
    return provider.load()


def read_response(path, n: int = None) -> np.ndarray:
    """Read a response vector: a p = 1 matrix file or a single-column CSV."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        provider = MappedColumns(path)
        if provider.p != 1:
            raise SizeMismatch(f"{path}: response matrix must have p = 1, got {provider.p}")
        y = provider.column(0)
    else:
        values = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row:
                    continue
                if len(row) != 1:
                    raise SizeMismatch(f"{path}: expected a single CSV column")
                try:
                    values.append(float(row[0]))
                except ValueError as exc:
                    raise SizeMismatch(f"{path}: non-numeric entry {row[0]!r}") from exc
        y = np.array(values)
    if n is not None and y.shape[0] != n:
        raise SizeMismatch(f"{path}: response length {y.shape[0]}, expected {n}")
    return y
