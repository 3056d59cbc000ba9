"""Array interchange: NPY v1.0 binary files and headed CSV.

The binary format is written byte-for-byte in the classic layout (magic
``\\x93NUMPY``, version 1.0, little-endian u16 header length, dict header,
contiguous little-endian float64 data) so files interoperate with any other
implementation of the same one-page format. Only 2-D ``<f8`` C-order arrays
are accepted; everything else is rejected at the boundary.
"""

from __future__ import annotations

import ast
import struct
from pathlib import Path

import numpy as np

from .errors import (
    CorruptHeader,
    EmptyMatrix,
    IoError,
    NonFiniteValues,
    ParseError,
    UnsupportedDtype,
    UnsupportedRank,
)

_MAGIC = b"\x93NUMPY"
_VERSION = b"\x01\x00"
_HEADER_ALIGN = 64


def _read_npy(raw: bytes, path) -> np.ndarray:
    if len(raw) < 10:
        raise CorruptHeader(f"{path}: file too short for an NPY header")
    if raw[6:8] != _VERSION:
        raise CorruptHeader(
            f"{path}: unsupported NPY version {raw[6]}.{raw[7]}, expected 1.0"
        )
    (header_len,) = struct.unpack("<H", raw[8:10])
    header_end = 10 + header_len
    if len(raw) < header_end:
        raise CorruptHeader(f"{path}: declared header length {header_len} overruns file")
    try:
        header = ast.literal_eval(raw[10:header_end].decode("latin1"))
    except (ValueError, SyntaxError) as exc:
        raise CorruptHeader(f"{path}: malformed header dict: {exc}") from None
    if not isinstance(header, dict) or set(header) != {"descr", "fortran_order", "shape"}:
        raise CorruptHeader(f"{path}: header must have descr/fortran_order/shape keys")
    if header["descr"] != "<f8":
        raise UnsupportedDtype(
            f"{path}: dtype {header['descr']!r} not supported, expected '<f8'"
        )
    if header["fortran_order"] is not False:
        raise CorruptHeader(f"{path}: fortran_order must be False for this interchange")
    shape = header["shape"]
    if not (isinstance(shape, tuple) and all(isinstance(s, int) and s >= 0 for s in shape)):
        raise CorruptHeader(f"{path}: bad shape {shape!r}")
    if len(shape) != 2:
        raise UnsupportedRank(f"{path}: rank {len(shape)} array, expected 2-D")
    n_bytes = 8 * shape[0] * shape[1]
    if len(raw) - header_end != n_bytes:
        raise CorruptHeader(
            f"{path}: payload is {len(raw) - header_end} bytes, shape {shape} needs {n_bytes}"
        )
    arr = np.frombuffer(raw[header_end:], dtype="<f8").reshape(shape)
    return np.ascontiguousarray(arr, dtype=np.float64)


def _read_csv(text: str, path) -> np.ndarray:
    lines = [ln for ln in text.replace("\r\n", "\n").split("\n") if ln != ""]
    if len(lines) < 2:
        raise ParseError(f"{path}: CSV needs a header line plus at least one data row")
    n_cols = len(lines[0].split(","))
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != n_cols:
            raise ParseError(
                f"{path}:{lineno}: expected {n_cols} columns, found {len(cells)}"
            )
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
    return np.array(rows, dtype=np.float64)


def read_array(path) -> np.ndarray:
    """Read a 2-D float64 matrix from an NPY v1.0 or headed-CSV file.

    Dispatch is by content: files opening with the NPY magic are parsed as
    binary, anything else as CSV.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from None
    if raw[:6] == _MAGIC:
        return _read_npy(raw, path)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not NPY and not UTF-8 text: {exc}") from None
    return _read_csv(text, path)


def npy_bytes(matrix: np.ndarray) -> bytes:
    """Serialize a finite 2-D matrix to NPY v1.0 bytes."""
    arr = np.ascontiguousarray(matrix, dtype="<f8")
    if arr.ndim != 2:
        raise UnsupportedRank(f"only 2-D matrices are written, got ndim={arr.ndim}")
    if arr.size == 0:
        raise EmptyMatrix(f"refusing to write empty matrix of shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise NonFiniteValues("matrix contains NaN or Inf")
    header = (
        "{'descr': '<f8', 'fortran_order': False, "
        f"'shape': ({arr.shape[0]}, {arr.shape[1]}), }}"
    )
    # pad with spaces so magic+version+length+header is a multiple of 64,
    # ending in newline, matching the ecosystem convention
    unpadded = len(_MAGIC) + len(_VERSION) + 2 + len(header) + 1
    pad = (-unpadded) % _HEADER_ALIGN
    header_bytes = (header + " " * pad + "\n").encode("latin1")
    return _MAGIC + _VERSION + struct.pack("<H", len(header_bytes)) + header_bytes + arr.tobytes()


def csv_bytes(matrix: np.ndarray) -> bytes:
    """Serialize a finite 2-D matrix to headed CSV with round-trip floats."""
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2:
        raise UnsupportedRank(f"only 2-D matrices are written, got ndim={arr.ndim}")
    if arr.size == 0:
        raise EmptyMatrix(f"refusing to write empty matrix of shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise NonFiniteValues("matrix contains NaN or Inf")
    lines = [",".join(f"c{j}" for j in range(arr.shape[1]))]
    for row in arr:
        lines.append(",".join(repr(float(v)) for v in row))
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_array(matrix: np.ndarray, path, format: str = None) -> None:
    """Write a matrix so that ``read_array`` recovers it value-identically.

    ``format`` is ``"npy"`` or ``"csv"``; when omitted it is taken from the
    file extension (default ``npy``).
    """
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "npy"
    if format == "npy":
        payload = npy_bytes(matrix)
    elif format == "csv":
        payload = csv_bytes(matrix)
    else:
        raise IoError(f"unknown format {format!r}, expected 'npy' or 'csv'")
    try:
        path.write_bytes(payload)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from None
