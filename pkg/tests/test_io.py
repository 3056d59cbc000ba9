import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brainenc.errors import (
    CorruptHeader,
    EmptyMatrix,
    ParseError,
    UnsupportedDtype,
    UnsupportedRank,
)
from brainenc.io import csv_bytes, npy_bytes, read_array, write_array


def test_npy_round_trip_small(tmp_path):
    m = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    path = tmp_path / "m.npy"
    write_array(m, path)
    back = read_array(path)
    assert back.shape == (2, 3)
    assert np.array_equal(back, m)


def test_csv_parse_direct(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("a,b\n1,2\n3,4\n")
    assert np.array_equal(read_array(path), [[1.0, 2.0], [3.0, 4.0]])


def test_csv_windows_newlines(tmp_path):
    path = tmp_path / "m.csv"
    path.write_bytes(b"a,b\r\n1.5,2\r\n3,4\r\n")
    assert np.array_equal(read_array(path), [[1.5, 2.0], [3.0, 4.0]])


def test_rank_4_rejected(tmp_path):
    path = tmp_path / "m.npy"
    np.save(path, np.zeros((2, 2, 2, 2)))
    with pytest.raises(UnsupportedRank):
        read_array(path)


def test_empty_write_rejected(tmp_path):
    with pytest.raises(EmptyMatrix):
        write_array(np.zeros((0, 0)), tmp_path / "m.npy")
    with pytest.raises(EmptyMatrix):
        write_array(np.zeros((0, 5)), tmp_path / "m.csv", format="csv")


def test_pmc_sized_header_round_trip(tmp_path):
    m = np.random.default_rng(0).standard_normal((259, 1198))
    path = tmp_path / "pmc.npy"
    write_array(m, path)
    back = read_array(path)
    assert back.shape == (259, 1198)
    assert np.array_equal(back, m)


def test_bytes_match_ecosystem_writer(tmp_path):
    m = np.arange(12.0).reshape(3, 4)
    ours = npy_bytes(m)
    ref = tmp_path / "ref.npy"
    np.save(ref, m)
    assert ours == ref.read_bytes()


def test_ecosystem_reader_accepts_our_bytes(tmp_path):
    m = np.random.default_rng(1).standard_normal((5, 7))
    path = tmp_path / "m.npy"
    write_array(m, path)
    assert np.array_equal(np.load(path), m)


def test_float32_rejected(tmp_path):
    path = tmp_path / "m.npy"
    np.save(path, np.zeros((2, 2), dtype=np.float32))
    with pytest.raises(UnsupportedDtype):
        read_array(path)


def test_fortran_order_rejected(tmp_path):
    path = tmp_path / "m.npy"
    np.save(path, np.asfortranarray(np.arange(6.0).reshape(2, 3)))
    with pytest.raises(CorruptHeader):
        read_array(path)


def test_unsupported_version_rejected(tmp_path):
    path = tmp_path / "m.npy"
    good = npy_bytes(np.ones((2, 2)))
    path.write_bytes(good[:6] + b"\x02\x00" + good[8:])
    with pytest.raises(CorruptHeader):
        read_array(path)


def test_truncated_payload_rejected(tmp_path):
    path = tmp_path / "m.npy"
    good = npy_bytes(np.ones((4, 4)))
    path.write_bytes(good[:-8])
    with pytest.raises(CorruptHeader):
        read_array(path)


def test_malformed_csv_rejected(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("a,b\n1,2\n3\n")
    with pytest.raises(ParseError):
        read_array(path)
    path.write_text("a,b\n1,zzz\n")
    with pytest.raises(ParseError):
        read_array(path)


def test_nonfinite_write_rejected(tmp_path):
    from brainenc.errors import NonFiniteValues

    with pytest.raises(NonFiniteValues):
        write_array(np.array([[1.0, np.nan]]), tmp_path / "m.npy")


matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(
            st.lists(
                st.floats(allow_nan=False, allow_infinity=False, width=64),
                min_size=c,
                max_size=c,
            ),
            min_size=r,
            max_size=r,
        )
    )
)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_npy_round_trip_property(rows):
    m = np.array(rows, dtype=np.float64)
    back = read_array_from_bytes(npy_bytes(m))
    assert back.shape == m.shape
    assert np.array_equal(back.view(np.uint64), m.view(np.uint64))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_csv_round_trip_property(rows):
    m = np.array(rows, dtype=np.float64)
    back = read_array_from_bytes(csv_bytes(m), name="m.csv")
    assert np.array_equal(back.view(np.uint64), m.view(np.uint64))


def read_array_from_bytes(raw: bytes, name="m.npy"):
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as d:
        p = Path(d) / name
        p.write_bytes(raw)
        return read_array(p)
