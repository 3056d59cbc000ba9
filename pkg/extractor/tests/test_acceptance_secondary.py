"""Acceptance items for the extractor: windowing arithmetic, TR pooling on a
toy transcript, and bit-identical round-trips into the encoding toolkit."""

import numpy as np

import brainenc.io
from stimfeat import TimedTranscript, Word, emit, make_windows, pool_trs


def line(name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[ACCEPTANCE] {status} {name}{suffix}")
    return ok


def test_windowing_arithmetic():
    ok = make_windows(26) == [(0, 10), (8, 18), (16, 26)]
    ok &= make_windows(10) == [(0, 10)]
    ok &= make_windows(7) == [(0, 7)]
    assert line("windowing arithmetic (n=26, 10, 7)", ok)


def test_tr_pooling_toy_transcript():
    words = (
        Word("once", 0.1, 0.3, 0), Word("upon", 0.5, 0.8, 0),
        Word("a", 1.6, 1.7, 1), Word("time", 2.0, 2.4, 1),
        Word("the", 3.1, 3.3, 2), Word("man", 4.4, 4.6, 2),
    )
    t = TimedTranscript(words=words, tr_seconds=1.5)
    rng = np.random.default_rng(0)
    vecs = rng.standard_normal((6, 8))
    rows, empty = pool_trs(vecs, [w.onset for w in t.words], 3, t.tr_seconds)
    hand = np.stack([
        (vecs[0] + vecs[1]) / 2.0,
        (vecs[2] + vecs[3]) / 2.0,
        (vecs[4] + vecs[5]) / 2.0,
    ])
    gap = float(np.abs(rows - hand).max())
    ok = gap < 1e-6 and not empty.any()
    assert line("TR pooling matches hand-pooled means", ok, f"max gap={gap:.1e}")


def test_emitted_files_bit_identical_via_primary_ingest(tmp_path):
    rng = np.random.default_rng(1)
    checked = 0
    ok = True
    for task, shape in (("CR", (627, 96)), ("PD", (259, 48))):
        feats = rng.standard_normal(shape)
        npy_path, _ = emit(feats, task, tmp_path, {})
        back = brainenc.io.read_array(npy_path)
        ok &= bool(np.array_equal(back.view(np.uint64), feats.view(np.uint64)))
        checked += 1
    assert line("emit -> primary ingest bit-identical round-trip", ok,
                f"{checked} matrices")
