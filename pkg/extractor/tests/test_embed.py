import numpy as np
import pytest
import torch

from stimfeat import (
    TimedTranscript,
    Word,
    embed_sentences,
    embed_trs,
    pool_trs,
    window_word_vectors,
)
from stimfeat.errors import CheckpointLoadError, EmptySentence
from stimfeat.registry import DEFAULT_REGISTRY, TASK_CODES


# ---------------------------------------------------------------- registry


def test_registry_covers_all_tasks():
    assert set(DEFAULT_REGISTRY.tasks()) == set(TASK_CODES)
    assert DEFAULT_REGISTRY.checkpoint_ref("PD") == "bert-base-cased-finetuned-mrpc"
    assert DEFAULT_REGISTRY.checkpoint_ref("NER") == "dslim/bert-base-NER"
    assert DEFAULT_REGISTRY.checkpoint_ref("Sum") == "lidiya/bart-base-samsum"
    assert "SAMSum" in DEFAULT_REGISTRY.entry("Sum").dataset_note


def test_bad_checkpoint_raises():
    from stimfeat import load_encoder

    with pytest.raises(CheckpointLoadError):
        load_encoder("/nonexistent/model/dir")


# ---------------------------------------------------------------- sentences


def test_627_sentences_shape(tiny_encoder):
    rng = np.random.default_rng(0)
    words = ["the", "cat", "sat", "on", "a", "mat", "dog", "ran", "he", "was", "big"]
    sentences = [" ".join(rng.choice(words, size=rng.integers(2, 9))) for _ in range(627)]
    feats = embed_sentences(sentences, tiny_encoder)
    assert feats.shape == (627, tiny_encoder.dim)
    assert np.isfinite(feats).all()


def test_single_token_sentence_is_that_tokens_vector(tiny_encoder):
    feats = embed_sentences(["cat"], tiny_encoder)
    enc = tiny_encoder.tokenizer(["cat"], return_tensors="pt")
    assert enc["input_ids"].shape[1] == 3  # [CLS] cat [SEP]
    with torch.no_grad():
        hidden = tiny_encoder.model(**enc).last_hidden_state[0].numpy()
    assert np.allclose(feats[0], hidden[1], atol=1e-6)


def test_embedding_is_deterministic(tiny_encoder):
    a = embed_sentences(["the cat sat on the mat"], tiny_encoder)
    b = embed_sentences(["the cat sat on the mat"], tiny_encoder)
    assert np.array_equal(a, b)
    # and the same sentence twice in one batch gives identical rows
    both = embed_sentences(["a dog ran", "a dog ran"], tiny_encoder)
    assert np.array_equal(both[0], both[1])


def test_empty_sentence_rejected(tiny_encoder):
    with pytest.raises(EmptySentence):
        embed_sentences(["the cat", "  "], tiny_encoder)
    with pytest.raises(EmptySentence):
        embed_sentences([], tiny_encoder)


def test_mean_pooling_excludes_special_tokens(tiny_encoder):
    # mean of the two word vectors, computed by hand from the raw hidden states
    feats = embed_sentences(["cat dog"], tiny_encoder)
    enc = tiny_encoder.tokenizer(["cat dog"], return_tensors="pt")
    with torch.no_grad():
        hidden = tiny_encoder.model(**enc).last_hidden_state[0].numpy()
    assert np.allclose(feats[0], hidden[1:3].mean(axis=0), atol=1e-6)


# ---------------------------------------------------------------- TR pooling


def toy_transcript():
    # 6 words across 3 sentences; 3 TRs of 1.5 s
    words = (
        Word("once", 0.1, 0.3, 0),
        Word("upon", 0.5, 0.8, 0),
        Word("a", 1.6, 1.7, 1),
        Word("time", 2.0, 2.4, 1),
        Word("the", 3.1, 3.3, 2),
        Word("man", 4.4, 4.6, 2),
    )
    return TimedTranscript(words=words, tr_seconds=1.5)


def test_pool_trs_matches_hand_means():
    rng = np.random.default_rng(1)
    vecs = rng.standard_normal((6, 4))
    t = toy_transcript()
    rows, empty = pool_trs(vecs, [w.onset for w in t.words], 3, t.tr_seconds)
    # hand pooling: TR0 = words 0,1; TR1 = words 2,3; TR2 = words 4,5
    assert np.abs(rows[0] - vecs[0:2].mean(axis=0)).max() < 1e-6
    assert np.abs(rows[1] - vecs[2:4].mean(axis=0)).max() < 1e-6
    assert np.abs(rows[2] - vecs[4:6].mean(axis=0)).max() < 1e-6
    assert not empty.any()


def test_single_word_tr_is_that_words_vector():
    rng = np.random.default_rng(2)
    vecs = rng.standard_normal((3, 5))
    rows, _ = pool_trs(vecs, [0.1, 1.6, 3.2], 3, 1.5)
    assert np.array_equal(rows[1], vecs[1])


def test_empty_tr_zero_row_and_mask():
    rng = np.random.default_rng(3)
    vecs = rng.standard_normal((2, 4))
    rows, empty = pool_trs(vecs, [0.2, 3.2], 3, 1.5)  # nothing in TR1
    assert np.array_equal(rows[1], np.zeros(4))
    assert empty.tolist() == [False, True, False]


def test_empty_tr_carry_forward():
    rng = np.random.default_rng(4)
    vecs = rng.standard_normal((2, 4))
    rows, empty = pool_trs(vecs, [0.2, 3.2], 3, 1.5, empty_mode="carry-forward")
    assert np.array_equal(rows[1], rows[0])
    assert empty.tolist() == [False, True, False]


# ---------------------------------------------------------------- windows + words


def long_transcript(n_sentences=26, words_per_sentence=2):
    words = []
    t = 0.0
    vocab = ["the", "cat", "dog", "man", "pie", "ran", "sat", "big"]
    for s in range(n_sentences):
        for k in range(words_per_sentence):
            words.append(Word(vocab[(s + k) % len(vocab)], round(t, 3), round(t + 0.2, 3), s))
            t += 0.4
    return TimedTranscript(words=tuple(words), tr_seconds=1.5)


def test_window_word_vectors_cover_every_word(tiny_encoder):
    t = long_transcript()
    vecs = window_word_vectors(t, tiny_encoder)
    assert vecs.shape == (len(t.words), tiny_encoder.dim)
    assert np.isfinite(vecs).all()
    assert (np.abs(vecs).sum(axis=1) > 0).all()


def test_overlap_words_take_earliest_window_vector(tiny_encoder):
    t = long_transcript()  # windows: [0,10), [8,18), [16,26)
    vecs = window_word_vectors(t, tiny_encoder)
    # recompute window 0 alone: its word vectors must be the assigned ones,
    # including for sentences 8-9 which also appear in window 1
    sentences = t.sentences()
    words0 = [w.text for s in sentences[0:10] for w in s]
    enc = tiny_encoder.tokenizer([words0], is_split_into_words=True, return_tensors="pt")
    with torch.no_grad():
        hidden = tiny_encoder.model(
            input_ids=enc["input_ids"], attention_mask=enc["attention_mask"]
        ).last_hidden_state[0].numpy()
    word_ids = enc.word_ids(0)
    for target in range(16, 20):  # global word idx of sentences 8..9
        pieces = [hidden[p] for p, wid in enumerate(word_ids) if wid == target]
        expected = np.mean(pieces, axis=0)
        assert np.allclose(vecs[target], expected, atol=1e-6)


def test_embed_trs_full_path(tiny_encoder):
    t = long_transcript()
    n_trs = 14  # last onset is ~20.4 s at tr 1.5
    rows, empty = embed_trs(t, n_trs, tiny_encoder)
    assert rows.shape == (n_trs, tiny_encoder.dim)
    vecs = window_word_vectors(t, tiny_encoder)
    expected, expected_empty = pool_trs(vecs, [w.onset for w in t.words], n_trs, 1.5)
    assert np.array_equal(rows, expected)
    assert np.array_equal(empty, expected_empty)
