"""Feature extraction from Transformer checkpoints.

Reading stimuli (one sentence at a time): each sentence's row is the mean of
its token vectors from the model's last hidden layer, special tokens excluded
so a single-token sentence reproduces that token's vector.

Listening stimuli (timed narrative): sentences are chunked into overlapping
windows that fit the encoder's input limit, every word takes its wordpiece-mean
vector from the earliest window containing it, and each TR row is the mean of
the words whose onset falls inside that TR.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CheckpointLoadError, EmptySentence, InvalidTimes
from .transcript import TimedTranscript
from .windows import make_windows

_BATCH = 32


@dataclass
class Encoder:
    """A loaded checkpoint: tokenizer + model (encoder stack, eval mode)."""

    tokenizer: object
    model: object
    ref: str
    stack: str  # "encoder" for encoder-decoder checkpoints, else "full"

    @property
    def dim(self) -> int:
        return int(self.model.config.hidden_size)


def load_encoder(checkpoint: str, device: str = "cpu") -> Encoder:
    """Load tokenizer and model from a hub ref or local directory.

    Encoder-decoder checkpoints contribute their encoder stack's last hidden
    layer (recorded in the emitted fragment).
    """
    import torch
    from transformers import AutoModel, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        model = AutoModel.from_pretrained(checkpoint)
    except Exception as exc:
        raise CheckpointLoadError(f"cannot load checkpoint {checkpoint!r}: {exc}") from None
    stack = "full"
    if getattr(model.config, "is_encoder_decoder", False):
        model = model.get_encoder()
        stack = "encoder"
    model.eval()
    model.to(torch.device(device))
    return Encoder(tokenizer=tokenizer, model=model, ref=checkpoint, stack=stack)


def _last_hidden(encoder: Encoder, batch: dict):
    import torch

    with torch.no_grad():
        out = encoder.model(
            input_ids=batch["input_ids"], attention_mask=batch["attention_mask"]
        )
    return out.last_hidden_state


def embed_sentences(sentences, encoder: Encoder) -> np.ndarray:
    """One row per sentence: mean over last-layer word-token vectors."""
    sentences = list(sentences)
    if not sentences:
        raise EmptySentence("no sentences given")
    for i, s in enumerate(sentences):
        if not str(s).strip():
            raise EmptySentence(f"sentence {i} is empty")
    rows = np.empty((len(sentences), encoder.dim))
    for start in range(0, len(sentences), _BATCH):
        chunk = [str(s) for s in sentences[start : start + _BATCH]]
        enc = encoder.tokenizer(
            chunk,
            padding=True,
            truncation=True,
            return_tensors="pt",
            return_special_tokens_mask=True,
        )
        hidden = _last_hidden(encoder, enc)
        keep = (enc["attention_mask"] == 1) & (enc["special_tokens_mask"] == 0)
        for j in range(len(chunk)):
            mask = keep[j].numpy().astype(bool)
            if not mask.any():
                raise EmptySentence(f"sentence {start + j} produced no word tokens")
            rows[start + j] = hidden[j].numpy()[mask].mean(axis=0)
    return rows


def window_word_vectors(
    transcript: TimedTranscript, encoder: Encoder, window: int = 10, overlap: int = 2
) -> np.ndarray:
    """One vector per transcript word: wordpiece means from windowed encoding.

    Words falling inside the overlap of two windows take their vector from
    the earlier window.
    """
    sentences = transcript.sentences()
    ranges = make_windows(len(sentences), window=window, overlap=overlap)
    n_words = len(transcript.words)
    vectors = np.zeros((n_words, encoder.dim))
    assigned = np.zeros(n_words, dtype=bool)
    # global word index for sentence s, word-in-sentence k
    first_word_of_sentence = np.cumsum([0] + [len(s) for s in sentences[:-1]])
    for start, end in ranges:
        words = [w.text for s in sentences[start:end] for w in s]
        if not words:
            continue
        enc = encoder.tokenizer(
            [words],
            is_split_into_words=True,
            truncation=True,
            return_tensors="pt",
        )
        hidden = _last_hidden(encoder, enc)[0].numpy()
        word_ids = enc.word_ids(0)
        piece_sum = np.zeros((len(words), encoder.dim))
        piece_count = np.zeros(len(words))
        for pos, wid in enumerate(word_ids):
            if wid is not None:
                piece_sum[wid] += hidden[pos]
                piece_count[wid] += 1
        base = int(first_word_of_sentence[start])
        for local, count in enumerate(piece_count):
            g = base + local
            if count > 0 and not assigned[g]:
                vectors[g] = piece_sum[local] / count
                assigned[g] = True
    if not assigned.all():
        missing = int(np.flatnonzero(~assigned)[0])
        raise EmptySentence(
            f"word {missing} ({transcript.words[missing].text!r}) produced no tokens"
        )
    return vectors


def pool_trs(
    word_vectors: np.ndarray,
    onsets,
    n_trs: int,
    tr_seconds: float,
    empty_mode: str = "zero",
):
    """Pool word vectors into TR rows by onset time.

    Row r is the mean of vectors whose onset lies in [r*tr, (r+1)*tr). TRs
    with no words get a zero row (default) or carry the previous row forward;
    either way the returned mask marks them.
    """
    if empty_mode not in ("zero", "carry-forward"):
        raise ValueError(f"empty_mode must be 'zero' or 'carry-forward', got {empty_mode!r}")
    if n_trs < 1:
        raise InvalidTimes(f"n_trs must be >= 1, got {n_trs}")
    onsets = np.asarray(list(onsets), dtype=float)
    if onsets.size != word_vectors.shape[0]:
        raise InvalidTimes(
            f"{onsets.size} onsets for {word_vectors.shape[0]} word vectors"
        )
    rows = np.zeros((n_trs, word_vectors.shape[1]))
    empty = np.zeros(n_trs, dtype=bool)
    tr_of_word = np.floor(onsets / tr_seconds).astype(int)
    for r in range(n_trs):
        members = np.flatnonzero(tr_of_word == r)
        if members.size:
            rows[r] = word_vectors[members].mean(axis=0)
        else:
            empty[r] = True
            if empty_mode == "carry-forward" and r > 0:
                rows[r] = rows[r - 1]
    return rows, empty


def embed_trs(
    transcript: TimedTranscript,
    n_trs: int,
    encoder: Encoder,
    window: int = 10,
    overlap: int = 2,
    empty_mode: str = "zero",
):
    """Full narrative path: windowed word vectors pooled into TR rows."""
    vectors = window_word_vectors(transcript, encoder, window=window, overlap=overlap)
    onsets = [w.onset for w in transcript.words]
    return pool_trs(vectors, onsets, n_trs, transcript.tr_seconds, empty_mode=empty_mode)
