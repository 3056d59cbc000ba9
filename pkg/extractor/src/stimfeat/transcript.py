"""Timed transcripts: word-level onsets/offsets for narrative (listening) stimuli.

Input format is JSON lines, one word per line::

    {"text": "Once", "onset": 0.0, "offset": 0.31}
    {"text": "upon", "onset": 0.31, "offset": 0.55, "sentence": 0}

``sentence`` is optional; when absent, sentence boundaries are inferred after
words ending in ``.``, ``!`` or ``?``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidTimes, IoError


@dataclass(frozen=True)
class Word:
    text: str
    onset: float
    offset: float
    sentence: int


@dataclass(frozen=True)
class TimedTranscript:
    words: tuple[Word, ...]
    tr_seconds: float = 1.5

    def __post_init__(self):
        if self.tr_seconds <= 0:
            raise InvalidTimes(f"tr_seconds must be positive, got {self.tr_seconds}")
        last_onset = -float("inf")
        for i, w in enumerate(self.words):
            if w.offset < w.onset:
                raise InvalidTimes(f"word {i} ({w.text!r}) has offset {w.offset} < onset {w.onset}")
            if w.onset < last_onset:
                raise InvalidTimes(f"word {i} ({w.text!r}) onset {w.onset} decreases")
            last_onset = w.onset

    def n_sentences(self) -> int:
        return self.words[-1].sentence + 1 if self.words else 0

    def sentences(self) -> list[list[Word]]:
        out: list[list[Word]] = [[] for _ in range(self.n_sentences())]
        for w in self.words:
            out[w.sentence].append(w)
        return out


def _infer_sentences(records) -> list[int]:
    ids = []
    current = 0
    for rec in records:
        ids.append(current)
        if rec["text"].rstrip().endswith((".", "!", "?")):
            current += 1
    return ids


def load_transcript(path, tr_seconds: float = 1.5) -> TimedTranscript:
    """Read a JSON-lines transcript; validates ordering and time sanity."""
    path = Path(path)
    try:
        lines = path.read_text("utf-8").strip().split("\n")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from None
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IoError(f"{path}:{lineno}: {exc}") from None
        for key in ("text", "onset", "offset"):
            if key not in rec:
                raise IoError(f"{path}:{lineno}: missing {key!r}")
        records.append(rec)
    if not records:
        raise IoError(f"{path}: empty transcript")
    if all("sentence" in r for r in records):
        sentence_ids = [int(r["sentence"]) for r in records]
    else:
        sentence_ids = _infer_sentences(records)
    words = tuple(
        Word(text=str(r["text"]), onset=float(r["onset"]), offset=float(r["offset"]),
             sentence=s)
        for r, s in zip(records, sentence_ids)
    )
    return TimedTranscript(words=words, tr_seconds=tr_seconds)
