"""Sentence windowing for long narratives.

The encoder's input limit forces chunking: windows of ``window`` sentences
advance by ``window - overlap`` so the last ``overlap`` sentences of one
window reopen the next, preserving context across the seam.
"""

from .errors import InvalidWindowing


def make_windows(n_sentences: int, window: int = 10, overlap: int = 2):
    """Half-open sentence index ranges [(start, end), ...] covering the corpus.

    Stride is ``window - overlap``; the final window is truncated at
    ``n_sentences``, and if that leaves it no longer than the overlap (pure
    repetition of already-covered sentences) it is merged into its
    predecessor.
    """
    if n_sentences < 1:
        raise InvalidWindowing(f"need at least one sentence, got {n_sentences}")
    if window < 1 or overlap < 0 or overlap >= window:
        raise InvalidWindowing(f"need 0 <= overlap < window, got window={window}, overlap={overlap}")
    stride = window - overlap
    ranges = [(start, min(start + window, n_sentences)) for start in range(0, n_sentences, stride)]
    while len(ranges) > 1 and ranges[-1][1] - ranges[-1][0] < overlap + 1:
        ranges.pop()
        ranges[-1] = (ranges[-1][0], n_sentences)
    return ranges
