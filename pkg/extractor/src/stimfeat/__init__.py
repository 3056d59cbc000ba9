"""stimfeat: stimulus feature extraction for brain-encoding experiments."""

__version__ = "0.1.0"

from .embed import (  # noqa: F401
    Encoder,
    embed_sentences,
    embed_trs,
    load_encoder,
    pool_trs,
    window_word_vectors,
)
from .emit import emit  # noqa: F401
from .registry import DEFAULT_REGISTRY, CheckpointEntry, CheckpointRegistry  # noqa: F401
from .transcript import TimedTranscript, Word, load_transcript  # noqa: F401
from .windows import make_windows  # noqa: F401
