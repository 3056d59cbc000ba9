import os

import pytest

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

_VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "a", "an", "cat", "dog", "man", "pie", "story", "sat", "ran", "was",
    "on", "in", "and", "he", "she", "it", "once", "upon", "time", "big",
    "small", "mat", "hat", "house", "went", "said", "to", "town", ".", ",",
    "##s", "##ing", "##ed",
]


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    """A deterministic random-weight BERT saved to disk; loaded through the
    same checkpoint path real hub refs would use."""
    import torch
    from transformers import BertConfig, BertModel, BertTokenizerFast

    d = tmp_path_factory.mktemp("tiny_bert")
    vocab_path = d / "vocab.txt"
    vocab_path.write_text("\n".join(_VOCAB))
    tokenizer = BertTokenizerFast(vocab_file=str(vocab_path), do_lower_case=True)
    torch.manual_seed(0)
    model = BertModel(BertConfig(
        vocab_size=len(_VOCAB),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=512,
    ))
    model.save_pretrained(d)
    tokenizer.save_pretrained(d)
    return str(d)


@pytest.fixture(scope="session")
def tiny_encoder(tiny_checkpoint):
    from stimfeat import load_encoder

    return load_encoder(tiny_checkpoint)
