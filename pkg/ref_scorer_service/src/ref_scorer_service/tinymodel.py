"""Builder for the tiny randomly initialized model the service hosts by default.

The artifact is a miniature BART with a whitespace WordLevel tokenizer,
seeded and never trained. It exists so the service can be exercised offline
with real conditional log-probabilities; swap in any saved seq2seq checkpoint
of the same family for meaningful text. Build once with
scripts/build_tiny_model.py, then point the service at the output directory.
"""

from __future__ import annotations

import json
from pathlib import Path

import torch
from tokenizers import Tokenizer
from tokenizers.models import WordLevel
from tokenizers.pre_tokenizers import WhitespaceSplit
from transformers import BartConfig, BartForConditionalGeneration, PreTrainedTokenizerFast

MODEL_NAME = "tiny-random-seq2seq-v1"
META_FILE = "service_meta.json"

PAD_TOKEN = "<pad>"
BOS_TOKEN = "<s>"
EOS_TOKEN = "</s>"
UNK_TOKEN = "<unk>"

# small closed vocabulary; every other surface token maps to <unk>
_WORDS = [
    "a", "an", "the", "is", "was", "in", "of", "and", "to", "for",
    "city", "town", "village", "river", "country", "region", "capital",
    "part", "member", "north", "south", "east", "west", "first", "second",
    "one", "two", "three", "known", "located", "near", "between", "with",
]


def build_tokenizer() -> PreTrainedTokenizerFast:
    vocab = {PAD_TOKEN: 0, BOS_TOKEN: 1, EOS_TOKEN: 2, UNK_TOKEN: 3}
    for word in _WORDS:
        vocab[word] = len(vocab)
    core = Tokenizer(WordLevel(vocab, unk_token=UNK_TOKEN))
    core.pre_tokenizer = WhitespaceSplit()
    return PreTrainedTokenizerFast(
        tokenizer_object=core,
        pad_token=PAD_TOKEN,
        bos_token=BOS_TOKEN,
        eos_token=EOS_TOKEN,
        unk_token=UNK_TOKEN,
    )


def build_model(vocab_size: int, seed: int) -> BartForConditionalGeneration:
    config = BartConfig(
        vocab_size=vocab_size,
        d_model=32,
        encoder_layers=2,
        decoder_layers=2,
        encoder_attention_heads=2,
        decoder_attention_heads=2,
        encoder_ffn_dim=64,
        decoder_ffn_dim=64,
        max_position_embeddings=128,
        pad_token_id=0,
        bos_token_id=1,
        eos_token_id=2,
        decoder_start_token_id=1,
        forced_eos_token_id=None,
    )
    torch.manual_seed(seed)
    return BartForConditionalGeneration(config)


def build_tiny_model(output_dir: str | Path, seed: int = 0) -> Path:
    """Write tokenizer, weights, and service metadata; returns the directory."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    tokenizer = build_tokenizer()
    model = build_model(tokenizer.vocab_size, seed)
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    meta = {"model": MODEL_NAME, "seed": seed}
    (out / META_FILE).write_text(json.dumps(meta) + "\n", encoding="utf-8")
    return out
