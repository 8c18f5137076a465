"""Whitespace word tokenizer shared by the corpus, scorer, and metric layers.

Tokens are produced by splitting on whitespace and stripping leading and
trailing punctuation from each piece; pieces that are punctuation only are
discarded. Using one tokenizer everywhere keeps token counts and spans
consistent between coverage scoring, model vocabularies, and metrics.
"""

from __future__ import annotations

import re
import string

# ASCII punctuation plus common typographic marks found in web text.
_PUNCT = frozenset(string.punctuation) | frozenset("“”‘’–—…«»")

_WS_PIECE = re.compile(r"\S+")


def word_token_spans(text: str) -> list[tuple[str, int, int]]:
    """Tokenize ``text`` into (form, char_start, char_end) triples.

    Character offsets delimit the stripped form, not the raw whitespace
    piece, so a span test against link offsets sees only word characters.
    """
    out: list[tuple[str, int, int]] = []
    for piece in _WS_PIECE.finditer(text):
        start, end = piece.start(), piece.end()
        while start < end and text[start] in _PUNCT:
            start += 1
        while end > start and text[end - 1] in _PUNCT:
            end -= 1
        if start < end:
            out.append((text[start:end], start, end))
    return out


def word_tokens(text: str) -> list[str]:
    """Return the word tokens of ``text`` with punctuation excluded."""
    return [form for form, _, _ in word_token_spans(text)]
