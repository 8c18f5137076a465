"""Generation metrics (BLEU, ROUGE-L, METEOR-lite) and selection accuracy.

All three text metrics case-fold tokens before matching. BLEU is corpus
level with no smoothing: a zero numerator or denominator at any n-gram order
yields 0. ROUGE-L and METEOR-lite are means of per-example scores.
METEOR-lite aligns unigrams in two greedy leftmost stages, exact match then
stem match, using the deterministic affix-stripping stemmer below; the
synonym and paraphrase stages of full METEOR are intentionally absent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

TokenLists = Sequence[Sequence[str]]

_STEM_SUFFIXES = ("ing", "ed", "es", "ly", "s")
_MIN_STEM = 3
_VOWELS = frozenset("aeiou")


@dataclass(frozen=True)
class MetricReport:
    n_examples: int
    bleu: float | None = None
    rouge_l: float | None = None
    meteor: float | None = None

    def __post_init__(self) -> None:
        if self.n_examples < 1:
            raise ValueError("n_examples must be >= 1")
        if self.bleu is not None and not 0.0 <= self.bleu <= 100.0:
            raise ValueError(f"bleu out of range: {self.bleu}")
        for name in ("rouge_l", "meteor"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} out of range: {value}")


def _check_corpus(candidates: TokenLists, references: TokenLists) -> None:
    if len(candidates) != len(references):
        raise ValueError(f"{len(candidates)} candidates vs {len(references)} references")
    if len(candidates) == 0:
        raise ValueError("empty corpus")


def _fold(tokens: Sequence[str]) -> list[str]:
    return [token.casefold() for token in tokens]


def _ngram_counts(tokens: list[str], n: int) -> dict[tuple[str, ...], int]:
    counts: dict[tuple[str, ...], int] = {}
    for i in range(len(tokens) - n + 1):
        gram = tuple(tokens[i: i + n])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def bleu(candidates: TokenLists, references: TokenLists, max_n: int = 4) -> float:
    """Corpus BLEU on a [0, 100] scale, single reference per candidate."""
    _check_corpus(candidates, references)
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    clipped = [0] * max_n
    totals = [0] * max_n
    candidate_length = 0
    reference_length = 0
    for raw_c, raw_r in zip(candidates, references):
        cand = _fold(raw_c)
        ref = _fold(raw_r)
        candidate_length += len(cand)
        reference_length += len(ref)
        for n in range(1, max_n + 1):
            cand_counts = _ngram_counts(cand, n)
            ref_counts = _ngram_counts(ref, n)
            clipped[n - 1] += sum(min(count, ref_counts.get(gram, 0)) for gram, count in cand_counts.items())
            totals[n - 1] += max(len(cand) - n + 1, 0)
    if any(c == 0 or t == 0 for c, t in zip(clipped, totals)):
        return 0.0
    log_precision = sum(math.log(c / t) for c, t in zip(clipped, totals)) / max_n
    brevity = 1.0
    if candidate_length < reference_length:
        brevity = math.exp(1.0 - reference_length / candidate_length)
    return 100.0 * brevity * math.exp(log_precision)


def _lcs_length(a: list[str], b: list[str]) -> int:
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0]
        for j, other in enumerate(b):
            if token == other:
                current.append(previous[j] + 1)
            else:
                current.append(max(previous[j + 1], current[j]))
        previous = current
    return previous[len(b)]


def rouge_l(candidates: TokenLists, references: TokenLists) -> float:
    """Mean per-example LCS F1."""
    _check_corpus(candidates, references)
    total = 0.0
    for raw_c, raw_r in zip(candidates, references):
        cand = _fold(raw_c)
        ref = _fold(raw_r)
        lcs = _lcs_length(cand, ref) if cand and ref else 0
        if lcs == 0:
            continue
        precision = lcs / len(cand)
        recall = lcs / len(ref)
        total += 2.0 * precision * recall / (precision + recall)
    return total / len(candidates)


def stem(word: str) -> str:
    """Deterministic affix stripper used by the METEOR-lite stem stage.

    The first suffix in (ing, ed, es, ly, s) that matches and leaves at
    least 3 characters is stripped; "s" never strips after "ss". After
    stripping "ing" or "ed", a trailing doubled consonant collapses to one,
    except "ll" and "ss".
    """
    for suffix in _STEM_SUFFIXES:
        if not word.endswith(suffix) or len(word) - len(suffix) < _MIN_STEM:
            continue
        if suffix == "s" and word.endswith("ss"):
            continue
        stripped = word[: -len(suffix)]
        if (
            suffix in ("ing", "ed")
            and len(stripped) >= 2
            and stripped[-1] == stripped[-2]
            and stripped[-1] not in _VOWELS
            and stripped[-1] not in ("l", "s")
        ):
            stripped = stripped[:-1]
        return stripped
    return word


def _align(cand: list[str], ref: list[str]) -> list[tuple[int, int]]:
    """Greedy leftmost one-to-one alignment: exact stage, then stem stage."""
    pairs: list[tuple[int, int]] = []
    cand_used = [False] * len(cand)
    ref_used = [False] * len(ref)
    for exact in (True, False):
        keyed_ref = ref if exact else [stem(token) for token in ref]
        keyed_cand = cand if exact else [stem(token) for token in cand]
        for i, token in enumerate(keyed_cand):
            if cand_used[i]:
                continue
            for j, other in enumerate(keyed_ref):
                if not ref_used[j] and token == other:
                    cand_used[i] = True
                    ref_used[j] = True
                    pairs.append((i, j))
                    break
    pairs.sort()
    return pairs


def _chunk_count(pairs: list[tuple[int, int]]) -> int:
    chunks = 0
    previous: tuple[int, int] | None = None
    for i, j in pairs:
        if previous is None or i != previous[0] + 1 or j != previous[1] + 1:
            chunks += 1
        previous = (i, j)
    return chunks


def meteor_lite(candidates: TokenLists, references: TokenLists) -> float:
    """Mean per-example METEOR-lite score.

    Per example: P and R over aligned unigrams, F_mean = 10PR / (R + 9P),
    penalty = 0.5 * (chunks / matches)^3, score = F_mean * (1 - penalty);
    0 when nothing aligns.
    """
    _check_corpus(candidates, references)
    total = 0.0
    for raw_c, raw_r in zip(candidates, references):
        cand = _fold(raw_c)
        ref = _fold(raw_r)
        if not cand or not ref:
            continue
        pairs = _align(cand, ref)
        matches = len(pairs)
        if matches == 0:
            continue
        precision = matches / len(cand)
        recall = matches / len(ref)
        f_mean = 10.0 * precision * recall / (recall + 9.0 * precision)
        penalty = 0.5 * (_chunk_count(pairs) / matches) ** 3
        total += f_mean * (1.0 - penalty)
    return total / len(candidates)


def selection_accuracy(predicted: Sequence, labels: Sequence) -> float:
    """Agreement rate over non-skipped labels; "-" or None marks a skip."""
    if len(predicted) != len(labels):
        raise ValueError(f"{len(predicted)} predictions vs {len(labels)} labels")
    matches = 0
    scored = 0
    for choice, label in zip(predicted, labels):
        if label is None or label == "-":
            continue
        scored += 1
        if str(choice) == str(label):
            matches += 1
    if scored == 0:
        raise ValueError("every item is marked skip")
    return matches / scored
