"""Generation and scoring backends for encoded entity-pair inputs.

The backend contract is two operations over an encoded input string: generate
(beam search, deterministic) and score (per-token log-probabilities of a given
target, no search). The built-in statistical backend is an interpolated
n-gram language model mixed with a copy distribution over the input's word
tokens:

    P(w | h, input) = (1 - gamma) * sum_n lambda_n * P_n(w | h) + gamma * Copy(w | input)

Each P_n is additively smoothed over the closed prediction vocabulary (target
word types plus the unknown and end markers); Copy is the token's relative
frequency among the input's word tokens. Input tokens outside the vocabulary
receive only copy mass, so the distribution sums to 1 over the union support.
When the input has no word tokens the copy term is dropped entirely.

Sequences end with the end marker, which is generated, scored, and counted in
the length normalization like any other token; detokenized text omits it.
Scoring never appends the end marker on its own.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence, runtime_checkable

from .textutil import word_tokens

BOS_TOKEN = "<s>"
EOS_TOKEN = "</s>"
UNK_TOKEN = "<unk>"

DEFAULT_ORDER = 3
DEFAULT_LM_WEIGHTS = (0.1, 0.3, 0.6)
DEFAULT_COPY_WEIGHT = 0.3
DEFAULT_DELTA = 0.1
DEFAULT_BEAM_WIDTH = 4
DEFAULT_MAX_LEN = 64

MODEL_FORMAT = "ngram-copy-v1"


def detokenize(tokens: Sequence[str]) -> str:
    """Space-join tokens, dropping one trailing end marker if present."""
    if tokens and tokens[-1] == EOS_TOKEN:
        tokens = tokens[:-1]
    return " ".join(tokens)


def _input_text(encoded) -> str:
    text = getattr(encoded, "text", encoded)
    if not isinstance(text, str):
        raise TypeError(f"expected an encoded input or string, got {type(encoded).__name__}")
    return text


@dataclass(frozen=True)
class GenerationResult:
    tokens: tuple[str, ...]
    text: str
    token_logprobs: tuple[float, ...]
    total_logprob: float = field(init=False)
    normalized_score: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "token_logprobs", tuple(float(lp) for lp in self.token_logprobs))
        if len(self.token_logprobs) != len(self.tokens):
            raise ValueError(
                f"{len(self.token_logprobs)} log-probs for {len(self.tokens)} tokens"
            )
        if not self.tokens:
            raise ValueError("empty token sequence")
        for lp in self.token_logprobs:
            if not math.isfinite(lp) or lp > 0.0:
                raise ValueError(f"invalid token log-prob {lp}")
        total = sum(self.token_logprobs)
        object.__setattr__(self, "total_logprob", total)
        object.__setattr__(self, "normalized_score", total / len(self.tokens))

    @classmethod
    def from_tokens(cls, tokens: Sequence[str], token_logprobs: Sequence[float]) -> "GenerationResult":
        return cls(tokens=tuple(tokens), text=detokenize(tokens), token_logprobs=tuple(token_logprobs))


@dataclass(frozen=True)
class GenerationParams:
    beam_width: int = DEFAULT_BEAM_WIDTH
    max_len: int = DEFAULT_MAX_LEN

    def __post_init__(self) -> None:
        if self.beam_width < 1:
            raise ValueError(f"beam_width must be >= 1, got {self.beam_width}")
        if self.max_len < 1:
            raise ValueError(f"max_len must be >= 1, got {self.max_len}")


@runtime_checkable
class ScorerBackend(Protocol):
    def generate(self, encoded, params: GenerationParams | None = None) -> GenerationResult:
        ...

    def score(self, encoded, target: Sequence[str]) -> GenerationResult:
        ...


@dataclass(frozen=True)
class ScorerConfig:
    order: int = DEFAULT_ORDER
    lm_weights: tuple[float, ...] = DEFAULT_LM_WEIGHTS
    copy_weight: float = DEFAULT_COPY_WEIGHT
    delta: float = DEFAULT_DELTA

    def __post_init__(self) -> None:
        object.__setattr__(self, "lm_weights", tuple(float(w) for w in self.lm_weights))
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if len(self.lm_weights) != self.order:
            raise ValueError(f"need {self.order} interpolation weights, got {len(self.lm_weights)}")
        if any(w < 0 for w in self.lm_weights) or abs(sum(self.lm_weights) - 1.0) > 1e-9:
            raise ValueError(f"interpolation weights must be nonnegative and sum to 1, got {self.lm_weights}")
        if not 0.0 <= self.copy_weight < 1.0:
            raise ValueError(f"copy_weight must be in [0, 1), got {self.copy_weight}")
        if self.delta <= 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")


class NgramCopyModel:
    """Interpolated n-gram language model with an input-copy mixture.

    Immutable once trained; safe to share across threads. lm_weights[i] is
    the weight of the (i+1)-gram component.
    """

    def __init__(
        self,
        config: ScorerConfig,
        vocab: Sequence[str],
        counts: list[dict[tuple[str, ...], dict[str, int]]],
    ) -> None:
        self.config = config
        self._vocab = tuple(sorted(set(vocab) | {UNK_TOKEN, EOS_TOKEN}))
        self._vocab_set = frozenset(self._vocab)
        if len(counts) != config.order:
            raise ValueError(f"need {config.order} count tables, got {len(counts)}")
        self._counts = counts
        self._context_totals: list[dict[tuple[str, ...], int]] = [
            {history: sum(words.values()) for history, words in table.items()} for table in counts
        ]

    @property
    def vocab(self) -> tuple[str, ...]:
        return self._vocab

    def _lm_prob(self, history: tuple[str, ...], token: str) -> float:
        """Interpolated smoothed probability of an in-vocabulary token."""
        config = self.config
        vocab_size = len(self._vocab)
        padded = (BOS_TOKEN,) * (config.order - 1) + history
        prob = 0.0
        for n in range(1, config.order + 1):
            weight = config.lm_weights[n - 1]
            if weight == 0.0:
                continue
            context = padded[len(padded) - (n - 1):] if n > 1 else ()
            table = self._counts[n - 1]
            count = table.get(context, {}).get(token, 0)
            total = self._context_totals[n - 1].get(context, 0)
            prob += weight * (count + config.delta) / (total + config.delta * vocab_size)
        return prob

    @staticmethod
    def _copy_distribution(input_tokens: Sequence[str]) -> dict[str, float]:
        if not input_tokens:
            return {}
        weight = 1.0 / len(input_tokens)
        dist: dict[str, float] = {}
        for token in input_tokens:
            dist[token] = dist.get(token, 0.0) + weight
        return dist

    def _mixture_logprob(
        self, history: tuple[str, ...], token: str, copy_dist: dict[str, float], gamma: float
    ) -> float:
        if token in self._vocab_set:
            prob = (1.0 - gamma) * self._lm_prob(history, token)
            if gamma > 0.0:
                prob += gamma * copy_dist.get(token, 0.0)
        else:
            prob = gamma * copy_dist[token]
        return math.log(min(prob, 1.0))

    def token_logprob(self, history: tuple[str, ...], token: str, input_tokens: Sequence[str]) -> float:
        """Natural-log probability of one next token given raw history and input.

        A token outside the vocabulary is scored as itself when it can draw
        copy mass from the input, and as the unknown token otherwise.
        """
        copy_dist = self._copy_distribution(input_tokens)
        gamma = self.config.copy_weight if copy_dist else 0.0
        if token not in self._vocab_set and not (gamma > 0.0 and token in copy_dist):
            token = UNK_TOKEN
        return self._mixture_logprob(history, token, copy_dist, gamma)

    def step_distribution(self, history: tuple[str, ...], input_tokens: Sequence[str]) -> dict[str, float]:
        """Log-probabilities over the full support for the next position."""
        copy_dist = self._copy_distribution(input_tokens)
        gamma = self.config.copy_weight if copy_dist else 0.0
        support = set(self._vocab)
        if gamma > 0.0:
            support.update(copy_dist)
        return {
            token: self._mixture_logprob(history, token, copy_dist, gamma) for token in support
        }

    def generate(self, encoded, params: GenerationParams | None = None) -> GenerationResult:
        """Deterministic beam search; beam_width 1 is greedy decoding.

        Hypotheses ending in the end marker leave the beam as completed;
        hypotheses alive at max_len are kept as truncated candidates. The
        result is the candidate with the highest normalized score, ties going
        to the lexicographically smallest token sequence.
        """
        params = params or GenerationParams()
        input_tokens = word_tokens(_input_text(encoded))
        beam: list[tuple[float, tuple[str, ...], tuple[float, ...]]] = [(0.0, (), ())]
        pool: list[tuple[tuple[str, ...], tuple[float, ...]]] = []
        for _ in range(params.max_len):
            expansions: list[tuple[float, tuple[str, ...], tuple[float, ...]]] = []
            for cum, tokens, logprobs in beam:
                dist = self.step_distribution(tokens, input_tokens)
                for token in sorted(dist):
                    lp = dist[token]
                    expansions.append((cum + lp, tokens + (token,), logprobs + (lp,)))
            expansions.sort(key=lambda e: (-e[0], e[1]))
            beam = []
            for cum, tokens, logprobs in expansions[: params.beam_width]:
                if tokens[-1] == EOS_TOKEN:
                    pool.append((tokens, logprobs))
                else:
                    beam.append((cum, tokens, logprobs))
            if not beam:
                break
        pool.extend((tokens, logprobs) for _, tokens, logprobs in beam)
        results = [GenerationResult.from_tokens(tokens, logprobs) for tokens, logprobs in pool]
        results.sort(key=lambda r: (-r.normalized_score, r.tokens))
        return results[0]

    def score(self, encoded, target: Sequence[str]) -> GenerationResult:
        target = tuple(target)
        if not target:
            raise ValueError("empty target")
        input_tokens = word_tokens(_input_text(encoded))
        logprobs = []
        history: tuple[str, ...] = ()
        for token in target:
            logprobs.append(self.token_logprob(history, token, input_tokens))
            history = history + (token,)
        return GenerationResult.from_tokens(target, logprobs)

    def to_json_dict(self) -> dict:
        tables = []
        for table in self._counts:
            tables.append({" ".join(history): dict(words) for history, words in table.items()})
        return {
            "format": MODEL_FORMAT,
            "config": {
                "order": self.config.order,
                "lm_weights": list(self.config.lm_weights),
                "copy_weight": self.config.copy_weight,
                "delta": self.config.delta,
            },
            "vocab": list(self._vocab),
            "counts": tables,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "NgramCopyModel":
        if data.get("format") != MODEL_FORMAT:
            raise ValueError(f"unsupported model format {data.get('format')!r}")
        raw = data["config"]
        config = ScorerConfig(
            order=int(raw["order"]),
            lm_weights=tuple(raw["lm_weights"]),
            copy_weight=float(raw["copy_weight"]),
            delta=float(raw["delta"]),
        )
        counts: list[dict[tuple[str, ...], dict[str, int]]] = []
        for table in data["counts"]:
            parsed: dict[tuple[str, ...], dict[str, int]] = {}
            for history, words in table.items():
                key = tuple(history.split(" ")) if history else ()
                parsed[key] = {word: int(count) for word, count in words.items()}
            counts.append(parsed)
        return cls(config=config, vocab=data["vocab"], counts=counts)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_json_dict(), handle, sort_keys=True, ensure_ascii=False)
            handle.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "NgramCopyModel":
        with open(path, encoding="utf-8") as handle:
            return cls.from_json_dict(json.load(handle))


def train_baseline(dataset: Sequence[tuple[object, str]], config: ScorerConfig | None = None) -> NgramCopyModel:
    """Count n-grams over the targets of (encoded input, target string) pairs.

    Targets are tokenized with the shared word tokenizer; each padded target
    sequence predicts its tokens plus the end marker. Inputs contribute
    nothing to the counts (the copy term reads them at inference time).
    """
    config = config or ScorerConfig()
    if not dataset:
        raise ValueError("empty dataset")
    vocab: set[str] = set()
    counts: list[dict[tuple[str, ...], dict[str, int]]] = [{} for _ in range(config.order)]
    for _, target in dataset:
        if not isinstance(target, str):
            raise ValueError(f"target must be a string, got {type(target).__name__}")
        tokens = word_tokens(target)
        vocab.update(tokens)
        padded = [BOS_TOKEN] * (config.order - 1) + tokens + [EOS_TOKEN]
        start = config.order - 1
        for position in range(start, len(padded)):
            token = padded[position]
            for n in range(1, config.order + 1):
                context = tuple(padded[position - (n - 1): position])
                table = counts[n - 1].setdefault(context, {})
                table[token] = table.get(token, 0) + 1
    return NgramCopyModel(config=config, vocab=sorted(vocab), counts=counts)


def generate(backend: ScorerBackend, encoded, params: GenerationParams | None = None) -> GenerationResult:
    return backend.generate(encoded, params or GenerationParams())


def score(backend: ScorerBackend, encoded, target: Sequence[str]) -> GenerationResult:
    return backend.score(encoded, target)


def confidence(
    backend: ScorerBackend, encoded, params: GenerationParams | None = None
) -> tuple[GenerationResult, float]:
    """The backend's best generation and its normalized score as confidence."""
    result = generate(backend, encoded, params)
    return result, result.normalized_score
