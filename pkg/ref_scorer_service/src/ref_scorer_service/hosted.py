"""Model hosting: greedy and beam generation plus forced scoring.

Generation picks token ids first, then reruns one forced forward pass over
the finished sequence to read its log-probabilities. Scoring runs the same
forced pass, so scoring a generation's own tokens reproduces its numbers
exactly. Model access is serialized by a lock; correctness over throughput.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

import torch
import torch.nn.functional as F
from transformers import AutoTokenizer, BartForConditionalGeneration

from .tinymodel import META_FILE

# positions kept clear of the learned position table
_POSITION_MARGIN = 8


@dataclass(frozen=True)
class ServiceConfig:
    """Deployment knobs: which model, where to bind, request defaults."""

    model_dir: str
    model_id: str = ""  # empty: use the identifier stored with the model
    device: str = "cpu"
    default_beam_width: int = 1
    default_max_len: int = 32
    host: str = "127.0.0.1"
    port: int = 8124

    def __post_init__(self) -> None:
        if not self.model_dir:
            raise ValueError("model_dir must be non-empty")
        if self.default_beam_width < 1:
            raise ValueError(f"default_beam_width must be >= 1, got {self.default_beam_width}")
        if self.default_max_len < 1:
            raise ValueError(f"default_max_len must be >= 1, got {self.default_max_len}")


@dataclass(frozen=True)
class ScoredSequence:
    tokens: tuple[str, ...]
    text: str
    token_logprobs: tuple[float, ...]


class HostedScorer:
    """One loaded seq2seq model answering generate and score requests."""

    def __init__(self, config: ServiceConfig) -> None:
        path = Path(config.model_dir)
        if not path.is_dir():
            raise FileNotFoundError(f"model directory {path} does not exist")
        self.tokenizer = AutoTokenizer.from_pretrained(str(path))
        self.model = BartForConditionalGeneration.from_pretrained(str(path))
        self.model.to(config.device)
        self.model.eval()
        meta: dict = {}
        meta_path = path / META_FILE
        if meta_path.is_file():
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
        self.model_id: str = config.model_id or str(meta.get("model") or path.name)
        self.config = config
        self.sequence_budget: int = int(self.model.config.max_position_embeddings) - _POSITION_MARGIN
        self._device = config.device
        self._start = int(self.model.config.decoder_start_token_id)
        self._eos = int(self.model.config.eos_token_id)
        self._lock = threading.Lock()

    # ------------------------------------------------------------- encoding

    def input_token_count(self, text: str) -> int:
        return len(text.split()) + 2

    def _encode_input(self, text: str) -> torch.Tensor:
        ids = self.tokenizer.convert_tokens_to_ids(text.split())
        wrapped = [self.tokenizer.bos_token_id, *ids, self.tokenizer.eos_token_id]
        return torch.tensor([wrapped], dtype=torch.long, device=self._device)

    def _join(self, tokens: tuple[str, ...]) -> str:
        out = list(tokens)
        if out and out[-1] == self.tokenizer.eos_token:
            out = out[:-1]
        return " ".join(out)

    # ----------------------------------------------------------- model math

    def _next_logprobs(self, encoder_ids: torch.Tensor, decoder_ids: list[int]) -> torch.Tensor:
        decoder = torch.tensor([decoder_ids], dtype=torch.long, device=self._device)
        logits = self.model(input_ids=encoder_ids, decoder_input_ids=decoder).logits
        return F.log_softmax(logits[0, -1, :], dim=-1)

    def _forced_logprobs(self, encoder_ids: torch.Tensor, target_ids: list[int]) -> list[float]:
        decoder = torch.tensor(
            [[self._start, *target_ids[:-1]]], dtype=torch.long, device=self._device
        )
        logits = self.model(input_ids=encoder_ids, decoder_input_ids=decoder).logits
        table = F.log_softmax(logits[0], dim=-1)
        # row i predicts target_ids[i]; clamp float noise at the zero bound
        return [min(float(table[i, tid]), 0.0) for i, tid in enumerate(target_ids)]

    def _greedy_ids(self, encoder_ids: torch.Tensor, max_len: int) -> list[int]:
        ids: list[int] = []
        decoder = [self._start]
        while len(ids) < max_len:
            step = int(torch.argmax(self._next_logprobs(encoder_ids, decoder)))
            ids.append(step)
            if step == self._eos:
                break
            decoder.append(step)
        return ids

    def _beam_ids(self, encoder_ids: torch.Tensor, beam_width: int, max_len: int) -> list[int]:
        # hypothesis: (ids, total logprob, finished)
        beams: list[tuple[tuple[int, ...], float, bool]] = [((), 0.0, False)]
        for _ in range(max_len):
            grown: list[tuple[tuple[int, ...], float, bool]] = []
            for ids, total, done in beams:
                if done:
                    grown.append((ids, total, True))
                    continue
                logprobs = self._next_logprobs(encoder_ids, [self._start, *ids])
                width = min(beam_width, logprobs.shape[0])
                top = torch.topk(logprobs, width)
                for value, tid in zip(top.values.tolist(), top.indices.tolist()):
                    grown.append(((*ids, tid), total + value, tid == self._eos))
            grown.sort(key=lambda beam: (-beam[1], beam[0]))
            beams = grown[:beam_width]
            if all(done for _, _, done in beams):
                break
        best = max(beams, key=lambda beam: (beam[1] / len(beam[0]), beam[0]))
        return list(best[0])

    # -------------------------------------------------------------- surface

    def generate(self, input_text: str, beam_width: int, max_len: int) -> ScoredSequence:
        with self._lock, torch.no_grad():
            encoder_ids = self._encode_input(input_text)
            if beam_width == 1:
                ids = self._greedy_ids(encoder_ids, max_len)
            else:
                ids = self._beam_ids(encoder_ids, beam_width, max_len)
            logprobs = self._forced_logprobs(encoder_ids, ids)
            tokens = tuple(self.tokenizer.convert_ids_to_tokens(ids))
        return ScoredSequence(tokens, self._join(tokens), tuple(logprobs))

    def score(self, input_text: str, target_tokens: list[str]) -> ScoredSequence:
        with self._lock, torch.no_grad():
            encoder_ids = self._encode_input(input_text)
            target_ids = self.tokenizer.convert_tokens_to_ids(list(target_tokens))
            logprobs = self._forced_logprobs(encoder_ids, target_ids)
        tokens = tuple(target_tokens)
        return ScoredSequence(tokens, self._join(tokens), tuple(logprobs))
