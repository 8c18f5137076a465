"""Reasoning-path selection strategies for an entity pair.

Three strategies produce a SelectionOutcome: shortest (minimum hops, seeded
uniform tie-break, unknown-encoding fallback when no path exists within the
hop bound), confidence (argmax of the backend's normalized self-score over
candidate encodings, optionally penalized per hop), and random walk (argmax
of the probability that a uniform outgoing-edge walk emits the path).
"""

from __future__ import annotations

from dataclasses import dataclass

from .encode import UNKNOWN, EncodedInput, encode_path, encode_unknown
from .kg import FORWARD, REVERSE, KnowledgeGraph
from .pathfind import (
    DEFAULT_MAX_HOPS,
    EntityPair,
    ReasoningPath,
    count_shortest_paths,
    shortest_path,
    validate_path,
)
from .scorer import GenerationParams, GenerationResult, ScorerBackend, confidence

METHOD_SHORTEST = "shortest"
METHOD_CONFIDENCE = "confidence"
METHOD_RANDOM_WALK = "random_walk"
METHOD_UNKNOWN_FALLBACK = "unknown_fallback"

_METHODS = (METHOD_SHORTEST, METHOD_CONFIDENCE, METHOD_RANDOM_WALK, METHOD_UNKNOWN_FALLBACK)


@dataclass(frozen=True)
class SelectionOutcome:
    pair: EntityPair
    chosen: ReasoningPath | None
    encoding: EncodedInput
    generation: GenerationResult | None
    method: str
    candidates_considered: int

    def __post_init__(self) -> None:
        if self.method not in _METHODS:
            raise ValueError(f"invalid selection method {self.method!r}")
        if self.chosen is None and self.encoding.variant != UNKNOWN:
            raise ValueError("outcome without a chosen path must use the unknown encoding")
        if self.method == METHOD_CONFIDENCE and self.generation is None:
            raise ValueError("confidence outcome requires a generation")
        if self.candidates_considered < 0:
            raise ValueError("candidates_considered must be >= 0")


def _check_same_pair(candidates: list[ReasoningPath]) -> EntityPair:
    if not candidates:
        raise ValueError("empty candidates")
    pair = EntityPair(candidates[0].head, candidates[0].tail)
    for path in candidates[1:]:
        if path.head != pair.head or path.tail != pair.tail:
            raise ValueError("candidates must all connect the same entity pair")
    return pair


def select_shortest(
    graph: KnowledgeGraph,
    pair: EntityPair,
    max_hops: int = DEFAULT_MAX_HOPS,
    seed: int = 0,
    allow_inverse: bool = False,
) -> SelectionOutcome:
    """Minimum-hop path (seeded uniform among ties), unknown encoding if none."""
    path = shortest_path(graph, pair.head, pair.tail, max_hops=max_hops, seed=seed, allow_inverse=allow_inverse)
    if path is None:
        return SelectionOutcome(
            pair=pair,
            chosen=None,
            encoding=encode_unknown(pair, graph),
            generation=None,
            method=METHOD_UNKNOWN_FALLBACK,
            candidates_considered=0,
        )
    ties = count_shortest_paths(graph, pair.head, pair.tail, max_hops=max_hops, allow_inverse=allow_inverse)
    return SelectionOutcome(
        pair=pair,
        chosen=path,
        encoding=encode_path(path, graph),
        generation=None,
        method=METHOD_SHORTEST,
        candidates_considered=ties,
    )


def select_by_confidence(
    backend: ScorerBackend,
    candidates: list[ReasoningPath],
    graph: KnowledgeGraph,
    params: GenerationParams | None = None,
    hop_penalty: float = 0.0,
) -> SelectionOutcome:
    """Argmax of backend confidence minus hop_penalty * hops over candidates.

    Ties break toward the lexicographically smallest encoding text. The
    returned generation is the backend's output for the winning encoding, and
    its normalized score is the unpenalized confidence.
    """
    pair = _check_same_pair(candidates)
    best: tuple[float, str] | None = None
    chosen: tuple[ReasoningPath, EncodedInput, GenerationResult] | None = None
    for path in candidates:
        encoding = encode_path(path, graph)
        generation, raw = confidence(backend, encoding, params)
        adjusted = raw - hop_penalty * path.hops
        key = (-adjusted, encoding.text)
        if best is None or key < best:
            best = key
            chosen = (path, encoding, generation)
    assert chosen is not None
    path, encoding, generation = chosen
    return SelectionOutcome(
        pair=pair,
        chosen=path,
        encoding=encoding,
        generation=generation,
        method=METHOD_CONFIDENCE,
        candidates_considered=len(candidates),
    )


def random_walk_prob(graph: KnowledgeGraph, path: ReasoningPath) -> float:
    """Probability a uniform random walk from the head emits exactly this path.

    Each step contributes 1 / degree of the current node, with degree counted
    over the step's traversal direction and parallel edges included.
    """
    validate_path(graph, path)
    prob = 1.0
    current = path.head
    for step in path.steps:
        degree = graph.outdegree(current, REVERSE if step.inverse else FORWARD)
        if degree == 0:
            raise ValueError(f"node {current} has no outgoing edges for the step direction")
        prob *= 1.0 / degree
        current = step.node
    return prob


def select_random_walk(graph: KnowledgeGraph, candidates: list[ReasoningPath]) -> SelectionOutcome:
    """Argmax of random_walk_prob; ties prefer fewer hops, then encoding text."""
    pair = _check_same_pair(candidates)
    best: tuple[float, int, str] | None = None
    chosen: tuple[ReasoningPath, EncodedInput] | None = None
    for path in candidates:
        encoding = encode_path(path, graph)
        prob = random_walk_prob(graph, path)
        key = (-prob, path.hops, encoding.text)
        if best is None or key < best:
            best = key
            chosen = (path, encoding)
    assert chosen is not None
    path, encoding = chosen
    return SelectionOutcome(
        pair=pair,
        chosen=path,
        encoding=encoding,
        generation=None,
        method=METHOD_RANDOM_WALK,
        candidates_considered=len(candidates),
    )
