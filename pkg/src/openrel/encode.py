"""Serialization of entity pairs and reasoning paths into model-input strings.

Three variants share one surface form built from "; " and ": " delimiters:

    vanilla  "<head>; <tail>"
    path     "<head>; <rel 1>: <node 1>; ...; <rel k>: <tail>"
    unknown  "<head>; unknown: <tail>"

Inverse steps prefix the relation label with "inverse of ". Labels are
concatenated raw, with no escaping, so decoding is best-effort: texts whose
labels contain a delimiter sequence decode with the ambiguous flag set.
Two collisions are inherently undetectable and therefore never flagged: a
single-step path whose relation label is literally "unknown" decodes as the
unknown variant, and a relation label that itself starts with "inverse of "
decodes as an inverse step.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kg import KnowledgeGraph
from .pathfind import EntityPair, ReasoningPath, validate_path

VANILLA = "vanilla"
PATH = "path"
UNKNOWN = "unknown"

SEGMENT_DELIMITER = "; "
RELATION_DELIMITER = ": "
INVERSE_PREFIX = "inverse of "
UNKNOWN_RELATION = "unknown"


@dataclass(frozen=True)
class EncodedInput:
    text: str
    variant: str
    hops: int | None = None

    def __post_init__(self) -> None:
        if self.variant not in (VANILLA, PATH, UNKNOWN):
            raise ValueError(f"invalid variant {self.variant!r}")
        if not self.text:
            raise ValueError("empty encoded text")
        if self.variant == PATH:
            if self.hops is None or self.hops < 1:
                raise ValueError("path variant requires hops >= 1")
        elif self.hops is not None:
            raise ValueError(f"{self.variant} variant takes no hop count")


@dataclass(frozen=True)
class DecodedStep:
    relation_label: str
    node_label: str
    inverse: bool = False


@dataclass(frozen=True)
class DecodedInput:
    variant: str
    head_label: str
    steps: tuple[DecodedStep, ...]
    tail_label: str
    ambiguous: bool


def _pair_labels(pair: EntityPair, graph: KnowledgeGraph) -> tuple[str, str]:
    if pair.head == pair.tail:
        raise ValueError(f"head equals tail ({pair.head})")
    return graph.entity_label(pair.head), graph.entity_label(pair.tail)


def encode_vanilla(pair: EntityPair, graph: KnowledgeGraph) -> EncodedInput:
    head, tail = _pair_labels(pair, graph)
    return EncodedInput(text=f"{head}{SEGMENT_DELIMITER}{tail}", variant=VANILLA)


def encode_unknown(pair: EntityPair, graph: KnowledgeGraph) -> EncodedInput:
    head, tail = _pair_labels(pair, graph)
    text = f"{head}{SEGMENT_DELIMITER}{UNKNOWN_RELATION}{RELATION_DELIMITER}{tail}"
    return EncodedInput(text=text, variant=UNKNOWN)


def encode_path(path: ReasoningPath, graph: KnowledgeGraph) -> EncodedInput:
    validate_path(graph, path)
    if path.hops < 1:
        raise ValueError("path encoding requires at least one step")
    parts = [graph.entity_label(path.head)]
    for step in path.steps:
        relation = graph.relation_label(step.relation)
        if step.inverse:
            relation = INVERSE_PREFIX + relation
        parts.append(f"{relation}{RELATION_DELIMITER}{graph.entity_label(step.node)}")
    return EncodedInput(text=SEGMENT_DELIMITER.join(parts), variant=PATH, hops=path.hops)


def _parse_step(segment: str) -> tuple[DecodedStep, bool]:
    relation, node = segment.split(RELATION_DELIMITER, 1)
    inverse = relation.startswith(INVERSE_PREFIX)
    if inverse:
        relation = relation[len(INVERSE_PREFIX):]
    return DecodedStep(relation, node, inverse), segment.count(RELATION_DELIMITER) > 1


def decode(encoded: EncodedInput | str) -> DecodedInput:
    """Best-effort inverse of the encoders.

    Unambiguous on texts whose labels contain neither "; " nor ": "; other
    texts are parsed on a best-effort basis with the ambiguous flag set. A
    segment without ": " (impossible in well-formed path output) is glued
    onto the preceding label: the head before any step has been read, the
    previous node label after. Vanilla texts with extra segments attribute
    them all to the tail.
    """
    text = encoded.text if isinstance(encoded, EncodedInput) else encoded
    segments = text.split(SEGMENT_DELIMITER)
    if len(segments) < 2:
        return DecodedInput(VANILLA, text, (), "", ambiguous=True)
    head = segments[0]
    rest = segments[1:]
    with_colon = sum(1 for seg in rest if RELATION_DELIMITER in seg)

    if with_colon == 0:
        if len(rest) == 1:
            return DecodedInput(VANILLA, head, (), rest[0], ambiguous=False)
        return DecodedInput(VANILLA, head, (), SEGMENT_DELIMITER.join(rest), ambiguous=True)

    ambiguous = with_colon < len(rest)
    steps: list[DecodedStep] = []
    for segment in rest:
        if RELATION_DELIMITER in segment:
            step, extra_colon = _parse_step(segment)
            steps.append(step)
            ambiguous = ambiguous or extra_colon
        elif steps:
            last = steps[-1]
            steps[-1] = DecodedStep(
                last.relation_label, last.node_label + SEGMENT_DELIMITER + segment, last.inverse
            )
        else:
            head = head + SEGMENT_DELIMITER + segment

    tail = steps[-1].node_label
    if len(steps) == 1 and not steps[0].inverse and steps[0].relation_label == UNKNOWN_RELATION:
        return DecodedInput(UNKNOWN, head, (), tail, ambiguous=ambiguous)
    return DecodedInput(PATH, head, tuple(steps), tail, ambiguous=ambiguous)
