"""Definition-sentence corpus: record parsing, pair extraction, coverage, splits.

A definition record is one JSON object per line:

    {"id": ..., "head": {"key": ..., "surface": ..., "char_span": [s, e]},
     "text": ..., "links": [{"key": ..., "surface": ..., "char_start": s,
     "char_end": e}, ...]}

Character offsets are converted to word-token spans at parse time; an offset
range that cuts through a token is rejected. Dependency parses arrive as
10-column CoNLL-U blocks and are treated as ground truth. Coverage scores,
the strict > threshold filter, head-grouped splitting, and train subsampling
follow the formulas documented on each function.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass

from .encode import EncodedInput, encode_path, encode_unknown, encode_vanilla
from .kg import KnowledgeGraph
from .pathfind import EntityPair, k_shortest_paths, shortest_path
from .textutil import word_token_spans

logger = logging.getLogger(__name__)

DEFAULT_COVERAGE_THRESHOLD = 0.6


@dataclass(frozen=True)
class EntityLink:
    key: str
    surface: str
    span: tuple[int, int]


@dataclass(frozen=True)
class DefinitionRecord:
    id: str
    head_key: str
    head_surface: str
    head_span: tuple[int, int]
    text: str
    tokens: tuple[str, ...]
    links: tuple[EntityLink, ...]


@dataclass(frozen=True)
class RelationExample:
    record_id: str
    head_key: str
    tail_key: str
    target: str
    tokens: tuple[str, ...]
    head_span: tuple[int, int]
    tail_span: tuple[int, int]

    def __post_init__(self) -> None:
        if self.head_key == self.tail_key:
            raise ValueError(f"record {self.record_id}: head equals tail ({self.head_key})")
        n = len(self.tokens)
        for name, (start, end) in (("head", self.head_span), ("tail", self.tail_span)):
            if not (0 <= start < end <= n):
                raise ValueError(f"record {self.record_id}: empty or out-of-range {name} span")
        if self.head_span[0] < self.tail_span[1] and self.tail_span[0] < self.head_span[1]:
            raise ValueError(f"record {self.record_id}: overlapping spans")

    @property
    def pair_id(self) -> str:
        return f"{self.head_key}__{self.tail_key}"


@dataclass(frozen=True)
class DependencyGraph:
    tokens: tuple[tuple[str, int, str], ...]
    root: int


@dataclass(frozen=True)
class DroppedExample:
    example: RelationExample
    surface: float | None
    dependency: float | None
    reason: str


@dataclass(frozen=True)
class DatasetSplit:
    train: list[RelationExample]
    dev: list[RelationExample]
    test: list[RelationExample]
    seed: int


@dataclass(frozen=True)
class DatasetRow:
    head_key: str
    tail_key: str
    encoding: EncodedInput
    target: str

    def to_json_dict(self) -> dict:
        return {
            "head_key": self.head_key,
            "tail_key": self.tail_key,
            "encoding_variant": self.encoding.variant,
            "input": self.encoding.text,
            "target": self.target,
        }


def _char_to_token_span(
    record_id: str,
    spans: list[tuple[str, int, int]],
    char_start: int,
    char_end: int,
    text_len: int,
) -> tuple[int, int]:
    if not (0 <= char_start < char_end <= text_len):
        raise ValueError(f"record {record_id}: span out of range [{char_start}, {char_end})")
    covered: list[int] = []
    for i, (_, ts, te) in enumerate(spans):
        if ts < char_end and char_start < te:
            # overlapping token: must lie fully inside the link span
            if ts < char_start or te > char_end:
                raise ValueError(f"record {record_id}: misaligned span [{char_start}, {char_end})")
            covered.append(i)
    if not covered:
        raise ValueError(f"record {record_id}: misaligned span [{char_start}, {char_end}) covers no token")
    return covered[0], covered[-1] + 1


def parse_definition_record(line: str, known_keys=None) -> DefinitionRecord:
    """Parse one JSON-lines definition record, mapping char offsets to token spans.

    known_keys, when given, is any container supporting `in`; a head key
    missing from it is rejected. Link keys are never checked here: downstream
    dataset construction skips unresolvable tails with a count instead.
    """
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed JSON record: {exc}") from None
    if not isinstance(raw, dict):
        raise ValueError("malformed JSON record: not an object")
    record_id = str(raw.get("id", ""))
    if not record_id:
        raise ValueError("malformed JSON record: missing id")
    text = raw.get("text")
    if not isinstance(text, str) or not text:
        raise ValueError(f"record {record_id}: missing or empty text")
    head = raw.get("head")
    if not isinstance(head, dict) or not head.get("key"):
        raise ValueError(f"record {record_id}: unresolvable head (missing key)")
    head_key = str(head["key"])
    if known_keys is not None and head_key not in known_keys:
        raise ValueError(f"record {record_id}: unresolvable head key {head_key}")
    char_span = head.get("char_span")
    if not isinstance(char_span, (list, tuple)) or len(char_span) != 2:
        raise ValueError(f"record {record_id}: malformed head char_span")

    spans = word_token_spans(text)
    if not spans:
        raise ValueError(f"record {record_id}: text has no word tokens")
    head_span = _char_to_token_span(record_id, spans, int(char_span[0]), int(char_span[1]), len(text))

    links: list[EntityLink] = []
    for link in raw.get("links", []):
        if not isinstance(link, dict) or not link.get("key"):
            raise ValueError(f"record {record_id}: malformed link")
        span = _char_to_token_span(
            record_id, spans, int(link["char_start"]), int(link["char_end"]), len(text)
        )
        links.append(EntityLink(key=str(link["key"]), surface=str(link.get("surface", "")), span=span))

    return DefinitionRecord(
        id=record_id,
        head_key=head_key,
        head_surface=str(head.get("surface", "")),
        head_span=head_span,
        text=text,
        tokens=tuple(form for form, _, _ in spans),
        links=tuple(links),
    )


def extract_pairs(record: DefinitionRecord) -> list[RelationExample]:
    """One example per link to a different entity; all share the record text."""
    examples: list[RelationExample] = []
    for link in record.links:
        if link.key == record.head_key:
            continue
        if link.span[0] < record.head_span[1] and record.head_span[0] < link.span[1]:
            logger.debug("record %s: link %s overlaps the head span; dropped", record.id, link.key)
            continue
        examples.append(
            RelationExample(
                record_id=record.id,
                head_key=record.head_key,
                tail_key=link.key,
                target=record.text,
                tokens=record.tokens,
                head_span=record.head_span,
                tail_span=link.span,
            )
        )
    return examples


def surface_coverage(example: RelationExample) -> float:
    """Fraction of tokens spanned from the earlier span's start to the later span's end."""
    (hs, he), (ts, te) = example.head_span, example.tail_span
    if hs < te and ts < he:
        raise ValueError("overlapping spans")
    return (max(he, te) - min(hs, ts)) / len(example.tokens)


def _tree_path(parse: DependencyGraph, a: int, b: int) -> list[int]:
    """Token indices on the undirected tree path from a to b, inclusive."""
    def ancestors(node: int) -> list[int]:
        chain = [node]
        while parse.tokens[chain[-1]][1] != 0:
            chain.append(parse.tokens[chain[-1]][1] - 1)
        return chain

    up_a = ancestors(a)
    up_b = ancestors(b)
    in_a = {node: depth for depth, node in enumerate(up_a)}
    for depth_b, node in enumerate(up_b):
        if node in in_a:
            return up_a[: in_a[node]] + up_b[: depth_b + 1]
    raise ValueError("disconnected parse")


def dependency_coverage(example: RelationExample, parse: DependencyGraph) -> float:
    """Fraction of tokens on the shortest tree path between the spans.

    Path endpoints are the head-span and tail-span tokens whose tree path is
    shortest (ties resolved toward the smallest token indices); all span
    tokens count toward the covered set as well.
    """
    if len(parse.tokens) != len(example.tokens):
        raise ValueError(
            f"misaligned parse length: {len(parse.tokens)} parse tokens for {len(example.tokens)} word tokens"
        )
    best: list[int] | None = None
    for h in range(*example.head_span):
        for t in range(*example.tail_span):
            path = _tree_path(parse, h, t)
            if best is None or len(path) < len(best):
                best = path
    assert best is not None
    covered = set(best)
    covered.update(range(*example.head_span))
    covered.update(range(*example.tail_span))
    return len(covered) / len(example.tokens)


def filter_examples(
    examples: list[RelationExample],
    parses: dict[str, DependencyGraph],
    threshold: float = DEFAULT_COVERAGE_THRESHOLD,
) -> tuple[list[RelationExample], list[DroppedExample]]:
    """Keep examples whose mean of surface and dependency coverage is > threshold."""
    kept: list[RelationExample] = []
    dropped: list[DroppedExample] = []
    for example in examples:
        parse = parses.get(example.record_id)
        if parse is None:
            dropped.append(DroppedExample(example, None, None, "no parse"))
            continue
        surf = surface_coverage(example)
        dep = dependency_coverage(example, parse)
        if (surf + dep) / 2.0 > threshold:
            kept.append(example)
        else:
            dropped.append(DroppedExample(example, surf, dep, "low coverage"))
    return kept, dropped


def load_conllu(source) -> list[DependencyGraph]:
    """Parse 10-column CoNLL-U blocks into validated dependency trees.

    Comment lines and multiword/empty-node rows (ids with "-" or ".") are
    skipped. Each block must hold consecutively numbered tokens forming a
    tree with exactly one root (HEAD column 0).
    """
    graphs: list[DependencyGraph] = []
    rows: list[tuple[str, int, str]] = []
    sentence_index = 1

    def finish() -> None:
        nonlocal rows, sentence_index
        if not rows:
            return
        heads = [h for _, h, _ in rows]
        n = len(rows)
        roots = [i for i, h in enumerate(heads) if h == 0]
        if len(roots) > 1:
            raise ValueError(f"sentence {sentence_index}: multiple roots")
        for h in heads:
            if not 0 <= h <= n:
                raise ValueError(f"sentence {sentence_index}: head index {h} out of range")
        if not roots:
            raise ValueError(f"sentence {sentence_index}: cycle")
        # color: 0 unvisited, 1 on current chain, 2 proven to reach the root
        color = [0] * n
        for start in range(n):
            chain: list[int] = []
            node = start
            while True:
                if color[node] == 1:
                    raise ValueError(f"sentence {sentence_index}: cycle")
                if color[node] == 2:
                    break
                color[node] = 1
                chain.append(node)
                if heads[node] == 0:
                    break
                node = heads[node] - 1
            for visited in chain:
                color[visited] = 2
        graphs.append(DependencyGraph(tokens=tuple(rows), root=roots[0]))
        rows = []
        sentence_index += 1

    for raw in source:
        line = raw.rstrip("\n").rstrip("\r")
        if not line:
            finish()
            continue
        if line.startswith("#"):
            continue
        columns = line.split("\t")
        if len(columns) != 10:
            raise ValueError(f"sentence {sentence_index}: expected 10 columns, got {len(columns)}")
        token_id = columns[0]
        if "-" in token_id or "." in token_id:
            continue
        try:
            index = int(token_id)
            head = int(columns[6])
        except ValueError:
            raise ValueError(f"sentence {sentence_index}: non-integer id or head") from None
        if index != len(rows) + 1:
            raise ValueError(f"sentence {sentence_index}: non-consecutive token ids")
        rows.append((columns[1], head, columns[7]))
    finish()
    return graphs


def split_dataset(
    examples: list[RelationExample],
    fractions: tuple[float, float, float],
    seed: int,
) -> DatasetSplit:
    """Assign whole head-entity groups to train/dev/test by seeded shuffle.

    Groups (first-seen order, then shuffled) fill the splits greedily against
    cumulative example-count targets, advancing to the next split once its
    target is reached, with a guard that leaves every split at least one
    group. Head disjointness is exact; per-split counts land within the
    straddling group of the targets.
    """
    if len(fractions) != 3:
        raise ValueError("fractions must be (train, dev, test)")
    if any(f <= 0 for f in fractions):
        raise ValueError("fractions must be positive")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got {sum(fractions)}")

    group_order: list[str] = []
    groups: dict[str, list[RelationExample]] = {}
    for example in examples:
        if example.head_key not in groups:
            groups[example.head_key] = []
            group_order.append(example.head_key)
        groups[example.head_key].append(example)
    if len(group_order) < 3:
        raise ValueError(f"fewer distinct heads ({len(group_order)}) than splits (3)")

    shuffled = list(group_order)
    random.Random(seed).shuffle(shuffled)

    total = len(examples)
    targets = (fractions[0] * total, (fractions[0] + fractions[1]) * total, float(total))
    buckets: tuple[list[RelationExample], ...] = ([], [], [])
    group_counts = [0, 0, 0]
    split = 0
    assigned = 0
    for position, head_key in enumerate(shuffled):
        groups_left = len(shuffled) - position
        while (
            split < 2
            and group_counts[split] > 0
            and (groups_left == 2 - split or (assigned + 1e-9 >= targets[split] and groups_left >= 2 - split))
        ):
            split += 1
        bucket = groups[head_key]
        buckets[split].extend(bucket)
        group_counts[split] += 1
        assigned += len(bucket)

    return DatasetSplit(train=buckets[0], dev=buckets[1], test=buckets[2], seed=seed)


def subsample(split: DatasetSplit, fraction: float, seed: int) -> DatasetSplit:
    """Seeded uniform subsample of train only, original order preserved."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    n = len(split.train)
    k = int(fraction * n + 0.5)
    indices = sorted(random.Random(seed).sample(range(n), k))
    return DatasetSplit(
        train=[split.train[i] for i in indices],
        dev=split.dev,
        test=split.test,
        seed=split.seed,
    )


def build_dataset_rows(
    examples: list[RelationExample],
    graph: KnowledgeGraph,
    mode: str,
    max_hops: int = 3,
    k: int = 5,
    seed: int = 0,
    allow_inverse: bool = False,
) -> tuple[list[DatasetRow], int]:
    """Encode filtered examples as model inputs paired with their targets.

    mode "vanilla" emits the bare pair form, "shortest" one sampled
    minimum-hop path per pair, "multipath" up to k canonical-order paths
    (one row each); pairs with no path within max_hops fall back to the
    unknown form. Examples whose head or tail is absent from the graph are
    skipped; the skip count is returned alongside the rows.
    """
    if mode not in ("vanilla", "shortest", "multipath"):
        raise ValueError(f"invalid dataset mode {mode!r}")
    rows: list[DatasetRow] = []
    skipped = 0
    for index, example in enumerate(examples):
        if not (graph.has_entity_key(example.head_key) and graph.has_entity_key(example.tail_key)):
            skipped += 1
            continue
        pair = EntityPair(graph.entity_id(example.head_key), graph.entity_id(example.tail_key))
        encodings: list[EncodedInput]
        if mode == "vanilla":
            encodings = [encode_vanilla(pair, graph)]
        elif mode == "shortest":
            path = shortest_path(
                graph, pair.head, pair.tail, max_hops=max_hops, seed=seed + index, allow_inverse=allow_inverse
            )
            encodings = [encode_path(path, graph) if path else encode_unknown(pair, graph)]
        else:
            paths = k_shortest_paths(
                graph, pair.head, pair.tail, k=k, max_hops=max_hops, allow_inverse=allow_inverse
            )
            encodings = [encode_path(p, graph) for p in paths] or [encode_unknown(pair, graph)]
        for encoding in encodings:
            rows.append(
                DatasetRow(
                    head_key=example.head_key,
                    tail_key=example.tail_key,
                    encoding=encoding,
                    target=example.target,
                )
            )
    if skipped:
        logger.info("dataset build skipped %d examples with entities outside the graph", skipped)
    return rows, skipped
