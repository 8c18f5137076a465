"""Immutable knowledge graph: interned entities and relations, CSR adjacency.

The graph is built once from tab-separated triple and label streams and is
read-only afterwards, so it can be shared freely across threads. Adjacency
is stored in CSR form (forward, reverse, and an undirected union used for
reachability bucketing), with per-node slices sorted by (relation id,
neighbor id).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import accel

logger = logging.getLogger(__name__)

FORWARD = "forward"
REVERSE = "reverse"


class LoadError(ValueError):
    """Raised for malformed or inconsistent graph input files."""


@dataclass(frozen=True)
class EntityId:
    id: int
    label: str
    external_key: str


@dataclass(frozen=True)
class RelationId:
    id: int
    label: str
    external_key: str


@dataclass(frozen=True)
class Triple:
    head: int
    relation: int
    tail: int


def _parse_label_lines(lines: Iterable[str], kind: str) -> tuple[list[str], list[str], dict[str, int]]:
    keys: list[str] = []
    labels: list[str] = []
    index: dict[str, int] = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise LoadError(f"malformed {kind} label line {line_no}: expected 2 tab-separated fields")
        key, label = parts
        if not key:
            raise LoadError(f"empty {kind} key at line {line_no}")
        if not label:
            raise LoadError(f"empty label for {kind} key {key} at line {line_no}")
        if key in index:
            raise LoadError(f"duplicate {kind} key {key} at line {line_no}")
        index[key] = len(keys)
        keys.append(key)
        labels.append(label)
    return keys, labels, index


def _csr_from_edges(src: np.ndarray, rel: np.ndarray, dst: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # lexsort uses the last key as primary: sort by (src, rel, dst).
    order = np.lexsort((dst, rel, src))
    src_sorted = src[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src_sorted, minlength=n), out=indptr[1:])
    return indptr, np.ascontiguousarray(rel[order]), np.ascontiguousarray(dst[order])


class KnowledgeGraph:
    """Entity/relation interned triple store with CSR adjacency.

    Instances are immutable after construction; use :func:`load_kg`.
    """

    def __init__(
        self,
        entity_keys: list[str],
        entity_labels: list[str],
        entity_index: dict[str, int],
        relation_keys: list[str],
        relation_labels: list[str],
        relation_index: dict[str, int],
        triples: list[tuple[int, int, int]],
        duplicates_dropped: int,
    ) -> None:
        self._entity_keys = entity_keys
        self._entity_labels = entity_labels
        self._entity_index = entity_index
        self._relation_keys = relation_keys
        self._relation_labels = relation_labels
        self._relation_index = relation_index
        self._duplicates_dropped = duplicates_dropped
        self._n_triples = len(triples)
        self._self_loops = sum(1 for h, _, t in triples if h == t)

        n = len(entity_keys)
        if triples:
            heads = np.fromiter((t[0] for t in triples), dtype=np.int64, count=len(triples))
            rels = np.fromiter((t[1] for t in triples), dtype=np.int64, count=len(triples))
            tails = np.fromiter((t[2] for t in triples), dtype=np.int64, count=len(triples))
        else:
            heads = np.empty(0, dtype=np.int64)
            rels = np.empty(0, dtype=np.int64)
            tails = np.empty(0, dtype=np.int64)
        self.fwd_indptr, self.fwd_rel, self.fwd_dst = _csr_from_edges(heads, rels, tails, n)
        self.rev_indptr, self.rev_rel, self.rev_dst = _csr_from_edges(tails, rels, heads, n)

        # Undirected union with deduplicated neighbors, for reachability only.
        if triples:
            und_src = np.concatenate([heads, tails])
            und_dst = np.concatenate([tails, heads])
            pair_codes = np.unique(und_src * np.int64(n) + und_dst)
            und_src = pair_codes // n
            und_dst = pair_codes % n
        else:
            und_src = np.empty(0, dtype=np.int64)
            und_dst = np.empty(0, dtype=np.int64)
        self.und_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(und_src, minlength=n), out=self.und_indptr[1:])
        self.und_dst = np.ascontiguousarray(und_dst)

        if self._self_loops:
            logger.warning("graph contains %d self-loop triples; they are never used in paths", self._self_loops)

    @property
    def n_entities(self) -> int:
        return len(self._entity_keys)

    @property
    def n_relations(self) -> int:
        return len(self._relation_keys)

    @property
    def n_triples(self) -> int:
        return self._n_triples

    @property
    def duplicates_dropped(self) -> int:
        return self._duplicates_dropped

    @property
    def self_loops(self) -> int:
        return self._self_loops

    def _check_entity(self, entity_id: int) -> None:
        if not 0 <= entity_id < self.n_entities:
            raise ValueError(f"invalid entity id {entity_id}")

    def entity(self, entity_id: int) -> EntityId:
        self._check_entity(entity_id)
        return EntityId(entity_id, self._entity_labels[entity_id], self._entity_keys[entity_id])

    def relation(self, relation_id: int) -> RelationId:
        if not 0 <= relation_id < self.n_relations:
            raise ValueError(f"invalid relation id {relation_id}")
        return RelationId(relation_id, self._relation_labels[relation_id], self._relation_keys[relation_id])

    def entity_label(self, entity_id: int) -> str:
        self._check_entity(entity_id)
        return self._entity_labels[entity_id]

    def entity_key(self, entity_id: int) -> str:
        self._check_entity(entity_id)
        return self._entity_keys[entity_id]

    def relation_label(self, relation_id: int) -> str:
        if not 0 <= relation_id < self.n_relations:
            raise ValueError(f"invalid relation id {relation_id}")
        return self._relation_labels[relation_id]

    def relation_key(self, relation_id: int) -> str:
        if not 0 <= relation_id < self.n_relations:
            raise ValueError(f"invalid relation id {relation_id}")
        return self._relation_keys[relation_id]

    def entity_id(self, external_key: str) -> int:
        try:
            return self._entity_index[external_key]
        except KeyError:
            raise ValueError(f"unknown entity key {external_key!r}") from None

    def relation_id(self, external_key: str) -> int:
        try:
            return self._relation_index[external_key]
        except KeyError:
            raise ValueError(f"unknown relation key {external_key!r}") from None

    def has_entity_key(self, external_key: str) -> bool:
        return external_key in self._entity_index

    def neighbors(self, entity_id: int, direction: str = FORWARD) -> list[tuple[int, int]]:
        """Sorted (relation id, neighbor id) adjacency slice for one node."""
        self._check_entity(entity_id)
        if direction == FORWARD:
            indptr, rel, dst = self.fwd_indptr, self.fwd_rel, self.fwd_dst
        elif direction == REVERSE:
            indptr, rel, dst = self.rev_indptr, self.rev_rel, self.rev_dst
        else:
            raise ValueError(f"invalid direction {direction!r}")
        lo, hi = int(indptr[entity_id]), int(indptr[entity_id + 1])
        return [(int(rel[i]), int(dst[i])) for i in range(lo, hi)]

    def outdegree(self, entity_id: int, direction: str = FORWARD) -> int:
        """Adjacency slice length, parallel edges included."""
        self._check_entity(entity_id)
        if direction not in (FORWARD, REVERSE):
            raise ValueError(f"invalid direction {direction!r}")
        indptr = self.fwd_indptr if direction == FORWARD else self.rev_indptr
        return int(indptr[entity_id + 1] - indptr[entity_id])

    def has_edge(self, head: int, relation: int, tail: int) -> bool:
        self._check_entity(head)
        lo, hi = int(self.fwd_indptr[head]), int(self.fwd_indptr[head + 1])
        # Slice is sorted by (relation, dst); binary search over the pair.
        rel = self.fwd_rel
        dst = self.fwd_dst
        left, right = lo, hi
        while left < right:
            mid = (left + right) // 2
            key = (int(rel[mid]), int(dst[mid]))
            if key < (relation, tail):
                left = mid + 1
            elif key > (relation, tail):
                right = mid
            else:
                return True
        return False

    def iter_triples(self) -> Iterator[Triple]:
        for head in range(self.n_entities):
            lo, hi = int(self.fwd_indptr[head]), int(self.fwd_indptr[head + 1])
            for i in range(lo, hi):
                yield Triple(head, int(self.fwd_rel[i]), int(self.fwd_dst[i]))

    def stats(self) -> dict[str, int]:
        return {
            "entities": self.n_entities,
            "relations": self.n_relations,
            "triples": self.n_triples,
            "duplicates_dropped": self.duplicates_dropped,
        }


def load_kg(
    triples_source: Iterable[str],
    entity_labels_source: Iterable[str],
    relation_labels_source: Iterable[str],
) -> KnowledgeGraph:
    """Build a graph from line streams of triples and label definitions.

    Formats: triples as ``head_key<TAB>relation_key<TAB>tail_key``, labels as
    ``key<TAB>label``, UTF-8, one per line. Every key referenced by a triple
    must be defined by the label streams. Exact duplicate triples are dropped
    and counted; interning order is first-seen order in the label streams.
    """
    entity_keys, entity_labels, entity_index = _parse_label_lines(entity_labels_source, "entity")
    relation_keys, relation_labels, relation_index = _parse_label_lines(relation_labels_source, "relation")

    seen: set[tuple[int, int, int]] = set()
    triples: list[tuple[int, int, int]] = []
    duplicates = 0
    for line_no, raw in enumerate(triples_source, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise LoadError(f"malformed triple line {line_no}: expected 3 tab-separated fields")
        head_key, rel_key, tail_key = parts
        if head_key not in entity_index:
            raise LoadError(f"undefined entity key {head_key} at line {line_no}")
        if tail_key not in entity_index:
            raise LoadError(f"undefined entity key {tail_key} at line {line_no}")
        if rel_key not in relation_index:
            raise LoadError(f"undefined relation key {rel_key} at line {line_no}")
        triple = (entity_index[head_key], relation_index[rel_key], entity_index[tail_key])
        if triple in seen:
            duplicates += 1
            continue
        seen.add(triple)
        triples.append(triple)

    graph = KnowledgeGraph(
        entity_keys,
        entity_labels,
        entity_index,
        relation_keys,
        relation_labels,
        relation_index,
        triples,
        duplicates,
    )
    logger.info(
        "loaded graph: %d entities, %d relations, %d triples (%d duplicates dropped)",
        graph.n_entities,
        graph.n_relations,
        graph.n_triples,
        duplicates,
    )
    return graph


def load_kg_files(triples_path: str | Path, entity_labels_path: str | Path, relation_labels_path: str | Path) -> KnowledgeGraph:
    """Convenience wrapper over :func:`load_kg` for file paths."""
    with open(triples_path, encoding="utf-8") as triples, open(
        entity_labels_path, encoding="utf-8"
    ) as entities, open(relation_labels_path, encoding="utf-8") as relations:
        return load_kg(triples, entities, relations)


def hop_histogram(graph: KnowledgeGraph, pairs: Sequence, max_hops: int) -> tuple[float, ...]:
    """Bucket pairs by shortest undirected reachability distance.

    Returns max_hops + 1 ratios: (1-hop, ..., max_hops-hop, beyond), where
    the final bucket also holds unreachable pairs. Ratios sum to 1.
    ``pairs`` may hold objects with head/tail attributes or (head, tail)
    sequences.
    """
    if max_hops < 1:
        raise ValueError("max_hops must be >= 1")
    if len(pairs) == 0:
        raise ValueError("empty pair list")
    heads = np.empty(len(pairs), dtype=np.int64)
    tails = np.empty(len(pairs), dtype=np.int64)
    for i, pair in enumerate(pairs):
        if hasattr(pair, "head"):
            head, tail = pair.head, pair.tail
        else:
            head, tail = pair
        if head == tail:
            raise ValueError(f"pair {i}: head equals tail ({head})")
        if not 0 <= head < graph.n_entities or not 0 <= tail < graph.n_entities:
            raise ValueError(f"pair {i}: entity id out of range")
        heads[i] = head
        tails[i] = tail
    counts = accel.pair_hop_buckets(graph.und_indptr, graph.und_dst, heads, tails, max_hops)
    total = float(len(pairs))
    return tuple(float(c) / total for c in counts)
