"""Reasoning paths between entity pairs: shortest-path sampling and k-best enumeration.

Paths are simple (no repeated node) and traverse triples head-to-tail by
default; passing allow_inverse=True also permits walking a triple backwards,
which is recorded on the step so encodings can mark it. The target entity is
terminal: a path never passes through it mid-way.

Canonical path order is (hop count ascending, then lexicographic over per-step
keys (relation id, direction code, node id)) with direction code 0 for forward
and 1 for inverse steps.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field

import numpy as np

from . import accel
from .kg import FORWARD, REVERSE, KnowledgeGraph

logger = logging.getLogger(__name__)

DEFAULT_MAX_HOPS = 3
DEFAULT_K = 5
DEFAULT_EXPANSION_BUDGET = 1_000_000


@dataclass(frozen=True)
class EntityPair:
    head: int
    tail: int


@dataclass(frozen=True)
class PathStep:
    relation: int
    node: int
    inverse: bool = False

    def sort_key(self) -> tuple[int, int, int]:
        return (self.relation, 1 if self.inverse else 0, self.node)


@dataclass(frozen=True)
class ReasoningPath:
    head: int
    steps: tuple[PathStep, ...] = field(default_factory=tuple)

    @property
    def hops(self) -> int:
        return len(self.steps)

    @property
    def tail(self) -> int:
        return self.steps[-1].node if self.steps else self.head

    def nodes(self) -> list[int]:
        return [self.head] + [step.node for step in self.steps]

    def sort_key(self) -> tuple[int, tuple[tuple[int, int, int], ...]]:
        return (self.hops, tuple(step.sort_key() for step in self.steps))


def validate_path(graph: KnowledgeGraph, path: ReasoningPath) -> None:
    """Raise ValueError unless every step is a graph edge and the path is simple."""
    if not 0 <= path.head < graph.n_entities:
        raise ValueError(f"invalid entity id {path.head}")
    current = path.head
    for i, step in enumerate(path.steps):
        if not 0 <= step.node < graph.n_entities:
            raise ValueError(f"invalid entity id {step.node} at step {i}")
        if not 0 <= step.relation < graph.n_relations:
            raise ValueError(f"invalid relation id {step.relation} at step {i}")
        if step.inverse:
            present = graph.has_edge(step.node, step.relation, current)
        else:
            present = graph.has_edge(current, step.relation, step.node)
        if not present:
            raise ValueError(f"step {i} is not a graph edge")
        current = step.node
    nodes = path.nodes()
    if len(set(nodes)) != len(nodes):
        raise ValueError("path repeats a node")
    if path.tail in nodes[1:-1]:
        raise ValueError("path passes through its tail")


def _check_pair(graph: KnowledgeGraph, head: int, tail: int) -> None:
    if not 0 <= head < graph.n_entities:
        raise ValueError(f"invalid entity id {head}")
    if not 0 <= tail < graph.n_entities:
        raise ValueError(f"invalid entity id {tail}")
    if head == tail:
        raise ValueError(f"head equals tail ({head})")


def _traversal_csr(graph: KnowledgeGraph, allow_inverse: bool, reverse: bool) -> tuple[np.ndarray, np.ndarray]:
    if allow_inverse:
        # The undirected union is symmetric, so it is its own reverse.
        return graph.und_indptr, graph.und_dst
    if reverse:
        return graph.rev_indptr, graph.rev_dst
    return graph.fwd_indptr, graph.fwd_dst


def _traversal_edges(graph: KnowledgeGraph, node: int, allow_inverse: bool) -> list[tuple[int, int, int]]:
    """Outgoing steps from node as sorted (relation, direction code, neighbor)."""
    edges = [(rel, 0, dst) for rel, dst in graph.neighbors(node, FORWARD)]
    if allow_inverse:
        edges.extend((rel, 1, src) for rel, src in graph.neighbors(node, REVERSE))
        edges.sort()
    return edges


def hop_distance(
    graph: KnowledgeGraph,
    head: int,
    tail: int,
    max_hops: int = DEFAULT_MAX_HOPS,
    allow_inverse: bool = False,
) -> int | None:
    """Shortest traversal distance from head to tail, None if beyond max_hops."""
    if not 0 <= head < graph.n_entities:
        raise ValueError(f"invalid entity id {head}")
    if not 0 <= tail < graph.n_entities:
        raise ValueError(f"invalid entity id {tail}")
    if max_hops < 1:
        raise ValueError("max_hops must be >= 1")
    if head == tail:
        return 0
    indptr, dst = _traversal_csr(graph, allow_inverse, reverse=False)
    dist = accel.bfs_distances(indptr, dst, head, max_hops)
    d = int(dist[tail])
    return d if d >= 0 else None


def _shortest_dag(
    graph: KnowledgeGraph,
    head: int,
    tail: int,
    max_hops: int,
    allow_inverse: bool,
) -> tuple[np.ndarray, np.ndarray, int, dict[int, int]] | None:
    """Distances plus exact path counts over the shortest-path DAG.

    Returns (dist_head, dist_tail, d, ways) where ways[u] is the number of
    d-length head-to-tail paths continuing from u, or None when the pair is
    not connected within max_hops. Counts are exact Python ints.
    """
    fwd_indptr, fwd_dst = _traversal_csr(graph, allow_inverse, reverse=False)
    dist_head = accel.bfs_distances(fwd_indptr, fwd_dst, head, max_hops)
    d = int(dist_head[tail])
    if d < 0:
        return None
    rev_indptr, rev_dst = _traversal_csr(graph, allow_inverse, reverse=True)
    dist_tail = accel.bfs_distances(rev_indptr, rev_dst, tail, max_hops)

    on_dag = [
        int(u)
        for u in np.flatnonzero((dist_head >= 0) & (dist_tail >= 0))
        if int(dist_head[u]) + int(dist_tail[u]) == d
    ]
    on_dag.sort(key=lambda u: -int(dist_head[u]))
    ways: dict[int, int] = {tail: 1}
    for u in on_dag:
        if u == tail:
            continue
        du = int(dist_head[u])
        total = 0
        for _, _, v in _traversal_edges(graph, u, allow_inverse):
            if int(dist_head[v]) == du + 1 and v in ways:
                total += ways[v]
        ways[u] = total
    return dist_head, dist_tail, d, ways


def count_shortest_paths(
    graph: KnowledgeGraph,
    head: int,
    tail: int,
    max_hops: int = DEFAULT_MAX_HOPS,
    allow_inverse: bool = False,
) -> int:
    """Number of minimum-hop paths between the pair, 0 if not connected."""
    _check_pair(graph, head, tail)
    dag = _shortest_dag(graph, head, tail, max_hops, allow_inverse)
    if dag is None:
        return 0
    return dag[3].get(head, 0)


def shortest_path(
    graph: KnowledgeGraph,
    head: int,
    tail: int,
    max_hops: int = DEFAULT_MAX_HOPS,
    seed: int = 0,
    allow_inverse: bool = False,
) -> ReasoningPath | None:
    """Uniformly sampled minimum-hop path, None when not connected in max_hops.

    Sampling walks the shortest-path DAG choosing each edge u -> v with
    probability ways[v] / ways[u], which makes every minimum-hop path equally
    likely; parallel edges count as distinct paths. Deterministic in seed.
    """
    _check_pair(graph, head, tail)
    dag = _shortest_dag(graph, head, tail, max_hops, allow_inverse)
    if dag is None:
        return None
    dist_head, _, d, ways = dag
    if ways.get(head, 0) == 0:
        return None
    rng = random.Random(seed)
    steps: list[PathStep] = []
    current = head
    while current != tail:
        du = int(dist_head[current])
        draw = rng.randrange(ways[current])
        cumulative = 0
        chosen: tuple[int, int, int] | None = None
        for rel, code, v in _traversal_edges(graph, current, allow_inverse):
            if int(dist_head[v]) != du + 1 or ways.get(v, 0) == 0:
                continue
            cumulative += ways[v]
            if draw < cumulative:
                chosen = (rel, code, v)
                break
        assert chosen is not None
        rel, code, v = chosen
        steps.append(PathStep(relation=rel, node=v, inverse=code == 1))
        current = v
    path = ReasoningPath(head=head, steps=tuple(steps))
    assert path.hops == d
    return path


def k_shortest_paths(
    graph: KnowledgeGraph,
    head: int,
    tail: int,
    k: int = DEFAULT_K,
    max_hops: int = DEFAULT_MAX_HOPS,
    allow_inverse: bool = False,
    budget: int = DEFAULT_EXPANSION_BUDGET,
) -> list[ReasoningPath]:
    """First k simple paths in canonical order within max_hops.

    Enumerates by iterative deepening: exact-length depth-first search per hop
    count, visiting steps in (relation, direction, neighbor) order, pruned by
    distance-to-tail. Stops early once k paths are found, or once the node
    expansion budget is exhausted (logged; the list found so far is returned).
    """
    _check_pair(graph, head, tail)
    if k < 1:
        raise ValueError("k must be >= 1")
    if max_hops < 1:
        raise ValueError("max_hops must be >= 1")
    rev_indptr, rev_dst = _traversal_csr(graph, allow_inverse, reverse=True)
    dist_tail = accel.bfs_distances(rev_indptr, rev_dst, tail, max_hops)
    if int(dist_tail[head]) < 0:
        return []

    results: list[ReasoningPath] = []
    expansions = 0
    exhausted = False

    def extend(current: int, remaining: int, visited: set[int], steps: list[PathStep]) -> None:
        nonlocal expansions, exhausted
        if exhausted or len(results) >= k:
            return
        expansions += 1
        if expansions > budget:
            exhausted = True
            return
        if remaining == 0:
            if current == tail:
                results.append(ReasoningPath(head=head, steps=tuple(steps)))
            return
        for rel, code, v in _traversal_edges(graph, current, allow_inverse):
            if len(results) >= k or exhausted:
                return
            if v in visited:
                continue
            if v == tail and remaining > 1:
                continue
            dv = int(dist_tail[v])
            if dv < 0 or dv > remaining - 1:
                continue
            visited.add(v)
            steps.append(PathStep(relation=rel, node=v, inverse=code == 1))
            extend(v, remaining - 1, visited, steps)
            steps.pop()
            visited.remove(v)

    for length in range(max(1, int(dist_tail[head])), max_hops + 1):
        if len(results) >= k or exhausted:
            break
        extend(head, length, {head}, [])

    if exhausted:
        logger.warning(
            "path enumeration budget (%d expansions) exhausted for pair (%d, %d); returning %d paths found so far",
            budget,
            head,
            tail,
            len(results),
        )
    return results
