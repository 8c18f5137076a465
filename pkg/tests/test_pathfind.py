import logging
import random

import pytest

from openrel import load_kg
from openrel.pathfind import (
    EntityPair,
    PathStep,
    ReasoningPath,
    count_shortest_paths,
    hop_distance,
    k_shortest_paths,
    shortest_path,
    validate_path,
)
from oracles import bfs_hops, enumerate_simple_paths, load_random_graph, step_adjacency


def path_tuples(path: ReasoningPath):
    return tuple(step.sort_key() for step in path.steps)


def graph_of(triples):
    nodes = sorted({p for t in triples for p in (t[0], t[2])})
    rels = sorted({t[1] for t in triples})
    return load_kg(
        [f"{h}\t{r}\t{t}" for h, r, t in triples],
        [f"{n}\tnode {n}" for n in nodes],
        [f"{r}\trel {r}" for r in rels],
    )


def test_hop_distance_chain():
    graph = graph_of([("a", "r", "b"), ("b", "r", "c")])
    a, b, c = (graph.entity_id(k) for k in "abc")
    assert hop_distance(graph, a, b) == 1
    assert hop_distance(graph, a, c) == 2
    assert hop_distance(graph, c, a) is None  # forward-only by default
    assert hop_distance(graph, c, a, allow_inverse=True) == 2
    assert hop_distance(graph, a, c, max_hops=1) is None


def test_shortest_path_simple_and_none():
    graph = graph_of([("a", "r", "b"), ("b", "r", "c")])
    a, b, c = (graph.entity_id(k) for k in "abc")
    path = shortest_path(graph, a, c)
    assert path is not None and path.hops == 2
    assert path.head == a and path.tail == c
    validate_path(graph, path)
    assert shortest_path(graph, c, a) is None
    inverse = shortest_path(graph, c, a, allow_inverse=True)
    assert inverse is not None and all(step.inverse for step in inverse.steps)
    validate_path(graph, inverse)


def test_shortest_path_seed_determinism():
    rng = random.Random(42)
    graph = load_random_graph(rng, max_nodes=15)
    for head in range(graph.n_entities):
        for tail in range(graph.n_entities):
            if head == tail:
                continue
            first = shortest_path(graph, head, tail, seed=7)
            second = shortest_path(graph, head, tail, seed=7)
            assert first == second


def test_shortest_path_uniform_over_two_routes():
    graph = graph_of([("a", "r", "b"), ("a", "r", "c"), ("b", "r", "d"), ("c", "r", "d")])
    a, d = graph.entity_id("a"), graph.entity_id("d")
    assert count_shortest_paths(graph, a, d) == 2
    seen = {"b": 0, "c": 0}
    for seed in range(200):
        path = shortest_path(graph, a, d, seed=seed)
        seen[graph.entity_key(path.steps[0].node)] += 1
    assert seen["b"] + seen["c"] == 200
    assert min(seen.values()) >= 60  # binomial(200, 1/2) far tail


def test_parallel_edges_count_as_distinct_paths():
    graph = graph_of([("a", "r0", "b"), ("a", "r1", "b"), ("b", "r0", "c")])
    a, c = graph.entity_id("a"), graph.entity_id("c")
    assert count_shortest_paths(graph, a, c) == 2
    paths = k_shortest_paths(graph, a, c, k=5)
    assert len(paths) == 2
    assert paths[0].steps[0].relation == graph.relation_id("r0")
    assert paths[1].steps[0].relation == graph.relation_id("r1")


def test_pair_validation():
    graph = graph_of([("a", "r", "b")])
    with pytest.raises(ValueError, match="head equals tail"):
        shortest_path(graph, 0, 0)
    with pytest.raises(ValueError, match="invalid entity id"):
        hop_distance(graph, 0, 99)
    with pytest.raises(ValueError, match="k must be"):
        k_shortest_paths(graph, 0, 1, k=0)
    with pytest.raises(ValueError, match="max_hops"):
        k_shortest_paths(graph, 0, 1, max_hops=0)


def test_validate_path_errors():
    graph = graph_of([("a", "r", "b"), ("b", "r", "c"), ("c", "r", "a")])
    a, b, c = (graph.entity_id(k) for k in "abc")
    r = graph.relation_id("r")
    validate_path(graph, ReasoningPath(a, (PathStep(r, b), PathStep(r, c))))
    with pytest.raises(ValueError, match="step 0 is not a graph edge"):
        validate_path(graph, ReasoningPath(a, (PathStep(r, c),)))
    with pytest.raises(ValueError, match="repeats a node"):
        validate_path(
            graph,
            ReasoningPath(a, (PathStep(r, b), PathStep(r, c), PathStep(r, a))),
        )
    # inverse step checks the edge in the reversed direction
    validate_path(graph, ReasoningPath(b, (PathStep(r, a, inverse=True),)))
    with pytest.raises(ValueError, match="step 0 is not a graph edge"):
        validate_path(graph, ReasoningPath(a, (PathStep(r, b, inverse=True),)))


def test_k_shortest_canonical_order_hand_case():
    graph = graph_of(
        [
            ("romeries", "country", "france"),
            ("romeries", "located", "nord"),
            ("nord", "country", "france"),
            ("romeries", "shares", "solesmes"),
            ("solesmes", "country", "france"),
        ]
    )
    head = graph.entity_id("romeries")
    tail = graph.entity_id("france")
    paths = k_shortest_paths(graph, head, tail, k=5, max_hops=3)
    assert [p.hops for p in paths] == [1, 2, 2]
    # 2-hop order: by first-step relation id (located < shares alphabetically)
    assert paths[1].steps[0].relation == graph.relation_id("located")
    assert paths[2].steps[0].relation == graph.relation_id("shares")


def test_k_limits_results():
    graph = graph_of([("a", f"r{i}", "b") for i in range(6)])
    a, b = graph.entity_id("a"), graph.entity_id("b")
    assert len(k_shortest_paths(graph, a, b, k=3)) == 3
    assert len(k_shortest_paths(graph, a, b, k=10)) == 6


@pytest.mark.parametrize("seed", range(15))
@pytest.mark.parametrize("allow_inverse", [False, True])
def test_k_shortest_matches_enumeration(seed, allow_inverse):
    rng = random.Random(4000 + seed)
    graph = load_random_graph(rng, max_nodes=10)
    adjacency = step_adjacency(graph, allow_inverse)
    k = rng.randint(1, 8)
    max_hops = rng.randint(1, 4)
    for head in range(graph.n_entities):
        for tail in range(graph.n_entities):
            if head == tail:
                continue
            expected = enumerate_simple_paths(adjacency, head, tail, max_hops)[:k]
            got = k_shortest_paths(
                graph, head, tail, k=k, max_hops=max_hops, allow_inverse=allow_inverse
            )
            assert [path_tuples(p) for p in got] == expected
            for path in got:
                validate_path(graph, path)


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("allow_inverse", [False, True])
def test_shortest_path_matches_bfs(seed, allow_inverse):
    rng = random.Random(5000 + seed)
    graph = load_random_graph(rng, max_nodes=20)
    adjacency = step_adjacency(graph, allow_inverse)
    max_hops = rng.randint(1, 4)
    for head in range(graph.n_entities):
        hops = bfs_hops(adjacency, head)
        for tail in range(graph.n_entities):
            if head == tail:
                continue
            want = hops.get(tail)
            got = shortest_path(
                graph, head, tail, max_hops=max_hops, seed=seed, allow_inverse=allow_inverse
            )
            if want is None or want > max_hops:
                assert got is None
            else:
                assert got is not None and got.hops == want
                validate_path(graph, got)


def test_count_matches_enumeration():
    rng = random.Random(77)
    for _ in range(10):
        graph = load_random_graph(rng, max_nodes=9)
        adjacency = step_adjacency(graph, allow_inverse=False)
        for head in range(graph.n_entities):
            hops = bfs_hops(adjacency, head)
            for tail in range(graph.n_entities):
                if head == tail:
                    continue
                want = hops.get(tail)
                count = count_shortest_paths(graph, head, tail, max_hops=4)
                if want is None or want > 4:
                    assert count == 0
                else:
                    all_paths = enumerate_simple_paths(adjacency, head, tail, 4)
                    assert count == sum(1 for p in all_paths if len(p) == want)


def test_budget_exhaustion_warns_and_truncates(caplog):
    triples = [
        (f"n{i}", "r", f"n{j}") for i in range(8) for j in range(8) if i != j
    ]
    graph = graph_of(triples)
    head, tail = graph.entity_id("n0"), graph.entity_id("n7")
    with caplog.at_level(logging.WARNING, logger="openrel.pathfind"):
        paths = k_shortest_paths(graph, head, tail, k=10_000, max_hops=5, budget=50)
    assert any("budget" in message for message in caplog.messages)
    full = k_shortest_paths(graph, head, tail, k=10_000, max_hops=5)
    assert len(paths) < len(full)
    # what was found is still a prefix of the canonical order
    assert [path_tuples(p) for p in paths] == [path_tuples(p) for p in full][: len(paths)]


def test_entity_pair_is_plain_data():
    pair = EntityPair(3, 9)
    assert pair.head == 3 and pair.tail == 9
