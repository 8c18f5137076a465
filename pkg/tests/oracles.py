"""Independent reference implementations used to check the package.

Everything here is written from the operation contracts alone: plain
dict-and-list BFS, exhaustive path enumeration, direct metric formulas.
None of it shares code with src/openrel beyond constructing inputs.
"""

from __future__ import annotations

import math
import random
from collections import Counter, deque

from openrel import KnowledgeGraph, load_kg

# frozen place-name fixture behind the byte-exact encoding expectations
GOLDEN_TRIPLES = [
    "romeries\tcountry\tfrance",
    "romeries\tlocated_in_admin\tnord",
    "nord\tcountry\tfrance",
    "romeries\tshares_border\tsolesmes",
    "solesmes\tcountry\tfrance",
    "haste\tlocated_in_admin\tschaumburg",
    "schaumburg\tcountry\tgermany",
]
GOLDEN_ENTITIES = [
    "romeries\tRomeries",
    "nord\tNord",
    "france\tFrance",
    "solesmes\tSolesmes",
    "haste\tHaste",
    "schaumburg\tSchaumburg",
    "germany\tGermany",
    "evaluation\tevaluation",
    "algorithm\talgorithm",
]
GOLDEN_RELATIONS = [
    "country\tcountry",
    "located_in_admin\tlocated in the administrative territorial entity",
    "shares_border\tshares border with",
]

# ------------------------------------------------------------ random graphs


def random_graph_files(
    rng: random.Random,
    max_nodes: int,
    max_relations: int = 4,
    density: float = 0.08,
) -> tuple[list[str], list[str], list[str]]:
    """Triples/entity/relation TSV lines for a random multigraph."""
    n = rng.randint(2, max_nodes)
    r = rng.randint(1, max_relations)
    entities = [f"n{i}\tnode {i}" for i in range(n)]
    relations = [f"r{i}\trel {i}" for i in range(r)]
    triples = set()
    for src in range(n):
        for dst in range(n):
            for rel in range(r):
                if rng.random() < density:
                    triples.add((src, rel, dst))
    # a sprinkling of guaranteed edges so small graphs are not empty
    for _ in range(n):
        triples.add((rng.randrange(n), rng.randrange(r), rng.randrange(n)))
    lines = [f"n{s}\tr{rel}\tn{d}" for s, rel, d in sorted(triples)]
    return lines, entities, relations


def load_random_graph(rng: random.Random, max_nodes: int, **kwargs) -> KnowledgeGraph:
    triples, entities, relations = random_graph_files(rng, max_nodes, **kwargs)
    return load_kg(triples, entities, relations)


def forward_adjacency(graph: KnowledgeGraph) -> dict[int, list[tuple[int, int]]]:
    """node -> [(relation, dst)] rebuilt edge by edge from iter_triples."""
    adjacency: dict[int, list[tuple[int, int]]] = {i: [] for i in range(graph.n_entities)}
    for triple in graph.iter_triples():
        adjacency[triple.head].append((triple.relation, triple.tail))
    return adjacency


def step_adjacency(
    graph: KnowledgeGraph, allow_inverse: bool
) -> dict[int, list[tuple[int, int, int]]]:
    """node -> sorted [(relation, dircode, neighbor)] traversal steps."""
    steps: dict[int, list[tuple[int, int, int]]] = {i: [] for i in range(graph.n_entities)}
    for triple in graph.iter_triples():
        steps[triple.head].append((triple.relation, 0, triple.tail))
        if allow_inverse:
            steps[triple.tail].append((triple.relation, 1, triple.head))
    for edges in steps.values():
        edges.sort()
    return steps


# ------------------------------------------------------------------- graphs


def bfs_hops(
    adjacency: dict[int, list[tuple[int, int, int]]], source: int
) -> dict[int, int]:
    """Unbounded BFS hop counts from source over traversal steps."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        node = queue.popleft()
        for _, _, nxt in adjacency[node]:
            if nxt not in dist:
                dist[nxt] = dist[node] + 1
                queue.append(nxt)
    return dist


def enumerate_simple_paths(
    adjacency: dict[int, list[tuple[int, int, int]]],
    head: int,
    tail: int,
    max_hops: int,
) -> list[tuple[tuple[int, int, int], ...]]:
    """Every simple head-to-tail path of <= max_hops steps, canonically ordered.

    A path is a tuple of (relation, dircode, neighbor) steps; the tail may
    appear only as the final node. Ordering: hop count, then the step tuples.
    """
    found: list[tuple[tuple[int, int, int], ...]] = []

    def walk(node: int, visited: set[int], steps: list[tuple[int, int, int]]) -> None:
        if len(steps) >= max_hops:
            return
        for step in adjacency[node]:
            nxt = step[2]
            if nxt == tail:
                found.append(tuple(steps + [step]))
                continue
            if nxt in visited:
                continue
            visited.add(nxt)
            walk(nxt, visited, steps + [step])
            visited.remove(nxt)

    walk(head, {head}, [])
    found.sort(key=lambda path: (len(path), path))
    return found


def enumerate_walks(
    adjacency: dict[int, list[tuple[int, int, int]]], start: int, length: int
) -> list[tuple[tuple[int, int, int], ...]]:
    """All walks of exactly `length` steps (nodes may repeat)."""
    walks: list[tuple[tuple[int, int, int], ...]] = []

    def extend(node: int, steps: list[tuple[int, int, int]]) -> None:
        if len(steps) == length:
            walks.append(tuple(steps))
            return
        for step in adjacency[node]:
            extend(step[2], steps + [step])

    extend(start, [])
    return walks


def walk_probability(
    adjacency: dict[int, list[tuple[int, int, int]]], start: int, steps
) -> float:
    """Product of 1/outdegree along a walk; outdegree counts parallel edges."""
    prob = 1.0
    node = start
    for step in steps:
        degree = len(adjacency[node])
        assert degree > 0
        prob *= 1.0 / degree
        node = step[2]
    return prob


# ------------------------------------------------------------------ metrics


def brute_bleu(candidates, references, max_n: int = 4) -> float:
    """Direct corpus BLEU from the formula, no smoothing."""
    clipped = [0] * max_n
    totals = [0] * max_n
    cand_len = 0
    ref_len = 0
    for cand, ref in zip(candidates, references):
        cand = [t.casefold() for t in cand]
        ref = [t.casefold() for t in ref]
        cand_len += len(cand)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            cand_grams = Counter(tuple(cand[i : i + n]) for i in range(len(cand) - n + 1))
            ref_grams = Counter(tuple(ref[i : i + n]) for i in range(len(ref) - n + 1))
            totals[n - 1] += sum(cand_grams.values())
            clipped[n - 1] += sum(min(c, ref_grams[g]) for g, c in cand_grams.items())
    if any(t == 0 for t in totals) or any(c == 0 for c in clipped):
        return 0.0
    log_mean = sum(math.log(c / t) for c, t in zip(clipped, totals)) / max_n
    brevity = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len)
    return 100.0 * brevity * math.exp(log_mean)


def brute_lcs(a, b) -> int:
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[len(a)][len(b)]


def brute_rouge_l(candidates, references) -> float:
    scores = []
    for cand, ref in zip(candidates, references):
        cand = [t.casefold() for t in cand]
        ref = [t.casefold() for t in ref]
        lcs = brute_lcs(cand, ref) if cand and ref else 0
        if lcs == 0:
            scores.append(0.0)
            continue
        precision = lcs / len(cand)
        recall = lcs / len(ref)
        scores.append(2 * precision * recall / (precision + recall))
    return sum(scores) / len(scores)


def meteor_identical(n_tokens: int) -> float:
    """METEOR-lite for a sentence matched exactly against itself: one chunk."""
    f_mean = 1.0
    penalty = 0.5 * (1 / n_tokens) ** 3
    return (1 - penalty) * f_mean


# ----------------------------------------------------------------- language


def ngram_step_probability(
    events: list[tuple[tuple[str, ...], str]],
    vocab: list[str],
    history: tuple[str, ...],
    token: str,
    order: int,
    weights: tuple[float, ...],
    delta: float,
) -> float:
    """Interpolated add-delta n-gram probability from raw (context, token) events."""
    total = 0.0
    for n in range(1, order + 1):
        if weights[n - 1] == 0.0:
            continue
        context = tuple(history[len(history) - (n - 1) :]) if n > 1 else ()
        count = sum(1 for c, t in events if c[len(c) - (n - 1) :] == context and t == token)
        context_total = sum(1 for c, _ in events if c[len(c) - (n - 1) :] == context)
        total += weights[n - 1] * (count + delta) / (context_total + delta * len(vocab))
    return total
