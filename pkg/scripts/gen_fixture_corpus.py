#!/usr/bin/env python3
"""Generate the frozen fixture corpus under tests/fixtures/.

Writes definition records, CoNLL-U parses, KG TSVs covering the corpus
entities, and expected_coverage.json holding surface/dependency coverage for
every extractable example. The coverage numbers here come from the small
standalone implementations below, not from the openrel package, so tests can
compare the two independently. Deterministic: rerunning rewrites identical
files (byte for byte).
"""

from __future__ import annotations

import json
import random
import string
from collections import deque
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
THRESHOLD = 0.6
_PUNCT = string.punctuation + "“”‘’–—…«»"


# ------------------------------------------------------- inline oracle code


def oracle_tokens(text: str) -> list[tuple[str, int, int]]:
    """(form, char_start, char_end) word tokens: whitespace split, edges stripped."""
    out = []
    pos = 0
    for piece in text.split():
        start = text.index(piece, pos)
        pos = start + len(piece)
        left = 0
        right = len(piece)
        while left < right and piece[left] in _PUNCT:
            left += 1
        while right > left and piece[right - 1] in _PUNCT:
            right -= 1
        if right > left:
            out.append((piece[left:right], start + left, start + right))
    return out


def oracle_token_span(tokens, char_start: int, char_end: int) -> tuple[int, int]:
    hit = [i for i, (_, s, e) in enumerate(tokens) if s < char_end and char_start < e]
    assert hit, (char_start, char_end)
    return hit[0], hit[-1] + 1


def oracle_surface(head_span, tail_span, n: int) -> float:
    return (max(head_span[1], tail_span[1]) - min(head_span[0], tail_span[0])) / n


def oracle_dependency(heads_1based, head_span, tail_span, n: int) -> float:
    """BFS over the undirected tree; minimal endpoint pair by (head idx, tail idx)."""
    adjacency: dict[int, list[int]] = {i: [] for i in range(n)}
    for child, parent in enumerate(heads_1based):
        if parent != 0:
            adjacency[child].append(parent - 1)
            adjacency[parent - 1].append(child)
    best: list[int] | None = None
    for a in range(head_span[0], head_span[1]):
        for b in range(tail_span[0], tail_span[1]):
            prev = {a: a}
            queue = deque([a])
            while queue:
                node = queue.popleft()
                if node == b:
                    break
                for nxt in adjacency[node]:
                    if nxt not in prev:
                        prev[nxt] = node
                        queue.append(nxt)
            path = [b]
            while path[-1] != a:
                path.append(prev[path[-1]])
            if best is None or len(path) < len(best):
                best = path
    covered = set(best)
    covered.update(range(head_span[0], head_span[1]))
    covered.update(range(tail_span[0], tail_span[1]))
    return len(covered) / n


# ------------------------------------------------------------ text building


class Sentence:
    """Accumulates words plus 1-based parse heads; tracks char offsets."""

    def __init__(self) -> None:
        self.words: list[str] = []
        self.heads: list[int] = []
        self.spans: list[tuple[int, int]] = []
        self._cursor = 0

    def add(self, word: str, head: int) -> int:
        start = self._cursor
        self.words.append(word)
        self.heads.append(head)
        self.spans.append((start, start + len(word)))
        self._cursor += len(word) + 1
        return len(self.words)

    def add_name(self, name: str, attach_to: int) -> tuple[int, int]:
        """Multi-word chain: each word heads the next, the last attaches out."""
        parts = name.split()
        first = None
        for i, part in enumerate(parts):
            pos = self.add(part, 0)
            if first is None:
                first = pos
        for i in range(len(parts) - 1):
            self.heads[first - 1 + i] = first + i + 1
        self.heads[first + len(parts) - 2] = attach_to
        return first, first + len(parts) - 1

    def char_span(self, first_pos: int, last_pos: int) -> tuple[int, int]:
        return self.spans[first_pos - 1][0], self.spans[last_pos - 1][1]

    def text(self) -> str:
        return " ".join(self.words) + "."


SYLLABLES = [
    "Ald", "Bren", "Cor", "Dun", "Elm", "Fen", "Gris", "Hale", "Ivy", "Jarn",
    "Kel", "Lor", "Mar", "Nor", "Oak", "Pren", "Quil", "Rys", "Sel", "Tarn",
    "Ulv", "Vance", "Wex", "Yarrow", "Zell",
]
SUFFIXES = ["brook", "vale", "ford", "mere", "stead", "wick", "ham", "ton", "field", "bury"]
SECOND_WORDS = ["Heath", "Cross", "Green", "End", "Gate"]
ADJECTIVES = ["small", "quiet", "coastal", "ancient", "busy", "remote", "northern", "southern"]
NOUNS = ["town", "village", "hamlet", "district", "settlement", "borough", "township"]
TRAILER = "known for its historic markets and long winding lanes"


def make_name(rng: random.Random, used: set[str]) -> str:
    while True:
        name = rng.choice(SYLLABLES) + rng.choice(SUFFIXES)
        if rng.random() < 0.3:
            name += " " + rng.choice(SECOND_WORDS)
        if name not in used:
            used.add(name)
            return name


def key_of(name: str) -> str:
    return name.lower().replace(" ", "_")


def build_t1(head: str, tail: str, rng: random.Random):
    s = Sentence()
    h_first, h_last = s.add_name(head, 0)
    is_pos = s.add("is", 0)
    s.heads[h_last - 1] = is_pos
    a_pos = s.add("a", 0)
    if rng.random() < 0.5:
        s.add(rng.choice(ADJECTIVES), 0)
    n_pos = s.add(rng.choice(NOUNS), is_pos)
    s.heads[a_pos - 1] = n_pos
    if a_pos + 1 < n_pos:
        s.heads[a_pos] = n_pos
    in_pos = s.add("in", 0)
    t_first, t_last = s.add_name(tail, n_pos)
    s.heads[in_pos - 1] = t_first
    return s, (h_first, h_last), [(t_first, t_last)]


def build_t2(head: str, tail: str, rng: random.Random):
    s, h_span, t_spans = build_t1(head, tail, rng)
    n_pos = None
    for i, word in enumerate(s.words):
        if word in NOUNS:
            n_pos = i + 1
    known = s.add("known", n_pos)
    for_pos = s.add("for", 0)
    its = s.add("its", 0)
    historic = s.add("historic", 0)
    markets = s.add("markets", known)
    s.heads[for_pos - 1] = markets
    s.heads[its - 1] = markets
    s.heads[historic - 1] = markets
    and_pos = s.add("and", 0)
    long_pos = s.add("long", 0)
    winding = s.add("winding", 0)
    lanes = s.add("lanes", markets)
    s.heads[and_pos - 1] = lanes
    s.heads[long_pos - 1] = lanes
    s.heads[winding - 1] = lanes
    return s, h_span, t_spans


def build_t3(head: str, tail_a: str, tail_b: str):
    s = Sentence()
    h_first, h_last = s.add_name(head, 0)
    lies = s.add("lies", 0)
    s.heads[h_last - 1] = lies
    between = s.add("between", 0)
    a_first, a_last = s.add_name(tail_a, lies)
    s.heads[between - 1] = a_first
    and_pos = s.add("and", 0)
    b_first, b_last = s.add_name(tail_b, a_first)
    s.heads[and_pos - 1] = b_first
    return s, (h_first, h_last), [(a_first, a_last), (b_first, b_last)]


def walton_east_record() -> tuple[dict, list[int], list[str]]:
    text = (
        "Walton East is a small rural village and parish established around "
        "a church at least as early as Norman times."
    )
    heads = [2, 3, 0, 7, 7, 7, 3, 9, 3, 9, 13, 13, 10, 15, 17, 17, 10, 19, 20, 17]
    words = [
        "Walton", "East", "is", "a", "small", "rural", "village", "and", "parish",
        "established", "around", "a", "church", "at", "least", "as", "early", "as",
        "Norman", "times",
    ]
    parish_start = text.index("parish")
    record = {
        "id": "walton-east",
        "text": text,
        "head": {"key": "walton_east", "char_span": [0, len("Walton East")], "surface": "Walton East"},
        "links": [
            {
                "key": "parish",
                "char_start": parish_start,
                "char_end": parish_start + len("parish"),
                "surface": "parish",
            }
        ],
    }
    return record, heads, words


def main() -> None:
    rng = random.Random(20260822)
    used_names: set[str] = set()
    records: list[dict] = []
    parses: dict[str, tuple[list[str], list[int]]] = {}
    expectations: list[dict] = []
    entity_labels: dict[str, str] = {}

    def register(name: str) -> str:
        key = key_of(name)
        entity_labels[key] = name
        return key

    def emit(record_id: str, s: Sentence, head_name: str, h_span, tail_names, t_spans, with_parse: bool):
        text = s.text()
        tokens = oracle_tokens(text)
        assert [form for form, _, _ in tokens] == s.words, record_id
        head_key = register(head_name)
        links = []
        for tail_name, (t_first, t_last) in zip(tail_names, t_spans):
            cs, ce = s.char_span(t_first, t_last)
            links.append(
                {
                    "key": register(tail_name),
                    "char_start": cs,
                    "char_end": ce,
                    "surface": tail_name,
                }
            )
        h_cs, h_ce = s.char_span(h_span[0], h_span[1])
        records.append(
            {
                "id": record_id,
                "text": text,
                "head": {"key": head_key, "char_span": [h_cs, h_ce], "surface": head_name},
                "links": links,
            }
        )
        if with_parse:
            parses[record_id] = (s.words, s.heads)
        n = len(tokens)
        head_tok = oracle_token_span(tokens, h_cs, h_ce)
        for link in links:
            tail_tok = oracle_token_span(tokens, link["char_start"], link["char_end"])
            surface = oracle_surface(head_tok, tail_tok, n)
            if with_parse:
                dependency = oracle_dependency(s.heads, head_tok, tail_tok, n)
                mean = (surface + dependency) / 2
                kept = mean > THRESHOLD
                reason = None if kept else "low coverage"
            else:
                dependency = None
                mean = None
                kept = False
                reason = "no parse"
            expectations.append(
                {
                    "record_id": record_id,
                    "head_key": head_key,
                    "tail_key": link["key"],
                    "surface": surface,
                    "dependency": dependency,
                    "mean": mean,
                    "kept": kept,
                    "reason": reason,
                }
            )

    # record 0: the pinned parish sentence with its hand-checked parse
    walton, walton_heads, walton_words = walton_east_record()
    records.append(walton)
    parses["walton-east"] = (walton_words, walton_heads)
    entity_labels["walton_east"] = "Walton East"
    entity_labels["parish"] = "parish"
    tokens = oracle_tokens(walton["text"])
    head_tok = oracle_token_span(tokens, 0, 11)
    tail_tok = oracle_token_span(
        tokens, walton["links"][0]["char_start"], walton["links"][0]["char_end"]
    )
    n = len(tokens)
    surface = oracle_surface(head_tok, tail_tok, n)
    dependency = oracle_dependency(walton_heads, head_tok, tail_tok, n)
    assert n == 20 and head_tok == (0, 2) and tail_tok == (8, 9)
    assert surface == 9 / 20 and dependency == 4 / 20
    expectations.append(
        {
            "record_id": "walton-east",
            "head_key": "walton_east",
            "tail_key": "parish",
            "surface": surface,
            "dependency": dependency,
            "mean": (surface + dependency) / 2,
            "kept": False,
            "reason": "low coverage",
        }
    )

    counter = 0

    def next_id(kind: str) -> str:
        nonlocal counter
        counter += 1
        return f"{kind}-{counter:04d}"

    for _ in range(80):
        head = make_name(rng, used_names)
        tail = make_name(rng, used_names)
        s, h_span, t_spans = build_t1(head, tail, rng)
        emit(next_id("t1"), s, head, h_span, [tail], t_spans, with_parse=True)
    for _ in range(50):
        head = make_name(rng, used_names)
        tail = make_name(rng, used_names)
        s, h_span, t_spans = build_t2(head, tail, rng)
        emit(next_id("t2"), s, head, h_span, [tail], t_spans, with_parse=True)
    for _ in range(40):
        head = make_name(rng, used_names)
        tail_a = make_name(rng, used_names)
        tail_b = make_name(rng, used_names)
        s, h_span, t_spans = build_t3(head, tail_a, tail_b)
        emit(next_id("t3"), s, head, h_span, [tail_a, tail_b], t_spans, with_parse=True)
    for _ in range(20):
        head = make_name(rng, used_names)
        tail = make_name(rng, used_names)
        s, h_span, t_spans = build_t1(head, tail, rng)
        emit(next_id("noparse"), s, head, h_span, [tail], t_spans, with_parse=False)

    # 5 records with an extra self-link and 4 with a link inside the head span;
    # extract_pairs must drop those links and keep the normal one
    for i in range(9):
        head = make_name(rng, used_names)
        tail = make_name(rng, used_names)
        s, h_span, t_spans = build_t1(head, tail, rng)
        record_id = next_id("special")
        emit(record_id, s, head, h_span, [tail], t_spans, with_parse=True)
        record = records[-1]
        h_cs, h_ce = s.char_span(h_span[0], h_span[1])
        if i < 5:
            record["links"].append(
                {"key": record["head"]["key"], "char_start": h_cs, "char_end": h_ce, "surface": head}
            )
        else:
            first_word_end = s.spans[h_span[0] - 1][1]
            record["links"].append(
                {"key": register(tail) + "", "char_start": h_cs, "char_end": first_word_end, "surface": head.split()[0]}
            )

    assert len(records) == 200, len(records)

    FIXTURES.mkdir(parents=True, exist_ok=True)
    with open(FIXTURES / "records.jsonl", "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False))
            fh.write("\n")
    with open(FIXTURES / "parses.conllu", "w", encoding="utf-8") as fh:
        for record in records:
            if record["id"] not in parses:
                continue
            words, heads = parses[record["id"]]
            fh.write(f"# sent_id = {record['id']}\n")
            for i, (word, head) in enumerate(zip(words, heads), start=1):
                deprel = "root" if head == 0 else "dep"
                fh.write(f"{i}\t{word}\t{word}\t_\t_\t_\t{head}\t{deprel}\t_\t_\n")
            fh.write("\n")

    kept_pairs = [
        (e["record_id"], e["head_key"], e["tail_key"]) for e in expectations if e["kept"]
    ]
    relation_labels = {
        "located_in": "located in",
        "part_of": "part of",
        "near": "near",
    }
    triples: list[tuple[str, str, str]] = []
    hub_keys: list[str] = []
    for idx, (_, head_key, tail_key) in enumerate(kept_pairs):
        roll = rng.random()
        if roll < 0.6:
            triples.append((head_key, "located_in", tail_key))
        elif roll < 0.85:
            hub = f"region_{idx:03d}"
            entity_labels[hub] = f"Region {idx:03d}"
            hub_keys.append(hub)
            triples.append((head_key, "part_of", hub))
            triples.append((hub, "located_in", tail_key))
        # ~15% of kept pairs stay unconnected so the unknown fallback is exercised
    expected_kg = {
        "entities": len(entity_labels),
        "relations": len(relation_labels),
        "triples": len(triples),
    }
    with open(FIXTURES / "kg_triples.tsv", "w", encoding="utf-8") as fh:
        for h, r, t in triples:
            fh.write(f"{h}\t{r}\t{t}\n")
    with open(FIXTURES / "kg_entities.tsv", "w", encoding="utf-8") as fh:
        for key, label in entity_labels.items():
            fh.write(f"{key}\t{label}\n")
    with open(FIXTURES / "kg_relations.tsv", "w", encoding="utf-8") as fh:
        for key, label in relation_labels.items():
            fh.write(f"{key}\t{label}\n")

    manifest = {
        "threshold": THRESHOLD,
        "records": len(records),
        "examples": len(expectations),
        "kept": sum(1 for e in expectations if e["kept"]),
        "kg": expected_kg,
        "items": expectations,
    }
    with open(FIXTURES / "expected_coverage.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, ensure_ascii=False, indent=1)
        fh.write("\n")
    print(
        f"wrote {len(records)} records, {len(expectations)} examples "
        f"({manifest['kept']} kept), {len(triples)} triples"
    )


if __name__ == "__main__":
    main()
