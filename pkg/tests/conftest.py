"""Shared fixtures plus the acceptance-criteria terminal summary."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from openrel import load_kg, load_kg_files
from openrel.corpus import load_conllu, parse_definition_record
from openrel.mockserver import MockScorerServer
from oracles import GOLDEN_ENTITIES, GOLDEN_RELATIONS, GOLDEN_TRIPLES

FIXTURES = Path(__file__).resolve().parent / "fixtures"

# one line per acceptance criterion, keyed by the test function that proves it
ACCEPTANCE = {
    "test_criterion_01_coverage_fixture": "1. fixture sentence coverages exact (0.45 surface, 0.20 dependency)",
    "test_criterion_02_golden_encodings": "2. golden encodings byte-exact",
    "test_criterion_03_pathfinding_oracles": "3. pathfinding matches BFS and exhaustive enumeration oracles",
    "test_criterion_04_selection_replay": "4. confidence selection replay picks the Nord path",
    "test_criterion_05_split_property": "5. split head-disjointness and fraction deviation",
    "test_criterion_06_metric_oracles": "6. metric oracles (identity, brute force, closed form)",
    "test_criterion_07_end_to_end": "7. end-to-end synthetic pipeline selection and reproduction",
    "test_criterion_08_argmax_invariance": "8. selection invariant under affine confidence transforms",
    "test_criterion_09_random_walk_oracle": "9. random-walk probabilities and argmax match enumeration",
    "test_criterion_10_protocol_conformance": "10. protocol client conformance against the mock server",
}


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_records():
    records = []
    with open(FIXTURES / "records.jsonl", encoding="utf-8") as handle:
        for line in handle:
            records.append(parse_definition_record(line))
    return records


@pytest.fixture(scope="session")
def fixture_parses():
    with open(FIXTURES / "parses.conllu", encoding="utf-8") as handle:
        graphs = load_conllu(handle)
    sent_ids = []
    with open(FIXTURES / "parses.conllu", encoding="utf-8") as handle:
        for line in handle:
            if line.startswith("# sent_id = "):
                sent_ids.append(line.split("= ", 1)[1].strip())
    assert len(sent_ids) == len(graphs)
    return dict(zip(sent_ids, graphs))


@pytest.fixture(scope="session")
def fixture_manifest():
    with open(FIXTURES / "expected_coverage.json", encoding="utf-8") as handle:
        return json.load(handle)


@pytest.fixture(scope="session")
def fixture_kg():
    return load_kg_files(
        FIXTURES / "kg_triples.tsv", FIXTURES / "kg_entities.tsv", FIXTURES / "kg_relations.tsv"
    )


@pytest.fixture(scope="session")
def golden_graph():
    """Tiny place-name graph behind the byte-exact encoding expectations."""
    return load_kg(GOLDEN_TRIPLES, GOLDEN_ENTITIES, GOLDEN_RELATIONS)


@pytest.fixture(scope="session")
def mock_server():
    with MockScorerServer() as server:
        yield server


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for status, flag in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            name = getattr(report, "nodeid", "").rsplit("::", 1)[-1]
            if name in ACCEPTANCE:
                lines.append((name, flag))
    if not lines:
        return
    lines.sort(key=lambda item: int(ACCEPTANCE[item[0]].split(".")[0]))
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria")
    for name, flag in lines:
        terminalreporter.write_line(f"  [{flag}] {ACCEPTANCE[name]}")
