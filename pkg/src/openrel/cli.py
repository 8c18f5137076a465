"""Pipeline command-line interface.

Subcommands: build-kg, stats, extract, filter, split, subsample, paths,
train, generate, select, eval. Each reads and writes only the JSON-lines,
TSV, and JSON artifacts documented in the owning modules, and drops a run
manifest next to every output (<output>.manifest.json for files,
manifest.json inside output directories) recording the command, arguments,
inputs, effective-parameter hash, seed, and row counts.

--config names a JSON object whose keys mirror flag names (underscored);
explicit flags override config values, which override built-in defaults.
Outputs are byte-identical across reruns with identical inputs, parameters,
and seed, manifest timestamps aside. Usage and configuration errors exit
with status 2, data errors with status 1.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator

from . import corpus as corpus_mod
from . import metrics as metrics_mod
from .encode import encode_unknown
from .kg import KnowledgeGraph, hop_histogram, load_kg_files
from .pathfind import EntityPair, ReasoningPath, k_shortest_paths
from .scorer import GenerationParams, GenerationResult, NgramCopyModel, ScorerConfig, train_baseline
from .scorer_client import RemoteScorer, RemoteScorerConfig
from .select import (
    METHOD_UNKNOWN_FALLBACK,
    SelectionOutcome,
    select_by_confidence,
    select_random_walk,
    select_shortest,
)
from .textutil import word_tokens

logger = logging.getLogger(__name__)

_METRIC_NAMES = ("bleu", "rouge_l", "meteor")


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def _read_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path} line {line_no}: malformed JSON: {exc}") from None
            if not isinstance(row, dict):
                raise ValueError(f"{path} line {line_no}: expected a JSON object")
            yield row


def _write_jsonl(path: str | Path, rows) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(_canonical(row))
            handle.write("\n")
            count += 1
    return count


def _write_json(path: str | Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(_canonical(payload))
        handle.write("\n")


def _write_manifest(
    manifest_path: Path,
    command: str,
    argv: list[str],
    inputs: dict[str, str],
    params: dict,
    seed: int,
    counts: dict[str, int],
) -> None:
    manifest = {
        "command": command,
        "argv": argv,
        "inputs": inputs,
        "config_hash": hashlib.sha256(_canonical(params).encode("utf-8")).hexdigest(),
        "seed": seed,
        "counts": counts,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    _write_json(manifest_path, manifest)


def _file_manifest(output: str | Path) -> Path:
    return Path(f"{output}.manifest.json")


class _Resolver:
    """Flag > config > default, with the parser for usage errors."""

    def __init__(self, args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
        self.args = args
        self.parser = parser
        self.config: dict = {}
        if args.config is not None:
            try:
                with open(args.config, encoding="utf-8") as handle:
                    self.config = json.load(handle)
            except (OSError, json.JSONDecodeError) as exc:
                parser.error(f"cannot load config {args.config}: {exc}")
            if not isinstance(self.config, dict):
                parser.error(f"config {args.config} must hold a JSON object")

    def get(self, name: str, default=None, required: bool = False):
        value = getattr(self.args, name, None)
        if value is None:
            value = self.config.get(name, default)
        if value is None and required:
            self.parser.error(f"missing required parameter --{name.replace('_', '-')}")
        return value

    @property
    def seed(self) -> int:
        return int(self.get("seed", 0))


def _parse_number_list(value, count: int | None, name: str) -> tuple[float, ...]:
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        raise ValueError(f"{name} must be a comma-separated list")
    numbers = tuple(float(p) for p in parts)
    if count is not None and len(numbers) != count:
        raise ValueError(f"{name} needs {count} values, got {len(numbers)}")
    return numbers


def _load_graph(resolver: _Resolver) -> tuple[KnowledgeGraph, dict[str, str]]:
    triples = resolver.get("triples", required=True)
    entity_labels = resolver.get("entity_labels", required=True)
    relation_labels = resolver.get("relation_labels", required=True)
    graph = load_kg_files(triples, entity_labels, relation_labels)
    inputs = {
        "triples": str(triples),
        "entity_labels": str(entity_labels),
        "relation_labels": str(relation_labels),
    }
    return graph, inputs


def _read_pairs(path: str | Path) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path} line {line_no}: expected 2 tab-separated fields")
            pairs.append((parts[0], parts[1]))
    return pairs


def _example_to_dict(example: corpus_mod.RelationExample) -> dict:
    return {
        "record_id": example.record_id,
        "head_key": example.head_key,
        "tail_key": example.tail_key,
        "target": example.target,
        "tokens": list(example.tokens),
        "head_span": list(example.head_span),
        "tail_span": list(example.tail_span),
    }


def _example_from_dict(row: dict) -> corpus_mod.RelationExample:
    try:
        return corpus_mod.RelationExample(
            record_id=str(row["record_id"]),
            head_key=str(row["head_key"]),
            tail_key=str(row["tail_key"]),
            target=str(row["target"]),
            tokens=tuple(row["tokens"]),
            head_span=tuple(row["head_span"]),
            tail_span=tuple(row["tail_span"]),
        )
    except KeyError as exc:
        raise ValueError(f"example row missing field {exc}") from None


def _path_to_dict(graph: KnowledgeGraph, path: ReasoningPath) -> dict:
    return {
        "hops": path.hops,
        "steps": [
            {
                "relation": graph.relation_key(step.relation),
                "dir": "inverse" if step.inverse else "forward",
                "node": graph.entity_key(step.node),
            }
            for step in path.steps
        ],
    }


def _generation_to_dict(result: GenerationResult) -> dict:
    return {
        "tokens": list(result.tokens),
        "text": result.text,
        "token_logprobs": list(result.token_logprobs),
        "total_logprob": result.total_logprob,
        "normalized_score": result.normalized_score,
    }


def _scorer_config(resolver: _Resolver) -> ScorerConfig:
    order = int(resolver.get("order", 3))
    weights = _parse_number_list(resolver.get("lm_weights", "0.1,0.3,0.6"), order, "lm_weights")
    return ScorerConfig(
        order=order,
        lm_weights=weights,
        copy_weight=float(resolver.get("copy_weight", 0.3)),
        delta=float(resolver.get("delta", 0.1)),
    )


def _generation_params(resolver: _Resolver) -> GenerationParams:
    return GenerationParams(
        beam_width=int(resolver.get("beam_width", 4)),
        max_len=int(resolver.get("max_len", 64)),
    )


# ---------------------------------------------------------------- subcommands


def _cmd_build_kg(resolver: _Resolver, argv: list[str]) -> int:
    graph, inputs = _load_graph(resolver)
    output = resolver.get("output", required=True)
    stats = graph.stats()
    _write_json(output, stats)
    _write_manifest(
        _file_manifest(output), "build-kg", argv, inputs,
        {"command": "build-kg"}, resolver.seed, stats,
    )
    return 0


def _cmd_stats(resolver: _Resolver, argv: list[str]) -> int:
    graph, inputs = _load_graph(resolver)
    stats: dict = dict(graph.stats())
    pairs_path = resolver.get("pairs")
    max_hops = int(resolver.get("max_hops", 3))
    if pairs_path is not None:
        pairs = [
            (graph.entity_id(h), graph.entity_id(t)) for h, t in _read_pairs(pairs_path)
        ]
        stats["hop_histogram"] = list(hop_histogram(graph, pairs, max_hops))
        inputs["pairs"] = str(pairs_path)
    print(_canonical(stats))
    output = resolver.get("output")
    if output is not None:
        _write_json(output, stats)
        _write_manifest(
            _file_manifest(output), "stats", argv, inputs,
            {"command": "stats", "max_hops": max_hops}, resolver.seed,
            {k: v for k, v in stats.items() if isinstance(v, int)},
        )
    return 0


def _cmd_extract(resolver: _Resolver, argv: list[str]) -> int:
    corpus_path = resolver.get("corpus", required=True)
    output = resolver.get("output", required=True)
    n_records = 0
    examples: list[corpus_mod.RelationExample] = []
    with open(corpus_path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = corpus_mod.parse_definition_record(line)
            except ValueError as exc:
                raise ValueError(f"{corpus_path} line {line_no}: {exc}") from None
            n_records += 1
            examples.extend(corpus_mod.extract_pairs(record))
    _write_jsonl(output, (_example_to_dict(e) for e in examples))
    counts = {"records": n_records, "examples": len(examples)}
    _write_manifest(
        _file_manifest(output), "extract", argv, {"corpus": str(corpus_path)},
        {"command": "extract"}, resolver.seed, counts,
    )
    return 0


def _conllu_sent_ids(path: str | Path) -> list[str | None]:
    """Per-block sent_id comment values, None where absent."""
    ids: list[str | None] = []
    current: str | None = None
    in_block = False
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            stripped = line.strip()
            if not stripped:
                if in_block:
                    ids.append(current)
                current = None
                in_block = False
                continue
            if stripped.startswith("#"):
                body = stripped[1:].strip()
                if body.startswith("sent_id"):
                    _, _, value = body.partition("=")
                    current = value.strip() or None
                continue
            in_block = True
    if in_block:
        ids.append(current)
    return ids


def _cmd_filter(resolver: _Resolver, argv: list[str]) -> int:
    examples_path = resolver.get("examples", required=True)
    parses_path = resolver.get("parses", required=True)
    output = resolver.get("output", required=True)
    dropped_path = resolver.get("dropped")
    threshold = float(resolver.get("threshold", corpus_mod.DEFAULT_COVERAGE_THRESHOLD))

    examples = [_example_from_dict(row) for row in _read_jsonl(examples_path)]
    with open(parses_path, encoding="utf-8") as handle:
        graphs = corpus_mod.load_conllu(handle)
    sent_ids = _conllu_sent_ids(parses_path)

    parses: dict[str, corpus_mod.DependencyGraph] = {}
    if graphs and all(sid is not None for sid in sent_ids):
        for sid, parse in zip(sent_ids, graphs):
            parses[str(sid)] = parse
    else:
        # positional matching against first-seen record order in the examples file
        record_order: list[str] = []
        for example in examples:
            if example.record_id not in parses and example.record_id not in record_order:
                record_order.append(example.record_id)
        for record_id, parse in zip(record_order, graphs):
            parses[record_id] = parse

    kept, dropped = corpus_mod.filter_examples(examples, parses, threshold=threshold)
    _write_jsonl(output, (_example_to_dict(e) for e in kept))
    if dropped_path is not None:
        _write_jsonl(
            dropped_path,
            (
                {
                    **_example_to_dict(d.example),
                    "surface": d.surface,
                    "dependency": d.dependency,
                    "reason": d.reason,
                }
                for d in dropped
            ),
        )
    counts = {"examples": len(examples), "kept": len(kept), "dropped": len(dropped)}
    params = {"command": "filter", "threshold": threshold}
    inputs = {"examples": str(examples_path), "parses": str(parses_path)}
    _write_manifest(_file_manifest(output), "filter", argv, inputs, params, resolver.seed, counts)
    if dropped_path is not None:
        _write_manifest(_file_manifest(dropped_path), "filter", argv, inputs, params, resolver.seed, counts)
    return 0


def _cmd_split(resolver: _Resolver, argv: list[str]) -> int:
    examples_path = resolver.get("examples", required=True)
    output_dir = Path(resolver.get("output_dir", required=True))
    fractions = _parse_number_list(resolver.get("fractions", "0.8,0.1,0.1"), 3, "fractions")
    seed = resolver.seed
    examples = [_example_from_dict(row) for row in _read_jsonl(examples_path)]
    split = corpus_mod.split_dataset(examples, fractions, seed)
    output_dir.mkdir(parents=True, exist_ok=True)
    counts = {}
    for name, part in (("train", split.train), ("dev", split.dev), ("test", split.test)):
        counts[name] = _write_jsonl(output_dir / f"{name}.jsonl", (_example_to_dict(e) for e in part))
    _write_manifest(
        output_dir / "manifest.json", "split", argv, {"examples": str(examples_path)},
        {"command": "split", "fractions": list(fractions)}, seed, counts,
    )
    return 0


def _cmd_subsample(resolver: _Resolver, argv: list[str]) -> int:
    split_dir = Path(resolver.get("split_dir", required=True))
    output_dir = Path(resolver.get("output_dir", required=True))
    fraction = float(resolver.get("fraction", required=True))
    seed = resolver.seed
    parts = {
        name: [_example_from_dict(row) for row in _read_jsonl(split_dir / f"{name}.jsonl")]
        for name in ("train", "dev", "test")
    }
    split = corpus_mod.DatasetSplit(train=parts["train"], dev=parts["dev"], test=parts["test"], seed=seed)
    sampled = corpus_mod.subsample(split, fraction, seed)
    output_dir.mkdir(parents=True, exist_ok=True)
    counts = {}
    for name, part in (("train", sampled.train), ("dev", sampled.dev), ("test", sampled.test)):
        counts[name] = _write_jsonl(output_dir / f"{name}.jsonl", (_example_to_dict(e) for e in part))
    _write_manifest(
        output_dir / "manifest.json", "subsample", argv, {"split_dir": str(split_dir)},
        {"command": "subsample", "fraction": fraction}, seed, counts,
    )
    return 0


def _cmd_paths(resolver: _Resolver, argv: list[str]) -> int:
    graph, inputs = _load_graph(resolver)
    pairs_path = resolver.get("pairs", required=True)
    output = resolver.get("output", required=True)
    k = int(resolver.get("k", 5))
    max_hops = int(resolver.get("max_hops", 3))
    allow_inverse = bool(resolver.get("allow_inverse", False))
    budget = int(resolver.get("budget", 1_000_000))
    inputs["pairs"] = str(pairs_path)
    rows = []
    n_paths = 0
    for head_key, tail_key in _read_pairs(pairs_path):
        head = graph.entity_id(head_key)
        tail = graph.entity_id(tail_key)
        found = k_shortest_paths(
            graph, head, tail, k=k, max_hops=max_hops, allow_inverse=allow_inverse, budget=budget
        )
        n_paths += len(found)
        rows.append(
            {
                "head": head_key,
                "tail": tail_key,
                "paths": [_path_to_dict(graph, p) for p in found],
            }
        )
    _write_jsonl(output, rows)
    _write_manifest(
        _file_manifest(output), "paths", argv, inputs,
        {"command": "paths", "k": k, "max_hops": max_hops, "allow_inverse": allow_inverse, "budget": budget},
        resolver.seed, {"pairs": len(rows), "paths": n_paths},
    )
    return 0


def _cmd_train(resolver: _Resolver, argv: list[str]) -> int:
    graph, inputs = _load_graph(resolver)
    examples_path = resolver.get("examples", required=True)
    dataset_output = resolver.get("dataset_output", required=True)
    model_output = resolver.get("model_output", required=True)
    mode = str(resolver.get("mode", "shortest"))
    max_hops = int(resolver.get("max_hops", 3))
    k = int(resolver.get("k", 5))
    allow_inverse = bool(resolver.get("allow_inverse", False))
    seed = resolver.seed
    scorer_config = _scorer_config(resolver)
    inputs["examples"] = str(examples_path)

    examples = [_example_from_dict(row) for row in _read_jsonl(examples_path)]
    rows, skipped = corpus_mod.build_dataset_rows(
        examples, graph, mode, max_hops=max_hops, k=k, seed=seed, allow_inverse=allow_inverse
    )
    _write_jsonl(dataset_output, (row.to_json_dict() for row in rows))
    model = train_baseline([(row.encoding, row.target) for row in rows], scorer_config)
    model.save(model_output)

    counts = {"examples": len(examples), "rows": len(rows), "skipped": skipped, "vocab": len(model.vocab)}
    params = {
        "command": "train",
        "mode": mode,
        "max_hops": max_hops,
        "k": k,
        "allow_inverse": allow_inverse,
        "order": scorer_config.order,
        "lm_weights": list(scorer_config.lm_weights),
        "copy_weight": scorer_config.copy_weight,
        "delta": scorer_config.delta,
    }
    for output in (dataset_output, model_output):
        _write_manifest(_file_manifest(output), "train", argv, inputs, params, seed, counts)
    return 0


def _backend(resolver: _Resolver):
    """Local trained model or remote service, plus manifest inputs."""
    remote_url = resolver.get("remote_url")
    if remote_url is not None:
        config = RemoteScorerConfig(
            base_url=str(remote_url),
            timeout=float(resolver.get("timeout", 30.0)),
            max_retries=int(resolver.get("max_retries", 2)),
            auth_token=resolver.get("auth_token"),
        )
        return RemoteScorer(config), {"remote_url": str(remote_url)}
    model_path = resolver.get("model", required=True)
    return NgramCopyModel.load(model_path), {"model": str(model_path)}


def _cmd_generate(resolver: _Resolver, argv: list[str]) -> int:
    inputs_path = resolver.get("inputs", required=True)
    output = resolver.get("output", required=True)
    params = _generation_params(resolver)
    backend, inputs = _backend(resolver)
    inputs["inputs"] = str(inputs_path)
    rows = []
    for row in _read_jsonl(inputs_path):
        if "input" not in row:
            raise ValueError(f"{inputs_path}: row without an \"input\" field")
        text = str(row["input"])
        result = backend.generate(text, params)
        rows.append({"input": text, **_generation_to_dict(result)})
    _write_jsonl(output, rows)
    _write_manifest(
        _file_manifest(output), "generate", argv, inputs,
        {"command": "generate", "beam_width": params.beam_width, "max_len": params.max_len},
        resolver.seed, {"inputs": len(rows)},
    )
    return 0


def _cmd_select(resolver: _Resolver, argv: list[str]) -> int:
    graph, inputs = _load_graph(resolver)
    pairs_path = resolver.get("pairs", required=True)
    output = resolver.get("output", required=True)
    method = str(resolver.get("method", "shortest"))
    if method not in ("shortest", "confidence", "random_walk"):
        raise ValueError(f"invalid selection method {method!r}")
    k = int(resolver.get("k", 5))
    max_hops = int(resolver.get("max_hops", 3))
    allow_inverse = bool(resolver.get("allow_inverse", False))
    hop_penalty = float(resolver.get("hop_penalty", 0.0))
    seed = resolver.seed
    inputs["pairs"] = str(pairs_path)

    backend = None
    if method == "confidence":
        backend, backend_inputs = _backend(resolver)
        inputs.update(backend_inputs)
    params = _generation_params(resolver)

    rows = []
    fallbacks = 0
    for index, (head_key, tail_key) in enumerate(_read_pairs(pairs_path)):
        pair = EntityPair(graph.entity_id(head_key), graph.entity_id(tail_key))
        candidates = k_shortest_paths(
            graph, pair.head, pair.tail, k=k, max_hops=max_hops, allow_inverse=allow_inverse
        )
        if method == "shortest":
            outcome = select_shortest(
                graph, pair, max_hops=max_hops, seed=seed + index, allow_inverse=allow_inverse
            )
        elif not candidates:
            outcome = SelectionOutcome(
                pair=pair,
                chosen=None,
                encoding=encode_unknown(pair, graph),
                generation=None,
                method=METHOD_UNKNOWN_FALLBACK,
                candidates_considered=0,
            )
        elif method == "confidence":
            outcome = select_by_confidence(backend, candidates, graph, params, hop_penalty=hop_penalty)
        else:
            outcome = select_random_walk(graph, candidates)
        if outcome.chosen is None:
            fallbacks += 1
            path_index = None
        else:
            path_index = next(
                (i for i, p in enumerate(candidates) if p == outcome.chosen), None
            )
        rows.append(
            {
                "head": head_key,
                "tail": tail_key,
                "method": outcome.method,
                "path_index": path_index,
                "chosen_path": None if outcome.chosen is None else _path_to_dict(graph, outcome.chosen),
                "encoding": {
                    "text": outcome.encoding.text,
                    "variant": outcome.encoding.variant,
                    "hops": outcome.encoding.hops,
                },
                "confidence": None if outcome.generation is None else outcome.generation.normalized_score,
                "generation": None if outcome.generation is None else _generation_to_dict(outcome.generation),
            }
        )
    _write_jsonl(output, rows)
    _write_manifest(
        _file_manifest(output), "select", argv, inputs,
        {
            "command": "select",
            "method": method,
            "k": k,
            "max_hops": max_hops,
            "allow_inverse": allow_inverse,
            "hop_penalty": hop_penalty,
            "beam_width": params.beam_width,
            "max_len": params.max_len,
        },
        seed, {"pairs": len(rows), "fallbacks": fallbacks},
    )
    return 0


def _read_labels(path: str | Path) -> dict[str, str]:
    labels: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path} line {line_no}: expected 2 tab-separated fields")
            labels[parts[0]] = parts[1]
    return labels


def _cmd_eval(resolver: _Resolver, argv: list[str]) -> int:
    output = resolver.get("output", required=True)
    selections_path = resolver.get("selections")
    if selections_path is not None:
        labels_path = resolver.get("labels", required=True)
        labels_by_pair = _read_labels(labels_path)
        predicted = []
        labels = []
        for row in _read_jsonl(selections_path):
            pair_id = f"{row['head']}__{row['tail']}"
            if pair_id not in labels_by_pair:
                raise ValueError(f"{labels_path}: no label for pair {pair_id}")
            predicted.append(row.get("path_index"))
            labels.append(labels_by_pair[pair_id])
        accuracy = metrics_mod.selection_accuracy(predicted, labels)
        report = {"selection_accuracy": accuracy, "n_examples": len(predicted)}
        _write_json(output, report)
        _write_manifest(
            _file_manifest(output), "eval", argv,
            {"selections": str(selections_path), "labels": str(labels_path)},
            {"command": "eval", "mode": "selection"}, resolver.seed,
            {"examples": len(predicted)},
        )
        return 0

    predictions_path = resolver.get("predictions", required=True)
    references_path = resolver.get("references", required=True)
    requested = resolver.get("metrics", "bleu,rouge_l,meteor")
    if isinstance(requested, str):
        names = tuple(name.strip() for name in requested.split(",") if name.strip())
    else:
        names = tuple(requested)
    for name in names:
        if name not in _METRIC_NAMES:
            resolver.parser.error(f"unknown metric {name!r} (choose from {', '.join(_METRIC_NAMES)})")

    def _texts(path: str | Path, fields: tuple[str, ...]) -> list[list[str]]:
        texts = []
        for row in _read_jsonl(path):
            for field in fields:
                if field in row:
                    texts.append(word_tokens(str(row[field])))
                    break
            else:
                raise ValueError(f"{path}: row without any of {fields}")
        return texts

    candidates = _texts(predictions_path, ("text",))
    references = _texts(references_path, ("target", "text"))
    if len(candidates) != len(references):
        raise ValueError(f"{len(candidates)} predictions vs {len(references)} references")
    report: dict = {"n_examples": len(candidates), "bleu": None, "rouge_l": None, "meteor": None}
    if "bleu" in names:
        report["bleu"] = metrics_mod.bleu(candidates, references)
    if "rouge_l" in names:
        report["rouge_l"] = metrics_mod.rouge_l(candidates, references)
    if "meteor" in names:
        report["meteor"] = metrics_mod.meteor_lite(candidates, references)
    _write_json(output, report)
    _write_manifest(
        _file_manifest(output), "eval", argv,
        {"predictions": str(predictions_path), "references": str(references_path)},
        {"command": "eval", "mode": "metrics", "metrics": list(names)}, resolver.seed,
        {"examples": len(candidates)},
    )
    return 0


# ---------------------------------------------------------------- wiring


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default parameter values")
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--threads", type=int, help="worker thread hint, recorded in manifests")

    kg_files = argparse.ArgumentParser(add_help=False)
    kg_files.add_argument("--triples", help="TSV head<TAB>relation<TAB>tail")
    kg_files.add_argument("--entity-labels", help="TSV key<TAB>label")
    kg_files.add_argument("--relation-labels", help="TSV key<TAB>label")

    parser = argparse.ArgumentParser(prog="openrel", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-kg", parents=[common, kg_files], help="validate KG files and write stats")
    p.add_argument("--output", help="stats JSON output path")

    p = sub.add_parser("stats", parents=[common, kg_files], help="print KG stats, optionally a hop histogram")
    p.add_argument("--pairs", help="TSV head_key<TAB>tail_key for the histogram")
    p.add_argument("--max-hops", type=int)
    p.add_argument("--output", help="optional stats JSON output path")

    p = sub.add_parser("extract", parents=[common], help="definition records to relation examples")
    p.add_argument("--corpus", help="definition records JSON-lines")
    p.add_argument("--output", help="examples JSON-lines output")

    p = sub.add_parser("filter", parents=[common], help="coverage-filter extracted examples")
    p.add_argument("--examples", help="examples JSON-lines")
    p.add_argument("--parses", help="CoNLL-U parses (sent_id comments or record order)")
    p.add_argument("--threshold", type=float)
    p.add_argument("--output", help="kept examples JSON-lines output")
    p.add_argument("--dropped", help="optional dropped examples JSON-lines output")

    p = sub.add_parser("split", parents=[common], help="head-disjoint train/dev/test split")
    p.add_argument("--examples", help="examples JSON-lines")
    p.add_argument("--fractions", help="train,dev,test fractions, e.g. 0.8,0.1,0.1")
    p.add_argument("--output-dir", help="directory for train/dev/test JSON-lines")

    p = sub.add_parser("subsample", parents=[common], help="subsample the train split")
    p.add_argument("--split-dir", help="directory holding train/dev/test JSON-lines")
    p.add_argument("--fraction", type=float)
    p.add_argument("--output-dir")

    p = sub.add_parser("paths", parents=[common, kg_files], help="k shortest paths per pair")
    p.add_argument("--pairs", help="TSV head_key<TAB>tail_key")
    p.add_argument("--k", type=int)
    p.add_argument("--max-hops", type=int)
    p.add_argument("--allow-inverse", action=argparse.BooleanOptionalAction)
    p.add_argument("--budget", type=int)
    p.add_argument("--output")

    p = sub.add_parser("train", parents=[common, kg_files], help="build dataset rows and train the baseline")
    p.add_argument("--examples", help="filtered examples JSON-lines")
    p.add_argument("--mode", choices=["vanilla", "shortest", "multipath"])
    p.add_argument("--max-hops", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--allow-inverse", action=argparse.BooleanOptionalAction)
    p.add_argument("--order", type=int)
    p.add_argument("--lm-weights")
    p.add_argument("--copy-weight", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--dataset-output")
    p.add_argument("--model-output")

    p = sub.add_parser("generate", parents=[common], help="generate from encoded inputs")
    p.add_argument("--model", help="trained model JSON")
    p.add_argument("--remote-url", help="use a remote scorer service instead of --model")
    p.add_argument("--timeout", type=float)
    p.add_argument("--max-retries", type=int)
    p.add_argument("--auth-token")
    p.add_argument("--inputs", help="JSON-lines with an \"input\" field")
    p.add_argument("--beam-width", type=int)
    p.add_argument("--max-len", type=int)
    p.add_argument("--output")

    p = sub.add_parser("select", parents=[common, kg_files], help="select a reasoning path per pair")
    p.add_argument("--pairs", help="TSV head_key<TAB>tail_key")
    p.add_argument("--method", choices=["shortest", "confidence", "random_walk"])
    p.add_argument("--model", help="trained model JSON (confidence method)")
    p.add_argument("--remote-url")
    p.add_argument("--timeout", type=float)
    p.add_argument("--max-retries", type=int)
    p.add_argument("--auth-token")
    p.add_argument("--k", type=int)
    p.add_argument("--max-hops", type=int)
    p.add_argument("--allow-inverse", action=argparse.BooleanOptionalAction)
    p.add_argument("--hop-penalty", type=float)
    p.add_argument("--beam-width", type=int)
    p.add_argument("--max-len", type=int)
    p.add_argument("--output")

    p = sub.add_parser("eval", parents=[common], help="metrics or selection accuracy")
    p.add_argument("--predictions", help="JSON-lines with a \"text\" field")
    p.add_argument("--references", help="JSON-lines with a \"target\" or \"text\" field")
    p.add_argument("--metrics", help="comma list from bleu,rouge_l,meteor")
    p.add_argument("--selections", help="selection JSON-lines (selection-accuracy mode)")
    p.add_argument("--labels", help="TSV pair_id<TAB>preferred_path_index, - skips")
    p.add_argument("--output")

    return parser


_COMMANDS = {
    "build-kg": _cmd_build_kg,
    "stats": _cmd_stats,
    "extract": _cmd_extract,
    "filter": _cmd_filter,
    "split": _cmd_split,
    "subsample": _cmd_subsample,
    "paths": _cmd_paths,
    "train": _cmd_train,
    "generate": _cmd_generate,
    "select": _cmd_select,
    "eval": _cmd_eval,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    resolver = _Resolver(args, parser)
    try:
        return _COMMANDS[args.command](resolver, argv)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
