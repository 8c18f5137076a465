import json
import subprocess
import sys

import pytest

from oracles import GOLDEN_ENTITIES, GOLDEN_RELATIONS, GOLDEN_TRIPLES
from openrel.cli import main
from oracles import meteor_identical


def run(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_lines(path, lines):
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
    return str(path)


def write_jsonl(path, rows):
    path.write_text(
        "".join(json.dumps(row, sort_keys=True) + "\n" for row in rows), encoding="utf-8"
    )
    return str(path)


def read_jsonl(path):
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def read_json(path):
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


@pytest.fixture()
def golden_files(tmp_path):
    kg_dir = tmp_path / "kg"
    kg_dir.mkdir()
    return {
        "triples": write_lines(kg_dir / "triples.tsv", GOLDEN_TRIPLES),
        "entities": write_lines(kg_dir / "entities.tsv", GOLDEN_ENTITIES),
        "relations": write_lines(kg_dir / "relations.tsv", GOLDEN_RELATIONS),
    }


def kg_args(golden_files):
    return [
        "--triples", golden_files["triples"],
        "--entity-labels", golden_files["entities"],
        "--relation-labels", golden_files["relations"],
    ]


def example_row(record_id, head, tail, target, head_span, tail_span):
    return {
        "record_id": record_id,
        "head_key": head,
        "tail_key": tail,
        "target": target,
        "tokens": target.rstrip(".").split(),
        "head_span": head_span,
        "tail_span": tail_span,
    }


@pytest.fixture()
def tiny_examples(tmp_path):
    rows = [
        example_row("r1", "romeries", "france", "Romeries is a commune in France.", [0, 1], [5, 6]),
        example_row("r2", "haste", "germany", "Haste is a municipality in Germany.", [0, 1], [5, 6]),
        example_row("r3", "romeries", "nord", "Romeries lies in Nord.", [0, 1], [3, 4]),
        example_row("r4", "evaluation", "algorithm", "evaluation measures an algorithm.", [0, 1], [3, 4]),
        example_row("r5", "plutonium", "france", "plutonium is regulated in France.", [0, 1], [4, 5]),
    ]
    return write_jsonl(tmp_path / "examples.jsonl", rows)


# -------------------------------------------------------- kg and fixtures


def test_build_kg_writes_stats_and_manifest(capsys, tmp_path, golden_files):
    out = tmp_path / "stats.json"
    code, _, err = run(capsys, "build-kg", *kg_args(golden_files), "--output", str(out))
    assert code == 0 and err == ""
    stats = read_json(out)
    assert stats == {"entities": 9, "relations": 3, "triples": 7, "duplicates_dropped": 0}
    manifest = read_json(tmp_path / "stats.json.manifest.json")
    assert manifest["command"] == "build-kg"
    assert manifest["counts"] == stats
    assert manifest["seed"] == 0
    assert set(manifest) == {"command", "argv", "inputs", "config_hash", "seed", "counts", "timestamp"}


def test_stats_prints_histogram(capsys, tmp_path, golden_files):
    pairs = write_lines(
        tmp_path / "pairs.tsv",
        ["romeries\tfrance", "haste\tfrance", "romeries\tnord", "haste\tgermany"],
    )
    code, out, _ = run(capsys, "stats", *kg_args(golden_files), "--pairs", pairs)
    assert code == 0
    stats = json.loads(out)
    assert stats["hop_histogram"] == [0.5, 0.25, 0.0, 0.25]
    assert stats["entities"] == 9


def test_fixture_pipeline(capsys, tmp_path, fixtures_dir, fixture_manifest):
    examples_out = tmp_path / "examples.jsonl"
    code, _, _ = run(
        capsys, "extract",
        "--corpus", str(fixtures_dir / "records.jsonl"),
        "--output", str(examples_out),
    )
    assert code == 0
    manifest = read_json(tmp_path / "examples.jsonl.manifest.json")
    assert manifest["counts"] == {
        "records": fixture_manifest["records"],
        "examples": fixture_manifest["examples"],
    }
    assert len(read_jsonl(examples_out)) == fixture_manifest["examples"]

    kept_out = tmp_path / "kept.jsonl"
    dropped_out = tmp_path / "dropped.jsonl"
    code, _, _ = run(
        capsys, "filter",
        "--examples", str(examples_out),
        "--parses", str(fixtures_dir / "parses.conllu"),
        "--threshold", str(fixture_manifest["threshold"]),
        "--output", str(kept_out),
        "--dropped", str(dropped_out),
    )
    assert code == 0
    kept = read_jsonl(kept_out)
    dropped = read_jsonl(dropped_out)
    assert len(kept) == fixture_manifest["kept"]
    assert len(kept) + len(dropped) == fixture_manifest["examples"]
    assert read_json(tmp_path / "kept.jsonl.manifest.json")["counts"]["kept"] == len(kept)

    by_head = {item["head_key"]: item for item in fixture_manifest["items"]}
    walton = by_head["walton_east"]
    walton_rows = [r for r in dropped if r["head_key"] == "walton_east"]
    assert len(walton_rows) == 1
    assert walton_rows[0]["surface"] == pytest.approx(walton["surface"])
    assert walton_rows[0]["dependency"] == pytest.approx(walton["dependency"])
    assert walton_rows[0]["reason"] == "low coverage"
    assert {r["reason"] for r in dropped} == {"low coverage", "no parse"}

    split_dir = tmp_path / "split"
    code, _, _ = run(
        capsys, "split",
        "--examples", str(kept_out),
        "--fractions", "0.8,0.1,0.1",
        "--seed", "3",
        "--output-dir", str(split_dir),
    )
    assert code == 0
    parts = {name: read_jsonl(split_dir / f"{name}.jsonl") for name in ("train", "dev", "test")}
    assert sum(len(p) for p in parts.values()) == len(kept)
    heads = {name: {r["head_key"] for r in part} for name, part in parts.items()}
    assert heads["train"] & heads["dev"] == set()
    assert heads["train"] & heads["test"] == set()
    assert heads["dev"] & heads["test"] == set()
    split_manifest = read_json(split_dir / "manifest.json")
    assert split_manifest["seed"] == 3
    assert split_manifest["counts"] == {name: len(part) for name, part in parts.items()}

    sub_dir = tmp_path / "sub"
    code, _, _ = run(
        capsys, "subsample",
        "--split-dir", str(split_dir),
        "--fraction", "0.5",
        "--seed", "3",
        "--output-dir", str(sub_dir),
    )
    assert code == 0
    n = len(parts["train"])
    assert len(read_jsonl(sub_dir / "train.jsonl")) == int(0.5 * n + 0.5)
    for name in ("dev", "test"):
        assert (sub_dir / f"{name}.jsonl").read_bytes() == (split_dir / f"{name}.jsonl").read_bytes()


def test_filter_positional_fallback(capsys, tmp_path):
    # two records, no sent_id comments: parses attach in record order
    rows = [
        example_row("p1", "a", "b", "a near b", [0, 1], [2, 3]),
        example_row("p2", "c", "d", "c around d", [0, 1], [2, 3]),
    ]
    examples = write_jsonl(tmp_path / "ex.jsonl", rows)
    conllu = write_lines(
        tmp_path / "parses.conllu",
        [
            "1\ta\ta\t_\t_\t_\t2\tdep\t_\t_",
            "2\tnear\tnear\t_\t_\t_\t0\troot\t_\t_",
            "3\tb\tb\t_\t_\t_\t2\tdep\t_\t_",
            "",
            "1\tc\tc\t_\t_\t_\t2\tdep\t_\t_",
            "2\taround\taround\t_\t_\t_\t0\troot\t_\t_",
            "3\td\td\t_\t_\t_\t2\tdep\t_\t_",
        ],
    )
    out = tmp_path / "kept.jsonl"
    code, _, _ = run(
        capsys, "filter", "--examples", examples, "--parses", conllu,
        "--threshold", "0.5", "--output", str(out),
    )
    assert code == 0
    # both sentences are fully covered: surface 1.0, dependency 1.0
    assert [r["record_id"] for r in read_jsonl(out)] == ["p1", "p2"]


# ------------------------------------------------------------ paths/model


def test_paths_command(capsys, tmp_path, golden_files):
    pairs = write_lines(tmp_path / "pairs.tsv", ["romeries\tfrance"])
    out = tmp_path / "paths.jsonl"
    code, _, _ = run(
        capsys, "paths", *kg_args(golden_files), "--pairs", pairs, "--output", str(out)
    )
    assert code == 0
    rows = read_jsonl(out)
    assert len(rows) == 1
    paths = rows[0]["paths"]
    assert [p["hops"] for p in paths] == [1, 2, 2]
    assert paths[0]["steps"] == [{"relation": "country", "dir": "forward", "node": "france"}]
    assert paths[1]["steps"][0]["relation"] == "located_in_admin"
    manifest = read_json(tmp_path / "paths.jsonl.manifest.json")
    assert manifest["counts"] == {"pairs": 1, "paths": 3}


def test_model_pipeline(capsys, tmp_path, golden_files, tiny_examples):
    dataset = tmp_path / "dataset.jsonl"
    model = tmp_path / "model.json"
    code, _, _ = run(
        capsys, "train", *kg_args(golden_files),
        "--examples", tiny_examples,
        "--mode", "shortest",
        "--dataset-output", str(dataset),
        "--model-output", str(model),
    )
    assert code == 0
    rows = read_jsonl(dataset)
    assert len(rows) == 4  # r5's head is outside the graph
    by_pair = {(r["head_key"], r["tail_key"]): r for r in rows}
    assert by_pair[("romeries", "france")]["input"] == "Romeries; country: France"
    assert by_pair[("evaluation", "algorithm")]["encoding_variant"] == "unknown"
    train_manifest = read_json(tmp_path / "dataset.jsonl.manifest.json")
    assert train_manifest["counts"]["skipped"] == 1
    assert train_manifest["counts"]["rows"] == 4
    model_manifest = read_json(tmp_path / "model.json.manifest.json")
    assert model_manifest["config_hash"] == train_manifest["config_hash"]
    assert read_json(model)["format"] == "ngram-copy-v1"

    generated = tmp_path / "generated.jsonl"
    code, _, _ = run(
        capsys, "generate",
        "--model", str(model),
        "--inputs", str(dataset),
        "--beam-width", "2",
        "--max-len", "16",
        "--output", str(generated),
    )
    assert code == 0
    gen_rows = read_jsonl(generated)
    assert len(gen_rows) == 4
    for row in gen_rows:
        assert row["tokens"]
        assert len(row["token_logprobs"]) == len(row["tokens"])
        assert row["normalized_score"] == pytest.approx(
            row["total_logprob"] / len(row["tokens"])
        )

    pairs = write_lines(
        tmp_path / "pairs.tsv",
        ["romeries\tfrance", "haste\tgermany", "evaluation\talgorithm"],
    )
    selections = tmp_path / "selections.jsonl"
    code, _, _ = run(
        capsys, "select", *kg_args(golden_files),
        "--pairs", pairs,
        "--method", "confidence",
        "--model", str(model),
        "--output", str(selections),
    )
    assert code == 0
    sel_rows = read_jsonl(selections)
    by_pair = {(r["head"], r["tail"]): r for r in sel_rows}
    romeries = by_pair[("romeries", "france")]
    assert romeries["method"] == "confidence"
    assert isinstance(romeries["path_index"], int)
    assert romeries["confidence"] == romeries["generation"]["normalized_score"]
    assert romeries["encoding"]["variant"] == "path"
    fallback = by_pair[("evaluation", "algorithm")]
    assert fallback["method"] == "unknown_fallback"
    assert fallback["path_index"] is None
    assert fallback["encoding"]["variant"] == "unknown"
    assert fallback["generation"] is None
    assert read_json(tmp_path / "selections.jsonl.manifest.json")["counts"]["fallbacks"] == 1


def test_generate_remote_backend(capsys, tmp_path, mock_server):
    inputs = write_jsonl(tmp_path / "in.jsonl", [{"input": "a b c"}])
    out = tmp_path / "out.jsonl"
    code, _, _ = run(
        capsys, "generate",
        "--remote-url", mock_server.base_url,
        "--inputs", inputs,
        "--max-len", "8",
        "--output", str(out),
    )
    assert code == 0
    row = read_jsonl(out)[0]
    assert row["tokens"] == ["a", "b", "c", "</s>"]


def test_select_shortest_then_eval(capsys, tmp_path, golden_files):
    pairs = write_lines(
        tmp_path / "pairs.tsv",
        ["romeries\tfrance", "haste\tgermany", "evaluation\talgorithm"],
    )
    selections = tmp_path / "selections.jsonl"
    code, _, _ = run(
        capsys, "select", *kg_args(golden_files),
        "--pairs", pairs, "--method", "shortest", "--output", str(selections),
    )
    assert code == 0
    rows = read_jsonl(selections)
    assert [r["path_index"] for r in rows] == [0, 0, None]

    labels = write_lines(
        tmp_path / "labels.tsv",
        ["romeries__france\t0", "haste__germany\t1", "evaluation__algorithm\t-"],
    )
    report_path = tmp_path / "report.json"
    code, _, _ = run(
        capsys, "eval",
        "--selections", str(selections), "--labels", labels,
        "--output", str(report_path),
    )
    assert code == 0
    report = read_json(report_path)
    assert report == {"selection_accuracy": 0.5, "n_examples": 3}

    missing = write_lines(tmp_path / "missing.tsv", ["romeries__france\t0"])
    code, _, err = run(
        capsys, "eval",
        "--selections", str(selections), "--labels", missing,
        "--output", str(tmp_path / "r2.json"),
    )
    assert code == 1
    assert "no label for pair haste__germany" in err


def test_eval_metrics_mode(capsys, tmp_path):
    predictions = write_jsonl(
        tmp_path / "pred.jsonl", [{"text": "a b c d"}, {"text": "p q r s t"}]
    )
    references = write_jsonl(
        tmp_path / "ref.jsonl", [{"target": "a b c d"}, {"target": "p q r s t"}]
    )
    out = tmp_path / "report.json"
    code, _, _ = run(
        capsys, "eval", "--predictions", predictions, "--references", references,
        "--output", str(out),
    )
    assert code == 0
    report = read_json(out)
    assert report["n_examples"] == 2
    assert report["bleu"] == 100.0
    assert report["rouge_l"] == 1.0
    assert report["meteor"] == pytest.approx(
        (meteor_identical(4) + meteor_identical(5)) / 2, abs=1e-12
    )

    subset = tmp_path / "subset.json"
    code, _, _ = run(
        capsys, "eval", "--predictions", predictions, "--references", references,
        "--metrics", "bleu", "--output", str(subset),
    )
    assert code == 0
    report = read_json(subset)
    assert report["bleu"] == 100.0
    assert report["rouge_l"] is None and report["meteor"] is None


# -------------------------------------------------- config and exit codes


def test_config_provides_defaults_flags_override(capsys, tmp_path, golden_files):
    pairs = write_lines(tmp_path / "pairs.tsv", ["romeries\tfrance"])
    out1 = tmp_path / "k1.jsonl"
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps(
            {
                "triples": golden_files["triples"],
                "entity_labels": golden_files["entities"],
                "relation_labels": golden_files["relations"],
                "pairs": pairs,
                "k": 1,
                "output": str(out1),
            }
        ),
        encoding="utf-8",
    )
    code, _, _ = run(capsys, "paths", "--config", str(config))
    assert code == 0
    assert len(read_jsonl(out1)[0]["paths"]) == 1  # k from config

    out2 = tmp_path / "k3.jsonl"
    code, _, _ = run(capsys, "paths", "--config", str(config), "--k", "3", "--output", str(out2))
    assert code == 0
    assert len(read_jsonl(out2)[0]["paths"]) == 3  # flag wins over config


def test_usage_errors_exit_2(capsys, tmp_path, golden_files):
    with pytest.raises(SystemExit) as exc:
        main(["extract", "--corpus", "x.jsonl"])  # no --output anywhere
    assert exc.value.code == 2
    assert "missing required parameter --output" in capsys.readouterr().err

    bad_config = tmp_path / "bad.json"
    bad_config.write_text("{oops", encoding="utf-8")
    with pytest.raises(SystemExit) as exc:
        main(["extract", "--config", str(bad_config), "--corpus", "x", "--output", "y"])
    assert exc.value.code == 2

    listy = tmp_path / "list.json"
    listy.write_text("[1]", encoding="utf-8")
    with pytest.raises(SystemExit) as exc:
        main(["extract", "--config", str(listy), "--corpus", "x", "--output", "y"])
    assert exc.value.code == 2
    assert "must hold a JSON object" in capsys.readouterr().err

    with pytest.raises(SystemExit) as exc:
        main(["select", "--method", "vibes"])  # argparse choices
    assert exc.value.code == 2


def test_data_errors_exit_1(capsys, tmp_path, golden_files):
    code, _, err = run(
        capsys, "extract", "--corpus", str(tmp_path / "absent.jsonl"),
        "--output", str(tmp_path / "o.jsonl"),
    )
    assert code == 1
    assert err.startswith("error: ")

    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": 1}\nnot json\n', encoding="utf-8")
    code, _, err = run(
        capsys, "generate", "--model", "m", "--inputs", str(bad),
        "--output", str(tmp_path / "o.jsonl"),
    )
    assert code == 1

    ragged = write_lines(tmp_path / "ragged.tsv", ["a\tb\tc"])
    code, _, err = run(
        capsys, "paths", *kg_args(golden_files), "--pairs", ragged,
        "--output", str(tmp_path / "p.jsonl"),
    )
    assert code == 1
    assert "expected 2 tab-separated fields" in err

    rows = [{"input": "a"}, {"target": "no input here"}]
    inputs = write_jsonl(tmp_path / "in.jsonl", rows)
    model_path = tmp_path / "model.json"
    from openrel.scorer import train_baseline

    train_baseline([("x", "a b")]).save(model_path)
    code, _, err = run(
        capsys, "generate", "--model", str(model_path), "--inputs", inputs,
        "--output", str(tmp_path / "o.jsonl"),
    )
    assert code == 1
    assert '"input" field' in err


def test_outputs_are_idempotent(capsys, tmp_path, golden_files, tiny_examples):
    dataset = tmp_path / "dataset.jsonl"
    model = tmp_path / "model.json"
    args = [
        "train", *kg_args(golden_files),
        "--examples", tiny_examples, "--mode", "multipath", "--seed", "4",
        "--dataset-output", str(dataset), "--model-output", str(model),
    ]
    assert run(capsys, *args)[0] == 0
    first_dataset = dataset.read_bytes()
    first_model = model.read_bytes()
    first_manifest = read_json(tmp_path / "dataset.jsonl.manifest.json")
    assert run(capsys, *args)[0] == 0
    assert dataset.read_bytes() == first_dataset
    assert model.read_bytes() == first_model
    second_manifest = read_json(tmp_path / "dataset.jsonl.manifest.json")
    first_manifest.pop("timestamp")
    second_manifest.pop("timestamp")
    assert first_manifest == second_manifest


# ----------------------------------------------------------- entry points


def test_console_script_help():
    result = subprocess.run(["openrel", "--help"], capture_output=True, text=True, timeout=60)
    assert result.returncode == 0
    assert "build-kg" in result.stdout


def test_module_invocation(tmp_path, golden_files):
    result = subprocess.run(
        [sys.executable, "-m", "openrel.cli", "stats", *kg_args(golden_files)],
        capture_output=True, text=True, timeout=60,
    )
    assert result.returncode == 0
    assert json.loads(result.stdout)["triples"] == 7
