"""CLI thin client, exercised in-process end to end."""

import json

import pytest

from dsr.cli import main
from dsr.clients import Cassette, RecordingJudge, RecordingLlmClient, RecordingVerifier
from dsr.clients.base import PipelineClients
from dsr.config import PipelineConfig
from dsr.evaluator import run_benchmark
from dsr.service.models import ComponentModel
from pipeline_fixtures import ITEMS, fake_clock, pipeline_clients
from repair_fixtures import log_product_fixture


def run_cli(*argv) -> int:
    return main(list(argv))


def write_jsonl(records, path):
    path.write_text(
        "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records), encoding="utf-8"
    )


@pytest.fixture(scope="module")
def pipeline_tape(tmp_path_factory):
    """Record the scripted five-item run once; reuse the tape across tests."""
    tape_dir = tmp_path_factory.mktemp("tape")
    tape_path = tape_dir / "tape.jsonl"
    tape = Cassette()
    live = pipeline_clients()
    recording = PipelineClients(
        llm=RecordingLlmClient(live.llm, tape, tape_path),
        verifier=RecordingVerifier(live.verifier, tape, tape_path),
        judge=RecordingJudge(live.judge, tape, tape_path),
    )
    config = PipelineConfig()
    config.workers = 1
    run_benchmark(ITEMS, recording, config, clock=fake_clock())
    return tape_path


def test_opt_subcommands(tmp_path, capsys):
    tree_json = (
        '{"formal_content": "<SLOT> + <SLOT>", '
        '"children": [{"formal_content": "a"}, {"formal_content": "b"}]}'
    )
    assert run_cli("opt", "parse", "--json", tree_json) == 0
    parsed = json.loads(capsys.readouterr().out)
    assert parsed["formal_content"] == "<SLOT> + <SLOT>"

    tree_file = tmp_path / "tree.json"
    tree_file.write_text(json.dumps(parsed), encoding="utf-8")
    assert run_cli("opt", "assemble", "--input", str(tree_file)) == 0
    assert json.loads(capsys.readouterr().out)["text"] == "a + b"

    assert run_cli("opt", "metrics", "--input", str(tree_file)) == 0
    assert json.loads(capsys.readouterr().out) == {"depth": 2, "width": 2, "node_count": 3}

    assert run_cli("opt", "locate", "--input", str(tree_file), "--offset", "0") == 0
    assert json.loads(capsys.readouterr().out) == {"path": [0]}


def test_opt_parse_failure_exits_nonzero(capsys):
    with pytest.raises(SystemExit) as info:
        run_cli("opt", "parse", "--json", "{broken")
    assert info.value.code == 1
    assert "MalformedJson" in capsys.readouterr().err


def test_pipeline_from_cassette(tmp_path, pipeline_tape, capsys):
    items_file = tmp_path / "items.jsonl"
    write_jsonl([item.to_payload() for item in ITEMS], items_file)
    report_file = tmp_path / "report.json"
    audit_file = tmp_path / "trajectories.jsonl"
    assert (
        run_cli(
            "pipeline",
            "--input", str(items_file),
            "--cassette", str(pipeline_tape),
            "--out", str(report_file),
            "--trajectories", str(audit_file),
        )
        == 0
    )
    report = json.loads(report_file.read_text(encoding="utf-8"))
    assert report["aggregates"]["sc_rate"] == pytest.approx(0.8)
    assert report["aggregates"]["cc_rate"] == pytest.approx(0.6)
    assert "SC=80.00%" in capsys.readouterr().err
    audit = [json.loads(line) for line in audit_file.read_text(encoding="utf-8").splitlines()]
    assert len(audit) == 5
    assert all("steps" in record["trajectory"] for record in audit)


def test_eval_reformats_report(tmp_path, pipeline_tape, capsys):
    items_file = tmp_path / "items.jsonl"
    write_jsonl([item.to_payload() for item in ITEMS], items_file)
    report_file = tmp_path / "report.json"
    run_cli(
        "pipeline", "--input", str(items_file), "--cassette", str(pipeline_tape),
        "--out", str(report_file),
    )
    capsys.readouterr()
    md_file = tmp_path / "report.md"
    assert run_cli("eval", "--report", str(report_file), "--format", "markdown", "--out", str(md_file)) == 0
    text = md_file.read_text(encoding="utf-8")
    assert "| Items | SC | CC | Mean calls |" in text
    assert run_cli("eval", "--report", str(report_file), "--format", "csv") == 0
    assert capsys.readouterr().out.startswith("id,compiled")


def test_decompose_from_cassette(tmp_path, pipeline_tape, capsys):
    assert (
        run_cli(
            "decompose",
            "--statement", "Show that $1 + 1 = 2$.",
            "--cassette", str(pipeline_tape),
        )
        == 0
    )
    body = json.loads(capsys.readouterr().out)
    assert body["conclusion"]["text"] == "$1 + 1 = 2$"


def test_repair_from_cassette(tmp_path, capsys):
    fixture = log_product_fixture()
    # capture verifier reports so the service can replay them
    tape = Cassette(list(fixture.cassette.entries))
    clients = fixture.fresh_clients()
    recorded = PipelineClients(
        llm=clients.llm, verifier=RecordingVerifier(clients.verifier, tape), judge=clients.judge
    )
    from dsr.repair import run_repair

    run_repair(fixture.draft, fixture.nl_statement, recorded)
    fixture.cassette.rewind()

    tape_file = tmp_path / "repair_tape.jsonl"
    tape.save(tape_file)
    draft_file = tmp_path / "draft.json"
    draft_file.write_text(
        json.dumps(
            {
                "nl_statement": fixture.nl_statement,
                "name": "test",
                "components": [
                    ComponentModel.from_component(c).model_dump()
                    for c in fixture.draft.components
                ],
            },
            ensure_ascii=False,
        ),
        encoding="utf-8",
    )
    transcript_file = tmp_path / "transcript.txt"
    out_file = tmp_path / "trajectory.json"
    lean_file = tmp_path / "final.lean"
    assert (
        run_cli(
            "repair",
            "--draft", str(draft_file),
            "--cassette", str(tape_file),
            "--out", str(out_file),
            "--transcript", str(transcript_file),
            "--lean-out", str(lean_file),
        )
        == 0
    )
    trajectory = json.loads(out_file.read_text(encoding="utf-8"))
    assert trajectory["final_source"] == fixture.expected_final_source
    assert "Finset.Icc (4:ℕ) 63" in trajectory["final_source"]
    assert "Subcomponent-Level Repair" in transcript_file.read_text(encoding="utf-8")
    lean_bytes = lean_file.read_bytes()
    assert lean_bytes.decode("utf-8") == fixture.expected_final_source + "\n"


def test_stratify_and_mix(tmp_path, capsys):
    import random

    from dsr.opt_tree import assemble, node_to_payload
    from treegen import random_tree

    rng = random.Random(83)
    records = []
    for i in range(400):
        tree = random_tree(rng, max_depth=5)
        records.append({"nl": f"s{i}", "fl": assemble(tree)[0], "opt": node_to_payload(tree)})
    records += [{"nl": f"atomic {i}", "fl": f"a{i} = {i}", "tier": "Atomic"} for i in range(50)]
    corpus_file = tmp_path / "corpus.jsonl"
    write_jsonl(records, corpus_file)

    tiered_file = tmp_path / "tiered.jsonl"
    assert (
        run_cli(
            "stratify", "--input", str(corpus_file), "--out", str(tiered_file),
            "--extreme-fraction", "0.01",
        )
        == 0
    )
    summary = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert summary["dropped"] == 4  # floor(0.01 * 400)

    mix_file = tmp_path / "mix.jsonl"
    assert (
        run_cli(
            "mix", "--input", str(tiered_file), "--phase", "2", "--total", "100",
            "--seed", "7", "--out", str(mix_file),
        )
        == 0
    )
    lines = mix_file.read_text(encoding="utf-8").strip().splitlines()
    assert len(lines) == 100
    first = json.loads(lines[0])
    assert {"prompt", "completion", "phase", "tier"} <= set(first)

    # same seed, same bytes
    mix_file2 = tmp_path / "mix2.jsonl"
    run_cli(
        "mix", "--input", str(tiered_file), "--phase", "2", "--total", "100",
        "--seed", "7", "--out", str(mix_file2),
    )
    assert mix_file.read_bytes() == mix_file2.read_bytes()


def test_import_converts_foreign_records(tmp_path, capsys):
    foreign = tmp_path / "foreign.jsonl"
    write_jsonl(
        [{"name": "p1", "informal_statement": "prove", "formal_statement": "theorem"}], foreign
    )
    out = tmp_path / "items.jsonl"
    assert run_cli("import", "--input", str(foreign), "--out", str(out)) == 0
    items = [json.loads(line) for line in out.read_text(encoding="utf-8").splitlines()]
    assert items == [{"id": "p1", "nl": "prove", "fl": "theorem"}]
