"""HTTP service surface: every endpoint against an in-process app."""

import pytest
from fastapi.testclient import TestClient

from dsr.service import create_app
from pipeline_fixtures import DECOMPOSITIONS, FORMALIZATIONS, ITEMS
from repair_fixtures import log_product_fixture

from dsr.clients import llm_fingerprint
from dsr.prompts import build_decompose_prompt, build_structure_prompt
from dsr.service.models import ComponentModel


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as test_client:
        yield test_client


def llm_entry(prompt, tag, response):
    return {
        "kind": "llm",
        "fingerprint": llm_fingerprint(prompt, tag),
        "purpose_tag": tag,
        "response": response,
    }


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


# ---------------------------------------------------------------------------
# opt endpoints


def test_opt_parse_assemble_metrics_locate(client):
    tree_json = (
        '{"formal_content": "<SLOT> + <SLOT>", '
        '"children": [{"formal_content": "a"}, {"formal_content": "b"}]}'
    )
    parsed = client.post("/opt/parse", json={"json_text": tree_json}).json()["tree"]
    assert parsed["formal_content"] == "<SLOT> + <SLOT>"

    assembled = client.post("/opt/assemble", json={"tree": parsed}).json()
    assert assembled["text"] == "a + b"
    assert {"path": [0], "start": 0, "end": 1} in assembled["spans"]

    m = client.post("/opt/metrics", json={"tree": parsed}).json()
    assert m == {"depth": 2, "width": 2, "node_count": 3}

    located = client.post("/opt/locate", json={"tree": parsed, "offset": 4}).json()
    assert located == {"path": [1]}


def test_opt_errors_map_to_422(client):
    response = client.post("/opt/parse", json={"json_text": "{broken"})
    assert response.status_code == 422
    assert response.json()["error"] == "MalformedJson"

    bad_tree = {"formal_content": "<SLOT>", "children": []}
    response = client.post("/opt/metrics", json={"tree": bad_tree})
    assert response.status_code == 422
    assert response.json()["error"] == "InvalidArity"

    good = {"formal_content": "ab"}
    response = client.post("/opt/locate", json={"tree": good, "offset": 5})
    assert response.status_code == 422
    assert response.json()["error"] == "OffsetOutOfRange"


# ---------------------------------------------------------------------------
# LLM-backed endpoints over inline cassettes


def test_decompose_endpoint_replays_cassette(client):
    statement = "Show that $1 + 1 = 2$."
    cassette = [
        llm_entry(build_decompose_prompt(statement), "decompose", DECOMPOSITIONS["$1 + 1 = 2$"])
    ]
    body = client.post(
        "/decompose", json={"nl_statement": statement, "cassette": cassette}
    ).json()
    assert body["conditions"] == []
    assert body["conclusion"]["text"] == "$1 + 1 = 2$"


def test_decompose_endpoint_requires_llm_or_cassette(client):
    response = client.post("/decompose", json={"nl_statement": "x"})
    assert response.status_code == 422


def test_formalize_endpoint_replays_cassette(client):
    text = "$a \\in \\mathbb{R}$"
    cassette = [
        llm_entry(build_structure_prompt(text, "Condition"), "formalize", FORMALIZATIONS[text])
    ]
    body = client.post(
        "/formalize", json={"text": text, "role": "Condition", "cassette": cassette}
    ).json()
    assert body["fl_code"] == "(a : ℝ)"
    assert body["used_fallback"] is False
    assert body["opt"]["formal_content"] == "(<SLOT> : ℝ)"


def test_build_statement_endpoint(client):
    components = [
        {"text": "n is natural", "role": "Condition", "index": 1, "fl_code": "(n : ℕ)"},
        {"text": "goal", "role": "Conclusion", "index": 1, "fl_code": "n + 0 = n"},
    ]
    body = client.post("/statement/build", json={"components": components, "name": "t"}).json()
    assert body["source"] == "import Mathlib\n\ntheorem t (n : ℕ) : n + 0 = n := by sorry"
    assert body["layout"][0]["component"] == 0


def test_repair_endpoint_replays_fixture(client):
    fixture = log_product_fixture()
    components = [
        ComponentModel.from_component(c).model_dump() for c in fixture.draft.components
    ]
    # service-side verification comes from the cassette: record the scripted
    # verifier's reports for every source the trajectory visits
    from dsr.clients import Cassette, RecordingVerifier
    from dsr.repair import run_repair

    tape = Cassette()
    recording_clients = fixture.fresh_clients()
    recorded_verifier = RecordingVerifier(recording_clients.verifier, tape)
    recording_clients.verifier = recorded_verifier
    trajectory = run_repair(fixture.draft, fixture.nl_statement, recording_clients)
    fixture.cassette.rewind()

    cassette_entries = fixture.cassette.entries + tape.entries
    body = client.post(
        "/repair",
        json={
            "nl_statement": fixture.nl_statement,
            "components": components,
            "cassette": cassette_entries,
            "config": {"judge": {"mode": "constant", "constant_score": 0.9}},
        },
    ).json()
    assert body["trajectory"]["final_source"] == fixture.expected_final_source
    assert body["trajectory"]["final_status"] == "verified_consistent"
    assert "Subcomponent-Level Repair" in body["transcript"]
    assert trajectory.final_source == fixture.expected_final_source


def test_pipeline_endpoint_with_recorded_cassette(client, tmp_path):
    # record the scripted run, then drive the endpoint purely from the tape
    from dsr.clients import Cassette, RecordingJudge, RecordingLlmClient, RecordingVerifier
    from dsr.clients.base import PipelineClients
    from dsr.config import PipelineConfig
    from dsr.evaluator import run_benchmark
    from pipeline_fixtures import fake_clock, pipeline_clients

    tape = Cassette()
    live = pipeline_clients()
    recording = PipelineClients(
        llm=RecordingLlmClient(live.llm, tape),
        verifier=RecordingVerifier(live.verifier, tape),
        judge=RecordingJudge(live.judge, tape),
    )
    config = PipelineConfig()
    config.workers = 1
    recorded = run_benchmark(ITEMS, recording, config, clock=fake_clock())

    body = client.post(
        "/pipeline",
        json={
            "items": [item.to_payload() for item in ITEMS],
            "cassette": tape.entries,
            "config": {"workers": 1},
        },
    ).json()
    assert body["aggregates"]["sc_rate"] == pytest.approx(recorded.sc_rate) == pytest.approx(0.8)
    assert body["aggregates"]["cc_rate"] == pytest.approx(0.6)
    assert [i["id"] for i in body["items"]] == [i.item_id for i in recorded.items]


# ---------------------------------------------------------------------------
# corpus endpoints


def test_stratify_and_mix_endpoints(client):
    import random

    from treegen import random_tree
    from dsr.opt_tree import assemble, node_to_payload

    rng = random.Random(71)
    triples = []
    for i in range(300):
        tree = random_tree(rng, max_depth=5)
        triples.append(
            {"nl": f"s{i}", "fl": assemble(tree)[0], "opt": node_to_payload(tree)}
        )
    triples += [{"nl": f"atomic {i}", "fl": f"a{i} = {i}", "tier": "Atomic"} for i in range(100)]

    stratified = client.post("/corpus/stratify", json={"triples": triples}).json()
    assert stratified["summary"]["atomic"] == 100
    assert len(stratified["triples"]) + len(stratified["dropped"]) == 400

    mixed = client.post(
        "/corpus/mix",
        json={"triples": stratified["triples"], "phase": 2, "total": 100, "seed": 5},
    ).json()
    assert len(mixed["samples"]) == 100
    assert mixed["summary"]["quotas"] == {"Simple": 90, "Atomic": 10}
    sample = mixed["samples"][0]
    assert set(sample) >= {"prompt", "completion", "phase"}


def test_mix_unknown_phase_rejected(client):
    response = client.post("/corpus/mix", json={"triples": [], "phase": 9, "total": 10})
    assert response.status_code == 422
