"""FastAPI service wrapping the pipeline.

Every endpoint is stateless: requests carry the pipeline config inline and,
for offline runs, a cassette of recorded client traffic. Pipeline errors map
to 422 with the exception class name so thin clients can branch on them.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..clients import Cassette, PipelineClients
from ..config import PipelineConfig, build_clients
from ..corpus import CURRICULUM_PLANS, Triple, build_phase_mix, stratify, triple_to_training_pair
from ..decomposer import decompose
from ..errors import DsrError
from ..evaluator import BenchmarkItem, run_benchmark
from ..formalizer import formalize_component
from ..opt_tree import assemble, locate, metrics, parse_opt, validate
from ..repair import run_repair, trajectory_transcript
from ..statement import TheoremDraft, build_statement
from .models import (
    BuildStatementRequest,
    ComponentModel,
    DecomposeRequest,
    FormalizeRequest,
    LocateRequest,
    MixRequest,
    OptNodeModel,
    ParseOptRequest,
    PipelineRequest,
    RepairRequest,
    StratifyRequest,
    TreeRequest,
)


def _setup(request) -> tuple[PipelineConfig, PipelineClients]:
    config = PipelineConfig.from_payload(request.config)
    cassette = Cassette(request.cassette) if request.cassette else None
    if cassette is None and not config.llm.base_url:
        raise DsrError("no cassette and no live LLM endpoint configured")
    return config, build_clients(config, cassette=cassette)


def _draft_payload(draft: TheoremDraft) -> dict:
    return {
        "name": draft.name,
        "source": draft.source,
        "layout": [
            {
                "component": entry.component,
                "start": entry.interval.start,
                "end": entry.interval.end,
                "fragment_start": entry.fragment.start,
                "fragment_end": entry.fragment.end,
            }
            for entry in draft.layout
        ],
        "components": [
            ComponentModel.from_component(c).model_dump() for c in draft.components
        ],
    }


def create_app() -> FastAPI:
    app = FastAPI(title="dsr pipeline service", version=__version__)

    @app.exception_handler(DsrError)
    async def dsr_error_handler(_request: Request, exc: DsrError):
        return JSONResponse(
            status_code=422, content={"error": type(exc).__name__, "detail": str(exc)}
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    # -- operator tree utilities ------------------------------------------

    @app.post("/opt/parse")
    def opt_parse(request: ParseOptRequest):
        node = parse_opt(request.json_text)
        return {"tree": OptNodeModel.from_node(node).model_dump()}

    @app.post("/opt/assemble")
    def opt_assemble(request: TreeRequest):
        node = request.tree.to_node()
        validate(node)
        text, span_map = assemble(node)
        return {
            "text": text,
            "spans": [
                {"path": list(path), "start": span.start, "end": span.end}
                for path, span in span_map.entries
            ],
        }

    @app.post("/opt/metrics")
    def opt_metrics(request: TreeRequest):
        node = request.tree.to_node()
        validate(node)
        result = metrics(node)
        return {"depth": result.depth, "width": result.width, "node_count": result.node_count}

    @app.post("/opt/locate")
    def opt_locate(request: LocateRequest):
        node = request.tree.to_node()
        validate(node)
        _, span_map = assemble(node)
        return {"path": list(locate(span_map, request.offset))}

    # -- pipeline stages ----------------------------------------------------

    @app.post("/decompose")
    def decompose_route(request: DecomposeRequest):
        from ..clients import PurposeTag

        config, clients = _setup(request)
        decomposition = decompose(
            clients.llm, request.nl_statement, config.llm.decoding_for(PurposeTag.DECOMPOSE)
        )
        return {
            "source_nl": decomposition.source_nl,
            "conditions": [
                {"text": c.text, "role": c.role.value, "index": c.index}
                for c in decomposition.conditions
            ],
            "conclusion": {
                "text": decomposition.conclusion.text,
                "role": decomposition.conclusion.role.value,
                "index": decomposition.conclusion.index,
            },
        }

    @app.post("/formalize")
    def formalize_route(request: FormalizeRequest):
        from ..clients import PurposeTag
        from ..decomposer import LogicalComponent, Role

        config, clients = _setup(request)
        component = LogicalComponent(request.text, Role(request.role), request.index)
        result = formalize_component(
            clients.llm, component, config.llm.decoding_for(PurposeTag.FORMALIZE)
        )
        return ComponentModel.from_component(result).model_dump()

    @app.post("/statement/build")
    def build_route(request: BuildStatementRequest):
        draft = build_statement(
            [model.to_component() for model in request.components], name=request.name
        )
        return _draft_payload(draft)

    @app.post("/repair")
    def repair_route(request: RepairRequest):
        config, clients = _setup(request)
        draft = build_statement(
            [model.to_component() for model in request.components], name=request.name
        )
        trajectory = run_repair(draft, request.nl_statement, clients, config.repair)
        return {
            "trajectory": trajectory.to_payload(),
            "transcript": trajectory_transcript(trajectory),
        }

    @app.post("/pipeline")
    def pipeline_route(request: PipelineRequest):
        config, clients = _setup(request)
        items = [BenchmarkItem.from_payload(payload) for payload in request.items]
        report = run_benchmark(items, clients, config)
        return report.to_payload()

    # -- corpus tooling -----------------------------------------------------

    @app.post("/corpus/stratify")
    def stratify_route(request: StratifyRequest):
        triples = [Triple.from_payload(payload) for payload in request.triples]
        tiered, dropped, summary = stratify(
            triples,
            cut_percentiles=tuple(request.cut_percentiles),
            extreme_fraction=request.extreme_fraction,
        )
        return {
            "triples": [t.to_payload() for t in tiered],
            "dropped": [t.to_payload() for t in dropped],
            "summary": summary.to_payload(),
        }

    @app.post("/corpus/mix")
    def mix_route(request: MixRequest):
        if request.phase not in CURRICULUM_PLANS:
            raise DsrError(f"unknown curriculum phase {request.phase}")
        triples = [Triple.from_payload(payload) for payload in request.triples]
        plan = CURRICULUM_PLANS[request.phase]
        samples, summary = build_phase_mix(triples, plan, request.total, request.seed)
        if request.emit_pairs:
            records = [triple_to_training_pair(t, phase=plan.phase) for t in samples]
        else:
            records = [t.to_payload() for t in samples]
        return {"samples": records, "summary": summary}

    return app


app = create_app()
