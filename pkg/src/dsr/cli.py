"""dsr command line: a thin client over the HTTP service.

Every subcommand builds a request payload and posts it to the service —
remotely when --server is given (or DSR_SERVER is set), otherwise against an
in-process instance of the same app. File handling (reading inputs, writing
outputs) stays client-side.

Exit code 0 means the run completed; benchmark items failing their checks do
not change it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path


def make_client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server.rstrip("/"), timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app())


def read_jsonl(path: str) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def write_jsonl(records, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_setup(args) -> dict:
    payload: dict = {"config": {}, "cassette": None}
    if getattr(args, "config", None):
        payload["config"] = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if getattr(args, "cassette", None):
        payload["cassette"] = read_jsonl(args.cassette)
    return payload


def post(client, route: str, payload: dict) -> dict:
    response = client.post(route, json=payload)
    if response.status_code != 200:
        try:
            detail = response.json()
        except ValueError:
            detail = {"error": "http", "detail": response.text[:500]}
        print(f"error: {detail.get('error', response.status_code)}: {detail.get('detail', detail)}",
              file=sys.stderr)
        raise SystemExit(1)
    return response.json()


def emit(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommand handlers


def cmd_pipeline(args, client) -> None:
    items = read_jsonl(args.input)
    if args.record:
        # recording needs the cassette file on this machine; run locally
        from .clients import Cassette
        from .config import PipelineConfig, build_clients
        from .evaluator import BenchmarkItem, run_benchmark

        if not args.cassette:
            print("error: --record needs --cassette to write to", file=sys.stderr)
            raise SystemExit(1)
        config = PipelineConfig.from_payload(
            json.loads(Path(args.config).read_text(encoding="utf-8")) if args.config else {}
        )
        if not config.llm.base_url:
            print("error: --record needs a live LLM endpoint in --config", file=sys.stderr)
            raise SystemExit(1)
        cassette = Cassette.load(args.cassette) if args.cassette and os.path.exists(args.cassette) else None
        clients = build_clients(config, cassette=cassette, record_path=args.cassette)
        report = run_benchmark(
            [BenchmarkItem.from_payload(r) for r in items], clients, config
        ).to_payload()
    else:
        payload = load_setup(args)
        payload["items"] = items
        report = post(client, "/pipeline", payload)
    text = json.dumps(report, ensure_ascii=False, indent=2)
    emit(text, args.out)
    if args.trajectories:
        audit = [
            {"id": item["id"], "trajectory": item["trajectory"]}
            for item in report["items"]
            if item.get("trajectory")
        ]
        write_jsonl(audit, args.trajectories)
    aggregates = report["aggregates"]
    print(
        f"items={aggregates['items']} SC={aggregates['sc_rate']:.2%} "
        f"CC={aggregates['cc_rate']:.2%} mean_calls={aggregates['mean_calls']:.2f}",
        file=sys.stderr,
    )


def cmd_eval(args, client) -> None:
    payload = json.loads(Path(args.report).read_text(encoding="utf-8"))
    if args.format == "json":
        emit(json.dumps(payload, ensure_ascii=False, indent=2), args.out)
        return
    from .evaluator import ItemResult, Report

    items = [
        ItemResult(
            item_id=record["id"],
            compiled=record["compiled"],
            judge_passed=record["judge_passed"],
            judge_score=record["judge_score"],
            calls_used=record["calls_used"],
            wall_time=record["wall_time"],
            final_status=record["final_status"],
            final_source=record["final_source"],
            trajectory=None,
            error=record.get("error"),
        )
        for record in payload["items"]
    ]
    aggregates = payload["aggregates"]
    report = Report(
        items=items,
        sc_rate=aggregates["sc_rate"],
        cc_rate=aggregates["cc_rate"],
        mean_calls=aggregates["mean_calls"],
        total_time=aggregates["total_time_s"],
        avg_time=aggregates["avg_time_s"],
        toolchain=payload.get("toolchain", ""),
        budget=payload.get("budget", 4),
        accounting=payload.get("accounting", "repairs_only"),
        notes=payload.get("notes", ""),
    )
    from .evaluator import emit_report

    emit(emit_report(report, args.format), args.out)


def cmd_decompose(args, client) -> None:
    statement = args.statement or Path(args.input).read_text(encoding="utf-8").strip()
    payload = load_setup(args)
    payload["nl_statement"] = statement
    emit(json.dumps(post(client, "/decompose", payload), ensure_ascii=False, indent=2), args.out)


def cmd_formalize(args, client) -> None:
    payload = load_setup(args)
    payload.update({"text": args.text, "role": args.role, "index": args.index})
    emit(json.dumps(post(client, "/formalize", payload), ensure_ascii=False, indent=2), args.out)


def cmd_repair(args, client) -> None:
    draft = json.loads(Path(args.draft).read_text(encoding="utf-8"))
    payload = load_setup(args)
    payload.update(
        {
            "nl_statement": draft["nl_statement"],
            "components": draft["components"],
            "name": draft.get("name", "test"),
        }
    )
    result = post(client, "/repair", payload)
    emit(json.dumps(result["trajectory"], ensure_ascii=False, indent=2), args.out)
    if args.transcript:
        emit(result["transcript"], args.transcript)
    if args.lean_out:
        from .statement import write_lean_file

        write_lean_file(result["trajectory"]["final_source"], args.lean_out)


def cmd_stratify(args, client) -> None:
    payload = {
        "triples": read_jsonl(args.input),
        "cut_percentiles": args.cuts,
        "extreme_fraction": args.extreme_fraction,
    }
    result = post(client, "/corpus/stratify", payload)
    write_jsonl(result["triples"], args.out)
    if args.dropped:
        write_jsonl(result["dropped"], args.dropped)
    print(json.dumps(result["summary"], ensure_ascii=False), file=sys.stderr)


def cmd_mix(args, client) -> None:
    payload = {
        "triples": read_jsonl(args.input),
        "phase": args.phase,
        "total": args.total,
        "seed": args.seed,
        "emit_pairs": not args.raw_triples,
    }
    result = post(client, "/corpus/mix", payload)
    write_jsonl(result["samples"], args.out)
    print(json.dumps(result["summary"], ensure_ascii=False), file=sys.stderr)


def cmd_opt(args, client) -> None:
    if args.opt_command == "parse":
        source = args.json or Path(args.input).read_text(encoding="utf-8")
        result = post(client, "/opt/parse", {"json_text": source})
        emit(json.dumps(result["tree"], ensure_ascii=False, indent=2), args.out)
        return
    tree = json.loads(args.json or Path(args.input).read_text(encoding="utf-8"))
    if args.opt_command == "assemble":
        result = post(client, "/opt/assemble", {"tree": tree})
    elif args.opt_command == "metrics":
        result = post(client, "/opt/metrics", {"tree": tree})
    else:
        result = post(client, "/opt/locate", {"tree": tree, "offset": args.offset})
    emit(json.dumps(result, ensure_ascii=False, indent=2), args.out)


def cmd_import(args, client) -> None:
    from .evaluator import import_benchmark_records

    items = import_benchmark_records(args.input)
    write_jsonl([item.to_payload() for item in items], args.out)
    print(f"imported {len(items)} items", file=sys.stderr)


def cmd_serve(args, client) -> None:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)


# ---------------------------------------------------------------------------
# argument surface


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsr",
        description="Translate natural-language math statements into verified Lean 4 theorem statements.",
    )
    parser.add_argument(
        "--server",
        default=os.environ.get("DSR_SERVER"),
        help="service base URL; without it the CLI runs the service in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_setup(p):
        p.add_argument("--config", help="pipeline config JSON file")
        p.add_argument("--cassette", help="record/replay cassette JSONL file")

    p = sub.add_parser("pipeline", help="run the full pipeline over benchmark items")
    p.add_argument("--input", required=True, help="items JSONL: {id, nl, fl?}")
    add_setup(p)
    p.add_argument("--record", action="store_true", help="record live client traffic to --cassette")
    p.add_argument("--out", help="report JSON path (default: stdout)")
    p.add_argument("--trajectories", help="also write a JSONL audit of repair trajectories")
    p.set_defaults(handler=cmd_pipeline)

    p = sub.add_parser("eval", help="re-render an existing report JSON")
    p.add_argument("--report", required=True)
    p.add_argument("--format", choices=["json", "markdown", "csv"], default="markdown")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("decompose", help="split a statement into conditions and a conclusion")
    p.add_argument("--statement")
    p.add_argument("--input", help="file holding the statement")
    add_setup(p)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_decompose)

    p = sub.add_parser("formalize", help="formalize one component into Lean + tree")
    p.add_argument("--text", required=True)
    p.add_argument("--role", choices=["Condition", "Conclusion"], default="Condition")
    p.add_argument("--index", type=int, default=1)
    add_setup(p)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_formalize)

    p = sub.add_parser("repair", help="run tree-guided repair on a draft")
    p.add_argument("--draft", required=True, help="draft JSON: {nl_statement, name, components}")
    add_setup(p)
    p.add_argument("--out")
    p.add_argument("--transcript", help="also write a human-readable transcript")
    p.add_argument("--lean-out", help="write the final source as a .lean file")
    p.set_defaults(handler=cmd_repair)

    p = sub.add_parser("stratify", help="tier a triple corpus by tree complexity")
    p.add_argument("--input", required=True, help="corpus JSONL: {nl, fl, opt?, tier?}")
    p.add_argument("--out", required=True, help="tiered corpus JSONL")
    p.add_argument("--dropped", help="where to write the dropped extreme samples")
    p.add_argument("--cuts", nargs=2, type=float, default=[0.51, 0.90], metavar=("LOW", "HIGH"))
    p.add_argument("--extreme-fraction", type=float, default=0.01)
    p.set_defaults(handler=cmd_stratify)

    p = sub.add_parser("mix", help="sample one curriculum phase")
    p.add_argument("--input", required=True, help="tiered corpus JSONL")
    p.add_argument("--phase", type=int, required=True, choices=[1, 2, 3, 4])
    p.add_argument("--total", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--raw-triples", action="store_true", help="emit sampled triples instead of training pairs"
    )
    p.set_defaults(handler=cmd_mix)

    p = sub.add_parser("opt", help="operator tree utilities")
    opt_sub = p.add_subparsers(dest="opt_command", required=True)
    for name in ["parse", "assemble", "metrics", "locate"]:
        sp = opt_sub.add_parser(name)
        sp.add_argument("--json", help="tree JSON inline")
        sp.add_argument("--input", help="tree JSON file")
        sp.add_argument("--out")
        if name == "locate":
            sp.add_argument("--offset", type=int, required=True)
        sp.set_defaults(handler=cmd_opt)

    p = sub.add_parser("import", help="convert foreign benchmark JSONL to {id, nl, fl?}")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_import)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        cmd_serve(args, None)
        return 0
    client = make_client(args.server)
    try:
        args.handler(args, client)
    finally:
        client.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
