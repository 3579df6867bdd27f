"""Benchmark harness: run the full pipeline per item and report pass rates.

SC is the fraction of items whose final source compiles; CC the fraction
that compile and clear the judge threshold, with all items as the
denominator — an item that never compiles is a CC failure without a judge
call. Per-item failures are recorded, never fatal. Reports sort by item id
so a replayed run with a deterministic clock is byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .clients import CallCounter, PipelineClients, PurposeTag, REPAIR_TAGS
from .config import PipelineConfig
from .decomposer import decompose
from .errors import DsrError, EmptyBenchmark
from .formalizer import formalize_component
from .repair import AccountingMode, FinalStatus, RepairTrajectory, run_repair
from .statement import build_statement

CC_DENOMINATOR_NOTE = "CC denominator is all items; non-compiling items fail CC without a judge call"


@dataclass(frozen=True)
class BenchmarkItem:
    id: str
    nl_statement: str
    gold_fl: str | None = None  # stored for audit, unused by metrics

    def to_payload(self) -> dict:
        payload = {"id": self.id, "nl": self.nl_statement}
        if self.gold_fl is not None:
            payload["fl"] = self.gold_fl
        return payload

    @classmethod
    def from_payload(cls, payload: dict) -> "BenchmarkItem":
        return cls(
            id=str(payload["id"]),
            nl_statement=payload.get("nl", payload.get("nl_statement", "")),
            gold_fl=payload.get("fl"),
        )


@dataclass
class ItemResult:
    item_id: str
    compiled: bool
    judge_passed: bool | None
    judge_score: float | None
    calls_used: int
    wall_time: float
    final_status: str
    final_source: str
    trajectory: RepairTrajectory | None
    error: str | None = None

    def to_payload(self) -> dict:
        return {
            "id": self.item_id,
            "compiled": self.compiled,
            "judge_passed": self.judge_passed,
            "judge_score": self.judge_score,
            "calls_used": self.calls_used,
            "wall_time": self.wall_time,
            "final_status": self.final_status,
            "final_source": self.final_source,
            "trajectory": self.trajectory.to_payload() if self.trajectory else None,
            "error": self.error,
        }


@dataclass
class Report:
    items: list[ItemResult]
    sc_rate: float
    cc_rate: float
    mean_calls: float
    total_time: float
    avg_time: float
    toolchain: str
    budget: int
    accounting: str
    notes: str = CC_DENOMINATOR_NOTE

    def to_payload(self) -> dict:
        return {
            "notes": self.notes,
            "toolchain": self.toolchain,
            "budget": self.budget,
            "accounting": self.accounting,
            "aggregates": {
                "items": len(self.items),
                "sc_rate": self.sc_rate,
                "cc_rate": self.cc_rate,
                "mean_calls": self.mean_calls,
                "total_time_s": self.total_time,
                "avg_time_s": self.avg_time,
            },
            "items": [item.to_payload() for item in self.items],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_payload(), ensure_ascii=False, indent=2)


def evaluate_item(
    item: BenchmarkItem,
    clients: PipelineClients,
    config: PipelineConfig,
    clock: Callable[[], float] = time.monotonic,
) -> ItemResult:
    """decompose -> formalize components -> build -> repair -> judge."""
    start = clock()
    counter = CallCounter(clients.llm)
    item_clients = PipelineClients(llm=counter, verifier=clients.verifier, judge=clients.judge)
    try:
        decomposition = decompose(counter, item.nl_statement)
        components = [
            formalize_component(counter, component) for component in decomposition.components
        ]
        draft = build_statement(components, name=config.theorem_name)
        initial_calls = (
            counter.total() if config.repair.accounting is AccountingMode.ALL_LLM_CALLS else 0
        )
        trajectory = run_repair(
            draft, item.nl_statement, item_clients, config.repair, initial_calls=initial_calls
        )
    except DsrError as exc:
        return ItemResult(
            item_id=item.id,
            compiled=False,
            judge_passed=None,
            judge_score=None,
            calls_used=counter.total(REPAIR_TAGS)
            if config.repair.accounting is AccountingMode.REPAIRS_ONLY
            else counter.total(),
            wall_time=clock() - start,
            final_status=FinalStatus.FAILED.value,
            final_source="",
            trajectory=None,
            error=f"{type(exc).__name__}: {exc}",
        )
    compiled = trajectory.final_status is not FinalStatus.FAILED
    verdict = trajectory.judge_verdict
    if compiled and verdict is None and clients.judge is not None:
        verdict = clients.judge.judge(item.nl_statement, trajectory.final_source)
        trajectory.judge_verdict = verdict
    return ItemResult(
        item_id=item.id,
        compiled=compiled,
        judge_passed=verdict.passed if verdict else None,
        judge_score=verdict.score if verdict else None,
        calls_used=trajectory.calls_used,
        wall_time=clock() - start,
        final_status=trajectory.final_status.value,
        final_source=trajectory.final_source,
        trajectory=trajectory,
    )


def run_benchmark(
    items: list[BenchmarkItem],
    clients: PipelineClients,
    config: PipelineConfig,
    clock: Callable[[], float] = time.monotonic,
) -> Report:
    if not items:
        raise EmptyBenchmark("no benchmark items")
    ids = [item.id for item in items]
    if len(set(ids)) != len(ids):
        raise ValueError("benchmark item ids must be unique")

    start = clock()
    workers = max(1, config.workers)
    if workers == 1:
        results = [evaluate_item(item, clients, config, clock) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(lambda item: evaluate_item(item, clients, config, clock), items)
            )
    total_time = clock() - start

    results.sort(key=lambda r: r.item_id)
    n = len(results)
    compiled = sum(1 for r in results if r.compiled)
    consistent = sum(1 for r in results if r.compiled and r.judge_passed)
    return Report(
        items=results,
        sc_rate=compiled / n,
        cc_rate=consistent / n,
        mean_calls=sum(r.calls_used for r in results) / n,
        total_time=total_time,
        avg_time=total_time / n,
        toolchain=config.verifier.toolchain,
        budget=config.repair.budget,
        accounting=config.repair.accounting.value,
    )


def emit_report(report: Report, fmt: str = "json", path: str | Path | None = None) -> str:
    """Render the report; json round-trips every field."""
    if fmt == "json":
        text = report.to_json()
    elif fmt == "markdown":
        text = _markdown_report(report)
    elif fmt == "csv":
        text = _csv_report(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise IOError(f"cannot write report: {exc}") from exc
    return text


def _markdown_report(report: Report) -> str:
    lines = [
        "# Evaluation report",
        "",
        f"- Toolchain: {report.toolchain}",
        f"- Budget: {report.budget} ({report.accounting})",
        f"- Note: {report.notes}",
        "",
        "| Items | SC | CC | Mean calls |",
        "|---|---|---|---|",
        f"| {len(report.items)} | {report.sc_rate:.2%} | {report.cc_rate:.2%} "
        f"| {report.mean_calls:.2f} |",
        "",
        "## Timing",
        "",
        "| Total Time (s) | Average Time (s) |",
        "|---|---|",
        f"| {report.total_time:.3f} | {report.avg_time:.3f} |",
        "",
        "## Items",
        "",
        "| id | compiled | judge | calls | status |",
        "|---|---|---|---|---|",
    ]
    for item in report.items:
        judge = "-" if item.judge_passed is None else ("pass" if item.judge_passed else "fail")
        lines.append(
            f"| {item.item_id} | {'yes' if item.compiled else 'no'} | {judge} "
            f"| {item.calls_used} | {item.final_status} |"
        )
    lines.append("")
    return "\n".join(lines)


def _csv_report(report: Report) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["id", "compiled", "judge_passed", "judge_score", "calls_used", "wall_time", "final_status"]
    )
    for item in report.items:
        writer.writerow(
            [
                item.item_id,
                item.compiled,
                item.judge_passed,
                item.judge_score,
                item.calls_used,
                f"{item.wall_time:.6f}",
                item.final_status,
            ]
        )
    return buffer.getvalue()


def read_benchmark_items(path: str | Path) -> list[BenchmarkItem]:
    items = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                items.append(BenchmarkItem.from_payload(json.loads(line)))
    return items


IMPORT_ALIASES = {
    "id": ["id", "name", "problem_id", "label"],
    "nl": ["nl", "nl_statement", "informal_statement", "informal_stmt", "informal_prefix", "statement", "problem"],
    "fl": ["fl", "fl_statement", "formal_statement", "lean4_statement", "gold"],
}


def import_benchmark_records(path: str | Path) -> list[BenchmarkItem]:
    """Convert common benchmark JSONL field spellings into {id, nl, fl?}."""
    items: list[BenchmarkItem] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            item_id = _first_field(record, IMPORT_ALIASES["id"]) or f"item_{line_no:04d}"
            nl = _first_field(record, IMPORT_ALIASES["nl"])
            if nl is None:
                raise ValueError(f"record {line_no} has no natural-language field")
            items.append(
                BenchmarkItem(
                    id=str(item_id), nl_statement=nl, gold_fl=_first_field(record, IMPORT_ALIASES["fl"])
                )
            )
    return items


def _first_field(record: dict, names: list[str]):
    for name in names:
        if record.get(name) not in (None, ""):
            return record[name]
    return None
