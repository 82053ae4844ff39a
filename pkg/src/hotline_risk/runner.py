"""Stage functions behind the CLI: build components from config and process cases."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, TypeVar

from hotline_risk import memory, predictor
from hotline_risk.assessment import MissingManualScore, fuse_scores, score_scale
from hotline_risk.config import PipelineConfig
from hotline_risk.domain import CaseRecord, CaseSummaryStream, PipelineError, ValidationError, validate_case
from hotline_risk.evaluation import EvalMode, MetricReport, evaluate_run, format_table
from hotline_risk.llm import Gateway, HttpBackend, MockBackend, Redactor
from hotline_risk.predictor import PredictionMode, RiskPrediction
from hotline_risk.records import (
    case_to_dict,
    prediction_record,
    stream_record,
    write_jsonl,
)

T = TypeVar("T")
R = TypeVar("R")


def build_gateway(cfg: PipelineConfig) -> Gateway:
    if cfg["backend.kind"] == "mock":
        backend = MockBackend(excerpt_chars=cfg["mock.excerpt_chars"])
    else:
        backend = HttpBackend(
            base_url=cfg["backend.base_url"],
            model=cfg["backend.model"],
            max_retries=cfg["backend.max_retries"],
            timeout_ms=cfg["backend.timeout_ms"],
            backoff_ms=cfg["backend.backoff_ms"],
            temperature=cfg["backend.temperature"],
        )
    redactor = Redactor.from_paths(cfg["redaction.name_list_path"], cfg["redaction.address_list_path"])
    return Gateway(backend, redactor, max_in_flight=cfg["concurrency.max_in_flight"])


def parallel_map(fn: Callable[[T], R], items: Sequence[T], workers: int) -> list[R]:
    """Apply ``fn`` with a bounded pool; results come back in input order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class Stages:
    cfg: PipelineConfig
    gateway: Gateway

    @classmethod
    def from_config(cls, cfg: PipelineConfig, gateway: Gateway | None = None) -> Stages:
        return cls(cfg, gateway or build_gateway(cfg))

    @property
    def workers(self) -> int:
        return self.cfg["concurrency.max_in_flight"]

    def summarize(self, cases: Sequence[CaseRecord]) -> list[CaseSummaryStream]:
        for case in cases:
            findings = validate_case(case)
            if findings:
                raise ValidationError(f"{case.case_id}: " + "; ".join(findings))
        templates = memory.Templates.load(
            self.cfg["prompts.summarize_path"], self.cfg["prompts.importance_path"], self.cfg["prompts.condense_path"]
        )
        chunk_cfg, mem_cfg = self.cfg.chunk(), self.cfg.memory()
        return parallel_map(
            lambda c: memory.summarize_case(c.transcript, self.gateway, chunk_cfg, mem_cfg, templates),
            list(cases),
            self.workers,
        )

    def predict(self, streams: Sequence[CaseSummaryStream], mode: PredictionMode | None = None) -> list[RiskPrediction]:
        mode = mode or PredictionMode(self.cfg["predict.mode"])
        exemplars = None
        if mode is PredictionMode.FEW_SHOT:
            exemplars = predictor.ExemplarSet.load(
                self.cfg["predict.exemplars_path"], balanced=self.cfg["predict.balanced_exemplars"]
            )
            exemplars.validate()
        templates = predictor.PredictTemplates.load(self.cfg["prompts.zero_shot_path"], self.cfg["prompts.few_shot_path"])
        include = self.cfg["predict.include_entry_summaries"]
        return parallel_map(
            lambda s: predictor.predict_case(
                s, self.gateway, mode, exemplars, include_entries=include, templates=templates
            ),
            list(streams),
            self.workers,
        )

    def evaluate(self, cases: Sequence[CaseRecord], predictions: dict[str, RiskPrediction], mode: EvalMode) -> MetricReport:
        return evaluate_with_config(self.cfg, cases, predictions, mode)


def evaluate_with_config(
    cfg: PipelineConfig, cases: Sequence[CaseRecord], predictions: dict[str, RiskPrediction], mode: EvalMode
) -> MetricReport:
    return evaluate_run(
        cases,
        predictions,
        mode,
        fusion=cfg.fusion(),
        resamples=cfg["bootstrap.resamples"],
        seed=cfg["bootstrap.seed"],
        workers=cfg["bootstrap.workers"],
    )


def assessment_records(
    cases: Sequence[CaseRecord], predictions: dict[str, RiskPrediction] | None, cfg: PipelineConfig
) -> list[dict]:
    out = []
    for case in cases:
        rec: dict = {"case_id": case.case_id}
        result = score_scale(case.scale) if case.scale is not None else None
        rec["scale"] = None if result is None else result.to_dict()
        if predictions is not None and case.case_id in predictions:
            if result is None or result.missing:
                rec["fused"] = None
            else:
                try:
                    rec["fused"] = fuse_scores(result, predictions[case.case_id], cfg.fusion()).to_dict()
                except MissingManualScore:
                    rec["fused"] = None
        out.append(rec)
    return out


def write_report(out_dir: Path, report: MetricReport, name: str = "report.json") -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def run_all(
    cases: Sequence[CaseRecord],
    cfg: PipelineConfig,
    out_dir: Path,
    *,
    mode: PredictionMode | None = None,
    eval_mode: EvalMode = EvalMode.FUSED,
    gateway: Gateway | None = None,
) -> MetricReport:
    """Summarize, predict, assess and evaluate; write every artifact under ``out_dir``."""
    stages = Stages.from_config(cfg, gateway)
    streams = stages.summarize(cases)
    write_jsonl(out_dir / "streams.jsonl", (stream_record(c.case_id, s) for c, s in zip(cases, streams)))
    preds = stages.predict(streams, mode)
    write_jsonl(out_dir / "predictions.jsonl", (prediction_record(c.case_id, p) for c, p in zip(cases, preds)))
    by_id = {c.case_id: p for c, p in zip(cases, preds)}
    write_jsonl(out_dir / "assessments.jsonl", assessment_records(cases, by_id, cfg))

    reports: dict[EvalMode, MetricReport | None] = {}
    for m in (EvalMode.MANUAL_ONLY, EvalMode.LLM_ONLY, EvalMode.FUSED):
        try:
            reports[m] = stages.evaluate(cases, by_id, m)
        except PipelineError:
            if m is eval_mode:
                raise
            reports[m] = None
    report = reports[eval_mode]
    assert report is not None
    write_report(out_dir, report)
    names = {EvalMode.MANUAL_ONLY: "Manual scale rating", EvalMode.LLM_ONLY: "LLM", EvalMode.FUSED: "LLM+Manual"}
    table = format_table([(names[m], r) for m, r in reports.items()])
    (out_dir / "report.txt").write_text(table, encoding="utf-8")
    return report


def write_cases(path: Path, cases: Sequence[CaseRecord]) -> None:
    write_jsonl(path, (case_to_dict(c) for c in cases))

