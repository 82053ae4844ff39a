"""Exit criteria for the pipeline.

Each test records one PASS/FAIL line; the lines are printed together in the
terminal summary (see ``conftest.py``). Run just this module with
``pytest tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import random
import socket
import time
from pathlib import Path

import pytest

from hotline_risk import cli
from hotline_risk.assessment import ManualScaleRecord, ScaleElement, score_scale
from hotline_risk.chunker import canonical_text, segment_transcript
from hotline_risk.config import PipelineConfig
from hotline_risk.domain import RiskLabel
from hotline_risk.evaluation import ConfusionMatrix, bootstrap_ci, metrics
from hotline_risk.llm import Gateway
from hotline_risk.memory import summarize_case
from hotline_risk.prompts import TASK_SUMMARIZE
from hotline_risk.records import load_cases, load_streams
from hotline_risk.reference_results import (
    REPORTED_ROWS,
    ROWS_BY_METHOD,
    TEST_NEGATIVES,
    TEST_POSITIVES,
    consistent_matrices,
    consistent_splits,
)
from hotline_risk.runner import build_gateway

pytestmark = pytest.mark.acceptance

ROOT = Path(__file__).resolve().parents[1]
MOCK_CONFIG = ROOT / "configs" / "mock.yaml"
NAMES = ("sensitivity", "specificity", "precision", "f1")
RESULTS: list[str] = []


def record(criterion: int, title: str, ok: bool, detail: str = "") -> None:
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {title}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {criterion} failed: {detail}"


def rows_match(cm: ConfusionMatrix, reported: tuple[float, ...], tol: float = 0.005) -> tuple[bool, float]:
    m = metrics(cm)
    worst = max(abs(m[n] - r) for n, r in zip(NAMES, reported))
    return worst <= tol, worst


def test_criterion_1_llm_rows():
    start = time.perf_counter()
    worst = 0.0
    ok = True
    for method, cm in (("LLM zero-shot", ConfusionMatrix(9, 1, 11, 25)), ("LLM few-shot", ConfusionMatrix(18, 10, 2, 16))):
        match, err = rows_match(cm, ROWS_BY_METHOD[method].values())
        ok &= match
        worst = max(worst, err)
    elapsed = time.perf_counter() - start
    record(1, "zero-shot and few-shot rows", ok and elapsed < 1.0, f"max error {worst:.4f} pp, {elapsed:.3f} s")


def test_criterion_2_subset_rows():
    ok = True
    worst = 0.0
    details = []
    for method, cm in (
        ("Manual scale rating", ConfusionMatrix(9, 13, 6, 9)),
        ("LLM few-shot + manual", ConfusionMatrix(13, 6, 2, 16)),
    ):
        reported = ROWS_BY_METHOD[method].values()
        match, err = rows_match(cm, reported)
        worst = max(worst, err)
        # the only consistent matrix at 15/22, and 15/22 is the only split inside the test set
        unique = consistent_matrices(reported, 15, 22) == [cm]
        splits = consistent_splits(reported, TEST_POSITIVES, TEST_NEGATIVES)
        ok &= match and unique and list(splits) == [(15, 22)]
        details.append(f"{method}: splits {sorted(splits)}")
    record(2, "n=37 manual and fused rows, unique integer matrices", ok, f"max error {worst:.4f} pp; " + "; ".join(details))


def test_criterion_3_speech_rows():
    fixtures = {
        "LSTM": ConfusionMatrix(19, 18, 1, 8),
        "BiLSTM": ConfusionMatrix(17, 14, 3, 12),
        "GNN": ConfusionMatrix(17, 12, 3, 14),
        "Transformer": ConfusionMatrix(19, 16, 1, 10),
        "Mamba": ConfusionMatrix(17, 12, 3, 14),
    }
    results = {m: rows_match(cm, ROWS_BY_METHOD[m].values()) for m, cm in fixtures.items()}
    worst = max(err for _, err in results.values())
    record(3, "speech-model rows as fixtures", all(ok for ok, _ in results.values()), f"max error {worst:.4f} pp")


def test_criterion_4_f1_identity():
    errors = {}
    for row in REPORTED_ROWS:
        p, r = row.precision, row.sensitivity
        errors[row.method] = abs(2 * p * r / (p + r) - row.f1)
    worst = max(errors, key=errors.get)
    record(4, "F1 from reported precision and sensitivity", max(errors.values()) <= 0.02, f"max {errors[worst]:.4f} pp ({worst})")


def test_criterion_5_scale_scoring():
    start = time.perf_counter()
    E = ScaleElement
    checks = []
    checks.append(score_scale(ManualScaleRecord({e: e.max_score for e in E})).total == 16)
    at_seven = {e: 0 for e in E} | {E.SUICIDAL_IDEATION_AND_PLAN: 4, E.ACUTE_LIFE_EVENTS: 2, E.SEVERE_DEPRESSION: 1}
    at_eight = at_seven | {E.HOPELESSNESS: 1}
    checks.append(score_scale(ManualScaleRecord(at_seven)).label is RiskLabel.LOW_MODERATE)
    checks.append(score_scale(ManualScaleRecord(at_eight)).label is RiskLabel.HIGH_RISK)
    checks.append(score_scale(ManualScaleRecord({e: 0 for e in list(E)[6:]})).missing)
    rng = random.Random(2024)
    for _ in range(1000):
        answers = {e: rng.choice(sorted(e.permitted)) for e in E if rng.random() < 0.9}
        result = score_scale(ManualScaleRecord(answers))
        items = list(answers.items())
        rng.shuffle(items)
        checks.append(result == score_scale(ManualScaleRecord(dict(items))))
        checks.append(result.missing or 0 <= result.total <= 16)
    elapsed = time.perf_counter() - start
    record(5, "scale scoring", all(checks) and elapsed < 1.0, f"{len(checks)} checks, {elapsed:.3f} s")


def test_criterion_6_end_to_end(tmp_path):
    start = time.perf_counter()
    codes = [
        cli.main(["gen-corpus", "--config", str(MOCK_CONFIG), "--n", "50", "--seed", "7", "--out", str(tmp_path)]),
        cli.main(["run", "--config", str(MOCK_CONFIG), "--input", str(tmp_path / "cases.jsonl"), "--out", str(tmp_path / "r1")]),
    ]
    elapsed = time.perf_counter() - start
    cli.main(["run", "--config", str(MOCK_CONFIG), "--input", str(tmp_path / "cases.jsonl"), "--out", str(tmp_path / "r2")])

    cfg = PipelineConfig.load(MOCK_CONFIG)
    cases = load_cases(tmp_path / "cases.jsonl")
    streams = load_streams(tmp_path / "r1" / "streams.jsonl")
    chunk_cfg = cfg.chunk()
    segments = {c.case_id: segment_transcript(c.transcript, chunk_cfg) for c in cases}
    seg_ok = all(s.char_count <= 2000 for segs in segments.values() for s in segs)
    lossless = all("".join(s.text for s in segments[c.case_id]) == canonical_text(c.transcript, chunk_cfg) for c in cases)
    summary_ok = all(
        len(e.text) <= 512 for s in streams.values() for e in s.entries
    ) and all(s.final_summary is not None and len(s.final_summary) <= 512 for s in streams.values())

    # summarize-stage prompts for every multi-segment case
    multi = [c for c in cases if len(segments[c.case_id]) >= 2]
    chained = True
    for case in multi:
        gateway: Gateway = build_gateway(cfg)
        gateway.record_history = True
        stream = summarize_case(case.transcript, gateway, chunk_cfg, cfg.memory())
        prompts = [req.user_prompt for req, _ in gateway.history if TASK_SUMMARIZE in req.system_prompt]
        chained &= stream.entries[0].text in prompts[1]

    report = json.loads((tmp_path / "r1" / "report.json").read_text("utf-8"))
    missing = sum(score_scale(c.scale).missing for c in cases)
    excluded_ok = report["mode"] == "fused" and report["n_excluded"] == missing

    names = sorted(p.name for p in (tmp_path / "r1").iterdir())
    identical = names == sorted(p.name for p in (tmp_path / "r2").iterdir()) and all(
        (tmp_path / "r1" / n).read_bytes() == (tmp_path / "r2" / n).read_bytes() for n in names
    )
    ok = codes == [0, 0] and elapsed < 10 and seg_ok and lossless and summary_ok and chained and bool(multi)
    ok = ok and excluded_ok and identical
    detail = (
        f"{elapsed:.2f} s; segments<=2000 {seg_ok}; summaries<=512 {summary_ok}; lossless {lossless}; "
        f"chained over {len(multi)} multi-segment cases {chained}; n_excluded {report['n_excluded']}=={missing}; "
        f"bit-identical {identical}"
    )
    record(6, "end-to-end synthetic run", ok, detail)


# Realized once with resamples=2000, seed=7; see tests/test_evaluation.py.
PINNED_SENSITIVITY = (90.0, 75.0, 100.0)


def test_criterion_7_bootstrap():
    cm = ConfusionMatrix(18, 10, 2, 16)
    cases = [(RiskLabel.HIGH_RISK, True)] * cm.tp + [(RiskLabel.HIGH_RISK, False)] * cm.fp
    cases += [(RiskLabel.LOW_MODERATE, True)] * cm.fn + [(RiskLabel.LOW_MODERATE, False)] * cm.tn
    serial = bootstrap_ci(cases, 2000, 7)
    parallel = bootstrap_ci(cases, 2000, 7, workers=4)
    again = bootstrap_ci(cases, 2000, 7)
    s = serial.sensitivity
    contains = s.ci_low <= 90.0 <= s.ci_high and 70.0 <= s.ci_low and s.ci_high <= 100.0
    pinned = (s.point, s.ci_low, s.ci_high) == PINNED_SENSITIVITY
    ok = serial == parallel == again and contains and pinned
    record(7, "bootstrap reproducibility and 46-case interval", ok, f"sensitivity CI [{s.ci_low:.2f}, {s.ci_high:.2f}]")


@pytest.fixture
def no_network(monkeypatch):
    def refuse(self, address):
        raise OSError(f"network access attempted: {address}")

    monkeypatch.setattr(socket.socket, "connect", refuse)
    monkeypatch.setattr(socket.socket, "connect_ex", refuse)


def test_criterion_8_offline_properties(no_network):
    from test_chunker import test_lossless_bounded_deterministic
    from test_memory import test_raising_importance_never_lowers_rank, test_retrieval_matches_brute_force
    from test_predictor import test_render_parse_roundtrip
    from test_redaction import test_idempotent

    suites = {
        "chunker losslessness": test_lossless_bounded_deterministic,
        "redaction idempotence": test_idempotent,
        "render/parse roundtrip": test_render_parse_roundtrip,
        "top-k equals brute force": test_retrieval_matches_brute_force,
        "importance monotonicity": test_raising_importance_never_lowers_rank,
    }
    failed = []
    for name, prop in suites.items():
        try:
            prop()
        except Exception as exc:  # noqa: BLE001
            failed.append(f"{name}: {type(exc).__name__}")
    record(8, "offline property suites", not failed, "; ".join(failed) or ", ".join(suites))
