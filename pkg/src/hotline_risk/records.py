"""Line-delimited JSON files exchanged between pipeline stages."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Iterator

from hotline_risk.assessment import ManualScaleRecord
from hotline_risk.domain import (
    CaseRecord,
    CaseSummaryStream,
    FollowUpOutcome,
    Speaker,
    TranscriptDocument,
    Utterance,
    ValidationError,
    check_unique_ids,
)
from hotline_risk.predictor import RiskPrediction


def dumps(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def read_jsonl(path: str | Path) -> Iterator[dict[str, Any]]:
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{n}: invalid JSON ({exc.msg})") from exc
            if not isinstance(rec, dict):
                raise ValidationError(f"{path}:{n}: expected a JSON object")
            yield rec


def write_jsonl(path: str | Path, records: Iterable[dict[str, Any]]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(dumps(rec) + "\n")


def case_to_dict(case: CaseRecord) -> dict[str, Any]:
    return {
        "case_id": case.case_id,
        "utterances": [{"speaker": u.speaker.value, "text": u.text} for u in case.transcript.utterances],
        "scale": None if case.scale is None else case.scale.to_dict(),
        "outcome": None if case.outcome is None else case.outcome.to_dict(),
        "meta": dict(case.meta),
    }


def case_from_dict(rec: dict[str, Any]) -> CaseRecord:
    try:
        case_id = str(rec["case_id"])
        if "utterances" in rec:
            utterances = [Utterance(Speaker(u.get("speaker", "unknown")), u["text"]) for u in rec["utterances"]]
            transcript = TranscriptDocument.from_utterances(utterances)
        else:
            transcript = TranscriptDocument(text=rec["text"])
    except (KeyError, ValueError, TypeError, AttributeError) as exc:
        raise ValidationError(f"malformed case record {rec.get('case_id')!r}: {exc}") from exc
    scale = rec.get("scale")
    outcome = rec.get("outcome")
    return CaseRecord(
        case_id=case_id,
        transcript=transcript,
        scale=None if scale is None else ManualScaleRecord.from_dict(scale),
        outcome=None if outcome is None else FollowUpOutcome.from_dict(outcome),
        meta={str(k): str(v) for k, v in (rec.get("meta") or {}).items()},
    )


def load_cases(path: str | Path) -> list[CaseRecord]:
    cases = [case_from_dict(rec) for rec in read_jsonl(path)]
    check_unique_ids(cases)
    return cases


def stream_record(case_id: str, stream: CaseSummaryStream) -> dict[str, Any]:
    return {"case_id": case_id, **stream.to_dict()}


def load_streams(path: str | Path) -> dict[str, CaseSummaryStream]:
    return {rec["case_id"]: CaseSummaryStream.from_dict(rec) for rec in read_jsonl(path)}


def prediction_record(case_id: str, pred: RiskPrediction) -> dict[str, Any]:
    return {"case_id": case_id, **pred.to_dict()}


def load_predictions(path: str | Path) -> dict[str, RiskPrediction]:
    return {rec["case_id"]: RiskPrediction.from_dict(rec) for rec in read_jsonl(path)}
