"""Core records shared by every stage of the pipeline.

All records are frozen dataclasses. Character counts are Unicode code points
(``len`` on ``str``), so one CJK character counts as one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from hotline_risk.assessment import ManualScaleRecord

UTTERANCE_SEPARATOR = "\n"
HIGH_RISK_THRESHOLD = 8


class PipelineError(Exception):
    """Base class for every error the pipeline raises on purpose."""


class ValidationError(PipelineError):
    """Input data or configuration violates a documented rule."""


class DuplicateCaseId(ValidationError):
    pass


class Speaker(str, enum.Enum):
    OPERATOR = "operator"
    CALLER = "caller"
    UNKNOWN = "unknown"


class RiskLabel(str, enum.Enum):
    HIGH_RISK = "high"
    LOW_MODERATE = "low-moderate"

    @classmethod
    def from_score(cls, score: float, threshold: float = HIGH_RISK_THRESHOLD) -> RiskLabel:
        return cls.HIGH_RISK if score >= threshold else cls.LOW_MODERATE


class OutcomeStatus(str, enum.Enum):
    CONFIRMED = "confirmed"
    LOST = "lost"


@dataclass(frozen=True)
class Utterance:
    speaker: Speaker
    text: str


@dataclass(frozen=True)
class TranscriptDocument:
    """A transcribed call. ``text`` is the utterances joined by newlines."""

    text: str
    utterances: tuple[Utterance, ...] = ()

    @classmethod
    def from_utterances(cls, utterances: list[Utterance] | tuple[Utterance, ...]) -> TranscriptDocument:
        utterances = tuple(utterances)
        return cls(text=UTTERANCE_SEPARATOR.join(u.text for u in utterances), utterances=utterances)

    def joined(self) -> str:
        return UTTERANCE_SEPARATOR.join(u.text for u in self.utterances)


@dataclass(frozen=True)
class TranscriptSegment:
    index: int
    text: str

    @property
    def char_count(self) -> int:
        return len(self.text)


@dataclass(frozen=True)
class SegmentSummary:
    segment_index: int
    text: str
    importance: int
    created_at: int
    last_access: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "segment_index": self.segment_index,
            "text": self.text,
            "importance": self.importance,
            "created_at": self.created_at,
            "last_access": self.last_access,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SegmentSummary:
        return cls(
            segment_index=int(data["segment_index"]),
            text=data["text"],
            importance=int(data["importance"]),
            created_at=int(data["created_at"]),
            last_access=int(data["last_access"]),
        )


@dataclass
class CaseSummaryStream:
    """Per-segment summaries in segment order plus the condensed whole-case summary.

    ``entries`` is appended to while a case is being summarized and is
    treated as read-only once ``final_summary`` is set.
    """

    entries: list[SegmentSummary] = field(default_factory=list)
    final_summary: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "final_summary": self.final_summary,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CaseSummaryStream:
        return cls(
            entries=[SegmentSummary.from_dict(e) for e in data.get("entries", [])],
            final_summary=data.get("final_summary"),
        )


@dataclass(frozen=True)
class FollowUpOutcome:
    attempted_suicide: bool
    status: OutcomeStatus = OutcomeStatus.CONFIRMED
    schedule_points_reached: int = 4

    @property
    def confirmed(self) -> bool:
        return self.status is OutcomeStatus.CONFIRMED

    def to_dict(self) -> dict[str, Any]:
        return {
            "attempted_suicide": self.attempted_suicide,
            "status": self.status.value,
            "schedule_points_reached": self.schedule_points_reached,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FollowUpOutcome:
        return cls(
            attempted_suicide=bool(data["attempted_suicide"]),
            status=OutcomeStatus(data.get("status", OutcomeStatus.CONFIRMED.value)),
            schedule_points_reached=int(data.get("schedule_points_reached", 4)),
        )


@dataclass(frozen=True)
class CaseRecord:
    case_id: str
    transcript: TranscriptDocument
    scale: ManualScaleRecord | None = None
    outcome: FollowUpOutcome | None = None
    meta: dict[str, str] = field(default_factory=dict)


def validate_case(case: CaseRecord, *, for_evaluation: bool = False) -> list[str]:
    """Return one finding per violated invariant; an empty list means the case is valid."""
    findings: list[str] = []
    if not case.case_id:
        findings.append("case_id empty")
    doc = case.transcript
    if not doc.text:
        findings.append("transcript.text empty")
    if doc.utterances and doc.joined() != doc.text:
        findings.append("utterance/text mismatch")
    if case.scale is not None:
        findings.extend(f"scale.{f}" for f in case.scale.findings())
    outcome = case.outcome
    if outcome is not None and not 0 <= outcome.schedule_points_reached <= 4:
        findings.append("outcome.schedule_points_reached outside [0, 4]")
    if for_evaluation:
        if outcome is None:
            findings.append("outcome absent")
        elif not outcome.confirmed:
            findings.append("outcome not confirmed")
    return findings


def check_unique_ids(cases: list[CaseRecord]) -> None:
    seen: set[str] = set()
    for case in cases:
        if case.case_id in seen:
            raise DuplicateCaseId(f"duplicate case_id {case.case_id!r}")
        seen.add(case.case_id)
