"""Twelve-element hotline suicide risk scale, its threshold, and manual/LLM score fusion."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Mapping

from hotline_risk.domain import HIGH_RISK_THRESHOLD, PipelineError, RiskLabel, ValidationError

if TYPE_CHECKING:
    from hotline_risk.predictor import RiskPrediction

MAX_UNANSWERED = 5


class InvalidAnswer(ValidationError):
    pass


class MissingManualScore(PipelineError):
    pass


class ScaleElement(str, enum.Enum):
    SUICIDAL_IDEATION_AND_PLAN = "suicidal_ideation_and_plan"
    SEVERE_DEPRESSION = "severe_depression"
    HOPELESSNESS = "hopelessness"
    PSYCHOLOGICAL_DISTRESS = "psychological_distress"
    ACUTE_LIFE_EVENTS = "acute_life_events"
    CHRONIC_LIFE_EVENTS = "chronic_life_events"
    ALCOHOL_OR_SUBSTANCE_MISUSE = "alcohol_or_substance_misuse"
    SEVERE_PHYSICAL_ILLNESS = "severe_physical_illness"
    FEAR_OF_BEING_ATTACKED = "fear_of_being_attacked"
    HISTORY_OF_BEING_ABUSED = "history_of_being_abused"
    SUICIDE_ATTEMPT_HISTORY = "suicide_attempt_history"
    RELATIVES_OR_ACQUAINTANCES_SUICIDAL_ACTS_HISTORY = "relatives_or_acquaintances_suicidal_acts_history"

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]

    @property
    def permitted(self) -> frozenset[int]:
        return PERMITTED_SCORES[self]

    @property
    def max_score(self) -> int:
        return max(PERMITTED_SCORES[self])


_DISPLAY_NAMES = {
    ScaleElement.SUICIDAL_IDEATION_AND_PLAN: "Suicidal ideation and plan",
    ScaleElement.SEVERE_DEPRESSION: "Severe depression",
    ScaleElement.HOPELESSNESS: "Hopelessness",
    ScaleElement.PSYCHOLOGICAL_DISTRESS: "Psychological distress",
    ScaleElement.ACUTE_LIFE_EVENTS: "Acute life events",
    ScaleElement.CHRONIC_LIFE_EVENTS: "Chronic life events",
    ScaleElement.ALCOHOL_OR_SUBSTANCE_MISUSE: "Alcohol or substance misuse",
    ScaleElement.SEVERE_PHYSICAL_ILLNESS: "Severe physical illness",
    ScaleElement.FEAR_OF_BEING_ATTACKED: "Fear of being attacked",
    ScaleElement.HISTORY_OF_BEING_ABUSED: "History of being abused",
    ScaleElement.SUICIDE_ATTEMPT_HISTORY: "Suicide attempt history",
    ScaleElement.RELATIVES_OR_ACQUAINTANCES_SUICIDAL_ACTS_HISTORY: "Relatives or acquaintances suicidal acts history",
}

# Number of questionnaire items behind each element; documentation only.
ITEM_COUNTS = {
    ScaleElement.SUICIDAL_IDEATION_AND_PLAN: 3,
    ScaleElement.SEVERE_DEPRESSION: 11,
    ScaleElement.HOPELESSNESS: 1,
    ScaleElement.PSYCHOLOGICAL_DISTRESS: 1,
    ScaleElement.ACUTE_LIFE_EVENTS: 2,
    ScaleElement.CHRONIC_LIFE_EVENTS: 2,
    ScaleElement.ALCOHOL_OR_SUBSTANCE_MISUSE: 3,
    ScaleElement.SEVERE_PHYSICAL_ILLNESS: 1,
    ScaleElement.FEAR_OF_BEING_ATTACKED: 2,
    ScaleElement.HISTORY_OF_BEING_ABUSED: 2,
    ScaleElement.SUICIDE_ATTEMPT_HISTORY: 1,
    ScaleElement.RELATIVES_OR_ACQUAINTANCES_SUICIDAL_ACTS_HISTORY: 2,
}

PERMITTED_SCORES: dict[ScaleElement, frozenset[int]] = {
    e: frozenset({0, 1}) for e in ScaleElement
}
PERMITTED_SCORES[ScaleElement.SUICIDAL_IDEATION_AND_PLAN] = frozenset({0, 1, 4})
PERMITTED_SCORES[ScaleElement.ACUTE_LIFE_EVENTS] = frozenset({0, 2})

SCALE_MAX = sum(e.max_score for e in ScaleElement)


@dataclass(frozen=True)
class ManualScaleRecord:
    """Operator-recorded element scores; a missing key or ``None`` means unanswered."""

    answers: Mapping[ScaleElement, int | None] = field(default_factory=dict)

    @property
    def unanswered_count(self) -> int:
        return sum(1 for e in ScaleElement if self.answers.get(e) is None)

    def findings(self) -> list[str]:
        out = []
        for element, value in self.answers.items():
            if value is not None and value not in element.permitted:
                out.append(f"{element.value}={value} not in {sorted(element.permitted)}")
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "answers": {e.value: v for e, v in self.answers.items() if v is not None},
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ManualScaleRecord:
        raw = data.get("answers", {})
        answers: dict[ScaleElement, int | None] = {}
        for key, value in raw.items():
            try:
                element = ScaleElement(key)
            except ValueError as exc:
                raise InvalidAnswer(f"unknown scale element {key!r}") from exc
            answers[element] = None if value is None else int(value)
        return cls(answers=answers)


@dataclass(frozen=True)
class ScaleResult:
    total: int | None
    label: RiskLabel | None

    @property
    def missing(self) -> bool:
        return self.total is None

    def to_dict(self) -> dict[str, Any]:
        return {
            "total": self.total,
            "label": None if self.label is None else self.label.value,
            "missing": self.missing,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ScaleResult:
        label = data.get("label")
        return cls(total=data.get("total"), label=None if label is None else RiskLabel(label))


MISSING = ScaleResult(total=None, label=None)


def score_scale(rec: ManualScaleRecord) -> ScaleResult:
    """Sum the element scores; more than five unanswered elements gives a missing result.

    Up to five unanswered elements contribute zero to the total.
    """
    problems = rec.findings()
    if problems:
        raise InvalidAnswer("; ".join(problems))
    if rec.unanswered_count > MAX_UNANSWERED:
        return MISSING
    total = sum(v for v in rec.answers.values() if v is not None)
    return ScaleResult(total=total, label=RiskLabel.from_score(total))


@dataclass(frozen=True)
class FusionConfig:
    alpha: float = 0.5
    beta: float = 0.5
    threshold: float = float(HIGH_RISK_THRESHOLD)

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0 or self.alpha + self.beta <= 0:
            raise ValueError("fusion weights must be non-negative with a positive sum")


@dataclass(frozen=True)
class FusedAssessment:
    combined: float
    label: RiskLabel
    manual_total: int
    llm_score: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "combined": self.combined,
            "label": self.label.value,
            "manual_total": self.manual_total,
            "llm_score": self.llm_score,
        }


def fuse_scores(manual: ScaleResult, pred: RiskPrediction, cfg: FusionConfig | None = None) -> FusedAssessment:
    cfg = cfg or FusionConfig()
    if manual.missing:
        raise MissingManualScore("manual scale score is missing; case excluded from fusion")
    assert manual.total is not None
    combined = cfg.alpha * manual.total + cfg.beta * pred.score
    return FusedAssessment(
        combined=combined,
        label=RiskLabel.from_score(combined, cfg.threshold),
        manual_total=manual.total,
        llm_score=pred.score,
    )
