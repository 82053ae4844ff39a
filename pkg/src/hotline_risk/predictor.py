"""Zero-shot and few-shot risk prediction over a case summary stream."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from importlib import resources
from typing import Any, Iterable

from hotline_risk import prompts
from hotline_risk.assessment import ScaleElement
from hotline_risk.domain import CaseSummaryStream, PipelineError, RiskLabel, ValidationError
from hotline_risk.llm.gateway import ChatRequest, Gateway

FORMAT_REMINDER = (
    "\n\nReminder: answer with one JSON object containing risk_score, risk_label, "
    "key_factors and rationale, and nothing else."
)
PREDICTION_MAX_CHARS = 4000


class MissingSummary(PipelineError):
    pass


class BadExemplarSet(ValidationError):
    pass


class UnparseableResponse(PipelineError):
    def __init__(self, message: str, responses: Iterable[str] = ()):
        super().__init__(message)
        self.responses = list(responses)

    @property
    def attempt_count(self) -> int:
        return len(self.responses)


class ScoreOutOfRange(PipelineError):
    pass


class PredictionMode(str, enum.Enum):
    ZERO_SHOT = "zero-shot"
    FEW_SHOT = "few-shot"


@dataclass(frozen=True)
class RiskPrediction:
    score: int
    label: RiskLabel
    key_factors: tuple[str, ...] = ()
    rationale: str = ""
    mode: PredictionMode = PredictionMode.ZERO_SHOT
    raw_response: str = ""
    warnings: tuple[str, ...] = ()

    def payload(self) -> dict[str, Any]:
        """The structured object a model is asked to return."""
        return {
            "risk_score": self.score,
            "risk_label": self.label.value,
            "key_factors": list(self.key_factors),
            "rationale": self.rationale,
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode.value,
            "score": self.score,
            "label": self.label.value,
            "key_factors": list(self.key_factors),
            "rationale": self.rationale,
            "raw_response": self.raw_response,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RiskPrediction:
        return cls(
            score=int(data["score"]),
            label=RiskLabel(data["label"]),
            key_factors=tuple(data.get("key_factors", ())),
            rationale=data.get("rationale", ""),
            mode=PredictionMode(data.get("mode", PredictionMode.ZERO_SHOT.value)),
            raw_response=data.get("raw_response", ""),
            warnings=tuple(data.get("warnings", ())),
        )


@dataclass(frozen=True)
class Exemplar:
    summary: str
    positive: bool
    score: int
    key_factors: tuple[str, ...] = ()
    rationale: str = ""

    def as_prediction(self) -> RiskPrediction:
        return RiskPrediction(
            score=self.score,
            label=RiskLabel.from_score(self.score),
            key_factors=self.key_factors,
            rationale=self.rationale,
        )


@dataclass(frozen=True)
class ExemplarSet:
    exemplars: tuple[Exemplar, ...]
    required_positive: int | None = 3
    required_negative: int | None = 3

    def validate(self) -> None:
        pos = sum(1 for e in self.exemplars if e.positive)
        neg = len(self.exemplars) - pos
        if self.required_positive is not None and pos != self.required_positive:
            raise BadExemplarSet(f"expected {self.required_positive} positive exemplars, got {pos}")
        if self.required_negative is not None and neg != self.required_negative:
            raise BadExemplarSet(f"expected {self.required_negative} negative exemplars, got {neg}")
        for e in self.exemplars:
            if not 0 <= e.score <= 16:
                raise BadExemplarSet(f"exemplar score {e.score} outside 0-16")

    def ordered(self) -> list[Exemplar]:
        """Positives and negatives interleaved, positive first, leftovers appended."""
        pos = [e for e in self.exemplars if e.positive]
        neg = [e for e in self.exemplars if not e.positive]
        out: list[Exemplar] = []
        for i in range(max(len(pos), len(neg))):
            out.extend(group[i] for group in (pos, neg) if i < len(group))
        return out

    @classmethod
    def load(cls, path: str | Path | None = None, *, balanced: bool = True) -> ExemplarSet:
        if path is None:
            raw = resources.files("hotline_risk").joinpath("resources", "exemplars.jsonl").read_text("utf-8")
        else:
            raw = Path(path).read_text("utf-8")
        exemplars = []
        for n, line in enumerate(raw.splitlines(), 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            outcome = rec.get("outcome")
            if outcome not in ("positive", "negative"):
                raise BadExemplarSet(f"line {n}: outcome must be 'positive' or 'negative'")
            exemplars.append(
                Exemplar(
                    summary=rec["summary"],
                    positive=outcome == "positive",
                    score=int(rec["score"]),
                    key_factors=tuple(rec.get("key_factors", ())),
                    rationale=rec.get("rationale", ""),
                )
            )
        if balanced:
            return cls(tuple(exemplars))
        return cls(tuple(exemplars), required_positive=None, required_negative=None)


@dataclass(frozen=True)
class PredictTemplates:
    zero_shot: prompts.PromptTemplate
    few_shot: prompts.PromptTemplate

    @classmethod
    def load(cls, zero_shot_path=None, few_shot_path=None) -> PredictTemplates:
        return cls(
            zero_shot=prompts.PromptTemplate.load(zero_shot_path, "zero_shot.txt"),
            few_shot=prompts.PromptTemplate.load(few_shot_path, "few_shot.txt"),
        )


_DEFAULT_TEMPLATES: PredictTemplates | None = None


def default_templates() -> PredictTemplates:
    global _DEFAULT_TEMPLATES
    if _DEFAULT_TEMPLATES is None:
        _DEFAULT_TEMPLATES = PredictTemplates.load()
    return _DEFAULT_TEMPLATES


def factor_vocabulary() -> str:
    return "\n".join(f"- {e.display_name}" for e in ScaleElement)


def render_output(pred: RiskPrediction) -> str:
    return json.dumps(pred.payload(), ensure_ascii=False)


def _case_block(stream: CaseSummaryStream, include_entries: bool) -> str:
    if stream.final_summary is None:
        raise MissingSummary("summary stream has no final summary")
    parts = []
    if include_entries and stream.entries:
        parts.append("Segment summaries, in call order:")
        parts.extend(f"({e.segment_index + 1}) {e.text}" for e in stream.entries)
        parts.append("")
    parts.append("Overall summary:")
    parts.append(stream.final_summary)
    return "\n".join(parts)


def build_zero_shot_prompt(
    stream: CaseSummaryStream,
    *,
    include_entries: bool = True,
    templates: PredictTemplates | None = None,
) -> ChatRequest:
    templates = templates or default_templates()
    system, user = templates.zero_shot.render(
        factor_vocabulary=factor_vocabulary(),
        case_block=_case_block(stream, include_entries),
    )
    return ChatRequest(system_prompt=system, user_prompt=user, max_output_chars=PREDICTION_MAX_CHARS)


def render_exemplar(n: int, exemplar: Exemplar) -> str:
    return f"Example {n}\nSummary:\n{exemplar.summary}\nOutput:\n{render_output(exemplar.as_prediction())}\n"


def build_few_shot_prompt(
    stream: CaseSummaryStream,
    exemplars: ExemplarSet,
    *,
    include_entries: bool = True,
    templates: PredictTemplates | None = None,
) -> ChatRequest:
    templates = templates or default_templates()
    exemplars.validate()
    block = "\n".join(render_exemplar(n, e) for n, e in enumerate(exemplars.ordered(), 1)) + "\n"
    system, user = templates.few_shot.render(
        factor_vocabulary=factor_vocabulary(),
        exemplar_block=block,
        case_block=_case_block(stream, include_entries),
    )
    return ChatRequest(system_prompt=system, user_prompt=user, max_output_chars=PREDICTION_MAX_CHARS)


def _objects(text: str) -> Iterable[dict[str, Any]]:
    decoder = json.JSONDecoder()
    pos = text.find("{")
    while pos >= 0:
        try:
            obj, _ = decoder.raw_decode(text, pos)
        except json.JSONDecodeError:
            obj = None
        if isinstance(obj, dict):
            yield obj
        pos = text.find("{", pos + 1)


def _label(raw: Any) -> RiskLabel | None:
    if not isinstance(raw, str):
        return None
    value = raw.strip().lower().replace("_", "-")
    if value.startswith("high"):
        return RiskLabel.HIGH_RISK
    if value.startswith(("low", "moderate")):
        return RiskLabel.LOW_MODERATE
    return None


def parse_prediction(response_text: str) -> RiskPrediction:
    """Pull the first JSON object carrying ``risk_score`` out of a model reply.

    Surrounding prose and code fences are ignored. When label and score
    disagree the score wins and a warning is recorded.
    """
    obj = next((o for o in _objects(response_text) if "risk_score" in o), None)
    if obj is None:
        raise UnparseableResponse("no JSON object with risk_score found", [response_text])
    raw_score = obj["risk_score"]
    if isinstance(raw_score, bool):
        raise UnparseableResponse("risk_score is not a number", [response_text])
    try:
        as_float = float(raw_score)
    except (TypeError, ValueError):
        raise UnparseableResponse(f"risk_score {raw_score!r} is not a number", [response_text]) from None
    if not as_float.is_integer():
        raise UnparseableResponse(f"risk_score {raw_score!r} is not an integer", [response_text])
    score = int(as_float)
    if not 0 <= score <= 16:
        raise ScoreOutOfRange(f"risk_score {score} outside 0-16")
    warnings = []
    label = RiskLabel.from_score(score)
    stated = _label(obj.get("risk_label"))
    if stated is not None and stated is not label:
        warnings.append(f"risk_label {obj.get('risk_label')!r} disagrees with score {score}; using {label.value!r}")
    factors = obj.get("key_factors") or []
    if isinstance(factors, str):
        factors = [factors]
    factors = tuple(str(f) for f in factors)
    if label is RiskLabel.HIGH_RISK and not factors:
        warnings.append("high-risk prediction without key_factors")
    rationale = obj.get("rationale")
    return RiskPrediction(
        score=score,
        label=label,
        key_factors=factors,
        rationale="" if rationale is None else str(rationale),
        raw_response=response_text,
        warnings=tuple(warnings),
    )


def redact_stream(stream: CaseSummaryStream, gateway: Gateway) -> CaseSummaryStream:
    return CaseSummaryStream(
        entries=[replace(e, text=gateway.redact(e.text).redacted_text) for e in stream.entries],
        final_summary=None if stream.final_summary is None else gateway.redact(stream.final_summary).redacted_text,
    )


def predict_case(
    stream: CaseSummaryStream,
    gateway: Gateway,
    mode: PredictionMode = PredictionMode.ZERO_SHOT,
    exemplars: ExemplarSet | None = None,
    *,
    include_entries: bool = True,
    templates: PredictTemplates | None = None,
) -> RiskPrediction:
    """Redact the stream, prompt the model, parse; one retry with a format reminder."""
    if stream.final_summary is None:
        raise MissingSummary("summary stream has no final summary")
    clean = redact_stream(stream, gateway)
    if mode is PredictionMode.FEW_SHOT:
        if exemplars is None:
            exemplars = ExemplarSet.load()
        req = build_few_shot_prompt(clean, exemplars, include_entries=include_entries, templates=templates)
    else:
        req = build_zero_shot_prompt(clean, include_entries=include_entries, templates=templates)

    first = gateway.complete(req).text
    try:
        pred = parse_prediction(first)
    except UnparseableResponse:
        retry = replace(req, user_prompt=req.user_prompt + FORMAT_REMINDER)
        second = gateway.complete(retry).text
        try:
            pred = parse_prediction(second)
        except UnparseableResponse as exc:
            raise UnparseableResponse(f"no structured prediction after 2 attempts: {exc}", [first, second]) from exc
    return replace(pred, mode=mode)
