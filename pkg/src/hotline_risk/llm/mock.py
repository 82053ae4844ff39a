"""Deterministic lexicon-driven backend for offline runs and tests."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from hotline_risk.domain import PipelineError, RiskLabel
from hotline_risk.llm.gateway import ChatRequest, ChatResponse
from hotline_risk.llm.lexicon import RiskLexicon
from hotline_risk import prompts


class UnknownPromptShape(PipelineError):
    pass


@dataclass
class MockBackend:
    lexicon: RiskLexicon = field(default_factory=RiskLexicon.default)
    excerpt_chars: int = 200
    backend_id: str = "mock"

    def send(self, req: ChatRequest) -> ChatResponse:
        return mock_complete(req, self.lexicon, self.excerpt_chars)


def mock_complete(req: ChatRequest, lexicon: RiskLexicon, excerpt_chars: int = 200) -> ChatResponse:
    """Answer a request as a pure function of the request and the lexicon.

    Summaries list every lexicon tag present anywhere in the user prompt,
    followed by the head of the segment section, and always fit within
    ``max_output_chars``. Predictions score the case section only, so
    exemplars in a few-shot prompt do not leak into the score.
    """
    task = prompts.task_of(req.system_prompt)
    if task is None:
        raise UnknownPromptShape("system prompt carries no task sentinel")
    user = req.user_prompt
    if task in (prompts.TASK_SUMMARIZE, prompts.TASK_CONDENSE):
        text = _summary(user, lexicon, excerpt_chars, req.max_output_chars)
    elif task == prompts.TASK_IMPORTANCE:
        segment = prompts.section(user, prompts.SEGMENT_OPEN, prompts.SEGMENT_CLOSE)
        text = str(max(1, min(10, sum(e.weight for e in lexicon.matches(segment)))))
    else:
        case = prompts.section(user, prompts.CASE_OPEN, prompts.CASE_CLOSE)
        text = _prediction(case, lexicon)
    return ChatResponse(text=text, backend_id="mock", latency_ms=0, attempt_count=1)


def _summary(user: str, lexicon: RiskLexicon, excerpt_chars: int, limit: int) -> str:
    tags = " ".join(e.tag for e in lexicon.matches(user))
    header = f"factors: {tags}\n" if tags else "factors: none\n"
    segment = prompts.section(user, prompts.SEGMENT_OPEN, prompts.SEGMENT_CLOSE)
    room = max(0, min(excerpt_chars, limit - len(header)))
    return (header + segment[:room])[:limit]


def _prediction(case: str, lexicon: RiskLexicon) -> str:
    matched = lexicon.matches(case)
    score = min(16, sum(e.weight for e in matched))
    label = RiskLabel.from_score(score)
    payload = {
        "risk_score": score,
        "risk_label": label.value,
        "key_factors": [e.element.display_name for e in matched],
        "rationale": (
            "Lexicon matches: " + ", ".join(e.element.value for e in matched) if matched else "No risk factors found."
        ),
    }
    return json.dumps(payload, ensure_ascii=False)
