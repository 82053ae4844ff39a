"""Memory-stream summarization of a segmented transcript.

Each segment is summarized with earlier summaries retrieved by a weighted
score of recency, importance and relevance. The previous segment's summary
is always supplied. A last call condenses all summaries into one record.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, replace

from hotline_risk import prompts
from hotline_risk.chunker import ChunkConfig, segment_transcript
from hotline_risk.domain import (
    CaseSummaryStream,
    PipelineError,
    SegmentSummary,
    TranscriptDocument,
    TranscriptSegment,
)
from hotline_risk.llm.gateway import ChatRequest, Gateway, GatewayError

_INT_RE = re.compile(r"-?\d+")


class SegmentError(PipelineError):
    """A gateway failure while summarizing one segment; the cause is chained."""

    def __init__(self, segment_index: int, cause: Exception):
        super().__init__(f"segment {segment_index}: {cause}")
        self.segment_index = segment_index
        self.cause = cause


@dataclass(frozen=True)
class MemoryConfig:
    top_k: int = 4
    w_recency: float = 1 / 3
    w_importance: float = 1 / 3
    w_relevance: float = 1 / 3
    recency_decay: float = 0.95
    summary_budget_chars: int = 512

    def __post_init__(self) -> None:
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        weights = (self.w_recency, self.w_importance, self.w_relevance)
        if min(weights) < 0 or abs(sum(weights) - 1.0) > 1e-9:
            raise ValueError("retrieval weights must be non-negative and sum to 1")
        if not 0 < self.recency_decay < 1:
            raise ValueError("recency_decay must lie in (0, 1)")
        if self.summary_budget_chars < 1:
            raise ValueError("summary_budget_chars must be positive")


@dataclass(frozen=True)
class Templates:
    summarize: prompts.PromptTemplate
    importance: prompts.PromptTemplate
    condense: prompts.PromptTemplate

    @classmethod
    def load(cls, summarize_path=None, importance_path=None, condense_path=None) -> Templates:
        return cls(
            summarize=prompts.PromptTemplate.load(summarize_path, "summarize.txt"),
            importance=prompts.PromptTemplate.load(importance_path, "importance.txt"),
            condense=prompts.PromptTemplate.load(condense_path, "condense.txt"),
        )


_DEFAULT_TEMPLATES: Templates | None = None


def default_templates() -> Templates:
    global _DEFAULT_TEMPLATES
    if _DEFAULT_TEMPLATES is None:
        _DEFAULT_TEMPLATES = Templates.load()
    return _DEFAULT_TEMPLATES


def _bigrams(text: str) -> Counter[str]:
    return Counter(text[i : i + 2] for i in range(len(text) - 1))


def relevance(a: str, b: str) -> float:
    """Cosine similarity of character-bigram counts, clamped to [0, 1]."""
    va, vb = _bigrams(a), _bigrams(b)
    if not va or not vb:
        return 0.0
    dot = sum(count * vb[gram] for gram, count in va.items())
    norm = math.sqrt(sum(c * c for c in va.values())) * math.sqrt(sum(c * c for c in vb.values()))
    return min(1.0, max(0.0, dot / norm))


def score_memory(entry: SegmentSummary, current_index: int, current_segment_text: str, cfg: MemoryConfig) -> float:
    if current_index < entry.created_at:
        raise ValueError("cannot score a memory created after the current segment")
    recency = cfg.recency_decay ** (current_index - entry.last_access)
    importance = entry.importance / 10
    score = (
        cfg.w_recency * recency
        + cfg.w_importance * importance
        + cfg.w_relevance * relevance(entry.text, current_segment_text)
    )
    return min(1.0, max(0.0, score))


def retrieve_memories(
    stream: CaseSummaryStream, current_index: int, current_segment_text: str, cfg: MemoryConfig
) -> list[SegmentSummary]:
    """Top ``top_k`` entries by score, ties to the older entry; marks them accessed at ``current_index``."""
    scored = [
        (score_memory(e, current_index, current_segment_text, cfg), e.created_at, pos)
        for pos, e in enumerate(stream.entries)
    ]
    scored.sort(key=lambda t: (-t[0], t[1]))
    picked = []
    for _, _, pos in scored[: cfg.top_k]:
        touched = replace(stream.entries[pos], last_access=max(stream.entries[pos].last_access, current_index))
        stream.entries[pos] = touched
        picked.append(touched)
    return picked


def build_summary_request(
    segment: TranscriptSegment,
    retrieved: list[SegmentSummary],
    previous: SegmentSummary | None,
    cfg: MemoryConfig,
    templates: Templates | None = None,
) -> ChatRequest:
    templates = templates or default_templates()
    others = [m for m in retrieved if previous is None or m.segment_index != previous.segment_index]
    memory_block = ""
    if others:
        lines = "\n".join(f"- (segment {m.segment_index + 1}) {m.text}" for m in others)
        memory_block = f"Earlier memories, most relevant first:\n{lines}\n\n"
    previous_block = ""
    if previous is not None:
        previous_block = f"Summary of the previous segment ({previous.segment_index + 1}):\n{previous.text}\n\n"
    system, user = templates.summarize.render(
        budget=cfg.summary_budget_chars,
        memory_block=memory_block,
        previous_block=previous_block,
        segment_number=segment.index + 1,
        segment=segment.text,
    )
    return ChatRequest(system_prompt=system, user_prompt=user, max_output_chars=cfg.summary_budget_chars)


def parse_importance(text: str) -> int:
    match = _INT_RE.search(text)
    if match is None:
        return 1
    return max(1, min(10, int(match.group())))


def summarize_segment(
    segment: TranscriptSegment,
    retrieved: list[SegmentSummary],
    gateway: Gateway,
    cfg: MemoryConfig,
    *,
    previous: SegmentSummary | None = None,
    templates: Templates | None = None,
) -> SegmentSummary:
    templates = templates or default_templates()
    try:
        summary = gateway.complete(build_summary_request(segment, retrieved, previous, cfg, templates)).text
        system, user = templates.importance.render(segment=segment.text)
        rating = gateway.complete(ChatRequest(system_prompt=system, user_prompt=user, max_output_chars=16)).text
    except GatewayError as exc:
        raise SegmentError(segment.index, exc) from exc
    return SegmentSummary(
        segment_index=segment.index,
        text=summary,
        importance=parse_importance(rating),
        created_at=segment.index,
        last_access=segment.index,
    )


def condense(stream: CaseSummaryStream, gateway: Gateway, cfg: MemoryConfig, templates: Templates | None = None) -> str:
    templates = templates or default_templates()
    summaries = "\n".join(f"({e.segment_index + 1}) {e.text}" for e in stream.entries)
    system, user = templates.condense.render(budget=cfg.summary_budget_chars, summaries=summaries)
    req = ChatRequest(system_prompt=system, user_prompt=user, max_output_chars=cfg.summary_budget_chars)
    return gateway.complete(req).text


def summarize_case(
    doc: TranscriptDocument,
    gateway: Gateway,
    chunk_cfg: ChunkConfig | None = None,
    mem_cfg: MemoryConfig | None = None,
    templates: Templates | None = None,
) -> CaseSummaryStream:
    chunk_cfg = chunk_cfg or ChunkConfig()
    mem_cfg = mem_cfg or MemoryConfig()
    stream = CaseSummaryStream()
    for segment in segment_transcript(doc, chunk_cfg):
        retrieved = retrieve_memories(stream, segment.index, segment.text, mem_cfg)
        previous = stream.entries[-1] if stream.entries else None
        stream.entries.append(
            summarize_segment(segment, retrieved, gateway, mem_cfg, previous=previous, templates=templates)
        )
    stream.final_summary = condense(stream, gateway, mem_cfg, templates)
    return stream
