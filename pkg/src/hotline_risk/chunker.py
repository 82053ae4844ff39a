"""Greedy, lossless segmentation of a transcript under a character budget."""

from __future__ import annotations

from dataclasses import dataclass

from hotline_risk.domain import (
    UTTERANCE_SEPARATOR,
    PipelineError,
    Speaker,
    TranscriptDocument,
    TranscriptSegment,
)


class EmptyTranscript(PipelineError):
    pass


@dataclass(frozen=True)
class ChunkConfig:
    segment_budget_chars: int = 2000
    include_operator_utterances: bool = True

    def __post_init__(self) -> None:
        if self.segment_budget_chars < 1:
            raise ValueError("segment_budget_chars must be >= 1")


def canonical_text(doc: TranscriptDocument, cfg: ChunkConfig) -> str:
    """Text the segments must reproduce: the full text, or caller-side utterances only."""
    if cfg.include_operator_utterances or not doc.utterances:
        return doc.text
    kept = [u.text for u in doc.utterances if u.speaker is not Speaker.OPERATOR]
    return UTTERANCE_SEPARATOR.join(kept)


def _units(doc: TranscriptDocument, cfg: ChunkConfig) -> list[str]:
    # Each unit is one utterance plus its trailing separator, so that
    # concatenating units gives back the canonical text.
    if not doc.utterances:
        return [doc.text] if doc.text else []
    texts = [
        u.text
        for u in doc.utterances
        if cfg.include_operator_utterances or u.speaker is not Speaker.OPERATOR
    ]
    units = [t + UTTERANCE_SEPARATOR for t in texts[:-1]]
    if texts:
        units.append(texts[-1])
    return [u for u in units if u]


def segment_transcript(doc: TranscriptDocument, cfg: ChunkConfig | None = None) -> list[TranscriptSegment]:
    """Pack whole utterances into segments of at most ``segment_budget_chars``.

    An utterance that alone exceeds the budget is cut into budget-sized
    pieces; the trailing remainder stays open for the next utterances.
    """
    cfg = cfg or ChunkConfig()
    budget = cfg.segment_budget_chars
    units = _units(doc, cfg)
    if not units:
        raise EmptyTranscript("transcript has no text to segment")

    chunks: list[str] = []
    current = ""
    for unit in units:
        if len(current) + len(unit) <= budget:
            current += unit
            continue
        if current:
            chunks.append(current)
            current = ""
        while len(unit) > budget:
            chunks.append(unit[:budget])
            unit = unit[budget:]
        current = unit
    if current:
        chunks.append(current)
    return [TranscriptSegment(index=i, text=t) for i, t in enumerate(chunks)]
