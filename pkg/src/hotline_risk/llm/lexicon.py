"""Keyword lexicon mapping transcript markers to scale elements and weights."""

from __future__ import annotations

from dataclasses import dataclass

from hotline_risk.assessment import ScaleElement


@dataclass(frozen=True)
class LexiconEntry:
    element: ScaleElement
    weight: int
    terms: tuple[str, ...]

    @property
    def tag(self) -> str:
        return self.terms[0]


def factor_tag(element: ScaleElement) -> str:
    return f"[[{element.value}]]"


@dataclass(frozen=True)
class RiskLexicon:
    entries: tuple[LexiconEntry, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("lexicon must not be empty")

    @classmethod
    def default(cls) -> RiskLexicon:
        """One entry per scale element, weighted by the element's maximum score."""
        return cls(tuple(LexiconEntry(e, e.max_score, (factor_tag(e),)) for e in ScaleElement))

    def matches(self, text: str) -> list[LexiconEntry]:
        """Entries with at least one term in ``text``, in lexicon order, each once."""
        return [entry for entry in self.entries if any(term in text for term in entry.terms)]

    def weight_sum(self, text: str, cap: int = 16) -> int:
        return min(cap, sum(entry.weight for entry in self.matches(text)))

    def entry_for(self, element: ScaleElement) -> LexiconEntry:
        for entry in self.entries:
            if entry.element is element:
                return entry
        raise KeyError(element)
