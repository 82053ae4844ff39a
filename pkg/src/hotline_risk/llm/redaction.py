"""Pattern and list based removal of identifying spans before text leaves the local machine."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable


class SpanKind(str, enum.Enum):
    PHONE = "phone"
    ID_NUMBER = "id"
    PERSON_NAME = "name"
    ADDRESS = "address"


PLACEHOLDERS = {
    SpanKind.PHONE: "[PHONE]",
    SpanKind.ID_NUMBER: "[ID]",
    SpanKind.PERSON_NAME: "[NAME]",
    SpanKind.ADDRESS: "[ADDR]",
}

# 15- or 18-digit national ID numbers; the 18th character may be a check letter X.
_ID_RE = re.compile(r"(?<![0-9])(?:[0-9]{17}[0-9Xx]|[0-9]{15})(?![0-9A-Za-z])")
# 7-13 digits, optionally led by '+' and split by single spaces, dots or hyphens.
_PHONE_RE = re.compile(r"(?<![0-9])\+?[0-9](?:[ .\-]?[0-9]){6,12}(?![0-9])")
_PLACEHOLDER_RE = re.compile("|".join(re.escape(p) for p in PLACEHOLDERS.values()))


@dataclass(frozen=True)
class Replacement:
    span_kind: SpanKind
    placeholder: str
    start: int
    end: int


@dataclass(frozen=True)
class RedactionReport:
    redacted_text: str
    replacements: tuple[Replacement, ...] = ()

    @property
    def count(self) -> int:
        return len(self.replacements)


def load_term_list(path: str | Path | None, default_name: str) -> list[str]:
    if path is None:
        raw = resources.files("hotline_risk").joinpath("resources", default_name).read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    return [line.strip() for line in raw.splitlines() if line.strip() and not line.startswith("#")]


@dataclass
class Redactor:
    names: list[str] = field(default_factory=list)
    addresses: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._name_re = _literal_alternation(self.names)
        self._addr_re = _literal_alternation(self.addresses)

    @classmethod
    def from_paths(cls, name_list_path: str | Path | None = None, address_list_path: str | Path | None = None) -> Redactor:
        return cls(
            names=load_term_list(name_list_path, "names.txt"),
            addresses=load_term_list(address_list_path, "addresses.txt"),
        )

    def _candidates(self, text: str) -> list[tuple[int, int, SpanKind]]:
        found: list[tuple[int, int, SpanKind]] = []
        patterns = [
            (_ID_RE, SpanKind.ID_NUMBER),
            (_PHONE_RE, SpanKind.PHONE),
            (self._addr_re, SpanKind.ADDRESS),
            (self._name_re, SpanKind.PERSON_NAME),
        ]
        for pattern, kind in patterns:
            if pattern is None:
                continue
            found.extend((m.start(), m.end(), kind) for m in pattern.finditer(text) if m.end() > m.start())
        return found

    def _pass(self, text: str) -> tuple[str, list[tuple[int, int, Replacement]]]:
        """One left-to-right substitution; returns ``(old_start, old_end, replacement)`` triples."""
        protected = [(m.start(), m.end()) for m in _PLACEHOLDER_RE.finditer(text)]
        taken: list[tuple[int, int, SpanKind]] = []
        # Pattern priority first (ids before phones before list entries), then position.
        for start, end, kind in self._candidates(text):
            if any(start < e and s < end for s, e in protected):
                continue
            if any(start < e and s < end for s, e, _ in taken):
                continue
            taken.append((start, end, kind))
        taken.sort()
        pieces: list[str] = []
        done: list[tuple[int, int, Replacement]] = []
        cursor = 0
        out_len = 0
        for start, end, kind in taken:
            pieces.append(text[cursor:start])
            out_len += start - cursor
            placeholder = PLACEHOLDERS[kind]
            done.append((start, end, Replacement(kind, placeholder, out_len, out_len + len(placeholder))))
            pieces.append(placeholder)
            out_len += len(placeholder)
            cursor = end
        pieces.append(text[cursor:])
        return "".join(pieces), done

    def redact(self, text: str) -> RedactionReport:
        """Replace phone numbers, ID numbers, listed names and listed addresses with placeholders.

        Passes repeat until nothing new matches, so the output is a fixed point
        and redacting it again reports zero replacements. Replacement offsets
        refer to the final redacted text.
        """
        current = text
        collected: list[Replacement] = []
        while True:
            current, done = self._pass(current)
            if not done:
                break
            collected = [_shift(r, done) for r in collected]
            collected.extend(r for _, _, r in done)
        collected.sort(key=lambda r: r.start)
        return RedactionReport(redacted_text=current, replacements=tuple(collected))


def _shift(r: Replacement, done: list[tuple[int, int, Replacement]]) -> Replacement:
    # Earlier placeholders are protected, so later passes only move them.
    delta = sum(len(n.placeholder) - (end - start) for start, end, n in done if end <= r.start)
    return Replacement(r.span_kind, r.placeholder, r.start + delta, r.end + delta)


def _literal_alternation(terms: Iterable[str]) -> re.Pattern[str] | None:
    unique = sorted({t for t in terms if t}, key=lambda t: (-len(t), t))
    if not unique:
        return None
    return re.compile("|".join(re.escape(t) for t in unique))
