"""Prompt templates and the markers the mock backend keys on.

A template file holds the system prompt, a line with ``---``, then the user
prompt. Both halves are filled with ``str.format_map``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

TASK_SUMMARIZE = "[task:summarize]"
TASK_IMPORTANCE = "[task:importance]"
TASK_CONDENSE = "[task:condense]"
TASK_PREDICT = "[task:predict]"
TASK_SENTINELS = (TASK_SUMMARIZE, TASK_IMPORTANCE, TASK_CONDENSE, TASK_PREDICT)

SEGMENT_OPEN, SEGMENT_CLOSE = "<<segment>>", "<<end-segment>>"
CASE_OPEN, CASE_CLOSE = "<<case>>", "<<end-case>>"

_SPLIT = re.compile(r"^---[ \t]*$", re.MULTILINE)


@dataclass(frozen=True)
class PromptTemplate:
    system: str
    user: str

    @classmethod
    def parse(cls, raw: str) -> PromptTemplate:
        parts = _SPLIT.split(raw, maxsplit=1)
        if len(parts) != 2:
            raise ValueError("prompt template needs a '---' line between system and user parts")
        return cls(system=parts[0].strip("\n"), user=parts[1].lstrip("\n"))

    @classmethod
    def load(cls, path: str | Path | None, default_name: str) -> PromptTemplate:
        if path is None:
            raw = resources.files("hotline_risk").joinpath("resources", "prompts", default_name).read_text("utf-8")
        else:
            raw = Path(path).read_text("utf-8")
        return cls.parse(raw)

    def render(self, **values: object) -> tuple[str, str]:
        return self.system.format_map(values), self.user.format_map(values)


def task_of(system_prompt: str) -> str | None:
    for sentinel in TASK_SENTINELS:
        if sentinel in system_prompt:
            return sentinel
    return None


def section(text: str, open_marker: str, close_marker: str) -> str:
    """Return the text inside the last ``open``/``close`` pair, or all of ``text`` if absent."""
    start = text.rfind(open_marker)
    if start < 0:
        return text
    start += len(open_marker)
    end = text.find(close_marker, start)
    return text[start:end if end >= 0 else len(text)].strip("\n")
