"""Pipeline configuration: one YAML (or JSON) document of dotted keys.

Nested mappings and dotted keys are equivalent; ``memory: {top_k: 6}`` and
``memory.top_k: 6`` set the same value. Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from hotline_risk.assessment import FusionConfig
from hotline_risk.chunker import ChunkConfig
from hotline_risk.domain import ValidationError
from hotline_risk.memory import MemoryConfig

DEFAULTS: dict[str, Any] = {
    "backend.kind": "mock",
    "backend.base_url": "http://localhost:8000/v1",
    "backend.model": "chatglm2-6b",
    "backend.temperature": 0.0,
    "backend.max_retries": 3,
    "backend.timeout_ms": 60000,
    "backend.backoff_ms": 500,
    "mock.excerpt_chars": 200,
    "redaction.name_list_path": None,
    "redaction.address_list_path": None,
    "chunk.segment_budget_chars": 2000,
    "chunk.include_operator_utterances": True,
    "chunk.summary_budget_chars": 512,
    "memory.top_k": 4,
    "memory.weights.recency": 1 / 3,
    "memory.weights.importance": 1 / 3,
    "memory.weights.relevance": 1 / 3,
    "memory.recency_decay": 0.95,
    "prompts.summarize_path": None,
    "prompts.importance_path": None,
    "prompts.condense_path": None,
    "prompts.zero_shot_path": None,
    "prompts.few_shot_path": None,
    "predict.mode": "few-shot",
    "predict.exemplars_path": None,
    "predict.include_entry_summaries": True,
    "predict.balanced_exemplars": True,
    "fusion.alpha": 0.5,
    "fusion.beta": 0.5,
    "fusion.threshold": 8.0,
    "bootstrap.resamples": 2000,
    "bootstrap.seed": 0,
    "bootstrap.workers": 1,
    "concurrency.max_in_flight": 4,
    "io.output_dir": "results",
    "corpus.seed": 0,
    "corpus.n_cases": 50,
    "corpus.positive_fraction": 0.4,
    "corpus.missing_scale_fraction": 0.2,
}

_PATH_KEYS = {k for k in DEFAULTS if k.endswith("_path")}
_CHOICES = {
    "backend.kind": {"http", "mock"},
    "predict.mode": {"zero-shot", "few-shot"},
}


class ConfigError(ValidationError):
    pass


def flatten(data: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(flatten(value, dotted + "."))
        else:
            flat[dotted] = value
    return flat


def _coerce(key: str, value: Any) -> Any:
    default = DEFAULTS[key]
    if value is None:
        if default is None:
            return None
        raise ConfigError(f"{key} may not be null")
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{key} must be true or false")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{key} must be a string")
    if key in _CHOICES and value not in _CHOICES[key]:
        raise ConfigError(f"{key} must be one of {sorted(_CHOICES[key])}")
    return value


@dataclass(frozen=True)
class PipelineConfig:
    values: Mapping[str, Any] = field(default_factory=lambda: dict(DEFAULTS))

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any] | None, base_dir: Path | None = None) -> PipelineConfig:
        flat = flatten(data or {})
        unknown = sorted(set(flat) - set(DEFAULTS))
        if unknown:
            raise ConfigError("unknown config keys: " + ", ".join(unknown))
        values = dict(DEFAULTS)
        for key, raw in flat.items():
            value = _coerce(key, raw)
            if key in _PATH_KEYS and value is not None and base_dir is not None:
                value = str((base_dir / value).resolve()) if not Path(value).is_absolute() else value
            values[key] = value
        cfg = cls(values)
        cfg.check()
        return cfg

    @classmethod
    def load(cls, path: str | Path | None) -> PipelineConfig:
        if path is None:
            return cls.from_mapping({})
        path = Path(path)
        try:
            data = yaml.safe_load(path.read_text("utf-8"))
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        if data is not None and not isinstance(data, Mapping):
            raise ConfigError(f"{path} must hold a mapping at top level")
        return cls.from_mapping(data, base_dir=path.parent)

    def override(self, **dotted: Any) -> PipelineConfig:
        return PipelineConfig.from_mapping({**self.values, **{k: v for k, v in dotted.items() if v is not None}})

    def check(self) -> None:
        """Build every sub-config once so range errors surface at load time."""
        try:
            self.chunk()
            self.memory()
            self.fusion()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self["concurrency.max_in_flight"] < 1:
            raise ConfigError("concurrency.max_in_flight must be >= 1")
        if self["bootstrap.resamples"] < 1:
            raise ConfigError("bootstrap.resamples must be >= 1")
        if self["backend.max_retries"] < 0:
            raise ConfigError("backend.max_retries must be >= 0")
        if self["corpus.n_cases"] < 1:
            raise ConfigError("corpus.n_cases must be >= 1")
        for key in ("corpus.positive_fraction", "corpus.missing_scale_fraction"):
            if not 0.0 <= self[key] <= 1.0:
                raise ConfigError(f"{key} must lie in [0, 1]")
        if not 0.0 <= self["backend.temperature"] <= 2.0:
            raise ConfigError("backend.temperature must lie in [0, 2]")

    def chunk(self) -> ChunkConfig:
        return ChunkConfig(
            segment_budget_chars=self["chunk.segment_budget_chars"],
            include_operator_utterances=self["chunk.include_operator_utterances"],
        )

    def memory(self) -> MemoryConfig:
        return MemoryConfig(
            top_k=self["memory.top_k"],
            w_recency=self["memory.weights.recency"],
            w_importance=self["memory.weights.importance"],
            w_relevance=self["memory.weights.relevance"],
            recency_decay=self["memory.recency_decay"],
            summary_budget_chars=self["chunk.summary_budget_chars"],
        )

    def fusion(self) -> FusionConfig:
        return FusionConfig(alpha=self["fusion.alpha"], beta=self["fusion.beta"], threshold=self["fusion.threshold"])
