"""Classification metrics and percentile bootstrap confidence intervals.

The positive class is a suicide attempt reported at follow-up; a HighRisk
prediction counts as a positive call.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Any, Mapping, Sequence

import numpy as np

from hotline_risk.assessment import FusionConfig, MissingManualScore, fuse_scores, score_scale
from hotline_risk.domain import CaseRecord, PipelineError, RiskLabel

METRICS = ("sensitivity", "specificity", "precision", "f1")


class EmptyRun(PipelineError):
    pass


class AllResamplesUndefined(PipelineError):
    pass


class EvalMode(str, enum.Enum):
    LLM_ONLY = "llm"
    MANUAL_ONLY = "manual"
    FUSED = "fused"


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(cases: Sequence[tuple[RiskLabel, bool]]) -> ConfusionMatrix:
    if not cases:
        raise EmptyRun("no cases to evaluate")
    tp = fp = fn = tn = 0
    for predicted, actual in cases:
        high = predicted is RiskLabel.HIGH_RISK
        if high and actual:
            tp += 1
        elif high:
            fp += 1
        elif actual:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, fp, fn, tn)


def _ratio(num: int, den: int) -> float | None:
    return None if den == 0 else 100.0 * num / den


def metrics(cm: ConfusionMatrix) -> dict[str, float | None]:
    """Percent sensitivity, specificity, precision and F1; ``None`` where a denominator is zero."""
    return {
        "sensitivity": _ratio(cm.tp, cm.tp + cm.fn),
        "specificity": _ratio(cm.tn, cm.tn + cm.fp),
        "precision": _ratio(cm.tp, cm.tp + cm.fp),
        "f1": _ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn),
    }


@dataclass(frozen=True)
class MetricCI:
    point: float | None
    ci_low: float | None
    ci_high: float | None
    discarded: int

    @property
    def defined(self) -> bool:
        return self.point is not None


@dataclass(frozen=True)
class MetricReport:
    sensitivity: MetricCI
    specificity: MetricCI
    precision: MetricCI
    f1: MetricCI
    confusion: ConfusionMatrix
    n_cases: int
    n_excluded: int
    seed: int
    resamples: int
    mode: str = EvalMode.LLM_ONLY.value
    n_unconfirmed: int = 0

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        for name in METRICS:
            out[name]["defined"] = getattr(self, name).defined
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> MetricReport:
        def ci(d: Mapping[str, Any]) -> MetricCI:
            return MetricCI(point=d["point"], ci_low=d["ci_low"], ci_high=d["ci_high"], discarded=d["discarded"])

        return cls(
            **{name: ci(data[name]) for name in METRICS},
            confusion=ConfusionMatrix(**data["confusion"]),
            n_cases=data["n_cases"],
            n_excluded=data["n_excluded"],
            seed=data["seed"],
            resamples=data["resamples"],
            mode=data.get("mode", EvalMode.LLM_ONLY.value),
            n_unconfirmed=data.get("n_unconfirmed", 0),
        )


def nearest_rank(sorted_values: np.ndarray, pct: float) -> float:
    rank = max(1, math.ceil(pct / 100 * len(sorted_values)))
    return float(sorted_values[min(rank, len(sorted_values)) - 1])


def _resample_counts(codes: np.ndarray, seed: int, indices: range) -> np.ndarray:
    # One generator per resample keyed on (seed, index): any split of the
    # index range across workers yields the same draws.
    n = len(codes)
    out = np.empty((len(indices), 4), dtype=np.int64)
    for row, b in enumerate(indices):
        rng = np.random.default_rng([seed, b])
        out[row] = np.bincount(codes[rng.integers(0, n, size=n)], minlength=4)
    return out


def bootstrap_counts(codes: np.ndarray, resamples: int, seed: int, workers: int = 1) -> np.ndarray:
    if workers <= 1 or resamples < 2 * workers:
        return _resample_counts(codes, seed, range(resamples))
    bounds = np.linspace(0, resamples, workers + 1).astype(int)
    chunks = [range(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda r: _resample_counts(codes, seed, r), chunks))
    return np.concatenate(parts)


def _metric_columns(counts: np.ndarray) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    tp, fp, fn, tn = (counts[:, i] for i in range(4))
    return {
        "sensitivity": (tp, tp + fn),
        "specificity": (tn, tn + fp),
        "precision": (tp, tp + fp),
        "f1": (2 * tp, 2 * tp + fp + fn),
    }


def bootstrap_ci(
    cases: Sequence[tuple[RiskLabel, bool]],
    resamples: int = 2000,
    seed: int = 0,
    *,
    workers: int = 1,
    n_excluded: int = 0,
    mode: str = EvalMode.LLM_ONLY.value,
) -> MetricReport:
    """Point metrics plus nearest-rank 2.5/97.5 percentile intervals over ``resamples`` resamples.

    Resamples in which a metric's denominator is zero are dropped for that
    metric and counted in ``discarded``. A metric undefined on the full sample
    is reported without an interval; one defined on the full sample but in no
    resample raises AllResamplesUndefined.
    """
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    cm = confusion(cases)
    points = metrics(cm)
    # Code 0..3 = tp, fp, fn, tn, matching the count columns.
    codes = np.array(
        [
            (0 if actual else 1) if predicted is RiskLabel.HIGH_RISK else (2 if actual else 3)
            for predicted, actual in cases
        ],
        dtype=np.int64,
    )
    counts = bootstrap_counts(codes, resamples, seed, workers)
    cis = {}
    for name, (num, den) in _metric_columns(counts).items():
        ok = den > 0
        if points[name] is None:
            cis[name] = MetricCI(point=None, ci_low=None, ci_high=None, discarded=resamples)
            continue
        if not ok.any():
            raise AllResamplesUndefined(f"{name} is undefined in all {resamples} resamples")
        values = np.sort(100.0 * num[ok] / den[ok])
        cis[name] = MetricCI(
            point=points[name],
            ci_low=nearest_rank(values, 2.5),
            ci_high=nearest_rank(values, 97.5),
            discarded=int(resamples - ok.sum()),
        )
    return MetricReport(
        **cis,
        confusion=cm,
        n_cases=cm.total,
        n_excluded=n_excluded,
        seed=seed,
        resamples=resamples,
        mode=mode,
    )


def labelled_cases(
    cases: Sequence[CaseRecord],
    predictions: Mapping[str, Any],
    mode: EvalMode,
    fusion: FusionConfig | None = None,
) -> tuple[list[tuple[str, RiskLabel, bool]], int, int]:
    """Per-case (case_id, predicted label, attempted) rows plus excluded and unconfirmed counts."""
    rows = []
    excluded = unconfirmed = 0
    for case in cases:
        if case.outcome is None or not case.outcome.confirmed:
            unconfirmed += 1
            continue
        actual = case.outcome.attempted_suicide
        if mode is EvalMode.LLM_ONLY:
            rows.append((case.case_id, predictions[case.case_id].label, actual))
            continue
        manual = score_scale(case.scale) if case.scale is not None else None
        if manual is None or manual.missing:
            excluded += 1
            continue
        if mode is EvalMode.MANUAL_ONLY:
            assert manual.label is not None
            rows.append((case.case_id, manual.label, actual))
        else:
            try:
                fused = fuse_scores(manual, predictions[case.case_id], fusion)
            except MissingManualScore:
                excluded += 1
                continue
            rows.append((case.case_id, fused.label, actual))
    return rows, excluded, unconfirmed


def evaluate_run(
    cases: Sequence[CaseRecord],
    predictions: Mapping[str, Any],
    mode: EvalMode = EvalMode.LLM_ONLY,
    *,
    fusion: FusionConfig | None = None,
    resamples: int = 2000,
    seed: int = 0,
    workers: int = 1,
) -> MetricReport:
    """Evaluate one prediction channel against confirmed follow-up outcomes.

    Manual and fused modes drop cases whose scale score is missing. Rows are
    ordered by case_id before resampling so the report does not depend on
    input order.
    """
    rows, excluded, unconfirmed = labelled_cases(cases, predictions, mode, fusion)
    if not rows:
        raise EmptyRun(f"no evaluable cases for mode {mode.value!r} (excluded {excluded}, unconfirmed {unconfirmed})")
    rows.sort(key=lambda r: r[0])
    report = bootstrap_ci(
        [(label, actual) for _, label, actual in rows],
        resamples,
        seed,
        workers=workers,
        n_excluded=excluded,
        mode=mode.value,
    )
    return replace(report, n_unconfirmed=unconfirmed)


def _cell(ci: MetricCI) -> str:
    if ci.point is None:
        return "undefined"
    return f"{ci.point:.2f} [{ci.ci_low:.2f}, {ci.ci_high:.2f}]"


def format_table(rows: Sequence[tuple[str, MetricReport | None]]) -> str:
    """Plain-text table with one ``mean [low, high]`` cell per metric."""
    header = ("Method", "n", "Sensitivity", "Specificity", "Precision", "F1-score")
    body = []
    for name, report in rows:
        if report is None:
            body.append((name, "-", "n/a", "n/a", "n/a", "n/a"))
        else:
            body.append((name, str(report.n_cases), *(_cell(getattr(report, m)) for m in METRICS)))
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    lines = [" | ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in [header, *body]]
    lines.insert(1, "-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
