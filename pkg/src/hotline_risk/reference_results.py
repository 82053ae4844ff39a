"""Published per-method results and an integer confusion-matrix search.

The search is independent of :func:`hotline_risk.evaluation.metrics`: it
uses exact rational arithmetic so it can serve as an oracle for it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from hotline_risk.evaluation import ConfusionMatrix

TEST_POSITIVES = 20
TEST_NEGATIVES = 26


@dataclass(frozen=True)
class ReportedRow:
    method: str
    sensitivity: float
    specificity: float
    precision: float
    f1: float
    confusion: ConfusionMatrix

    def values(self) -> tuple[float, float, float, float]:
        return (self.sensitivity, self.specificity, self.precision, self.f1)


# Percentages as printed; confusion matrices are the integer reconstructions.
REPORTED_ROWS = (
    ReportedRow("Manual scale rating", 60.00, 40.91, 40.91, 48.65, ConfusionMatrix(9, 13, 6, 9)),
    ReportedRow("LSTM", 95.00, 30.77, 51.35, 66.67, ConfusionMatrix(19, 18, 1, 8)),
    ReportedRow("BiLSTM", 85.00, 46.15, 54.84, 66.67, ConfusionMatrix(17, 14, 3, 12)),
    ReportedRow("GNN", 85.00, 53.85, 58.62, 69.39, ConfusionMatrix(17, 12, 3, 14)),
    ReportedRow("Transformer", 95.00, 38.46, 54.29, 69.09, ConfusionMatrix(19, 16, 1, 10)),
    ReportedRow("Mamba", 85.00, 53.85, 58.62, 69.39, ConfusionMatrix(17, 12, 3, 14)),
    ReportedRow("LLM zero-shot", 45.00, 96.15, 90.00, 60.00, ConfusionMatrix(9, 1, 11, 25)),
    ReportedRow("LLM few-shot", 90.00, 61.54, 64.29, 75.00, ConfusionMatrix(18, 10, 2, 16)),
    ReportedRow("LLM few-shot + manual", 86.67, 72.73, 68.42, 76.47, ConfusionMatrix(13, 6, 2, 16)),
)

ROWS_BY_METHOD = {row.method: row for row in REPORTED_ROWS}


def _exact(num: int, den: int) -> Fraction | None:
    return None if den == 0 else Fraction(100 * num, den)


def _matches(value: Fraction | None, reported: float, tol: float) -> bool:
    return value is not None and abs(value - Fraction(str(reported))) <= Fraction(str(tol))


def consistent_matrices(
    reported: tuple[float, float, float, float], positives: int, negatives: int, tol: float = 0.005
) -> list[ConfusionMatrix]:
    """Every (tp, fp, fn, tn) with the given class sizes whose four metrics round to ``reported``."""
    sens, specificity, prec, f1 = reported
    out = []
    for tp in range(positives + 1):
        fn = positives - tp
        if not _matches(_exact(tp, positives), sens, tol):
            continue
        for tn in range(negatives + 1):
            fp = negatives - tn
            if (
                _matches(_exact(tn, negatives), specificity, tol)
                and _matches(_exact(tp, tp + fp), prec, tol)
                and _matches(_exact(2 * tp, 2 * tp + fp + fn), f1, tol)
            ):
                out.append(ConfusionMatrix(tp, fp, fn, tn))
    return out


def consistent_splits(
    reported: tuple[float, float, float, float],
    max_positives: int = TEST_POSITIVES,
    max_negatives: int = TEST_NEGATIVES,
    tol: float = 0.005,
) -> dict[tuple[int, int], list[ConfusionMatrix]]:
    """Class splits (P, N) within the test set that admit at least one consistent matrix."""
    found = {}
    for p in range(1, max_positives + 1):
        for n in range(1, max_negatives + 1):
            cms = consistent_matrices(reported, p, n, tol)
            if cms:
                found[(p, n)] = cms
    return found
