"""Recover integer confusion matrices behind the published per-method percentages.

For each method, search every class split inside the 46-case test set and
print the splits and matrices consistent with all four reported metrics.
"""

from __future__ import annotations

import argparse

from hotline_risk.evaluation import metrics
from hotline_risk.reference_results import REPORTED_ROWS, TEST_NEGATIVES, TEST_POSITIVES, consistent_splits


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--tol", type=float, default=0.005, help="tolerance in percentage points")
    args = parser.parse_args(argv)

    for row in REPORTED_ROWS:
        splits = consistent_splits(row.values(), TEST_POSITIVES, TEST_NEGATIVES, args.tol)
        print(f"{row.method}: reported {'/'.join(f'{v:.2f}' for v in row.values())}")
        for (p, n), cms in sorted(splits.items()):
            for cm in cms:
                m = metrics(cm)
                got = "/".join(f"{m[k]:.2f}" for k in ("sensitivity", "specificity", "precision", "f1"))
                print(f"  P={p:2d} N={n:2d}  tp={cm.tp} fp={cm.fp} fn={cm.fn} tn={cm.tn}  -> {got}")
        if not splits:
            print("  no consistent matrix")


if __name__ == "__main__":
    main()
