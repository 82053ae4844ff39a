"""Generate a synthetic corpus and run the full chain with the mock backend, in both prompting modes."""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from hotline_risk import cli

DEFAULT_CONFIG = Path(__file__).resolve().parents[1] / "configs" / "mock.yaml"


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(DEFAULT_CONFIG))
    parser.add_argument("--out", default="results/synthetic")
    parser.add_argument("--n", type=int, default=50)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)

    out = Path(args.out)
    code = cli.main(["gen-corpus", "--config", args.config, "--n", str(args.n), "--seed", str(args.seed), "--out", str(out)])
    if code:
        return code
    for mode in ("zero-shot", "few-shot"):
        print(f"\n== {mode} ==")
        start = time.perf_counter()
        code = cli.main(
            ["run", "--config", args.config, "--input", str(out / "cases.jsonl"), "--out", str(out / mode), "--mode", mode]
        )
        if code:
            return code
        print(f"({time.perf_counter() - start:.2f} s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
