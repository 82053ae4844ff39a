"""Command line entry point: ``hotline-risk <subcommand> [flags]``.

Exit status 0 on success, 1 on validation failures, 2 when the model
backend cannot be reached. Errors are also written to stderr as one JSON
record per line.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from hotline_risk import corpus
from hotline_risk.config import PipelineConfig
from hotline_risk.domain import PipelineError
from hotline_risk.evaluation import EvalMode, format_table
from hotline_risk.llm.gateway import GatewayError
from hotline_risk.llm.redaction import load_term_list
from hotline_risk.memory import SegmentError
from hotline_risk.predictor import PredictionMode
from hotline_risk.records import (
    load_cases,
    load_predictions,
    load_streams,
    prediction_record,
    stream_record,
    write_jsonl,
)
from hotline_risk.runner import (
    Stages,
    assessment_records,
    evaluate_with_config,
    run_all,
    write_cases,
    write_report,
)

log = logging.getLogger("hotline_risk")

EXIT_OK, EXIT_VALIDATION, EXIT_TRANSPORT = 0, 1, 2
_EVAL_MODES = {"llm": EvalMode.LLM_ONLY, "manual": EvalMode.MANUAL_ONLY, "fused": EvalMode.FUSED}


def _out_dir(args: argparse.Namespace, cfg: PipelineConfig) -> Path:
    return Path(args.out or cfg["io.output_dir"])


def _require(args: argparse.Namespace, name: str) -> str:
    value = getattr(args, name)
    if not value:
        raise PipelineError(f"--{name} is required for '{args.command}'")
    return value


def cmd_gen_corpus(args: argparse.Namespace, cfg: PipelineConfig) -> None:
    seed = cfg["corpus.seed"] if args.seed is None else args.seed
    n = cfg["corpus.n_cases"] if args.n is None else args.n
    if n < 1:
        raise PipelineError("--n must be >= 1")
    cases = corpus.generate(
        n_cases=n,
        seed=seed,
        positive_fraction=cfg["corpus.positive_fraction"],
        missing_scale_fraction=cfg["corpus.missing_scale_fraction"],
        names=load_term_list(cfg["redaction.name_list_path"], "names.txt"),
    )
    out = _out_dir(args, cfg)
    write_cases(out / "cases.jsonl", cases)
    log.info("wrote %d cases to %s", len(cases), out / "cases.jsonl")


def cmd_summarize(args: argparse.Namespace, cfg: PipelineConfig) -> None:
    cases = load_cases(_require(args, "input"))
    streams = Stages.from_config(cfg).summarize(cases)
    write_jsonl(_out_dir(args, cfg) / "streams.jsonl", (stream_record(c.case_id, s) for c, s in zip(cases, streams)))


def cmd_predict(args: argparse.Namespace, cfg: PipelineConfig) -> None:
    streams = load_streams(_require(args, "input"))
    mode = PredictionMode(args.mode) if args.mode else None
    preds = Stages.from_config(cfg).predict(list(streams.values()), mode)
    write_jsonl(
        _out_dir(args, cfg) / "predictions.jsonl",
        (prediction_record(cid, p) for cid, p in zip(streams, preds)),
    )


def cmd_assess(args: argparse.Namespace, cfg: PipelineConfig) -> None:
    cases = load_cases(_require(args, "input"))
    preds = load_predictions(args.predictions) if args.predictions else None
    write_jsonl(_out_dir(args, cfg) / "assessments.jsonl", assessment_records(cases, preds, cfg))


def cmd_evaluate(args: argparse.Namespace, cfg: PipelineConfig) -> None:
    cases = load_cases(_require(args, "input"))
    mode = _EVAL_MODES[args.eval_mode]
    preds = load_predictions(args.predictions) if args.predictions else {}
    if mode is not EvalMode.MANUAL_ONLY:
        if not args.predictions:
            raise PipelineError(f"--predictions is required for --eval-mode {args.eval_mode}")
        missing = [c.case_id for c in cases if c.case_id not in preds]
        if missing:
            raise PipelineError(f"no prediction for cases: {', '.join(missing[:5])}")
    report = evaluate_with_config(cfg, cases, preds, mode)
    out = _out_dir(args, cfg)
    write_report(out, report)
    table = format_table([(args.eval_mode, report)])
    (out / "report.txt").write_text(table, encoding="utf-8")
    sys.stdout.write(table)


def cmd_run(args: argparse.Namespace, cfg: PipelineConfig) -> None:
    cases = load_cases(_require(args, "input"))
    out = _out_dir(args, cfg)
    run_all(
        cases,
        cfg,
        out,
        mode=PredictionMode(args.mode) if args.mode else None,
        eval_mode=_EVAL_MODES[args.eval_mode],
    )
    sys.stdout.write((out / "report.txt").read_text("utf-8"))


COMMANDS = {
    "gen-corpus": cmd_gen_corpus,
    "summarize": cmd_summarize,
    "predict": cmd_predict,
    "assess": cmd_assess,
    "evaluate": cmd_evaluate,
    "run": cmd_run,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hotline-risk", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML or JSON config file")
        p.add_argument("--input", help="input JSONL file")
        p.add_argument("--out", help="output directory (default: io.output_dir)")
        p.add_argument("--mode", choices=[m.value for m in PredictionMode], help="prediction prompting mode")
        p.add_argument("--eval-mode", choices=sorted(_EVAL_MODES), default="fused")
        p.add_argument("--predictions", help="predictions JSONL (assess, evaluate)")
        p.add_argument("--seed", type=int, help="corpus seed (gen-corpus)")
        p.add_argument("--n", type=int, help="number of synthetic cases (gen-corpus)")
    return parser


def _error(exc: BaseException) -> None:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}, ensure_ascii=False) + "\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = PipelineConfig.load(args.config)
        COMMANDS[args.command](args, cfg)
    except SegmentError as exc:
        _error(exc.cause)
        return EXIT_TRANSPORT if isinstance(exc.cause, GatewayError) else EXIT_VALIDATION
    except GatewayError as exc:
        _error(exc)
        return EXIT_TRANSPORT
    except (PipelineError, OSError) as exc:
        _error(exc)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
