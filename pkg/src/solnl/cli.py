"""Command-line front end: ``solnl translate | eval | stats``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import (
    AstError, CompilerUnavailable, ConfigError, CorpusError, MetricError, SolnlError,
    TranslationError,
)
from .pipeline import (
    FORMATS, Pipeline, annotate_source, corpus_stats, evaluate, load_config, render_text,
    stats_csv,
)

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2, 3

log = logging.getLogger("solnl")


class _Parser(argparse.ArgumentParser):
    # usage errors exit with 1, not argparse's 2, which is reserved for bad input
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="solnl", description="Translate Solidity contracts into English comments.")
    p.add_argument("--config", help="JSON config file (default: $SOLNL_CONFIG if set)")
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("translate", help="translate a .sol file or a compiler AST JSON file")
    t.add_argument("input")
    t.add_argument("--out", help="write here instead of stdout")
    t.add_argument("--format", choices=FORMATS)
    t.add_argument("--trailing", action="store_true", default=None,
                   help="annotated format: put comments after the statement's first line")
    t.add_argument("--gas", help="JSON sidecar mapping function names to gas")
    t.add_argument("--compiler", help="solc binary for .sol inputs")
    t.add_argument("--cfg", action="store_true", help="plain CFG, no rule probabilities")
    t.add_argument("--timing", action="store_true", help="include duration_ms in JSON output")

    e = sub.add_parser("eval", help="score translations against a JSON-lines corpus")
    e.add_argument("corpus")
    e.add_argument("--report", help="write the report here (.csv for CSV, otherwise JSON)")
    e.add_argument("--compiler", help="solc binary for records without an embedded AST")
    e.add_argument("--records", action="store_true", help="include per-record scores in JSON")

    s = sub.add_parser("stats", help="vocabulary sizes and length/gas histograms of a corpus")
    s.add_argument("corpus")
    s.add_argument("--out")
    s.add_argument("--csv", action="store_true")
    return p


def _write(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _translate(args, config) -> int:
    pipe = Pipeline(config)
    tree, output = pipe.translate_file(args.input, args.gas)
    fmt = config.format
    if fmt == "json":
        text = json.dumps(output.to_json(timing=args.timing), indent=2) + "\n"
    elif fmt == "text":
        text = render_text(output, tree.source_text)
    else:
        if tree.source_text is None:
            raise AstError(f"{args.input}: annotated output needs the Solidity source next to it")
        text = annotate_source(tree.source_text, output, config.trailing_comments)
    _write(text, args.out)
    for d in output.diagnostics:
        log.warning("%s: %s", args.input, d.message)
    log.info("translated %d statements in %.1f ms", len(output.entries), output.duration_ms)
    return EXIT_OK


def _eval(args, config) -> int:
    pipe = Pipeline(config)
    warnings: list[str] = []
    report, records = evaluate(args.corpus, pipe, warnings)
    if args.report and args.report.endswith(".csv"):
        _write(report.to_csv(), args.report)
    else:
        data = report.to_json()
        data["warnings"] = warnings
        if args.records:
            data["records"] = [{"code": r.code, "candidate": r.candidate, "reference": r.reference,
                                "snippet_tokens": r.snippet_tokens, "gas_gwei": r.gas_gwei,
                                "fallback": r.fallback} for r in records]
        _write(json.dumps(data, indent=2) + "\n", args.report)
    return EXIT_OK


def _stats(args, config) -> int:
    warnings: list[str] = []
    stats = corpus_stats(args.corpus, config, warnings)
    if args.csv:
        _write(stats_csv(stats), args.out)
    else:
        stats["warnings"] = warnings
        _write(json.dumps(stats, indent=2) + "\n", args.out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="solnl: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        overrides = {}
        if args.command == "translate":
            overrides = {"format": args.format, "trailing_comments": args.trailing,
                         "compiler": args.compiler, "use_pcfg": False if args.cfg else None}
        elif args.command == "eval":
            overrides = {"compiler": args.compiler}
        config = load_config(args.config, **overrides)
        handler = {"translate": _translate, "eval": _eval, "stats": _stats}[args.command]
        return handler(args, config)
    except (ConfigError, CompilerUnavailable) as exc:
        print(f"solnl: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AstError, TranslationError, CorpusError, MetricError, SolnlError) as exc:
        print(f"solnl: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"solnl: {exc.filename or ''}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
