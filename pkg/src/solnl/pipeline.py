"""End-to-end runs: parse, preprocess, translate, tag, realize; plus corpus eval and stats."""

from __future__ import annotations

import bisect
import json
import logging
import math
import os
import shutil
import subprocess
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Iterator, Optional, Union

from . import resources
from .astree import AstTree, SourceRange, load_gas_annotations, parse_ast, preprocess
from .diagnostics import Diagnostic
from .errors import (
    CompilerUnavailable, ConfigError, CorpusError, EmptyCorpus, MalformedJson, SolnlError,
)
from .grammar import PcfgModel, cfg_model, estimate_pcfg, load_grammar, load_treebank, realize
from .lexicon import Lexicon, load_lexicon
from .metrics import (
    EvalRecord, EvalReport, SynonymTable, binned_report, code_tokens, default_bins,
    load_synonyms, normalize,
)
from .templates import OperatorMap, TemplateSet, load_operator_map, load_templates
from .translator import Translator

log = logging.getLogger(__name__)

CONFIG_ENV = "SOLNL_CONFIG"
FORMATS = ("json", "annotated", "text")
# inserted comments start with this marker so they can be told apart from the author's
COMMENT_MARK = "//~ "


@dataclass
class RunConfig:
    grammar: Optional[str] = None
    treebank: Optional[str] = None     # None with use_pcfg: the shipped seed treebank
    lexicon: Optional[str] = None
    templates: Optional[str] = None
    operators: Optional[str] = None
    synonyms: Optional[str] = None
    compiler: Optional[str] = None
    format: str = "json"
    trailing_comments: bool = False
    use_pcfg: bool = True
    expand_abbreviations: bool = False
    length_bin_width: int = 10
    gas_bin_width: int = 50_000
    length_bins: Optional[list] = None
    gas_bins: Optional[list] = None

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got {self.format!r}")
        for name in ("length_bin_width", "gas_bin_width"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")


def load_config(path: Optional[Union[str, Path]] = None, **overrides: Any) -> RunConfig:
    """Read a JSON config file (or the one named by $SOLNL_CONFIG), then apply overrides."""
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    values: dict[str, Any] = {}
    if path is not None:
        p = Path(path)
        try:
            values = json.loads(p.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {p} is not valid JSON: {exc}") from exc
        if not isinstance(values, dict):
            raise ConfigError(f"config {p} must hold a JSON object")
        base = p.parent
        for key in ("grammar", "treebank", "lexicon", "templates", "operators", "synonyms"):
            if values.get(key):
                values[key] = str((base / values[key]).resolve())
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# resources

@dataclass
class Resources:
    lexicon: Lexicon
    templates: TemplateSet
    operators: OperatorMap
    model: PcfgModel
    synonyms: SynonymTable


def _load(what: str, path: Optional[str], loader, default):
    if path is None:
        return default()
    try:
        return loader(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {what} file {path}: {exc.strerror}") from exc
    except SolnlError as exc:
        raise ConfigError(f"{what} file {path}: {exc}") from exc


def load_resources(config: RunConfig) -> Resources:
    """Load and validate every data file named by the config; defaults ship in-tree."""
    lexicon = _load("lexicon", config.lexicon, load_lexicon, resources.default_lexicon)
    templates = _load("templates", config.templates, load_templates, resources.default_templates)
    operators = _load("operator", config.operators, load_operator_map, resources.default_operators)
    synonyms = _load("synonym", config.synonyms, load_synonyms, resources.default_synonyms)
    grammar = _load("grammar", config.grammar, load_grammar, resources.default_grammar)
    if not config.use_pcfg:
        model = cfg_model(grammar)
    elif config.grammar is None and config.treebank is None:
        model = resources.default_model()
    else:
        treebank = _load("treebank", config.treebank or str(resources.data_path("treebank.txt")),
                         load_treebank, None)
        try:
            model = estimate_pcfg(treebank, grammar)
        except SolnlError as exc:
            raise ConfigError(f"treebank does not fit the grammar: {exc}") from exc
    return Resources(lexicon, templates, operators, model, synonyms)


# ---------------------------------------------------------------------------
# input

def compile_source(path: Path, compiler: Optional[str]) -> str:
    """Run ``<compiler> --ast-compact-json <path>`` and return its JSON text."""
    exe = shutil.which(compiler) if compiler else None
    if exe is None:
        raise CompilerUnavailable(
            f"{path} is Solidity source; configure a compiler binary to translate it"
            if not compiler else f"compiler {compiler!r} not found")
    proc = subprocess.run([exe, "--ast-compact-json", str(path)], capture_output=True, text=True)
    if proc.returncode != 0:
        raise MalformedJson(f"{path}: compiler failed: {proc.stderr.strip()[:500]}")
    return proc.stdout


def _unwrap_ast(text: str) -> str:
    """Accept a bare AST, solc's ``--ast-compact-json`` banner output or standard-JSON output."""
    start = text.find("{")
    if start < 0:
        raise MalformedJson("no JSON object in AST input")
    body = text[start:]
    try:
        try:
            obj = json.loads(body)
        except json.JSONDecodeError:
            # banner output may hold several files; take the first object
            obj, end = json.JSONDecoder().raw_decode(body)
            body = body[:end]
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"AST input: {exc}") from exc
    if isinstance(obj, dict) and "sources" in obj and "nodeType" not in obj:
        for entry in obj["sources"].values():
            if isinstance(entry, dict) and "ast" in entry:
                return json.dumps(entry["ast"])
        raise MalformedJson("standard-JSON output holds no AST")
    return body


def load_input(path: Union[str, Path], config: RunConfig, gas_path: Optional[str] = None,
               source_path: Optional[str] = None) -> AstTree:
    """Parse a ``.sol`` file (through the configured compiler) or an AST JSON file."""
    p = Path(path)
    source: Optional[bytes] = None
    if p.suffix == ".sol":
        json_text = compile_source(p, config.compiler)
        source = p.read_bytes()
    else:
        json_text = p.read_text(encoding="utf-8")
        sibling = Path(source_path) if source_path else p.with_name(p.name.split(".")[0] + ".sol")
        if sibling.exists():
            source = sibling.read_bytes()
    gas = load_gas_annotations(Path(gas_path).read_text(encoding="utf-8")) if gas_path else None
    return parse_ast(_unwrap_ast(json_text), source, gas)


# ---------------------------------------------------------------------------
# translation

@dataclass
class Entry:
    src: SourceRange
    sentence: str
    fallback: bool
    node_type: Optional[str]
    function: Optional[str] = None
    gas: Optional[int] = None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"src": str(self.src), "node_type": self.node_type, "sentence": self.sentence,
               "fallback": self.fallback, "diagnostics": [d.to_json() for d in self.diagnostics]}
        if self.function is not None:
            out["function"] = self.function
        if self.gas is not None:
            out["gas"] = self.gas
        return out


@dataclass
class TranslationOutput:
    entries: list[Entry]
    duration_ms: float
    diagnostics: list[Diagnostic] = field(default_factory=list)  # not tied to any entry

    def to_json(self, timing: bool = False) -> dict:
        out: dict[str, Any] = {"entries": [e.to_json() for e in self.entries],
                               "diagnostics": [d.to_json() for d in self.diagnostics]}
        if timing:
            out["duration_ms"] = round(self.duration_ms, 3)
        return out

    def sentences(self) -> list[str]:
        return [e.sentence for e in self.entries]


def _containers(tree: AstTree) -> list[tuple[int, int, int, str]]:
    """(file, offset, end, name) of every function and modifier, sorted by start."""
    out = []
    for contract in tree.root.child_list("nodes"):
        for node in contract.child_list("nodes"):
            if node.node_type in ("FunctionDefinition", "ModifierDefinition"):
                name = node.get("name") or node.get("kind") or ""
                out.append((node.src.file_index, node.src.offset, node.src.end, name))
    out.sort()
    return out


def _owner(src: SourceRange, spans: list[tuple[int, int, int, str]]) -> Optional[str]:
    # members do not overlap, so only the last span starting at or before src can hold it
    k = bisect.bisect_right(spans, (src.file_index, src.offset, math.inf)) - 1
    if k >= 0:
        f, start, end, name = spans[k]
        if f == src.file_index and start <= src.offset and src.end <= end:
            return name
    return None


def _within(d: Diagnostic, src: SourceRange) -> bool:
    s = d.src
    return s is not None and s.file_index == src.file_index and \
        src.offset <= s.offset and s.end <= src.end


class Pipeline:
    """Shared, read-only resources plus the per-input translation steps."""

    def __init__(self, config: Optional[RunConfig] = None, res: Optional[Resources] = None):
        self.config = config or RunConfig()
        self.res = res or load_resources(self.config)

    def translate_tree(self, tree: AstTree, include_state_vars: bool = True) -> TranslationOutput:
        t0 = time.perf_counter()
        tree = preprocess(tree)
        tr = Translator(self.res.templates, self.res.lexicon, self.res.operators,
                        self.config.expand_abbreviations)
        phrases = tr.translate_tree(tree, include_state_vars)
        spans = _containers(tree)
        gas = tree.gas_annotations or {}
        entries: list[Entry] = []
        loose = list(tr.diagnostics)
        for p in phrases:
            own = [d for d in loose if _within(d, p.src)]
            loose = [d for d in loose if not _within(d, p.src)]
            real = realize(p.tokens, self.res.model, own, p.node_id, p.node_type)
            fn = _owner(p.src, spans)
            entries.append(Entry(p.src, real.text, real.fallback, p.node_type, fn,
                                 gas.get(fn) if fn else None, own))
        return TranslationOutput(entries, (time.perf_counter() - t0) * 1000, loose)

    def translate_file(self, path: Union[str, Path], gas_path: Optional[str] = None
                       ) -> tuple[AstTree, TranslationOutput]:
        tree = load_input(path, self.config, gas_path)
        return tree, self.translate_tree(tree)


# ---------------------------------------------------------------------------
# output formats

def _line_starts(data: bytes) -> list[int]:
    starts = [0]
    for i, b in enumerate(data):
        if b == 0x0A:
            starts.append(i + 1)
    return starts


def annotate_source(source: bytes, output: TranslationOutput, trailing: bool = False) -> str:
    """Source with each sentence as a marked ``//`` comment above (or after) its statement."""
    starts = _line_starts(source)
    ends = starts[1:] + [len(source)]
    notes: dict[int, list[str]] = {}
    for e in output.entries:
        if e.src.offset >= len(source):
            continue
        line = bisect.bisect_right(starts, e.src.offset) - 1
        notes.setdefault(line, []).append(e.sentence)
    out: list[str] = []
    for i, (a, b) in enumerate(zip(starts, ends)):
        text = source[a:b].decode("utf-8")
        said = notes.get(i)
        if not said:
            out.append(text)
            continue
        body = text.rstrip("\r\n")
        newline = text[len(body):] or "\n"
        if trailing and body.strip():
            out.append(f"{body} {COMMENT_MARK}{' '.join(said)}{text[len(body):]}")
        else:
            indent = body[:len(body) - len(body.lstrip(" \t"))]
            out.extend(f"{indent}{COMMENT_MARK}{s}{newline}" for s in said)
            out.append(text)
    return "".join(out)


def strip_annotations(text: str) -> str:
    """Undo :func:`annotate_source` in either mode."""
    out = []
    # only "\n" ends a line, as in annotate_source
    for line in text.split("\n"):
        if line.lstrip(" \t").startswith(COMMENT_MARK):
            continue
        cut = line.find(" " + COMMENT_MARK)
        if cut >= 0:
            line = line[:cut] + ("\r" if line.endswith("\r") else "")
        out.append(line)
    return "\n".join(out)


def render_text(output: TranslationOutput, source: Optional[bytes] = None) -> str:
    starts = _line_starts(source) if source else None
    out = []
    for e in output.entries:
        where = f"{bisect.bisect_right(starts, e.src.offset)}" if starts else str(e.src)
        out.append(f"{where}: {e.sentence}")
    return "\n".join(out) + ("\n" if out else "")


# ---------------------------------------------------------------------------
# corpora

@dataclass
class CorpusRecord:
    code: str
    reference: str
    gas_gwei: Optional[int] = None
    ast: Optional[dict] = None
    source: Optional[str] = None
    lineno: int = 0


def read_corpus(path: Union[str, Path], warnings_out: Optional[list] = None) -> Iterator[CorpusRecord]:
    """JSON-lines records; malformed lines are reported and skipped."""
    warn = warnings_out if warnings_out is not None else []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc.strerror}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("record is not a JSON object")
            code = obj["code"]
            if not isinstance(code, str) or not code.strip():
                raise ValueError("'code' must be a non-empty string")
            ref = obj.get("reference") or ""
            gas = obj.get("gas_gwei")
            if gas is not None and (not isinstance(gas, int) or gas < 0):
                raise ValueError("'gas_gwei' must be a non-negative integer or null")
        except (ValueError, KeyError) as exc:
            msg = f"{path}:{lineno}: skipped: {exc}"
            log.warning(msg)
            warn.append(msg)
            continue
        yield CorpusRecord(code, ref, gas, obj.get("ast"), obj.get("source"), lineno)


def _dedupe(records: list[CorpusRecord], warn: list) -> list[CorpusRecord]:
    seen = set()
    out = []
    for r in records:
        if not r.reference.strip():
            msg = f"line {r.lineno}: skipped: empty reference"
            log.warning(msg)
            warn.append(msg)
            continue
        key = (r.code, r.reference)
        if key in seen:
            continue
        seen.add(key)
        out.append(r)
    return out


def candidate_for(rec: CorpusRecord, pipe: Pipeline, workdir: Optional[Path] = None
                  ) -> TranslationOutput:
    if rec.ast is not None:
        source = (rec.source or "").encode("utf-8") or None
        tree = parse_ast(json.dumps(rec.ast), source)
    else:
        import tempfile
        with tempfile.TemporaryDirectory(dir=workdir) as tmp:
            sol = Path(tmp) / "snippet.sol"
            sol.write_text(rec.source or rec.code, encoding="utf-8")
            tree = load_input(sol, pipe.config)
    # contract scaffolding around a snippet is not part of the description
    return pipe.translate_tree(tree, include_state_vars=False)


def evaluate(corpus: Union[str, Path], pipe: Pipeline, warnings_out: Optional[list] = None
             ) -> tuple[EvalReport, list[EvalRecord]]:
    warn = warnings_out if warnings_out is not None else []
    records = _dedupe(list(read_corpus(corpus, warn)), warn)
    scored: list[EvalRecord] = []
    for rec in records:
        try:
            out = candidate_for(rec, pipe)
        except CompilerUnavailable:
            raise
        except (SolnlError, OSError) as exc:
            msg = f"line {rec.lineno}: skipped: {exc}"
            log.warning(msg)
            warn.append(msg)
            continue
        cand = " ".join(out.sentences())
        if not normalize(cand):
            msg = f"line {rec.lineno}: no sentence generated"
            log.warning(msg)
            warn.append(msg)
            cand = ""
        scored.append(EvalRecord(cand, rec.reference, len(code_tokens(rec.code)), rec.gas_gwei,
                                 fallback=any(e.fallback for e in out.entries), code=rec.code))
    if not scored:
        raise EmptyCorpus(f"{corpus}: no usable records")
    cfg = pipe.config
    length_bins = cfg.length_bins or default_bins((r.snippet_tokens for r in scored),
                                                  cfg.length_bin_width)
    gas_bins = cfg.gas_bins or default_bins(
        (r.gas_gwei for r in scored if r.gas_gwei is not None), cfg.gas_bin_width)
    return binned_report(scored, length_bins, gas_bins, pipe.res.synonyms), scored


def _histogram(values: list[int], width: int) -> list[dict]:
    if not values:
        return []
    bins = default_bins(values, width)
    counts = [0] * len(bins)
    for v in values:
        counts[min(int(v // width), len(bins) - 1)] += 1
    return [{"low": b, "high": b + width, "count": c} for b, c in zip(bins, counts)]


def corpus_stats(corpus: Union[str, Path], config: Optional[RunConfig] = None,
                 warnings_out: Optional[list] = None) -> dict:
    """Vocabulary sizes and length/gas histograms after filtering and deduplication."""
    config = config or RunConfig()
    warn = warnings_out if warnings_out is not None else []
    records = _dedupe(list(read_corpus(corpus, warn)), warn)
    if not records:
        raise EmptyCorpus(f"{corpus}: no usable records")
    code_vocab: set[str] = set()
    desc_vocab: set[str] = set()
    lengths = []
    gas = []
    for r in records:
        toks = code_tokens(r.code)
        code_vocab.update(toks)
        desc_vocab.update(normalize(r.reference))
        lengths.append(len(toks))
        if r.gas_gwei is not None:
            gas.append(r.gas_gwei)
    return {
        "records": len(records),
        "code_vocab": len(code_vocab),
        "description_vocab": len(desc_vocab),
        "length_histogram": _histogram(lengths, config.length_bin_width),
        "gas_records": len(gas),
        "gas_histogram": _histogram(gas, config.gas_bin_width),
    }


def stats_csv(stats: dict) -> str:
    rows = ["section,low,high,value",
            f"records,,,{stats['records']}",
            f"code_vocab,,,{stats['code_vocab']}",
            f"description_vocab,,,{stats['description_vocab']}",
            f"gas_records,,,{stats['gas_records']}"]
    for key in ("length_histogram", "gas_histogram"):
        rows.extend(f"{key},{b['low']},{b['high']},{b['count']}" for b in stats[key])
    return "\n".join(rows) + "\n"
