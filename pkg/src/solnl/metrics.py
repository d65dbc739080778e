"""BLEU-N, ROUGE-L and METEOR, plus corpus reports binned by snippet length and gas."""

from __future__ import annotations

import csv
import io
import math
import re
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .errors import EmptyBins, EmptyCorpus, EmptySentence, LengthMismatch, MetricError
from .phrases import identifier_parts

# words keep inner hyphens, dots, apostrophes and underscores ("keccak-256", "0.5", "user's")
_WORD_RE = re.compile(r"[^\W_]+(?:[-_.'’][^\W_]+)*")


def normalize(sentence: str) -> list[str]:
    """Lowercase and drop punctuation; whitespace separates the remaining words."""
    return _WORD_RE.findall(sentence.lower())


def _ngrams(words: Sequence[str], n: int) -> Counter:
    return Counter(tuple(words[i:i + n]) for i in range(len(words) - n + 1))


def bleu_n(candidates: Sequence[str], references: Sequence[str], n: int) -> float:
    """Corpus BLEU of a single order: brevity penalty times pooled clipped precision."""
    if len(candidates) != len(references):
        raise LengthMismatch(f"{len(candidates)} candidates but {len(references)} references")
    if not candidates:
        raise EmptyCorpus("no sentence pairs to score")
    if n not in (1, 2, 3, 4):
        raise MetricError(f"BLEU order must be 1-4, got {n}")
    matched = total = cand_len = ref_len = 0
    for cand, ref in zip(candidates, references):
        c, r = normalize(cand), normalize(ref)
        cand_len += len(c)
        ref_len += len(r)
        cg, rg = _ngrams(c, n), _ngrams(r, n)
        matched += sum(min(k, rg[g]) for g, k in cg.items())
        total += sum(cg.values())
    if total == 0 or cand_len == 0:
        return 0.0
    bp = min(1.0, math.exp(1 - ref_len / cand_len))
    return bp * matched / total


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: str, reference: str, f_measure: bool = False, beta: float = 1.0) -> float:
    """LCS recall against the reference; ``f_measure`` gives the F-beta form instead."""
    c, r = normalize(candidate), normalize(reference)
    if not c or not r:
        raise EmptySentence("ROUGE-L needs two non-empty sentences")
    lcs = lcs_length(c, r)
    recall = lcs / len(r)
    if not f_measure:
        return recall
    precision = lcs / len(c)
    if lcs == 0:
        return 0.0
    b2 = beta * beta
    return (1 + b2) * precision * recall / (recall + b2 * precision)


# ---------------------------------------------------------------------------
# METEOR

@dataclass
class SynonymTable:
    groups: dict[str, frozenset] = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, Iterable[str]]]) -> "SynonymTable":
        table: dict[str, set] = {}
        for word, syns in pairs:
            w = word.lower()
            for s in syns:
                s = s.strip().lower()
                if not s or s == w:
                    continue
                # the relation is made symmetric
                table.setdefault(w, set()).add(s)
                table.setdefault(s, set()).add(w)
        return cls({k: frozenset(v) for k, v in table.items()})

    def synonyms(self, a: str, b: str) -> bool:
        return b in self.groups.get(a, ())

    def __len__(self) -> int:
        return len(self.groups)


def load_synonyms(path: Union[str, Path]) -> SynonymTable:
    pairs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise MetricError(f"line {lineno}: expected 'word<TAB>syn1,syn2'")
        word, syns = line.split("\t", 1)
        pairs.append((word.strip(), syns.split(",")))
    return SynonymTable.from_pairs(pairs)


def _match_stage(cand: list[str], ref: list[str], align: dict, used_ref: set, ok) -> None:
    """Maximum bipartite matching of still-free words under predicate ``ok``.

    Augmenting paths only reassign words matched in this stage, so earlier
    (exact) matches are never displaced.
    """
    stage: dict[int, int] = {}   # ref index -> cand index
    free_c = [i for i in range(len(cand)) if i not in align]
    free_r = [j for j in range(len(ref)) if j not in used_ref]
    edges = {i: [j for j in free_r if ok(cand[i], ref[j])] for i in free_c}

    def augment(i: int, seen: set) -> bool:
        for j in edges[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in stage or augment(stage[j], seen):
                stage[j] = i
                return True
        return False

    for i in free_c:
        augment(i, set())
    for j, i in stage.items():
        align[i] = j
        used_ref.add(j)


def _exact_stage(cand: list[str], ref: list[str], align: dict, used_ref: set) -> None:
    # left-to-right, each word to the first free equal reference word
    for i, w in enumerate(cand):
        for j, r in enumerate(ref):
            if j not in used_ref and r == w:
                align[i] = j
                used_ref.add(j)
                break


def count_chunks(align: dict) -> int:
    chunks = 0
    prev = None
    for i in sorted(align):
        j = align[i]
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    return chunks


def meteor(candidate: str, reference: str, synonyms: Optional[SynonymTable] = None,
           alpha: float = 0.9, beta: float = 3.0, gamma: float = 0.5) -> float:
    """Unigram METEOR: exact matches first, then synonyms; Fmean with a fragmentation penalty."""
    c, r = normalize(candidate), normalize(reference)
    if not c or not r:
        raise EmptySentence("METEOR needs two non-empty sentences")
    align: dict[int, int] = {}
    used: set[int] = set()
    _exact_stage(c, r, align, used)
    if synonyms is not None and len(synonyms):
        _match_stage(c, r, align, used, synonyms.synonyms)
    m = len(align)
    if m == 0:
        return 0.0
    p, rec = m / len(c), m / len(r)
    fmean = p * rec / (alpha * p + (1 - alpha) * rec)
    penalty = gamma * (count_chunks(align) / m) ** beta
    return fmean * (1 - penalty)


# ---------------------------------------------------------------------------
# code tokens

_SOL_SYMBOLS = sorted([
    ">>>=", "<<=", ">>=", ">>>", "**=", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=",
    "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<", ">>", "**", "=>", "->", ":=",
], key=len, reverse=True)
_CODE_RE = re.compile(
    r"//[^\n]*|/\*.*?\*/"                       # comments, skipped
    r"|\"(?:\\.|[^\"\\])*\"|'(?:\\.|[^'\\])*'"   # string literals
    r"|0x[0-9a-fA-F_]+|[0-9][0-9_]*(?:\.[0-9]+)?(?:e[0-9]+)?"
    r"|[A-Za-z_$][A-Za-z0-9_$]*"
    r"|" + "|".join(re.escape(s) for s in _SOL_SYMBOLS) +
    r"|\S",
    re.S,
)


def code_tokens(snippet: str) -> list[str]:
    """Words of split identifiers plus one token per number, literal or symbol."""
    out: list[str] = []
    for m in _CODE_RE.finditer(snippet):
        tok = m.group(0)
        if tok.startswith("//") or tok.startswith("/*"):
            continue
        if tok[0].isalpha() or tok[0] in "_$":
            parts = [p for p in identifier_parts(tok) if p.strip("_$")]
            out.extend(parts or [tok])
        else:
            out.append(tok)
    return out


def count_code_tokens(snippet: str) -> int:
    if not snippet.strip():
        raise MetricError("cannot count tokens of an empty snippet")
    return len(code_tokens(snippet))


# ---------------------------------------------------------------------------
# reports

METRIC_NAMES = ("bleu1", "bleu2", "bleu3", "bleu4", "rouge_l", "meteor")
DEFAULT_LENGTH_WIDTH = 10
DEFAULT_GAS_WIDTH = 50_000


@dataclass
class EvalRecord:
    candidate: str
    reference: str
    snippet_tokens: int
    gas_gwei: Optional[int] = None
    scores: dict[str, float] = field(default_factory=dict)
    fallback: bool = False
    code: Optional[str] = None


def score_record(rec: EvalRecord, synonyms: Optional[SynonymTable] = None) -> EvalRecord:
    rec.scores = {
        "bleu1": bleu_n([rec.candidate], [rec.reference], 1),
        "rouge_l": rouge_l(rec.candidate, rec.reference),
        "meteor": meteor(rec.candidate, rec.reference, synonyms),
    }
    return rec


def corpus_scores(records: Sequence[EvalRecord], synonyms: Optional[SynonymTable] = None
                  ) -> dict[str, float]:
    """Pooled BLEU-1..4; ROUGE-L and METEOR are averaged over sentences."""
    if not records:
        raise EmptyCorpus("no records to score")
    cands = [r.candidate for r in records]
    refs = [r.reference for r in records]
    out = {f"bleu{n}": bleu_n(cands, refs, n) for n in (1, 2, 3, 4)}
    out["rouge_l"] = sum(rouge_l(c, r) for c, r in zip(cands, refs)) / len(records)
    out["meteor"] = sum(meteor(c, r, synonyms) for c, r in zip(cands, refs)) / len(records)
    return out


@dataclass
class BinScore:
    kind: str  # "length" or "gas"
    low: float
    high: float  # math.inf for the open last bin
    n_records: int
    scores: dict[str, float]

    @property
    def label(self) -> str:
        hi = "inf" if math.isinf(self.high) else f"{self.high:g}"
        return f"{self.kind}[{self.low:g},{hi})"


@dataclass
class EvalReport:
    corpus: dict[str, float]
    bins: list[BinScore]
    n_records: int
    n_fallback: int

    def by_kind(self, kind: str) -> list[BinScore]:
        return [b for b in self.bins if b.kind == kind]

    def to_json(self) -> dict:
        out = asdict(self)
        for b in out["bins"]:
            if math.isinf(b["high"]):
                b["high"] = None
        return out

    def rows(self) -> list[tuple]:
        """(bin, metric, value, n_records) rows; the corpus bin is called ``all``."""
        out = [("all", k, v, self.n_records) for k, v in self.corpus.items()]
        for b in self.bins:
            out.extend((b.label, k, v, b.n_records) for k, v in b.scores.items())
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin", "metric", "value", "n_records"])
        for row in self.rows():
            w.writerow([row[0], row[1], f"{row[2]:.6f}", row[3]])
        return buf.getvalue()


def _check_bins(bins: Sequence[float], what: str) -> None:
    if not bins:
        raise EmptyBins(f"no {what} bin boundaries given")
    if any(a >= b for a, b in zip(bins, bins[1:])):
        raise MetricError(f"{what} bin boundaries must be strictly ascending")


def default_bins(values: Iterable[float], width: float) -> list[float]:
    top = max(values, default=0)
    return [i * width for i in range(int(top // width) + 1)]


def _assign(value: float, bins: Sequence[float]) -> Optional[int]:
    if value < bins[0]:
        return None
    k = 0
    while k + 1 < len(bins) and value >= bins[k + 1]:
        k += 1
    return k


def binned_report(records: Sequence[EvalRecord], length_bins: Optional[Sequence[float]] = None,
                  gas_bins: Optional[Sequence[float]] = None,
                  synonyms: Optional[SynonymTable] = None) -> EvalReport:
    """Corpus scores plus the same scores within each non-empty length and gas bin.

    Bins are ``[b[k], b[k+1])`` with the last one open; records without gas are
    left out of the gas bins only.
    """
    if not records:
        raise EmptyCorpus("no records to report on")
    if length_bins is None:
        length_bins = default_bins((r.snippet_tokens for r in records), DEFAULT_LENGTH_WIDTH)
    if gas_bins is None:
        gas_bins = default_bins((r.gas_gwei for r in records if r.gas_gwei is not None),
                                DEFAULT_GAS_WIDTH)
    _check_bins(length_bins, "length")
    _check_bins(gas_bins, "gas")
    bins: list[BinScore] = []
    for kind, bounds, key in (("length", length_bins, lambda r: r.snippet_tokens),
                              ("gas", gas_bins, lambda r: r.gas_gwei)):
        groups: dict[int, list[EvalRecord]] = {}
        for rec in records:
            v = key(rec)
            if v is None:
                continue
            k = _assign(v, bounds)
            if k is not None:
                groups.setdefault(k, []).append(rec)
        for k in sorted(groups):
            high = bounds[k + 1] if k + 1 < len(bounds) else math.inf
            bins.append(BinScore(kind, bounds[k], high, len(groups[k]),
                                 corpus_scores(groups[k], synonyms)))
    return EvalReport(corpus_scores(records, synonyms), bins, len(records),
                      sum(1 for r in records if r.fallback))


def bin_spread(report: EvalReport, kind: str = "length", metric: str = "bleu1",
               min_records: int = 1) -> float:
    """(max - min) / max of a metric across bins holding at least ``min_records`` records."""
    vals = [b.scores[metric] for b in report.by_kind(kind) if b.n_records >= min_records]
    if not vals:
        raise EmptyBins(f"no {kind} bins with at least {min_records} records")
    top = max(vals)
    return 0.0 if top == 0 else (top - min(vals)) / top
