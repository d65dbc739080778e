"""Context-free grammar, PCFG estimation and Viterbi realization of tagged tokens.

The realizer never reorders or invents words.  It recovers the most probable
syntax tree over the translator's token sequence, and the sentence is read back
from the tree's leaves.  Sequences the grammar does not cover are emitted flat.
"""

from __future__ import annotations

import math
import re
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .diagnostics import Diagnostic
from .errors import (
    EmptyTreebank, ForeignSymbol, GrammarError, NoDerivation, NoStartSymbol, UnknownSymbol,
)
from .lexicon import ALL_TAGS
from .phrases import VERBATIM_ORIGINS, Group, Origin, TaggedToken, flatten, join_words

# log-space slack under which two derivations count as equally probable
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class GrammarRule:
    lhs: str
    rhs: tuple[str, ...]

    def __post_init__(self):
        if not self.rhs:
            raise GrammarError(f"rule for {self.lhs} has an empty right-hand side")

    def __str__(self) -> str:
        return f"{self.lhs} -> {' '.join(self.rhs)}"


@dataclass
class Grammar:
    rules: list[GrammarRule]
    start: str = "S"
    # word -> categories; the lexicon normally plays this part
    terminal_map: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        self._index = {r: i for i, r in enumerate(self.rules)}
        if len(self._index) != len(self.rules):
            raise GrammarError("grammar declares the same rule twice")
        phrase = {r.lhs for r in self.rules}
        if self.start not in phrase:
            raise NoStartSymbol(f"no rule expands the start symbol {self.start!r}")
        for r in self.rules:
            for sym in r.rhs:
                if sym not in phrase and sym not in ALL_TAGS:
                    raise UnknownSymbol(f"{sym!r} in '{r}' is neither a phrase symbol nor a tag")
        self.phrase_symbols = frozenset(phrase)
        self.categories = frozenset(s for r in self.rules for s in r.rhs if s not in phrase)

    @property
    def nonterminals(self) -> frozenset:
        """Every symbol of the grammar, phrase symbols and tags alike."""
        return self.phrase_symbols | self.categories

    def rule_index(self, rule: GrammarRule) -> int:
        return self._index[rule]

    def __contains__(self, rule: GrammarRule) -> bool:
        return rule in self._index

    def by_lhs(self) -> dict[str, list[GrammarRule]]:
        out: dict[str, list[GrammarRule]] = defaultdict(list)
        for r in self.rules:
            out[r.lhs].append(r)
        return out

    def unreachable(self) -> set[str]:
        seen = {self.start}
        todo = [self.start]
        by_lhs = self.by_lhs()
        while todo:
            for r in by_lhs.get(todo.pop(), ()):
                for s in r.rhs:
                    if s not in seen:
                        seen.add(s)
                        todo.append(s)
        return set(self.phrase_symbols) - seen


_RULE_RE = re.compile(r"^\s*(\S+)\s*->\s*(.+)$")


def parse_grammar(text: str) -> Grammar:
    rules: list[GrammarRule] = []
    start = "S"
    for lineno, raw in enumerate(text.splitlines(), 1):
        # "#" is also a tag, so only a line start or " # " opens a comment
        line = "" if raw.lstrip().startswith("#") else re.split(r"\s#\s", raw + " ", 1)[0].strip()
        if not line:
            continue
        if line.startswith("start:"):
            start = line[len("start:"):].strip()
            continue
        m = _RULE_RE.match(line)
        if m is None:
            raise GrammarError(f"line {lineno}: expected 'LHS -> RHS | RHS'")
        lhs = m.group(1)
        for alt in m.group(2).split("|"):
            syms = tuple(alt.split())
            if not syms:
                raise GrammarError(f"line {lineno}: empty alternative for {lhs}")
            rule = GrammarRule(lhs, syms)
            if rule not in rules:
                rules.append(rule)
    if not rules:
        raise NoStartSymbol("grammar has no rules")
    g = Grammar(rules, start)
    lost = g.unreachable()
    if lost:
        warnings.warn(f"unreachable symbols: {', '.join(sorted(lost))}", stacklevel=2)
    return g


def load_grammar(path: Union[str, Path]) -> Grammar:
    return parse_grammar(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# trees

@dataclass
class SyntaxTree:
    symbol: str
    children: list  # SyntaxTree or TaggedToken
    rule: Optional[GrammarRule] = None  # None for a tag over a single token
    score: float = 1.0

    def leaves(self) -> list[TaggedToken]:
        out: list[TaggedToken] = []
        stack: list = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, TaggedToken):
                out.append(node)
            else:
                stack.extend(reversed(node.children))
        return out

    def rules(self) -> list[GrammarRule]:
        out = []
        stack: list = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, SyntaxTree):
                if node.rule is not None:
                    out.append(node.rule)
                stack.extend(reversed(node.children))
        return out

    def subtrees(self):
        yield self
        for c in self.children:
            if isinstance(c, SyntaxTree):
                yield from c.subtrees()

    def to_bracketed(self) -> str:
        if self.rule is None and len(self.children) == 1 and isinstance(self.children[0], TaggedToken):
            word = self.children[0].text
            return f"({self.symbol} {_ESCAPE.get(word, word)})"
        inner = " ".join(c.to_bracketed() if isinstance(c, SyntaxTree) else _ESCAPE.get(c.text, c.text)
                         for c in self.children)
        return f"({self.symbol} {inner})"

    def __str__(self) -> str:
        return self.to_bracketed()


def preterminal(token: TaggedToken) -> SyntaxTree:
    return SyntaxTree(token.tag, [token])


_ESCAPE = {"(": "-LRB-", ")": "-RRB-"}
_UNESCAPE = {v: k for k, v in _ESCAPE.items()}


def _tokenize_brackets(text: str) -> list[str]:
    return re.findall(r"\(|\)|[^\s()]+", text)


def parse_tree(text: str) -> SyntaxTree:
    """Read one ``(S (VP (VB declare) ...))`` tree.  Words ``-LRB-``/``-RRB-`` stand for brackets."""
    toks = _tokenize_brackets(text)
    pos = 0

    def node() -> SyntaxTree:
        nonlocal pos
        if toks[pos] != "(":
            raise GrammarError(f"expected '(' at token {pos} in {text!r}")
        pos += 1
        symbol = toks[pos]
        pos += 1
        children: list = []
        while toks[pos] != ")":
            if toks[pos] == "(":
                children.append(node())
            else:
                word = _UNESCAPE.get(toks[pos], toks[pos])
                children.append(TaggedToken(word, symbol, Origin.TEMPLATE_WORD))
                pos += 1
        pos += 1
        if not children:
            raise GrammarError(f"empty constituent {symbol} in {text!r}")
        words = [c for c in children if isinstance(c, TaggedToken)]
        if words and len(children) != 1:
            raise GrammarError(f"{symbol} mixes words and constituents in {text!r}")
        if words:
            return SyntaxTree(symbol, children)
        return SyntaxTree(symbol, children, GrammarRule(symbol, tuple(c.symbol for c in children)))

    try:
        tree = node()
    except IndexError:
        raise GrammarError(f"unbalanced brackets in {text!r}") from None
    if pos != len(toks):
        raise GrammarError(f"trailing text after tree in {text!r}")
    return tree


def load_treebank(path: Union[str, Path]) -> list[SyntaxTree]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(parse_tree(line))
    return out


# ---------------------------------------------------------------------------
# models

@dataclass
class PcfgModel:
    grammar: Grammar
    probabilities: dict[GrammarRule, float]
    probabilistic: bool = True  # False: plain CFG, every rule weighs 1

    def __post_init__(self):
        self._compiled = None
        self._shapes: dict = {}

    def p(self, rule: GrammarRule) -> float:
        return self.probabilities[rule]

    def tree_score(self, tree: SyntaxTree) -> float:
        score = 1.0
        for r in tree.rules():
            score *= self.probabilities[r]
        return score


def cfg_model(grammar: Grammar) -> PcfgModel:
    """Unweighted grammar: every derivation ties and the tie-break decides."""
    return PcfgModel(grammar, {r: 1.0 for r in grammar.rules}, probabilistic=False)


def estimate_pcfg(treebank: Sequence[SyntaxTree], grammar: Optional[Grammar] = None) -> PcfgModel:
    """Relative-frequency estimate with add-one smoothing over the grammar's rules.

    Without a grammar, the rules seen in the treebank form it.
    """
    if not treebank:
        raise EmptyTreebank("cannot estimate rule probabilities from an empty treebank")
    counts: Counter = Counter()
    for tree in treebank:
        counts.update(tree.rules())
    if grammar is None:
        seen = []
        for tree in treebank:
            for r in tree.rules():
                if r not in seen:
                    seen.append(r)
        grammar = Grammar(seen, treebank[0].symbol)
    symbols = grammar.nonterminals
    for tree in treebank:
        for sub in tree.subtrees():
            if sub.symbol not in symbols:
                raise ForeignSymbol(f"treebank symbol {sub.symbol!r} is not in the grammar")
    for r in counts:
        if r not in grammar:
            raise ForeignSymbol(f"treebank rule '{r}' is not in the grammar")
    probs = {}
    for lhs, rules in grammar.by_lhs().items():
        total = sum(counts[r] for r in rules) + len(rules)
        for r in rules:
            probs[r] = (counts[r] + 1) / total
    return PcfgModel(grammar, probs)


# ---------------------------------------------------------------------------
# chart parsing

@dataclass
class _Compiled:
    # binary rules keyed by left child: (right, parent, logp, order, source rule or None)
    binary: dict
    # unary rules in declaration order: (child, parent, logp, order, rule)
    unary: list
    # intermediate symbol -> the original rule it belongs to
    pieces: dict


def _compile(model: PcfgModel) -> _Compiled:
    binary: dict = defaultdict(list)
    unary = []
    pieces = {}
    for order, r in enumerate(model.grammar.rules):
        w = model.probabilities[r]
        if w <= 0:
            continue
        lp = math.log(w)
        if len(r.rhs) == 1:
            unary.append((r.rhs[0], r.lhs, lp, order, r))
        elif len(r.rhs) == 2:
            binary[r.rhs[0]].append((r.rhs[1], r.lhs, lp, order, r))
        else:
            # X -> A B C D  becomes  X -> A @1, @1 -> B @2, @2 -> C D
            names = [f"@{order}.{k}" for k in range(1, len(r.rhs) - 1)]
            for n in names:
                pieces[n] = r
            binary[r.rhs[0]].append((names[0], r.lhs, lp, order, r))
            for k, n in enumerate(names):
                right = names[k + 1] if k + 1 < len(names) else r.rhs[-1]
                binary[r.rhs[k + 1]].append((right, n, 0.0, order, None))
    return _Compiled(dict(binary), unary, pieces)


def _better(cand: tuple, cur: Optional[tuple]) -> bool:
    # entries: (logp, order, split, backpointer)
    if cur is None:
        return True
    if cand[0] > cur[0] + TIE_TOLERANCE:
        return True
    if cand[0] < cur[0] - TIE_TOLERANCE:
        return False
    return (cand[1], cand[2]) < (cur[1], cur[2])


def _unary_closure(cell: dict, unary: list) -> None:
    changed = True
    while changed:
        changed = False
        for child, parent, lp, order, rule in unary:
            entry = cell.get(child)
            if entry is None:
                continue
            cand = (entry[0] + lp, order, -1, ("u", rule, child))
            cur = cell.get(parent)
            # a tie never replaces an existing unary entry, which keeps back pointers acyclic
            if cur is None or cand[0] > cur[0] + TIE_TOLERANCE:
                cell[parent] = cand
                changed = True


def _cky(tags: tuple, model: PcfgModel):
    if model._compiled is None:
        model._compiled = _compile(model)
    comp = model._compiled
    n = len(tags)
    chart = [[None] * (n + 1) for _ in range(n + 1)]
    for i, t in enumerate(tags):
        cell = {t: (0.0, -1, -1, ("leaf", i))}
        _unary_closure(cell, comp.unary)
        chart[i][i + 1] = cell
    for width in range(2, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            cell: dict = {}
            for k in range(i + 1, j):
                left = chart[i][k]
                right = chart[k][j]
                if not left or not right:
                    continue
                for lsym, lentry in left.items():
                    for rsym, parent, lp, order, rule in comp.binary.get(lsym, ()):
                        rentry = right.get(rsym)
                        if rentry is None:
                            continue
                        cand = (lentry[0] + rentry[0] + lp, order, k, ("b", rule, k, lsym, rsym))
                        if _better(cand, cell.get(parent)):
                            cell[parent] = cand
            _unary_closure(cell, comp.unary)
            chart[i][j] = cell
    return chart


def _shape(chart, i: int, j: int, sym: str, pieces: dict):
    """Nested (symbol, rule, children) with leaf indices, intermediate symbols removed."""
    entry = chart[i][j][sym]
    bp = entry[3]
    if bp[0] == "leaf":
        return (sym, None, bp[1])
    if bp[0] == "u":
        return (sym, bp[1], [_shape(chart, i, j, bp[2], pieces)])
    _, rule, k, lsym, rsym = bp
    kids = [_shape(chart, i, k, lsym, pieces)]
    # walk down the right spine while it is an intermediate piece of this rule
    while rsym in pieces:
        rbp = chart[k][j][rsym][3]
        _, _, k2, lsym2, rsym2 = rbp
        kids.append(_shape(chart, k, k2, lsym2, pieces))
        k, rsym = k2, rsym2
    kids.append(_shape(chart, k, j, rsym, pieces))
    return (sym, rule, kids)


def _build(shape, tokens: Sequence[TaggedToken], model: PcfgModel) -> SyntaxTree:
    sym, rule, kids = shape
    if rule is None:
        return SyntaxTree(sym, [tokens[kids]])
    children = [_build(k, tokens, model) for k in kids]
    score = model.probabilities[rule]
    for c in children:
        score *= c.score
    return SyntaxTree(sym, children, rule, score)


def derive(tokens: Sequence[TaggedToken], model: PcfgModel) -> SyntaxTree:
    """Most probable derivation of ``tokens`` from the start symbol.

    Ties go to the lower rule declaration index, then to the earlier split.
    Raises NoDerivation when the sequence is not generable.
    """
    if not tokens:
        raise NoDerivation("no tokens to derive")
    shape = _best_shape(tokens, model)
    if shape is None:
        raise NoDerivation(f"grammar cannot derive {' '.join(t.tag for t in tokens)}")
    return _build(shape, tokens, model)


def _best_shape(tokens: Sequence[TaggedToken], model: PcfgModel):
    """Cached tree shape for the tag sequence, or None when it is not derivable."""
    tags = tuple(t.tag for t in tokens)
    if tags in model._shapes:
        return model._shapes[tags]
    shape = None
    grammar = model.grammar
    if all(t in grammar.categories or t in grammar.phrase_symbols for t in tags):
        chart = _cky(tags, model)
        if grammar.start in chart[0][len(tags)]:
            shape = _shape(chart, 0, len(tags), grammar.start, model._compiled.pieces)
    model._shapes[tags] = shape
    return shape


# ---------------------------------------------------------------------------
# linearization

def _finish(tokens: Sequence[TaggedToken]) -> str:
    text = join_words(tokens)
    if not text:
        return text
    if tokens[0].origin not in VERBATIM_ORIGINS:
        text = text[0].upper() + text[1:]
    if not text.endswith("."):
        text += "."
    return text


def linearize(tree: SyntaxTree) -> str:
    return _finish(tree.leaves())


def emit_flat(tokens: Sequence[TaggedToken], diagnostics: Optional[list] = None,
              node_id: Optional[int] = None, node_type: Optional[str] = None) -> str:
    """Tokens in translator order, finished like :func:`linearize`; flagged as a fallback."""
    if diagnostics is not None:
        diagnostics.append(Diagnostic("fallback", node_id, node_type, None,
                                      "grammar does not cover the sentence; emitted flat"))
    return _finish(list(tokens))


def split_sentences(tokens: Iterable[TaggedToken]) -> list[list[TaggedToken]]:
    out: list[list[TaggedToken]] = []
    cur: list[TaggedToken] = []
    for t in tokens:
        if t.tag == "." and t.text == ".":
            if cur:
                out.append(cur)
            cur = []
        else:
            cur.append(t)
    if cur:
        out.append(cur)
    return out


@dataclass
class Realization:
    text: str
    sentences: list[str]
    fallbacks: list[bool]
    # (shape or None, tokens) per sentence; trees are only built when asked for
    _parts: list = field(default_factory=list, repr=False)
    _model: Optional[PcfgModel] = field(default=None, repr=False)

    @property
    def fallback(self) -> bool:
        return any(self.fallbacks)

    @property
    def trees(self) -> list[Optional[SyntaxTree]]:
        return [None if shape is None else _build(shape, toks, self._model)
                for shape, toks in self._parts]


def realize(group: Group, model: Optional[PcfgModel] = None, diagnostics: Optional[list] = None,
            node_id: Optional[int] = None, node_type: Optional[str] = None) -> Realization:
    """Turn one statement's phrase group into finished sentences."""
    if model is None:
        from .resources import default_model
        model = default_model()
    sentences, fallbacks, parts = [], [], []
    for sent in split_sentences(flatten(group)):
        shape = _best_shape(sent, model)
        if shape is None:
            sentences.append(emit_flat(sent, diagnostics, node_id, node_type))
        else:
            # a derivation keeps token order, so its leaves are exactly ``sent``
            sentences.append(_finish(sent))
        fallbacks.append(shape is None)
        parts.append((shape, sent))
    return Realization(" ".join(sentences), sentences, fallbacks, parts, model)
