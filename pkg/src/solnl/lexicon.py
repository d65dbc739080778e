"""Part-of-speech lexicon: Penn Treebank tags extended with blockchain vocabulary.

File format, one entry per line (``#`` starts a comment)::

    word <TAB> tag[:weight][,tag[:weight]...] [<TAB> expansion]

Context rules share the file and are applied in order::

    @rule <TAB> left-tags <TAB> ambiguous-tags <TAB> resolved-tag

``left-tags`` is a space-separated list of tags that may precede the word (``^`` stands
for the start of a phrase); ``ambiguous-tags`` is a ``|``-separated set the
word must be able to take.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .errors import DuplicateWord, LexiconError, UnknownTag

PENN_TAGS = frozenset({
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS",
    "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO",
    "UH", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB",
    ",", ".", ":", "``", "''", "-LRB-", "-RRB-", "#", "$",
})
# CODE marks verbatim source text emitted by the fallback path.
EXTENSION_TAGS = frozenset({"CODE"})
ALL_TAGS = PENN_TAGS | EXTENSION_TAGS

DEFAULT_TAG = "NN"
START = "^"


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    tags: tuple[tuple[str, float], ...]
    expansion: Optional[str] = None

    def __post_init__(self):
        if not self.tags:
            raise LexiconError(f"entry {self.word!r} has no tags")
        for tag, weight in self.tags:
            if weight <= 0:
                raise LexiconError(f"entry {self.word!r}: weight for {tag} must be positive")

    @property
    def default_tag(self) -> str:
        return self.tags[0][0]

    @property
    def tag_set(self) -> frozenset:
        return frozenset(t for t, _ in self.tags)


@dataclass(frozen=True)
class ContextRule:
    left: frozenset       # tags (or START) that trigger the rule
    ambiguity: frozenset  # the word must admit all of these tags
    resolved: str


@dataclass
class Lexicon:
    entries: dict[str, LexiconEntry] = field(default_factory=dict)
    context_rules: list[ContextRule] = field(default_factory=list)
    # memo for callers that tag the same words over and over; filled lazily
    cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.entries

    def lookup(self, word: str) -> Optional[LexiconEntry]:
        return self.entries.get(word.lower())

    def tag_word(self, word: str, left_context: Optional[str] = None) -> str:
        """Tag one word given the tag of the word to its left (``None`` at phrase start)."""
        entry = self.entries.get(word.lower())
        if entry is None:
            return DEFAULT_TAG
        if len(entry.tags) == 1:
            return entry.default_tag
        left = left_context if left_context is not None else START
        tags = entry.tag_set
        for rule in self.context_rules:
            if left in rule.left and rule.ambiguity <= tags and rule.resolved in tags:
                return rule.resolved
        return entry.default_tag

    def expand(self, word: str) -> str:
        entry = self.entries.get(word.lower())
        return entry.expansion if entry is not None and entry.expansion else word


def tag_word(word: str, left_context: Optional[str], lexicon: Lexicon) -> str:
    return lexicon.tag_word(word, left_context)


def _check_tag(tag: str, lineno: int) -> str:
    if tag not in ALL_TAGS:
        raise UnknownTag(f"line {lineno}: unknown tag {tag!r}")
    return tag


def _parse_tags(spec: str, lineno: int) -> tuple[tuple[str, float], ...]:
    out = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        # ":" is itself a Penn tag, so split on the last colon only when a number follows
        tag, weight = part, 1.0
        head, sep, tail = part.rpartition(":")
        if sep and head:
            try:
                weight = float(tail)
                tag = head
            except ValueError:
                pass
        out.append((_check_tag(tag, lineno), weight))
    return tuple(out)


def parse_lexicon(text: str) -> Lexicon:
    lex = Lexicon()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if fields[0] == "@rule":
            if len(fields) != 4:
                raise LexiconError(f"line {lineno}: @rule needs 3 tab-separated fields")
            left = frozenset(fields[1].split())
            for t in left - {START}:
                _check_tag(t, lineno)
            amb = frozenset(_check_tag(t, lineno) for t in fields[2].split("|"))
            lex.context_rules.append(ContextRule(left, amb, _check_tag(fields[3].strip(), lineno)))
            continue
        if len(fields) < 2:
            raise LexiconError(f"line {lineno}: expected 'word<TAB>tags'")
        word = fields[0].strip().lower()
        if word in lex.entries:
            raise DuplicateWord(f"line {lineno}: duplicate word {word!r}")
        tags = _parse_tags(fields[1], lineno)
        expansion = fields[2].strip() if len(fields) > 2 and fields[2].strip() else None
        lex.entries[word] = LexiconEntry(word, tags, expansion)
    return lex


def load_lexicon(path: Union[str, Path]) -> Lexicon:
    # OSError propagates as the IoError case
    return parse_lexicon(Path(path).read_text(encoding="utf-8"))
