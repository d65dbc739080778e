"""Tagged words and the nested phrase lists the translator emits."""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

from .astree import SourceRange
from .lexicon import DEFAULT_TAG, Lexicon


class Origin(enum.Enum):
    IDENTIFIER_PART = "IdentifierPart"
    TEMPLATE_WORD = "TemplateWord"
    LITERAL_VALUE = "LiteralValue"
    SPECIAL_STATEMENT = "SpecialStatement"
    CODE_SYMBOL = "CodeSymbol"  # verbatim source text: modifier names, type names, fallbacks

    # members are singletons compared by identity; the default hashes the name in Python
    __hash__ = object.__hash__


VERBATIM_ORIGINS = frozenset({Origin.LITERAL_VALUE, Origin.CODE_SYMBOL})

PUNCT_TAGS = {
    "(": "-LRB-", ")": "-RRB-", ",": ",", ".": ".", ";": ":", ":": ":",
    "...": ":", "…": ":", "%": "SYM", "+": "SYM", "*": "SYM", "-": "SYM",
    "/": "SYM", "=": "SYM",
}

_NUMBER_RE = re.compile(r"[0-9][0-9_.]*(e[0-9]+)?|0x[0-9a-fA-F_]+")


@dataclass(frozen=True, slots=True)
class TaggedToken:
    text: str
    tag: str
    origin: Origin = Origin.TEMPLATE_WORD

    def __str__(self) -> str:
        return f"{self.text}/{self.tag}"


Group = Union[TaggedToken, list]


def flatten(group: Group) -> list[TaggedToken]:
    if isinstance(group, TaggedToken):
        return [group]
    out: list[TaggedToken] = []
    stack = [iter(group)]
    while stack:
        for item in stack[-1]:
            if isinstance(item, TaggedToken):
                out.append(item)
            else:
                stack.append(iter(item))
                break
        else:
            stack.pop()
    return out


@dataclass
class PhraseList:
    tokens: list
    src: SourceRange
    node_id: Optional[int] = None
    node_type: Optional[str] = None
    flags: set = field(default_factory=set)

    def flat(self) -> list[TaggedToken]:
        return flatten(self.tokens)

    def words(self) -> list[str]:
        return [t.text for t in self.flat()]

    def text(self) -> str:
        return join_words(self.flat())

    def nested_words(self) -> list:
        def conv(g):
            return g.text if isinstance(g, TaggedToken) else [conv(x) for x in g]
        return conv(self.tokens)


_NO_SPACE_BEFORE = frozenset({",", ".", ")", ";", ":"})
_NO_SPACE_AFTER = frozenset({"("})


def join_words(tokens: Iterable[TaggedToken]) -> str:
    """Join tokens with single spaces, attaching punctuation to its neighbour."""
    parts: list[str] = []
    prev: Optional[str] = None
    for tok in tokens:
        text = tok.text
        if parts and text not in _NO_SPACE_BEFORE and prev not in _NO_SPACE_AFTER:
            parts.append(" ")
        parts.append(text)
        prev = text
    return "".join(parts)


# An identifier part names something: a noun reading wins when the word has one, and a
# function-word reading ("a", "to") is never right.
_NOUN_TAGS = ("NN", "NNS", "NNP")
_CLOSED_CLASS = frozenset({"DT", "PDT", "IN", "TO", "CC", "PRP", "PRP$", "WDT", "MD", "RB"})


def fixed_tag(text: str, origin: Origin) -> Optional[str]:
    """Tag decided by the token's form alone, or None when the lexicon must decide."""
    if text in PUNCT_TAGS:
        return PUNCT_TAGS[text]
    if _NUMBER_RE.fullmatch(text):
        return "CD"
    return None


def lexical_tag(text: str, origin: Origin, lexicon: Lexicon, left: Optional[str]) -> str:
    key = (text, origin, left)
    tag = lexicon.cache.get(key)
    if tag is None:
        tag = lexicon.cache[key] = _lexical_tag(text, origin, lexicon, left)
    return tag


def _lexical_tag(text: str, origin: Origin, lexicon: Lexicon, left: Optional[str]) -> str:
    fixed = fixed_tag(text, origin)
    if fixed:
        return fixed
    tag = lexicon.tag_word(text.lower(), left)
    if origin is Origin.IDENTIFIER_PART and tag not in _NOUN_TAGS:
        entry = lexicon.lookup(text)
        nouns = [t for t, _ in entry.tags if t in _NOUN_TAGS] if entry else []
        if nouns:
            return nouns[0]
        if tag in _CLOSED_CLASS:
            return DEFAULT_TAG
    return tag


def make_token(text: str, lexicon: Lexicon, origin: Origin = Origin.TEMPLATE_WORD,
               left: Optional[str] = None) -> TaggedToken:
    return TaggedToken(text, lexical_tag(text, origin, lexicon, left), origin)


def retag(group: Group, lexicon: Lexicon, left: Optional[str] = None) -> Group:
    """Re-tag every lexicon-decided token using its actual left neighbour.

    The translator builds sub-phrases before it knows what precedes them, so
    contextual disambiguation runs as a separate pass over the finished phrase.
    Nesting is preserved.
    """
    cache = lexicon.cache
    prev = left

    def one(g: TaggedToken) -> TaggedToken:
        nonlocal prev
        if g.origin in VERBATIM_ORIGINS:
            prev = g.tag
            return g
        tag = cache.get((g.text, g.origin, prev))
        if tag is None:
            tag = lexical_tag(g.text, g.origin, lexicon, prev)
        prev = tag
        return g if tag == g.tag else TaggedToken(g.text, tag, g.origin)

    def visit(g: list) -> list:
        return [one(x) if type(x) is TaggedToken else visit(x) for x in g]

    return one(group) if isinstance(group, TaggedToken) else visit(group)


# Runs of capitals stay together until a capital starts a lowercase word
# (ERC20Token -> ERC20 Token); everything else is kept so nothing is lost.
_PART_RE = re.compile(
    r"[A-Z]+[0-9]*(?=[A-Z][a-z]|[^A-Za-z0-9]|$)"
    r"|[A-Z]?[a-z]+[0-9]*"
    r"|[A-Z]+[0-9]*"
    r"|[0-9]+[a-z]*"
    r"|[^A-Za-z0-9_]+"
)


def identifier_parts(name: str) -> list[str]:
    parts = [p.lower() for p in _PART_RE.findall(name)]
    return parts or [name]


def split_identifier(name: str, lexicon: Lexicon, left_context: Optional[str] = None,
                     expand: bool = False) -> list[TaggedToken]:
    """Split a camelCase / snake_case identifier into tagged lowercase words.

    >>> from solnl.resources import default_lexicon
    >>> [str(t) for t in split_identifier("highestBid", default_lexicon())]
    ['highest/JJS', 'bid/NN']
    """
    out = []
    left = left_context
    for part in identifier_parts(name):
        if expand:
            part = lexicon.expand(part)
        tok = make_token(part, lexicon, Origin.IDENTIFIER_PART, left)
        out.append(tok)
        left = tok.tag
    return out


_TEXT_RE = re.compile(r"\.\.\.|…|[(),]|[^\s(),]+")


@functools.lru_cache(maxsize=4096)
def _tokenize(text: str) -> tuple[str, ...]:
    return tuple(_TEXT_RE.findall(text))


def tokenize_text(text: str) -> list[str]:
    return list(_tokenize(text))


def words_to_tokens(text: str, lexicon: Lexicon, origin: Origin = Origin.TEMPLATE_WORD,
                    left: Optional[str] = None) -> list[TaggedToken]:
    out = []
    for w in tokenize_text(text):
        tok = make_token(w, lexicon, origin, left)
        out.append(tok)
        left = tok.tag
    return out


def iter_tokens(phrases: Iterable[PhraseList]) -> Iterator[TaggedToken]:
    for p in phrases:
        yield from p.flat()
