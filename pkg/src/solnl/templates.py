"""Special-statement templates and the operator phrase map."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from .errors import ArityMismatch, TemplateFormatError, UnknownOperator
from .lexicon import Lexicon
from .phrases import Group, Origin, TaggedToken, make_token, split_identifier, tokenize_text

_LOCATIONS = frozenset({"memory", "storage", "calldata", "payable"})
_SLOT_RE = re.compile(r"\{([^{}]*)\}")
_SIG_RE = re.compile(r"^(?P<name>[\w$.]+)\s*(?:\((?P<params>[^()]*)\))?\s*(?:returns\s*\(.*\))?\s*$")


@dataclass(frozen=True)
class SpecialTemplate:
    pattern: str                   # as written in the templates file
    name: str                      # dotted name, "$." prefix for receiver members
    template: str
    params: Optional[tuple] = None  # slot names; None for variables
    variadic: bool = False
    context: Optional[str] = None

    @property
    def is_call(self) -> bool:
        return self.params is not None

    @property
    def arity(self) -> int:
        return len(self.params or ())

    def accepts(self, n_args: int) -> bool:
        if self.variadic:
            return n_args >= self.arity
        return n_args == self.arity


def parse_pattern(pattern: str, template: str) -> SpecialTemplate:
    body = pattern.strip()
    context = None
    if ":" in body.split("(")[0]:
        context, body = body.split(":", 1)
        context = context.strip()
    m = _SIG_RE.match(body.strip())
    if m is None:
        raise TemplateFormatError(f"cannot parse template pattern {pattern!r}")
    name = m.group("name")
    params_text = m.group("params")
    if params_text is None:
        return SpecialTemplate(pattern, name, template, None, False, context)
    params = []
    variadic = False
    for i, raw in enumerate(p.strip() for p in params_text.split(",")):
        if not raw:
            continue
        if raw == "...":
            variadic = True
            continue
        words = raw.split()
        if len(words) > 1 and words[-1] not in _LOCATIONS:
            params.append(words[-1])
        else:
            params.append(str(len(params)))
    tpl = SpecialTemplate(pattern, name, template, tuple(params), variadic, context)
    slots = set(_SLOT_RE.findall(template))
    allowed = set(tpl.params) | {"receiver"} | ({"..."} if variadic else set())
    if not slots <= allowed:
        raise TemplateFormatError(
            f"template for {pattern!r} uses unknown slots {sorted(slots - allowed)}")
    return tpl


@dataclass
class TemplateSet:
    entries: list[SpecialTemplate] = field(default_factory=list)

    def __post_init__(self):
        self._by_name: dict[tuple, list[SpecialTemplate]] = {}
        for e in self.entries:
            self._index(e)

    def _index(self, e: SpecialTemplate) -> None:
        key = (e.context, e.name, e.is_call)
        bucket = self._by_name.setdefault(key, [])
        for other in bucket:
            if other.is_call and other.arity == e.arity and other.variadic == e.variadic:
                raise TemplateFormatError(f"duplicate template pattern {e.pattern!r}")
            if not other.is_call:
                raise TemplateFormatError(f"duplicate template pattern {e.pattern!r}")
        bucket.append(e)

    def add(self, e: SpecialTemplate) -> None:
        self.entries.append(e)
        self._index(e)

    def __len__(self) -> int:
        return len(self.entries)

    def candidates(self, name: str, is_call: bool, context: Optional[str] = None):
        if context is not None:
            found = self._by_name.get((context, name, is_call))
            if found:
                return found
        return self._by_name.get((None, name, is_call), [])

    def find(self, name: str, n_args: Optional[int], context: Optional[str] = None
             ) -> Optional[SpecialTemplate]:
        """Template for ``name`` called with ``n_args`` (None for a variable access).

        Raises ArityMismatch when the name is known but no overload fits.
        """
        is_call = n_args is not None
        cands = self.candidates(name, is_call, context)
        if not cands:
            return None
        if not is_call:
            return cands[0]
        exact = [c for c in cands if c.accepts(n_args) and not c.variadic]
        if exact:
            return exact[0]
        variadic = [c for c in cands if c.accepts(n_args)]
        if variadic:
            return variadic[0]
        raise ArityMismatch(
            f"{name} takes {', '.join(str(c.arity) for c in cands)} argument(s), got {n_args}")

    def names(self) -> set[str]:
        return {e.name for e in self.entries}


def parse_templates(text: str) -> TemplateSet:
    ts = TemplateSet()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise TemplateFormatError(f"line {lineno}: expected 'pattern<TAB>template'")
        pattern, template = line.split("\t", 1)
        try:
            ts.add(parse_pattern(pattern, template.strip()))
        except TemplateFormatError as exc:
            raise TemplateFormatError(f"line {lineno}: {exc}") from None
    return ts


def load_templates(path: Union[str, Path]) -> TemplateSet:
    return parse_templates(Path(path).read_text(encoding="utf-8"))


def join_args(args: Sequence[Group], lexicon: Lexicon) -> list:
    out: list = []
    for i, a in enumerate(args):
        if i:
            out.append(TaggedToken(",", ",", Origin.TEMPLATE_WORD))
        out.append(a)
    return out


def instantiate(text: str, slots: dict, lexicon: Lexicon,
                origin: Origin = Origin.SPECIAL_STATEMENT) -> list:
    """Fill ``{slot}`` markers in ``text`` with phrase groups; other words become tokens."""
    out: list = []
    left = None
    pos = 0
    for m in _SLOT_RE.finditer(text):
        for w in tokenize_text(text[pos:m.start()]):
            tok = make_token(w, lexicon, origin, left)
            out.append(tok)
            left = tok.tag
        value = slots[m.group(1)]
        out.append(value)
        pos = m.end()
    for w in tokenize_text(text[pos:]):
        tok = make_token(w, lexicon, origin, left)
        out.append(tok)
        left = tok.tag
    return out


def fill(tpl: SpecialTemplate, args: Sequence[Group], lexicon: Lexicon,
         receiver: Optional[Group] = None) -> list:
    if tpl.is_call and not tpl.accepts(len(args)):
        raise ArityMismatch(f"{tpl.pattern} expects {tpl.arity} argument(s), got {len(args)}")
    slots: dict = {}
    if tpl.params:
        for name, value in zip(tpl.params, args):
            slots[name] = value
    if tpl.variadic:
        slots["..."] = join_args(list(args[tpl.arity:]), lexicon)
    if "{receiver}" in tpl.template:
        if receiver is None:
            raise ArityMismatch(f"{tpl.pattern} needs a receiver")
        slots["receiver"] = receiver
    return instantiate(tpl.template, slots, lexicon)


def _parse_call_name(qualified_name: str) -> tuple[str, Optional[int]]:
    """``"addmod(uint,uint,uint)"`` -> ``("addmod", 3)``; ``"msg.sender"`` -> ``("msg.sender", None)``."""
    q = qualified_name.strip()
    if q.endswith(")") and "(" in q:
        name, _, rest = q.partition("(")
        inner = rest[:-1].strip()
        return name.strip(), (len(inner.split(",")) if inner else 0)
    return q, None


def _member_phrase(member: str, base: Group, lexicon: Lexicon) -> list:
    words = split_identifier(member, lexicon)
    out: list = []
    if not is_plural(words[-1].text):
        out.append(make_token("the", lexicon))
    out.append(words)
    out.append(make_token("of", lexicon))
    out.append(base)
    return out


def is_plural(word: str) -> bool:
    w = word.lower()
    return len(w) > 3 and w.endswith("s") and not w.endswith("ss")


def apply_special_template(qualified_name: str, args: Sequence[Group], templates: TemplateSet,
                           lexicon: Optional[Lexicon] = None, context: Optional[str] = None,
                           receiver: Optional[Group] = None) -> Optional[list]:
    """Instantiate the template matching ``qualified_name``, or return None.

    Variables match on the longest dotted prefix (``msg.sender.balance`` uses
    ``msg.sender`` and then ``$.balance``).  Calls match on name and arity, and
    fall back to a ``$.member`` template with the prefix as receiver.
    """
    if lexicon is None:
        from .resources import default_lexicon
        lexicon = default_lexicon()
    name, n_args = _parse_call_name(qualified_name)
    if n_args is not None and n_args != len(args):
        raise ArityMismatch(f"{qualified_name} names {n_args} argument(s) but {len(args)} given")

    if n_args is not None:
        tpl = templates.find(name, len(args), context)
        if tpl is not None:
            return fill(tpl, args, lexicon, receiver)
        base, _, member = name.rpartition(".")
        if not base:
            return None
        tpl = templates.find("$." + member, len(args), context)
        if tpl is None:
            return None
        if receiver is None:
            receiver = _variable_phrase(base, templates, lexicon, context)
        return fill(tpl, args, lexicon, receiver)

    if receiver is not None:
        tpl = templates.find("$." + name.rpartition(".")[2], None, context)
        return fill(tpl, (), lexicon, receiver) if tpl is not None else None
    parts = name.split(".")
    for cut in range(len(parts), 0, -1):
        prefix = ".".join(parts[:cut])
        tpl = templates.find(prefix, None, context)
        if tpl is None:
            continue
        phrase: list = fill(tpl, (), lexicon)
        for member in parts[cut:]:
            member_tpl = templates.find("$." + member, None, context)
            if member_tpl is not None:
                phrase = fill(member_tpl, (), lexicon, phrase)
            else:
                phrase = _member_phrase(member, phrase, lexicon)
        return phrase
    return None


def _variable_phrase(name: str, templates: TemplateSet, lexicon: Lexicon,
                     context: Optional[str]) -> list:
    found = apply_special_template(name, (), templates, lexicon, context)
    if found is not None:
        return found
    parts = name.split(".")
    phrase: list = split_identifier(parts[0], lexicon)
    for member in parts[1:]:
        phrase = _member_phrase(member, phrase, lexicon)
    return phrase


# ---------------------------------------------------------------------------
# operators

@dataclass
class OperatorMap:
    phrases: dict[str, str] = field(default_factory=dict)

    def binary(self, symbol: str) -> str:
        try:
            return self.phrases[symbol]
        except KeyError:
            raise UnknownOperator(f"no rendering for binary operator {symbol!r}") from None

    def assignment(self, symbol: str) -> str:
        try:
            return self.phrases[symbol]
        except KeyError:
            raise UnknownOperator(f"no rendering for assignment operator {symbol!r}") from None

    def unary(self, symbol: str, prefix: bool) -> str:
        if symbol == "delete":
            key = "delete x"
        else:
            key = symbol + "x" if prefix else "x" + symbol
        try:
            return self.phrases[key]
        except KeyError:
            raise UnknownOperator(f"no rendering for unary operator {key!r}") from None


def parse_operator_map(text: str) -> OperatorMap:
    phrases = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise TemplateFormatError(f"line {lineno}: expected 'symbol<TAB>phrase'")
        symbol, phrase = line.split("\t", 1)
        symbol = symbol.strip()
        if symbol in phrases:
            raise TemplateFormatError(f"line {lineno}: duplicate operator {symbol!r}")
        phrases[symbol] = phrase.strip()
    return OperatorMap(phrases)


def load_operator_map(path: Union[str, Path]) -> OperatorMap:
    return parse_operator_map(Path(path).read_text(encoding="utf-8"))
