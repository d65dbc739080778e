"""Loaders for the data files shipped inside the package."""

from __future__ import annotations

import functools
from importlib import resources
from pathlib import Path

DATA = resources.files("solnl") / "data"


def data_path(name: str) -> Path:
    return Path(str(DATA / name))


@functools.lru_cache(maxsize=None)
def default_lexicon():
    from .lexicon import load_lexicon
    return load_lexicon(data_path("lexicon.tsv"))


@functools.lru_cache(maxsize=None)
def default_templates():
    from .templates import load_templates
    return load_templates(data_path("templates.tsv"))


@functools.lru_cache(maxsize=None)
def default_operators():
    from .templates import load_operator_map
    return load_operator_map(data_path("operators.tsv"))


@functools.lru_cache(maxsize=None)
def default_grammar():
    from .grammar import load_grammar
    return load_grammar(data_path("grammar.cfg"))


@functools.lru_cache(maxsize=None)
def default_model():
    """PCFG estimated from the shipped seed treebank over the shipped grammar."""
    from .grammar import estimate_pcfg, load_treebank
    return estimate_pcfg(load_treebank(data_path("treebank.txt")), default_grammar())


@functools.lru_cache(maxsize=None)
def default_synonyms():
    from .metrics import load_synonyms
    return load_synonyms(data_path("synonyms.tsv"))


def mini_corpus_path() -> Path:
    return data_path("mini_corpus.jsonl")
