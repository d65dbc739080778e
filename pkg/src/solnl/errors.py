"""Exception hierarchy shared across the translation pipeline."""


class SolnlError(Exception):
    """Base class for all errors raised by this package."""


# --- AST ingestion -----------------------------------------------------------

class AstError(SolnlError):
    pass


class MalformedJson(AstError):
    pass


class MissingNodeType(AstError):
    pass


class MalformedSrc(AstError):
    pass


class NotSourceUnit(AstError):
    pass


class MissingCoreAttribute(AstError):
    def __init__(self, node_id, attribute, node_type=None):
        self.node_id = node_id
        self.attribute = attribute
        self.node_type = node_type
        where = f"{node_type} node {node_id}" if node_type else f"node {node_id}"
        super().__init__(f"{where} is missing core attribute {attribute!r}")


# --- translation ---------------------------------------------------------------

class TranslationError(SolnlError):
    pass


class UnknownOperator(TranslationError):
    pass


class ArityMismatch(TranslationError):
    pass


class TemplateFormatError(TranslationError):
    pass


# --- lexicon -------------------------------------------------------------------

class LexiconError(SolnlError):
    pass


class DuplicateWord(LexiconError):
    pass


class UnknownTag(LexiconError):
    pass


# --- grammar / realization -----------------------------------------------------

class GrammarError(SolnlError):
    pass


class UnknownSymbol(GrammarError):
    pass


class NoStartSymbol(GrammarError):
    pass


class EmptyTreebank(GrammarError):
    pass


class ForeignSymbol(GrammarError):
    pass


class NoDerivation(GrammarError):
    pass


# --- metrics -------------------------------------------------------------------

class MetricError(SolnlError):
    pass


class LengthMismatch(MetricError):
    pass


class EmptyCorpus(MetricError):
    pass


class EmptySentence(MetricError):
    pass


class EmptyBins(MetricError):
    pass


# --- cli / pipeline --------------------------------------------------------------

class ConfigError(SolnlError):
    pass


class CompilerUnavailable(ConfigError):
    pass


class CorpusError(SolnlError):
    pass
