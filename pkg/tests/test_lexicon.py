import pytest
from hypothesis import given, strategies as st

from solnl.errors import DuplicateWord, LexiconError, UnknownTag
from solnl.lexicon import ALL_TAGS, DEFAULT_TAG, load_lexicon, parse_lexicon, tag_word
from solnl.resources import default_grammar, default_lexicon, default_templates
from solnl.phrases import tokenize_text

LEX = default_lexicon()


@pytest.mark.parametrize("word, left, expected", [
    ("bid", "JJS", "NN"),
    ("bid", None, "VB"),
    ("tx", None, "NN"),
    ("zzzunknown", None, "NN"),
    ("user", None, "NN"),
])
def test_tag_word(word, left, expected):
    assert tag_word(word, left, LEX) == expected


def test_weighted_entry():
    lex = parse_lexicon("bid\tVB:3,NN:2\n")
    entry = lex.lookup("bid")
    assert entry.default_tag == "VB"
    assert entry.tags == (("VB", 3.0), ("NN", 2.0))


def test_empty_file_tags_everything_nn():
    lex = parse_lexicon("")
    assert len(lex.entries) == 0
    assert lex.tag_word("anything") == DEFAULT_TAG


def test_abbreviation():
    lex = parse_lexicon("tx\tNN\ttransaction\n")
    assert lex.lookup("tx").expansion == "transaction"
    assert lex.tag_word("tx") == "NN"
    assert lex.expand("tx") == "transaction"
    assert lex.expand("user") == "user"


def test_comments_and_rules():
    lex = parse_lexicon("# a comment\n@rule\tJJ\tVB|NN\tNN\nbid\tVB,NN\n")
    assert lex.tag_word("bid", "JJ") == "NN"
    assert lex.tag_word("bid", "DT") == "VB"


@pytest.mark.parametrize("text, error", [
    ("bid\tVB\nbid\tNN\n", DuplicateWord),
    ("bid\tXYZ\n", UnknownTag),
    ("bid\tVB:0\n", LexiconError),
    ("bid\tVB:x\n", LexiconError),
    ("@rule\tJJ\tVB|NN\n", LexiconError),
    ("@rule\tJJ\tVB|QQ\tNN\n", UnknownTag),
    ("justaword\n", LexiconError),
])
def test_bad_files(text, error):
    with pytest.raises(error):
        parse_lexicon(text)


def test_load_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_lexicon(tmp_path / "nope.tsv")


def test_blockchain_terms_present():
    for word in ("user", "gas", "block", "wei", "hash", "token", "transaction", "tx", "ether",
                 "contract", "address", "balance"):
        assert word in LEX, word


def test_template_words_are_covered():
    # every word of every shipped template is either in the lexicon, a slot or a symbol
    missing = set()
    for tpl in default_templates().entries:
        for w in tokenize_text(tpl.template):
            if w.startswith("{") or not w.isalpha():
                continue
            if w.lower() not in LEX:
                missing.add(w)
    assert not missing, sorted(missing)


def test_lexicon_tags_are_grammar_categories():
    grammar = default_grammar()
    used = {t for e in LEX.entries.values() for t, _ in e.tags}
    assert used <= grammar.categories


# ---------------------------------------------------------------------------
# properties

contexts = st.one_of(st.none(), st.sampled_from(sorted(ALL_TAGS)))
known_words = st.sampled_from(sorted(LEX.entries))
any_words = st.one_of(known_words, st.text(min_size=1, max_size=12))


@given(any_words, contexts)
def test_tag_word_is_total(word, left):
    tag = LEX.tag_word(word.lower(), left)
    assert tag in ALL_TAGS


@given(any_words, contexts)
def test_tag_word_is_deterministic(word, left):
    assert LEX.tag_word(word.lower(), left) == LEX.tag_word(word.lower(), left)


@given(known_words, contexts)
def test_tags_stay_inside_the_entry(word, left):
    # a context rule may pick among a word's readings but never invent a new one
    tag = LEX.tag_word(word, left)
    assert tag in LEX.lookup(word).tag_set
    assert tag in default_grammar().categories
