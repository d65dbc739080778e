import math

import pytest
from hypothesis import given, strategies as st

from solnl.errors import EmptyBins, EmptyCorpus, EmptySentence, LengthMismatch, MetricError
from solnl.metrics import (
    EvalRecord, SynonymTable, bin_spread, binned_report, bleu_n, code_tokens, corpus_scores,
    count_code_tokens, lcs_length, load_synonyms, meteor, normalize, rouge_l,
)

from oracles import lcs_brute

MONEY = SynonymTable.from_pairs([("money", ["funds"])])


# ---------------------------------------------------------------------------
# examples

def test_bleu_brevity_example():
    assert bleu_n(["the cat sat"], ["the cat sat down"], 1) == pytest.approx(0.7165313, abs=1e-6)
    assert bleu_n(["the cat sat"], ["the cat sat down"], 1) == pytest.approx(math.exp(1 - 4 / 3))


def test_bleu_clipping():
    # "the" appears once in the reference, so only one of three counts
    assert bleu_n(["the the the"], ["the cat sat"], 1) == pytest.approx(1 / 3)


def test_bleu_identity_every_order():
    sents = ["transfer amount to user", "return the balance of the owner"]
    for n in (1, 2, 3, 4):
        assert bleu_n(sents, sents, n) == 1.0


def test_bleu_order_without_ngrams_is_zero():
    assert bleu_n(["a b"], ["a b"], 3) == 0.0


def test_rouge_examples():
    assert rouge_l("a b c", "a x b y") == 0.5
    assert rouge_l("same words here", "same words here") == 1.0


def test_rouge_f_measure():
    # lcs 2, precision 2/3, recall 2/4
    p, r = 2 / 3, 2 / 4
    assert rouge_l("a b c", "a x b y", f_measure=True) == pytest.approx(2 * p * r / (p + r))


def test_meteor_synonym_example():
    assert meteor("transfer money", "transfer funds", MONEY) == pytest.approx(0.9375, abs=1e-6)
    assert meteor("transfer money", "transfer funds") == pytest.approx(
        (0.5 * 0.5 / (0.9 * 0.5 + 0.1 * 0.5)) * (1 - 0.5 * 1.0 ** 3))


def test_meteor_identity_ten_words():
    s = " ".join(f"w{i}" for i in range(10))
    assert meteor(s, s) == pytest.approx(0.9995, abs=1e-6)


def test_meteor_exact_beats_synonym():
    # "funds" must align exactly with "funds", leaving "money" to its synonym
    table = SynonymTable.from_pairs([("money", ["funds"])])
    assert meteor("funds money", "funds money", table) == pytest.approx(1 - 0.5 / 8)


def test_meteor_no_match():
    assert meteor("alpha", "beta") == 0.0


@pytest.mark.parametrize("snippet, count", [
    ("x = 1;", 4),
    ("msgSender", 2),
    ("a", 1),
    ("balances[msg.sender] += amount; // note", 9),
    ('require(x >= 10, "too low");', 9),
])
def test_count_code_tokens(snippet, count):
    assert count_code_tokens(snippet) == count


def test_code_tokens_split_snake_and_camel():
    assert code_tokens("total_supply + maxValue") == ["total", "supply", "+", "max", "value"]


def test_normalize_drops_punctuation():
    assert normalize("Return the owner's keccak-256 hash, 0.5 ether.") == [
        "return", "the", "owner's", "keccak-256", "hash", "0.5", "ether"]


def test_synonym_file(tmp_path):
    p = tmp_path / "syn.tsv"
    p.write_text("# comment\nmoney\tfunds, cash\n", encoding="utf-8")
    table = load_synonyms(p)
    assert table.synonyms("cash", "money")
    assert not table.synonyms("cash", "funds")
    p.write_text("money funds\n", encoding="utf-8")
    with pytest.raises(MetricError):
        load_synonyms(p)


# ---------------------------------------------------------------------------
# errors

def test_metric_errors():
    with pytest.raises(LengthMismatch):
        bleu_n(["a"], ["a", "b"], 1)
    with pytest.raises(EmptyCorpus):
        bleu_n([], [], 1)
    with pytest.raises(MetricError):
        bleu_n(["a"], ["a"], 5)
    with pytest.raises(EmptySentence):
        rouge_l("", "a")
    with pytest.raises(EmptySentence):
        meteor("a", "...")
    with pytest.raises(MetricError):
        count_code_tokens("   ")
    with pytest.raises(EmptyCorpus):
        binned_report([])
    with pytest.raises(EmptyBins):
        binned_report([EvalRecord("a", "a", 1)], length_bins=[])
    with pytest.raises(MetricError):
        binned_report([EvalRecord("a", "a", 1)], length_bins=[0, 10, 5])


# ---------------------------------------------------------------------------
# binned reports

RECORDS = [
    EvalRecord("transfer the amount to user", "transfer amount to the user", 4, 20_000),
    EvalRecord("return the balance", "return balance of owner", 5, None),
    EvalRecord("check the sender is the owner", "confirm sender equals owner", 14, 90_000),
    EvalRecord("emit the event", "emit transfer event", 17, 95_000),
]


def test_single_bin_equals_corpus():
    report = binned_report(RECORDS, length_bins=[0], gas_bins=[0])
    (length_bin,) = report.by_kind("length")
    assert length_bin.scores == report.corpus
    assert length_bin.n_records == 4
    (gas_bin,) = report.by_kind("gas")
    # the record without gas is left out of the gas bins only
    assert gas_bin.n_records == 3


def test_two_disjoint_bins():
    report = binned_report(RECORDS, length_bins=[0, 10], gas_bins=[0])
    low, high = report.by_kind("length")
    assert (low.low, low.high, high.low, high.high) == (0, 10, 10, math.inf)
    assert low.n_records == high.n_records == 2
    assert low.scores == corpus_scores(RECORDS[:2])
    assert high.scores == corpus_scores(RECORDS[2:])
    assert low.label == "length[0,10)"
    assert high.label == "length[10,inf)"


def test_bin_boundary_is_half_open():
    recs = [EvalRecord("a", "a", 10), EvalRecord("b", "c", 9)]
    low, high = binned_report(recs, length_bins=[0, 10], gas_bins=[0]).by_kind("length")
    assert low.scores["bleu1"] == 0.0 and high.scores["bleu1"] == 1.0


def test_records_below_first_bin_are_skipped():
    recs = [EvalRecord("a", "a", 3), EvalRecord("b", "b", 12)]
    report = binned_report(recs, length_bins=[5], gas_bins=[0])
    assert [b.n_records for b in report.by_kind("length")] == [1]


def test_spread_and_outputs():
    report = binned_report(RECORDS, length_bins=[0, 10], gas_bins=[0])
    low, high = report.by_kind("length")
    vals = [low.scores["bleu1"], high.scores["bleu1"]]
    assert bin_spread(report) == pytest.approx((max(vals) - min(vals)) / max(vals))
    with pytest.raises(EmptyBins):
        bin_spread(report, min_records=5)
    csv_text = report.to_csv()
    assert csv_text.splitlines()[0] == "bin,metric,value,n_records"
    assert report.to_json()["bins"][1]["high"] is None


def test_default_bins_width():
    report = binned_report(RECORDS)
    assert [b.low for b in report.by_kind("length")] == [0, 10]


# ---------------------------------------------------------------------------
# properties

WORDS = ["the", "a", "user", "owner", "transfer", "amount", "to", "of", "is", "balance"]
sentence = st.lists(st.sampled_from(WORDS), min_size=1, max_size=10).map(" ".join)
corpus = st.lists(st.tuples(sentence, sentence), min_size=1, max_size=6)


@given(corpus)
def test_scores_are_bounded(pairs):
    cands, refs = zip(*pairs)
    for n in (1, 2, 3, 4):
        assert 0.0 <= bleu_n(cands, refs, n) <= 1.0
    for c, r in pairs:
        assert 0.0 <= rouge_l(c, r) <= 1.0
        assert 0.0 <= rouge_l(c, r, f_measure=True) <= 1.0
        assert 0.0 <= meteor(c, r, MONEY) <= 1.0


@given(st.lists(sentence, min_size=1, max_size=6))
def test_bleu1_identity(sents):
    assert bleu_n(sents, sents, 1) == 1.0
    assert all(rouge_l(s, s) == 1.0 for s in sents)


def test_bleu_order_monotonicity_has_counterexamples():
    # pooled clipped precision can grow with n even when BP is shared
    assert bleu_n(["a b a"], ["b a b"], 1) == pytest.approx(2 / 3)
    assert bleu_n(["a b a"], ["b a b"], 2) == 1.0


POOL = [
    "the user transfers the amount",
    "a user owns a balance",
    "transfer amount to owner",
    "the owner is the user",
    "balance of the user",
    "is the amount of a balance",
    "to the owner",
    "transfer",
    "amount of amount of amount",
    "user user owner owner",
    "the a the a the a the",
    "of to is of to is",
    "return the balance",
    "owner transfers balance to user",
    "the amount is the balance",
    "a b c d e f g",
    "g f e d c b a",
    "a c e g",
    "user is owner",
    "the balance of the owner is zero",
]


def test_rouge_matches_brute_force_on_pool():
    assert len(POOL) == 20
    for c in POOL:
        for r in POOL:
            cw, rw = normalize(c), normalize(r)
            assert len(cw) <= 7 and len(rw) <= 7
            assert rouge_l(c, r) == lcs_brute(cw, rw) / len(rw)


@given(st.lists(st.sampled_from("abcd"), max_size=7), st.lists(st.sampled_from("abcd"), max_size=7))
def test_lcs_matches_brute_force(a, b):
    assert lcs_length(a, b) == lcs_brute(a, b)


@given(st.lists(st.sampled_from(WORDS), min_size=1, max_size=30))
def test_meteor_identity_formula(words):
    s = " ".join(words)
    m = len(words)
    assert meteor(s, s) == pytest.approx(1 - 0.5 * (1 / m) ** 3, rel=1e-12)


records = st.builds(
    EvalRecord, sentence, sentence, st.integers(1, 40),
    st.one_of(st.none(), st.integers(0, 200_000)))


@given(st.lists(records, min_size=1, max_size=8))
def test_pooling_bins_back_gives_corpus(recs):
    report = binned_report(recs, length_bins=[0, 10, 20], gas_bins=[0, 50_000])
    regrouped = []
    for b in report.by_kind("length"):
        regrouped.extend(r for r in recs if b.low <= r.snippet_tokens < b.high)
    assert len(regrouped) == len(recs)
    rescored = corpus_scores(regrouped)
    for n in (1, 2, 3, 4):
        assert rescored[f"bleu{n}"] == pytest.approx(report.corpus[f"bleu{n}"], rel=1e-12)
    assert sum(b.n_records for b in report.by_kind("gas")) == sum(
        1 for r in recs if r.gas_gwei is not None)
