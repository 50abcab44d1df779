import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tokfair.corpus import ParallelCorpus
from tokfair.errors import ConfigError, DataError, EmptyStatisticError, FormatError, UndefinedRatioError
from tokfair.info_parity import (
    NLLRecord,
    aggregate_ip,
    compute_ip,
    corpus_ip,
    corpus_ip_from_records,
    format_nll_records,
    ingest_external_nll,
    parse_nll_lines,
    score_nll,
    train_ngram,
    train_scorers,
)


def test_unigram_counts():
    s = train_ngram(b"aaaa", order=0, alpha=1)
    assert s.contexts() == {b"": {ord("a"): 4}}


def test_bigram_contexts():
    s = train_ngram(b"abab", order=1)
    assert s.contexts() == {b"a": {ord("b"): 2}, b"b": {ord("a"): 1}}


def test_empty_text_is_uniform():
    s = train_ngram(b"", order=0)
    assert s.prob(b"", 0) == 1 / 256
    with pytest.warns(UserWarning):
        train_ngram(b"", order=2)


def test_score_examples():
    s = train_ngram(b"aaaa", order=0, alpha=1)
    assert score_nll(s, b"") == 0.0
    expected = -math.log2(5 / 260)
    assert score_nll(s, b"a") == pytest.approx(expected, abs=1e-12)
    assert round(expected, 3) == 5.700
    uniform = train_ngram(b"", order=0)
    assert score_nll(uniform, bytes(range(8))) == 64.0


def test_score_accepts_str():
    s = train_ngram("héllo", order=1)
    assert score_nll(s, "héllo") == score_nll(s, "héllo".encode())


def test_leading_bytes_use_truncated_context():
    s = train_ngram(b"abcabcabc", order=2)
    # first two positions have no stored context, so they cost 8 bits each
    nll_first_two = score_nll(s, b"ab")
    assert nll_first_two == 16.0


def test_normalization():
    rng = random.Random(3)
    text = bytes(rng.choice(b"abc \xd0\xb0") for _ in range(2000))
    s = train_ngram(text, order=2)
    for _ in range(50):
        ctx = bytes(rng.choice(b"abc \xd0\xb0\xff") for _ in range(2))
        assert math.fsum(s.prob(ctx, b) for b in range(256)) == pytest.approx(1.0, abs=1e-12)


@given(st.binary(max_size=200), st.binary(max_size=200))
def test_unigram_additivity(x, y):
    s = train_ngram(b"the quick brown fox", order=0)
    assert score_nll(s, x + y) == pytest.approx(score_nll(s, x) + score_nll(s, y), rel=1e-12, abs=1e-9)


def test_bad_parameters():
    with pytest.raises(ValueError):
        train_ngram(b"a", alpha=0)
    with pytest.raises(ValueError):
        train_ngram(b"a", order=7)


def test_compute_ip_examples():
    assert compute_ip(37.5, 37.5) == 1.0
    assert compute_ip(100, 200) == 0.5
    with pytest.raises(UndefinedRatioError):
        compute_ip(10, 0)


def test_aggregate_hand_example():
    st_ = aggregate_ip("x", [4, 6], [8, 12])
    assert st_.corpus_ip == 0.5
    assert st_.mean_ip == 0.5


def test_zero_target_lines_skipped():
    st_ = aggregate_ip("x", [4, 6, 3], [8, 0, 6])
    assert (st_.n_used, st_.n_skipped, st_.corpus_ip) == (2, 1, 0.5)
    with pytest.raises(EmptyStatisticError):
        aggregate_ip("x", [1], [0])


@pytest.mark.parametrize("c", [0.5, 3, 1e6])
def test_scale_invariance(c):
    rng = random.Random(int(c))
    ref = [rng.uniform(10, 200) for _ in range(40)]
    lang = [rng.uniform(10, 200) for _ in range(40)]
    a = aggregate_ip("x", ref, lang)
    b = aggregate_ip("x", [v * c for v in ref], [v * c for v in lang])
    assert abs(a.corpus_ip - b.corpus_ip) < 1e-12
    assert abs(a.mean_ip - b.mean_ip) < 1e-12


def test_corpus_ip_self_parity(fixture_corpus):
    scorers = train_scorers({c: "\n".join(fixture_corpus[c]) for c in fixture_corpus.codes})
    st_ = corpus_ip(scorers, fixture_corpus, "eng_Latn")
    assert st_.corpus_ip == 1.0 and st_.mean_ip == 1.0
    with pytest.raises(ConfigError):
        corpus_ip({"eng_Latn": scorers["eng_Latn"]}, fixture_corpus, "deu_Latn")


def test_equal_byte_budget():
    scorers = train_scorers({"a": b"x" * 100, "b": b"y" * 30}, order=0)
    assert sum(scorers["a"].totals.values()) == sum(scorers["b"].totals.values()) == 30


def test_less_training_data_costs_more(fixture_corpus):
    text = "\n".join(fixture_corpus["deu_Latn"][:40]).encode()
    held_out = "\n".join(fixture_corpus["deu_Latn"][40:]).encode()
    full = score_nll(train_ngram(text, order=2), held_out)
    rng = random.Random(0)
    truncated = []
    for _ in range(10):
        cut = rng.randint(len(text) // 10, len(text) // 2)
        truncated.append(score_nll(train_ngram(text[:cut], order=2), held_out))
    assert math.fsum(truncated) / len(truncated) >= full


# -- external NLL files --------------------------------------------------------


def test_ingest_and_hand_ratio(data_dir):
    recs = ingest_external_nll(data_dir / "nll" / "toy_nll.tsv")
    assert len(recs) == 11
    st_ = corpus_ip_from_records(recs, "eng_Latn", "deu_Latn")
    assert st_.corpus_ip == pytest.approx((120.5 + 98.25 + 143.0 + 110.75) / (131.0 + 104.5 + 150.25 + 119.0),
                                          abs=1e-15)
    partial = corpus_ip_from_records(recs, "eng_Latn", "rus_Cyrl")
    assert (partial.n_used, partial.n_skipped) == (3, 1)


def test_three_records():
    recs = parse_nll_lines(["# base=bits", "eng_Latn\t0\t1.5", "deu_Latn\t0\t2", "hin_Deva\t0\t3"])
    assert [r.nll_bits for r in recs] == [1.5, 2.0, 3.0]


def test_nats_converted():
    recs = parse_nll_lines(["# base=nats", "eng_Latn\t0\t" + repr(math.log(2) * 10)])
    assert recs[0].nll_bits == pytest.approx(10.0, abs=1e-12)


def test_bad_records():
    with pytest.raises(DataError):
        parse_nll_lines(["# base=bits", "eng_Latn\t0\t-1"])
    with pytest.raises(DataError):
        parse_nll_lines(["# base=bits", "eng_Latn\t0\tnan"])
    with pytest.raises(FormatError):
        parse_nll_lines(["eng_Latn\t0\t1"])
    with pytest.raises(FormatError):
        parse_nll_lines(["# base=bits", "eng_Latn 0 1"])
    recs = [NLLRecord("eng_Latn", 0, 1.0), NLLRecord("eng_Latn", 0, 2.0)]
    with pytest.raises(DataError):
        corpus_ip_from_records(recs, "eng_Latn", "eng_Latn")
    with pytest.raises(DataError):
        corpus_ip_from_records([NLLRecord("eng_Latn", 9, 1.0)], "eng_Latn", "eng_Latn", n_lines=3)


def test_format_roundtrip():
    recs = [NLLRecord("eng_Latn", 0, 0.1 + 0.2), NLLRecord("deu_Latn", 0, 7.0)]
    assert parse_nll_lines(format_nll_records(recs).splitlines()) == recs


def test_identical_streams_give_exact_one():
    corpus = ParallelCorpus.from_lists("eng_Latn", {"eng_Latn": ["x"], "deu_Latn": ["y"]})
    recs = [NLLRecord(c, 0, 0.1 + 0.7) for c in corpus.codes]
    assert corpus_ip_from_records(recs, "eng_Latn", "deu_Latn").corpus_ip == 1.0
