from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compare_gen.bucketing import FrequencyBucketer, build_frequency_bucketer, build_label_bucketer
from compare_gen.word_accuracy import (WordCounts, WordExample, bucket_example_sentences, likelihood_report,
                                       rank_by_difference, source_word_accuracy_report, word_accuracy_report)
from oracles import brute_frequency_bucket, brute_word_counts
from strategies import SMALL_ALPHABET, parallel_corpora


def toks(text):
    return tuple(text.split())


def single_bucket():
    return FrequencyBucketer(Counter(), cutoffs=[1])


def test_worked_example():
    rep = word_accuracy_report([toks("a b b c")], [[toks("b b d")]], single_bucket())
    wc = rep[0].systems[0]
    assert wc.as_tuple() == (2, 3, 4)
    assert wc.precision == pytest.approx(0.667, abs=5e-4)
    assert wc.recall == 0.5
    assert wc.f_measure == pytest.approx(0.571, abs=5e-4)


WORD_COUNT_CASES = [
    (WordCounts(0, 0, 0), 0.0, 0.0, 0.0),
    (WordCounts(0, 3, 0), 0.0, 0.0, 0.0),
    (WordCounts(2, 2, 2), 1.0, 1.0, 1.0),
    (WordCounts(1, 2, 4), 0.5, 0.25, 1 / 3),
]


@pytest.mark.parametrize("wc,p,r,f", WORD_COUNT_CASES)
def test_word_count_statistics(wc, p, r, f):
    assert (wc.statistic("prec"), wc.statistic("rec"), wc.statistic("fmeas")) == pytest.approx((p, r, f))


def test_unknown_statistic():
    with pytest.raises(ValueError, match="unknown word accuracy statistic"):
        WordCounts().statistic("bleu")


def test_identity_gives_perfect_buckets():
    ref = (toks("a b c a"), toks("d e"))
    rep = word_accuracy_report(ref, [ref], build_frequency_bucketer((toks("a a b"),)))
    for bucket in rep:
        wc = bucket.systems[0]
        if wc.ref_count:
            assert wc.f_measure == wc.precision == wc.recall == 1.0


def test_label_matching_uses_word_and_label():
    ref, sys = [toks("run run")], [[toks("run run")]]
    bucketer = build_label_bucketer(["VB", "VBZ"])
    rep = word_accuracy_report(ref, sys, bucketer, ref_labels=[("VB", "VB")], sys_labels_list=[[("VB", "VBZ")]])
    by_label = {b.bucket_label: b.systems[0].as_tuple() for b in rep}
    assert by_label == {"VB": (1, 1, 2), "VBZ": (0, 1, 0), "other": (0, 0, 0)}


def test_label_bucketing_needs_labels():
    with pytest.raises(ValueError, match="reference label files"):
        word_accuracy_report([toks("a")], [[toks("a")]], build_label_bucketer(["NN"]))
    with pytest.raises(ValueError, match="output label files"):
        word_accuracy_report([toks("a")], [[toks("a")]], build_label_bucketer(["NN"]), ref_labels=[("NN",)])


def test_label_count_mismatch():
    with pytest.raises(ValueError, match=r"sentence 0 \(1 vs 2\)"):
        word_accuracy_report([toks("a b")], [[toks("a")]], build_label_bucketer(),
                             ref_labels=[("NN",)], sys_labels_list=[[("NN",)]])


def test_base_form_verbs_shape():
    # one system gets base-form verbs right, the other conjugated ones
    ref = [toks("they go home"), toks("she goes home")]
    ref_tags = [("PRP", "VB", "NN"), ("PRP", "VBZ", "NN")]
    pbmt = [toks("they go home"), toks("she go home")]
    pbmt_tags = [("PRP", "VB", "NN"), ("PRP", "VB", "NN")]
    nmt = [toks("they goes home"), toks("she goes home")]
    nmt_tags = [("PRP", "VBZ", "NN"), ("PRP", "VBZ", "NN")]
    rep = word_accuracy_report(ref, [pbmt, nmt], build_label_bucketer(["VB", "VBZ"]),
                               ref_labels=ref_tags, sys_labels_list=[pbmt_tags, nmt_tags])
    by_label = {b.bucket_label: [wc.f_measure for wc in b.systems] for b in rep}
    assert by_label["VB"][0] > by_label["VB"][1]
    assert by_label["VBZ"][1] > by_label["VBZ"][0]


SOURCE_CASES = [
    # (src, ref, sys, ref_align, sys_align, expected per source word)
    ([["X"]], [["x"]], [["x"]], [{(0, 0)}], [{(0, 0)}], {"X": (1, 1, 1)}),
    ([["X"]], [["x"]], [["y"]], [{(0, 0)}], [{(0, 0)}], {"X": (0, 1, 1)}),
    ([["X", "Y"]], [["x", "y"]], [["x"]], [{(0, 0), (1, 1)}], [{(0, 0)}], {"X": (1, 1, 1), "Y": (0, 0, 1)}),
    # source token without a reference alignment is skipped entirely
    ([["X", "Y"]], [["x"]], [["x", "y"]], [{(0, 0)}], [{(0, 0), (1, 1)}], {"X": (1, 1, 1), "Y": (0, 0, 0)}),
    # one-to-many alignments compare multisets
    ([["X"]], [["a", "a", "b"]], [["a", "b", "b"]], [{(0, 0), (0, 1), (0, 2)}], [{(0, 0), (0, 1), (0, 2)}],
     {"X": (2, 3, 3)}),
]


@pytest.mark.parametrize("src,ref,sys,ref_align,sys_align,expected", SOURCE_CASES)
def test_source_word_accuracy(src, ref, sys, ref_align, sys_align, expected):
    # one bucket per source word: give each a distinct training frequency
    counts = Counter({"X": 1, "Y": 2})
    bucketer = FrequencyBucketer(counts, cutoffs=[1, 2, 3])
    rep = source_word_accuracy_report(src, ref, [sys], ref_align, [sys_align], bucketer)
    got = {w: rep[bucketer.bucket(w)].systems[0].as_tuple() for w in expected}
    assert got == expected


def test_source_with_labels():
    align = [{(0, 0), (1, 1)}]
    rep = source_word_accuracy_report([["X", "Y"]], [["x", "y"]], [[["x", "z"]]], align, [align],
                                      build_label_bucketer(["N"]), src_labels=[("N", "V")])
    assert {b.bucket_label: b.systems[0].as_tuple() for b in rep} == {"N": (1, 1, 1), "other": (0, 1, 1)}


def test_source_alignment_out_of_bounds():
    with pytest.raises(ValueError, match="out of bounds"):
        source_word_accuracy_report([["X"]], [["x"]], [["x"]], [{(0, 3)}], [{(0, 0)}], single_bucket())


LIKELIHOOD_CASES = [
    ([toks("a b")], [((-1.0, -1.0),)], {"0": -1.0}),
    ([toks("a b")], [((-1.0, -3.0),)], {"0": -2.0}),
]


@pytest.mark.parametrize("ref,lls,expected", LIKELIHOOD_CASES)
def test_likelihood_means(ref, lls, expected):
    rep = likelihood_report(ref, lls, FrequencyBucketer(Counter(), cutoffs=[1]))
    got = {st.bucket_label: st.mean_log_likelihood for st in rep[0] if st.token_count}
    assert got == expected


def test_likelihood_empty_bucket():
    rep = likelihood_report([toks("a")], [((-0.5,),)], FrequencyBucketer(Counter(), cutoffs=[1]))
    empty = rep[0][1]
    assert empty.token_count == 0 and empty.mean_log_likelihood is None


def test_likelihood_shape_mismatch():
    with pytest.raises(ValueError, match="count mismatch at sentence 0"):
        likelihood_report([toks("a b")], [((-1.0,),)], single_bucket())


def test_bucket_examples_prefer_rare_word_match():
    train = (toks("the the the the cat"),)
    bucketer = build_frequency_bucketer(train, cutoffs=[1, 2])
    ref = [toks("the cat sat"), toks("the dog"), toks("the sat")]
    sys1 = [toks("the cat sat"), toks("a dog"), toks("the sat")]
    sys2 = [toks("the cat"), toks("the cat"), toks("the sat")]
    top, bottom = bucket_example_sentences(ref, [sys1, sys2], bucketer, "0", k=2)
    # bucket "0" holds {sat, dog, a}; sentence 0 is 1.0 vs 0.0
    assert top[0] == WordExample(0, (1.0, 0.0))
    assert bottom[0].difference <= 0


def test_bucket_examples_ties_and_clamping():
    ref = [toks("a b"), toks("c"), toks("d d")]
    top, bottom = bucket_example_sentences(ref, [ref, ref], single_bucket(), "0", k=10)
    assert [e.index for e in top] == [0, 1, 2] == [e.index for e in bottom]
    assert all(e.difference == 0 for e in top)


BUCKET_EXAMPLE_ERRORS = [
    ("zzz", 2, "unknown bucket"),
    ("0", 1, "exactly two systems"),
]


@pytest.mark.parametrize("label,n_sys,message", BUCKET_EXAMPLE_ERRORS)
def test_bucket_example_errors(label, n_sys, message):
    ref = [toks("a")]
    with pytest.raises(ValueError, match=message):
        bucket_example_sentences(ref, [ref] * n_sys, single_bucket(), label)


def test_rank_by_difference_k1():
    examples = [WordExample(0, (5.0, 0.0)), WordExample(1, (1.0, 1.0)), WordExample(2, (0.0, 5.0))]
    top, bottom = rank_by_difference(examples, 1)
    assert [e.index for e in top] == [0] and [e.index for e in bottom] == [2]


def _freq_setup(train):
    bucketer = build_frequency_bucketer(train, cutoffs=[1, 2, 3])
    counts = Counter(t for s in train for t in s)
    return bucketer, lambda word, label: brute_frequency_bucket(counts[word], [1, 2, 3])


def _as_dict(report, system=0):
    return {i: list(b.systems[system].as_tuple()) for i, b in enumerate(report) if any(b.systems[system].as_tuple())}


@settings(max_examples=200, deadline=None)
@given(parallel_corpora(n_systems=1, max_sents=5, max_len=8),
       st.lists(st.sampled_from(SMALL_ALPHABET), min_size=1, max_size=10))
def test_matches_brute_force_oracle(corpora, train_words):
    ref, (sys,) = corpora
    bucketer, bucket_of = _freq_setup((tuple(train_words),))
    assert _as_dict(word_accuracy_report(ref, [sys], bucketer)) == brute_word_counts(ref, sys, bucket_of)


@settings(max_examples=200, deadline=None)
@given(parallel_corpora(n_systems=1, max_sents=5, max_len=8), st.randoms(use_true_random=False))
def test_label_matches_brute_force_oracle(corpora, rnd):
    ref, (sys,) = corpora
    ref_labels = [tuple(rnd.choice("NVJ") for _ in s) for s in ref]
    sys_labels = [tuple(rnd.choice("NVJ") for _ in s) for s in sys]
    bucketer = build_label_bucketer(["N", "V"])
    index = {"N": 0, "V": 1, "J": 2}
    rep = word_accuracy_report(ref, [sys], bucketer, ref_labels=ref_labels, sys_labels_list=[sys_labels])
    oracle = brute_word_counts(ref, sys, lambda w, lab: index[lab], ref_labels, sys_labels)
    assert _as_dict(rep) == oracle


@settings(max_examples=200, deadline=None)
@given(parallel_corpora(n_systems=2, max_sents=6, max_len=8))
def test_conservation_and_transpose(corpora):
    ref, (a, b) = corpora
    bucketer, _ = _freq_setup((("a", "a", "b"),))
    rep = word_accuracy_report(ref, [a, b], bucketer)
    swapped = word_accuracy_report(ref, [b, a], bucketer)
    for sys_i, sys in enumerate((a, b)):
        totals = [sum(bk.systems[sys_i].as_tuple()[k] for bk in rep) for k in range(3)]
        matches = sum(sum((Counter(r) & Counter(s)).values()) for r, s in zip(ref, sys))
        assert totals == [matches, sum(map(len, sys)), sum(map(len, ref))]
    for x, y in zip(rep, swapped):
        assert [wc.as_tuple() for wc in x.systems] == [wc.as_tuple() for wc in reversed(y.systems)]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
def test_f_measure_bounds(m, extra_sys, extra_ref):
    wc = WordCounts(m, m + extra_sys, m + extra_ref)
    assert 0.0 <= wc.f_measure <= 1.0
    assert (wc.f_measure == 1.0) == (m > 0 and extra_sys == 0 and extra_ref == 0)
