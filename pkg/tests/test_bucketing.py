from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compare_gen.bucketing import (DEFAULT_LENGTHDIFF_CUTOFFS, OTHER_LABEL, FrequencyBucketer, assign_sentence,
                                   build_frequency_bucketer, build_label_bucketer, build_sentence_bucketer,
                                   interval_index, interval_labels)
from compare_gen.metrics import LengthScorer
from oracles import brute_frequency_bucket

TRAIN = (("a",) * 7 + ("b",) + ("c",) * 1000 + ("d",) * 3,)

FREQ_CASES = [
    ("zzz", "0"),
    ("b", "1"),
    ("d", "3-4"),
    ("a", "5-9"),
    ("c", "≥1000"),
]


@pytest.mark.parametrize("word,label", FREQ_CASES)
def test_frequency_buckets(word, label):
    b = build_frequency_bucketer(TRAIN)
    assert b.bucket_labels[b.bucket(word)] == label


def test_default_frequency_labels():
    b = build_frequency_bucketer(TRAIN)
    assert b.bucket_labels == ["0", "1", "2", "3-4", "5-9", "10-99", "100-999", "≥1000"]


def test_custom_frequency_cutoffs():
    b = build_frequency_bucketer(TRAIN, cutoffs=[2, 10])
    assert b.bucket_labels == ["0-1", "2-9", "≥10"]
    assert [b.bucket(w) for w in "bac"] == [0, 1, 2]


FREQ_ERRORS = [
    ((), (1, 2), "no tokens"),
    (((),), (1, 2), "no tokens"),
    (TRAIN, (0, 2), "first frequency cutoff"),
    (TRAIN, (2, 2), "strictly increasing"),
    (TRAIN, (), "at least one cutoff"),
]


@pytest.mark.parametrize("train,cutoffs,message", FREQ_ERRORS)
def test_frequency_errors(train, cutoffs, message):
    with pytest.raises(ValueError, match=message):
        build_frequency_bucketer(train, cutoffs)


def test_frequency_is_case_sensitive_and_test_independent():
    b = build_frequency_bucketer((("The", "the", "the"),))
    assert b.counts["the"] == 2 and b.counts["The"] == 1
    assert b.bucket("the") == b.bucket("the", "NN") == b.bucket("the", "VB")


def test_label_bucketer_with_set():
    b = build_label_bucketer(["CC", "DT", "IN", "JJ", "NN"])
    assert b.bucket_labels == ["CC", "DT", "IN", "JJ", "NN", OTHER_LABEL]
    assert b.bucket_labels[b.bucket("cat", "NN")] == "NN"
    assert b.bucket_labels[b.bucket("$", "SYM")] == OTHER_LABEL
    assert b.key("cat", "NN") == ("cat", "NN")


def test_label_bucketer_first_appearance_order():
    b = build_label_bucketer()
    b.observe([(("VB", "NN"), ("NN", "DT"))])
    assert b.bucket_labels == ["VB", "NN", "DT"]
    assert b.bucket("x", "JJ") == 3
    assert b.bucket_labels == ["VB", "NN", "DT", "JJ"]


LABEL_ERRORS = [
    ([], "must not be empty"),
    (["NN", "NN"], "duplicates"),
]


@pytest.mark.parametrize("label_set,message", LABEL_ERRORS)
def test_label_set_errors(label_set, message):
    with pytest.raises(ValueError, match=message):
        build_label_bucketer(label_set)


def test_label_required():
    with pytest.raises(ValueError, match="no label"):
        build_label_bucketer(["NN"]).bucket("cat")


SENTENCE_CASES = [
    ("length", 25, 0, "[20,30)"),
    ("length", 0, 3, "<10"),
    ("length", 60, 0, "≥60"),
    ("lengthdiff", 10, 8, "[-2,-1)"),
    ("lengthdiff", 5, 5, "[0,1)"),
    ("lengthdiff", 0, 30, "≥20"),
    ("lengthdiff", 30, 0, "<-20"),
]


@pytest.mark.parametrize("kind,ref_len,sys_len,label", SENTENCE_CASES)
def test_sentence_buckets(kind, ref_len, sys_len, label):
    b = build_sentence_bucketer(kind)
    idx = assign_sentence(b, ("w",) * ref_len, ("w",) * sys_len)
    assert b.bucket_labels[idx] == label


def test_score_bucketer_defaults_to_sentence_bleu():
    b = build_sentence_bucketer("score")
    sent = tuple("a b c d e".split())
    assert b.bucket_labels[b.assign(sent, sent)] == "≥90"
    assert b.bucket_labels[b.assign(sent, ("x",))] == "<10"
    assert b.describe() == "score (sentbleu)"
    assert b.per_system


def test_score_bucketer_custom_scorer():
    b = build_sentence_bucketer("score", cutoffs=[50, 150], scorer=LengthScorer())
    assert b.bucket_labels == ["<50", "[50,150)", "≥150"]
    assert b.assign(("a", "b"), ("a", "b", "c")) == 2


def test_default_lengthdiff_labels():
    b = build_sentence_bucketer("lengthdiff")
    assert b.cutoffs == DEFAULT_LENGTHDIFF_CUTOFFS
    assert len(b.bucket_labels) == len(DEFAULT_LENGTHDIFF_CUTOFFS) + 1
    assert not build_sentence_bucketer("length").per_system


SENTENCE_ERRORS = [
    ("length", [10, 5], "strictly increasing"),
    ("width", None, "unknown sentence bucket type"),
]


@pytest.mark.parametrize("kind,cutoffs,message", SENTENCE_ERRORS)
def test_sentence_bucketer_errors(kind, cutoffs, message):
    with pytest.raises(ValueError, match=message):
        build_sentence_bucketer(kind, cutoffs or [1])


def test_interval_labels_format():
    assert interval_labels([0.5, 1, 2.25]) == ["<0.5", "[0.5,1)", "[1,2.25)", "≥2.25"]


cutoff_lists = st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=12, unique=True).map(sorted)


def _contains(label_idx, cutoffs, v):
    lo = cutoffs[label_idx - 1] if label_idx > 0 else float("-inf")
    hi = cutoffs[label_idx] if label_idx < len(cutoffs) else float("inf")
    return lo <= v < hi


@settings(max_examples=300)
@given(cutoff_lists, st.floats(-2e6, 2e6, allow_nan=False))
def test_intervals_disjoint_and_cover(cutoffs, v):
    idx = interval_index(cutoffs, v)
    assert 0 <= idx <= len(cutoffs)
    containing = [i for i in range(len(cutoffs) + 1) if _contains(i, cutoffs, v)]
    assert containing == [idx]


@settings(max_examples=300)
@given(cutoff_lists)
def test_cutoffs_are_left_closed(cutoffs):
    for i, c in enumerate(cutoffs):
        assert interval_index(cutoffs, c) == i + 1


@settings(max_examples=200)
@given(st.lists(st.integers(1, 2000), min_size=1, max_size=8, unique=True).map(sorted), st.integers(0, 3000))
def test_frequency_bucket_matches_oracle(cutoffs, freq):
    b = FrequencyBucketer(Counter({"w": freq}), cutoffs)
    assert b.bucket("w") == brute_frequency_bucket(freq, cutoffs)
