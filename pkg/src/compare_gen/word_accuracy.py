"""Bucketed word accuracy, source-side accuracy and log-likelihood aggregation."""

from collections import Counter
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from compare_gen.bucketing import LabelBucketer, WordBucketer
from compare_gen.corpus_io import (AlignmentCorpus, LabelCorpus, LikelihoodCorpus, TokenCorpus,
                                   validate_parallel)


@dataclass
class WordCounts:
    matches: int = 0
    sys_count: int = 0
    ref_count: int = 0

    @property
    def precision(self) -> float:
        return self.matches / self.sys_count if self.sys_count else 0.0

    @property
    def recall(self) -> float:
        return self.matches / self.ref_count if self.ref_count else 0.0

    @property
    def f_measure(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0

    def add(self, matches: int, sys_count: int, ref_count: int) -> None:
        self.matches += matches
        self.sys_count += sys_count
        self.ref_count += ref_count

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.matches, self.sys_count, self.ref_count)

    def statistic(self, name: str) -> float:
        if name in ("f", "fmeas", "f_measure"):
            return self.f_measure
        if name in ("p", "prec", "precision"):
            return self.precision
        if name in ("r", "rec", "recall"):
            return self.recall
        raise ValueError(f"unknown word accuracy statistic {name!r}")


@dataclass
class BucketAccuracy:
    bucket_label: str
    systems: List[WordCounts] = field(default_factory=list)


@dataclass
class LikelihoodBucketStat:
    bucket_label: str
    token_count: int = 0
    total: float = 0.0

    @property
    def mean_log_likelihood(self) -> Optional[float]:
        return self.total / self.token_count if self.token_count else None


def _check_labels(bucketer, corpora, labels, what):
    if not bucketer.needs_labels:
        return
    if labels is None or any(lab is None for lab in labels):
        raise ValueError(f"label bucketing requires {what} label files")
    for corpus, labs in zip(corpora, labels):
        if len(corpus) != len(labs):
            raise ValueError(f"{what} labels cover {len(labs)} sentences, corpus has {len(corpus)}")
        for i, (s, l) in enumerate(zip(corpus, labs)):
            if len(s) != len(l):
                raise ValueError(f"{what} label count mismatch at sentence {i} ({len(l)} vs {len(s)})")
    if isinstance(bucketer, LabelBucketer):
        bucketer.observe(labels)


def _keys(sent, labels, bucketer) -> Counter:
    if labels is None:
        return Counter(bucketer.key(w) for w in sent)
    return Counter(bucketer.key(w, l) for w, l in zip(sent, labels))


def _key_bucket(bucketer, key):
    if isinstance(key, tuple):
        return bucketer.bucket(*key)
    return bucketer.bucket(key)


def sentence_word_counts(ref_keys: Counter, sys_keys: Counter, bucketer: WordBucketer):
    """Yield ``(bucket, matches, sys_count, ref_count)`` for every key in either sentence."""
    for key in ref_keys.keys() | sys_keys.keys():
        r, s = ref_keys.get(key, 0), sys_keys.get(key, 0)
        yield _key_bucket(bucketer, key), min(r, s), s, r


def word_accuracy_report(ref: TokenCorpus, sys_list: Sequence[TokenCorpus], bucketer: WordBucketer,
                         ref_labels: Optional[LabelCorpus] = None,
                         sys_labels_list: Optional[Sequence[LabelCorpus]] = None) -> List[BucketAccuracy]:
    """Clipped word matches per bucket and system.

    Matching works per sentence on word types (or ``(word, label)`` pairs for
    label bucketers), so each type earns ``min(ref count, output count)``
    matches.
    """
    validate_parallel([ref, *sys_list])
    _check_labels(bucketer, [ref], None if ref_labels is None else [ref_labels], "reference")
    _check_labels(bucketer, sys_list, sys_labels_list, "output")
    per_sys = []
    for si, sys in enumerate(sys_list):
        counts = {}
        sys_labels = sys_labels_list[si] if bucketer.needs_labels else None
        for i, (r, s) in enumerate(zip(ref, sys)):
            ref_keys = _keys(r, ref_labels[i] if bucketer.needs_labels else None, bucketer)
            sys_keys = _keys(s, sys_labels[i] if sys_labels is not None else None, bucketer)
            for b, m, sc, rc in sentence_word_counts(ref_keys, sys_keys, bucketer):
                counts.setdefault(b, WordCounts()).add(m, sc, rc)
        per_sys.append(counts)
    return [BucketAccuracy(label, [counts.get(b, WordCounts()) for counts in per_sys])
            for b, label in enumerate(bucketer.bucket_labels)]


def source_word_accuracy_report(src: TokenCorpus, ref: TokenCorpus, sys_list: Sequence[TokenCorpus],
                                ref_align: AlignmentCorpus, sys_align_list: Sequence[AlignmentCorpus],
                                bucketer: WordBucketer,
                                src_labels: Optional[LabelCorpus] = None) -> List[BucketAccuracy]:
    """Accuracy of translating each source word, through word alignments.

    For source position ``i`` the reference and output tokens aligned to it
    are compared as multisets. Source tokens with no reference alignment are
    skipped.
    """
    validate_parallel([src, ref, *sys_list])
    if len(sys_align_list) != len(sys_list):
        raise ValueError(f"{len(sys_align_list)} output alignments for {len(sys_list)} outputs")
    for name, al in [("reference", ref_align)] + [("output", a) for a in sys_align_list]:
        if len(al) != len(src):
            raise ValueError(f"{name} alignment covers {len(al)} sentences, source has {len(src)}")
    _check_labels(bucketer, [src], None if src_labels is None else [src_labels], "source")

    def aligned(align, tgt_sent, n_src):
        groups = [[] for _ in range(n_src)]
        for i, j in sorted(align):
            if i >= n_src or j >= len(tgt_sent):
                raise ValueError(f"alignment pair {i}-{j} out of bounds")
            groups[i].append(tgt_sent[j])
        return groups

    per_sys = []
    for sys, sys_align in zip(sys_list, sys_align_list):
        counts = {}
        for k, (src_sent, r, s) in enumerate(zip(src, ref, sys)):
            ref_groups = aligned(ref_align[k], r, len(src_sent))
            sys_groups = aligned(sys_align[k], s, len(src_sent))
            for i, word in enumerate(src_sent):
                if not ref_groups[i]:
                    continue
                label = src_labels[k][i] if bucketer.needs_labels else None
                b = bucketer.bucket(word, label)
                rg, sg = Counter(ref_groups[i]), Counter(sys_groups[i])
                counts.setdefault(b, WordCounts()).add(
                    sum((rg & sg).values()), len(sys_groups[i]), len(ref_groups[i]))
        per_sys.append(counts)
    return [BucketAccuracy(label, [counts.get(b, WordCounts()) for counts in per_sys])
            for b, label in enumerate(bucketer.bucket_labels)]


def likelihood_report(ref: TokenCorpus, likelihoods_list: Sequence[LikelihoodCorpus], bucketer: WordBucketer,
                      ref_labels: Optional[LabelCorpus] = None) -> List[List[LikelihoodBucketStat]]:
    """Mean per-token log likelihood of the reference, per bucket, for each system."""
    _check_labels(bucketer, [ref], None if ref_labels is None else [ref_labels], "reference")
    out = []
    for lls in likelihoods_list:
        if len(lls) != len(ref):
            raise ValueError(f"likelihoods cover {len(lls)} sentences, reference has {len(ref)}")
        stats = {}
        for i, (sent, vals) in enumerate(zip(ref, lls)):
            if len(sent) != len(vals):
                raise ValueError(f"likelihood count mismatch at sentence {i} ({len(vals)} vs {len(sent)})")
            for j, (w, v) in enumerate(zip(sent, vals)):
                b = bucketer.bucket(w, ref_labels[i][j] if bucketer.needs_labels else None)
                st = stats.setdefault(b, [0, 0.0])
                st[0] += 1
                st[1] += v
        out.append(stats)
    return [[LikelihoodBucketStat(label, *stats.get(b, (0, 0.0)))
             for b, label in enumerate(bucketer.bucket_labels)] for stats in out]


@dataclass
class WordExample:
    index: int
    f_measures: Tuple[float, float]

    @property
    def difference(self) -> float:
        return self.f_measures[0] - self.f_measures[1]


def bucket_example_sentences(ref: TokenCorpus, sys_list: Sequence[TokenCorpus], bucketer: WordBucketer,
                             bucket_label: str, k: int = 10,
                             ref_labels: Optional[LabelCorpus] = None,
                             sys_labels_list: Optional[Sequence[LabelCorpus]] = None
                             ) -> Tuple[List[WordExample], List[WordExample]]:
    """Sentences where one system handles the words of one bucket better.

    Returns the ``k`` sentences with the largest F-measure difference in
    favour of the first system, then the ``k`` most in favour of the second.
    Ties keep sentence order.
    """
    if len(sys_list) != 2:
        raise ValueError(f"bucket examples compare exactly two systems, got {len(sys_list)}")
    validate_parallel([ref, *sys_list])
    _check_labels(bucketer, [ref], None if ref_labels is None else [ref_labels], "reference")
    _check_labels(bucketer, sys_list, sys_labels_list, "output")
    if bucket_label not in bucketer.bucket_labels:
        raise ValueError(f"unknown bucket {bucket_label!r} (known: {', '.join(bucketer.bucket_labels)})")
    target = bucketer.bucket_labels.index(bucket_label)
    examples = []
    for i, r in enumerate(ref):
        ref_keys = _keys(r, ref_labels[i] if bucketer.needs_labels else None, bucketer)
        fs = []
        for si, sys in enumerate(sys_list):
            sys_keys = _keys(sys[i], sys_labels_list[si][i] if bucketer.needs_labels else None, bucketer)
            wc = WordCounts()
            for b, m, sc, rc in sentence_word_counts(ref_keys, sys_keys, bucketer):
                if b == target:
                    wc.add(m, sc, rc)
            fs.append(wc.f_measure)
        examples.append(WordExample(i, (fs[0], fs[1])))
    return rank_by_difference(examples, k)


def rank_by_difference(examples: list, k: int):
    """Split items with a ``difference`` attribute into (most positive, most negative) top-k lists."""
    top = sorted(examples, key=lambda e: (-e.difference, e.index))[:k]
    bottom = sorted(examples, key=lambda e: (e.difference, e.index))[:k]
    return top, bottom
