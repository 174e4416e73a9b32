"""Word and sentence bucketers.

Word bucketers map a token (and its label, if any) to a bucket index; sentence
bucketers map a (reference, output) pair to a bucket index. All numeric
buckets are left-closed and right-open, with open-ended extremes.
"""

import bisect
from collections import Counter
from typing import List, Optional, Sequence

from compare_gen.corpus_io import TokenCorpus
from compare_gen.metrics import Scorer, SentenceBleuScorer

DEFAULT_FREQ_CUTOFFS = (1, 2, 3, 5, 10, 100, 1000)
DEFAULT_LENGTH_CUTOFFS = (10, 20, 30, 40, 50, 60)
DEFAULT_LENGTHDIFF_CUTOFFS = (-20, -10, -5, -2, -1, 0, 1, 2, 5, 10, 20)
DEFAULT_SCORE_CUTOFFS = (10, 20, 30, 40, 50, 60, 70, 80, 90)

OTHER_LABEL = "other"


def _check_increasing(cutoffs: Sequence[float]) -> None:
    if not cutoffs:
        raise ValueError("at least one cutoff is required")
    for a, b in zip(cutoffs, cutoffs[1:]):
        if not a < b:
            raise ValueError(f"cutoffs must be strictly increasing, got {list(cutoffs)}")


def _num(x: float) -> str:
    return f"{x:g}"


def interval_labels(cutoffs: Sequence[float]) -> List[str]:
    labels = [f"<{_num(cutoffs[0])}"]
    labels += [f"[{_num(a)},{_num(b)})" for a, b in zip(cutoffs, cutoffs[1:])]
    labels.append(f"≥{_num(cutoffs[-1])}")
    return labels


def interval_index(cutoffs: Sequence[float], value: float) -> int:
    """Index of the interval containing ``value``; there are ``len(cutoffs) + 1`` intervals."""
    return bisect.bisect_right(cutoffs, value)


class WordBucketer:
    """Base class for word bucketers.

    ``bucket(word, label)`` returns an index into :attr:`bucket_labels`.
    """

    kind = "word"
    needs_labels = False

    def __init__(self, bucket_labels: Sequence[str]):
        if not bucket_labels:
            raise ValueError("a bucketer needs at least one bucket")
        self.bucket_labels = list(bucket_labels)

    def bucket(self, word: str, label: Optional[str] = None) -> int:
        raise NotImplementedError()

    def key(self, word: str, label: Optional[str] = None):
        """Unit that is matched between reference and output."""
        return word

    def describe(self) -> str:
        return self.kind


class FrequencyBucketer(WordBucketer):
    """Buckets word types by how often they occur in a training corpus."""

    kind = "freq"

    def __init__(self, counts: Counter, cutoffs: Sequence[int] = DEFAULT_FREQ_CUTOFFS):
        _check_increasing(cutoffs)
        if cutoffs[0] < 1:
            raise ValueError(f"the first frequency cutoff must be >= 1, got {cutoffs[0]}")
        self.counts = counts
        self.cutoffs = tuple(int(c) for c in cutoffs)
        bounds = (0,) + self.cutoffs
        labels = []
        for lo, hi in zip(bounds, bounds[1:]):
            labels.append(str(lo) if hi - lo == 1 else f"{lo}-{hi - 1}")
        labels.append(f"≥{self.cutoffs[-1]}")
        super().__init__(labels)

    def bucket(self, word, label=None):
        return interval_index(self.cutoffs, self.counts.get(word, 0))

    def describe(self):
        return "frequency"


class LabelBucketer(WordBucketer):
    """Buckets tokens by an externally supplied label such as a POS tag.

    With a ``label_set`` the buckets are that set in order plus ``"other"``;
    without one, buckets are created in order of first appearance.
    """

    kind = "label"
    needs_labels = True

    def __init__(self, label_set: Optional[Sequence[str]] = None):
        if label_set is not None:
            if not label_set:
                raise ValueError("label_set must not be empty")
            if len(set(label_set)) != len(label_set):
                raise ValueError(f"label_set contains duplicates: {list(label_set)}")
            super().__init__(list(label_set) + [OTHER_LABEL])
            self.fixed = True
        else:
            # grows as labels are observed
            self.bucket_labels = []
            self.fixed = False
        self._index = {lab: i for i, lab in enumerate(self.bucket_labels)}

    def observe(self, label_corpora: Sequence[Sequence[Sequence[str]]]) -> None:
        """Register labels in first-appearance order (no-op with a fixed label set)."""
        if self.fixed:
            return
        for corpus in label_corpora:
            for sent in corpus:
                for lab in sent:
                    if lab not in self._index:
                        self._index[lab] = len(self.bucket_labels)
                        self.bucket_labels.append(lab)

    def bucket(self, word, label=None):
        if label is None:
            raise ValueError(f"token {word!r} has no label; label bucketing needs label files")
        idx = self._index.get(label)
        if idx is not None:
            return idx
        if self.fixed:
            return self._index[OTHER_LABEL]
        self._index[label] = len(self.bucket_labels)
        self.bucket_labels.append(label)
        return self._index[label]

    def key(self, word, label=None):
        return (word, label)

    def describe(self):
        return "label"


def build_frequency_bucketer(train: TokenCorpus, cutoffs: Sequence[int] = DEFAULT_FREQ_CUTOFFS) -> FrequencyBucketer:
    counts = Counter(tok for sent in train for tok in sent)
    if not counts:
        raise ValueError("the frequency corpus contains no tokens")
    return FrequencyBucketer(counts, cutoffs)


def build_label_bucketer(label_set: Optional[Sequence[str]] = None) -> LabelBucketer:
    return LabelBucketer(label_set)


class SentenceBucketer:
    """Assigns a sentence pair to an interval of some numeric sentence property."""

    kinds = ("length", "lengthdiff", "score")

    def __init__(self, kind: str, cutoffs: Sequence[float], scorer: Optional[Scorer] = None):
        if kind not in self.kinds:
            raise ValueError(f"unknown sentence bucket type {kind!r}")
        if kind == "score" and scorer is None:
            raise ValueError("score bucketing requires a scorer")
        _check_increasing(cutoffs)
        self.kind = kind
        self.cutoffs = tuple(cutoffs)
        self.scorer = scorer
        self.bucket_labels = interval_labels(self.cutoffs)

    @property
    def per_system(self) -> bool:
        """Whether membership depends on the output as well as the reference."""
        return self.kind != "length"

    def value(self, ref_sent: Sequence[str], sys_sent: Sequence[str]) -> float:
        if self.kind == "length":
            return len(ref_sent)
        if self.kind == "lengthdiff":
            return len(sys_sent) - len(ref_sent)
        return self.scorer.sentence_score(ref_sent, sys_sent)

    def assign(self, ref_sent: Sequence[str], sys_sent: Sequence[str]) -> int:
        return interval_index(self.cutoffs, self.value(ref_sent, sys_sent))

    def describe(self) -> str:
        if self.kind == "score":
            return f"score ({self.scorer.describe()})"
        return self.kind


def build_sentence_bucketer(kind: str, cutoffs: Optional[Sequence[float]] = None,
                            scorer: Optional[Scorer] = None) -> SentenceBucketer:
    if cutoffs is None:
        cutoffs = {"length": DEFAULT_LENGTH_CUTOFFS,
                   "lengthdiff": DEFAULT_LENGTHDIFF_CUTOFFS,
                   "score": DEFAULT_SCORE_CUTOFFS}.get(kind)
    if kind == "score" and scorer is None:
        scorer = SentenceBleuScorer()
    return SentenceBucketer(kind, cutoffs, scorer)


def assign_sentence(bucketer: SentenceBucketer, ref_sent, sys_sent) -> int:
    return bucketer.assign(ref_sent, sys_sent)
