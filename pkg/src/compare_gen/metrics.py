"""Corpus and sentence level metrics behind a common scorer interface.

A :class:`Scorer` turns each (reference, output) sentence pair into a small
vector of additive sufficient statistics. Summing those vectors over any set
of sentences and calling :meth:`Scorer.finalize` gives the metric for that set,
which is what makes bootstrap resampling and bucketed scoring cheap.

All scores are on a 0-100 scale.
"""

import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Type

import numpy as np

from compare_gen.corpus_io import TokenCorpus, validate_parallel


@dataclass(frozen=True)
class Score:
    name: str
    value: float

    def __str__(self):
        return f"{self.name}={self.value:.2f}"


def ngram_counts(sent: Sequence[str], n: int) -> Counter:
    return Counter(tuple(sent[i:i + n]) for i in range(len(sent) - n + 1))


def clipped_match_counts(ref: Sequence[str], sys: Sequence[str], n: int) -> Counter:
    """Matched n-grams of ``sys``, each clipped to its count in ``ref``."""
    ref_counts = ngram_counts(ref, n)
    sys_counts = ngram_counts(sys, n)
    return Counter({g: min(c, ref_counts[g]) for g, c in sys_counts.items() if g in ref_counts})


class Scorer:
    """Base class for metrics that decompose into per-sentence statistics.

    Subclasses implement :meth:`sentence_stats` and :meth:`finalize`; the
    defaults for :meth:`combine` and :meth:`sentence_score` work for any
    vector-valued statistics.
    """

    name = "scorer"
    # number of entries in the sufficient statistics vector
    num_stats = 0

    def sentence_stats(self, ref: Sequence[str], sys: Sequence[str]) -> np.ndarray:
        raise NotImplementedError()

    def finalize(self, stats: np.ndarray) -> float:
        raise NotImplementedError()

    def zero_stats(self) -> np.ndarray:
        return np.zeros(self.num_stats, dtype=np.float64)

    def combine(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a + b

    def sentence_score(self, ref: Sequence[str], sys: Sequence[str]) -> float:
        return self.finalize(self.sentence_stats(ref, sys))

    def corpus_stats(self, ref: TokenCorpus, sys: TokenCorpus) -> np.ndarray:
        """Stack the per-sentence statistics into an ``(N, num_stats)`` array."""
        validate_parallel([ref, sys])
        out = np.zeros((len(ref), self.num_stats), dtype=np.float64)
        for i, (r, s) in enumerate(zip(ref, sys)):
            out[i] = self.sentence_stats(r, s)
        return out

    def describe(self) -> str:
        return self.name


class BleuScorer(Scorer):
    """Corpus BLEU with clipped n-gram precisions and a brevity penalty.

    Statistics are ``[match_1..match_N, total_1..total_N, sys_len, ref_len]``.
    Orders for which the output has no n-grams are left out of the geometric
    mean, so a three-token output identical to its reference scores 100.
    :meth:`sentence_score` uses add-one smoothing on the n >= 2 precisions.
    """

    name = "bleu"

    def __init__(self, max_n: int = 4):
        if max_n < 1:
            raise ValueError(f"max_n must be >= 1, got {max_n}")
        self.max_n = max_n
        self.num_stats = 2 * max_n + 2

    def sentence_stats(self, ref, sys):
        stats = np.zeros(self.num_stats, dtype=np.float64)
        for n in range(1, self.max_n + 1):
            stats[n - 1] = sum(clipped_match_counts(ref, sys, n).values())
            stats[self.max_n + n - 1] = max(len(sys) - n + 1, 0)
        stats[-2] = len(sys)
        stats[-1] = len(ref)
        return stats

    def _brevity_penalty(self, sys_len, ref_len):
        if sys_len >= ref_len:
            return 1.0
        return math.exp(1.0 - ref_len / sys_len)

    def finalize(self, stats):
        sys_len, ref_len = stats[-2], stats[-1]
        if sys_len == 0:
            return 0.0
        log_sum, orders = 0.0, 0
        for n in range(self.max_n):
            matches, total = stats[n], stats[self.max_n + n]
            # an order with no n-grams at all (output shorter than n) has no precision
            if total == 0:
                continue
            if matches == 0:
                return 0.0
            log_sum += math.log(matches / total)
            orders += 1
        return 100.0 * self._brevity_penalty(sys_len, ref_len) * math.exp(log_sum / orders)

    def sentence_score(self, ref, sys):
        return sentence_bleu_smoothed(ref, sys, self.max_n)


class SentenceBleuScorer(Scorer):
    """Mean of smoothed sentence BLEU; statistics are ``[sum, count]``."""

    name = "sentbleu"
    num_stats = 2

    def __init__(self, max_n: int = 4):
        self.max_n = max_n

    def sentence_stats(self, ref, sys):
        return np.array([sentence_bleu_smoothed(ref, sys, self.max_n), 1.0])

    def finalize(self, stats):
        return float(stats[0] / stats[1]) if stats[1] > 0 else 0.0

    def sentence_score(self, ref, sys):
        return sentence_bleu_smoothed(ref, sys, self.max_n)


class ChrfScorer(Scorer):
    """Character n-gram F-score over whitespace-stripped sentences.

    Statistics hold ``(matches, sys_total, ref_total)`` for each order n.
    """

    name = "chrf"

    def __init__(self, beta: float = 2.0, max_n: int = 6):
        self.beta = beta
        self.max_n = max_n
        self.num_stats = 3 * max_n

    def sentence_stats(self, ref, sys):
        ref_chars = "".join(ref)
        sys_chars = "".join(sys)
        stats = np.zeros(self.num_stats, dtype=np.float64)
        for n in range(1, self.max_n + 1):
            ref_counts = ngram_counts(ref_chars, n)
            sys_counts = ngram_counts(sys_chars, n)
            matches = sum(min(c, ref_counts[g]) for g, c in sys_counts.items())
            stats[3 * (n - 1):3 * n] = (matches, sum(sys_counts.values()), sum(ref_counts.values()))
        return stats

    def finalize(self, stats):
        b2 = self.beta ** 2
        total = 0.0
        for n in range(self.max_n):
            matches, sys_total, ref_total = stats[3 * n:3 * n + 3]
            prec = matches / sys_total if sys_total > 0 else 0.0
            rec = matches / ref_total if ref_total > 0 else 0.0
            if prec + rec > 0:
                total += (1 + b2) * prec * rec / (b2 * prec + rec)
        return float(100.0 * total / self.max_n)


def ribes_alignment(ref: Sequence[str], sys: Sequence[str]) -> List[Tuple[int, int]]:
    """Align output tokens to reference positions.

    A token unique in both sentences aligns directly. Otherwise the shortest
    window around it that occurs exactly once in each sentence fixes the
    position; the window to the right is tried first, then the one to the
    left, then any other window covering the token. Tokens with no such
    window are left unaligned.

    Returns ``(sys_index, ref_index)`` pairs in output order.
    """
    ref_counts = Counter(ref)
    sys_counts = Counter(sys)
    out = []
    for i, tok in enumerate(sys):
        if ref_counts[tok] == 0:
            continue
        if ref_counts[tok] == 1 and sys_counts[tok] == 1:
            out.append((i, ref.index(tok)))
            continue
        pos = _disambiguate(ref, sys, i)
        if pos is not None:
            out.append((i, pos))
    return out


def _occurrences(sent, gram):
    k = len(gram)
    return [s for s in range(len(sent) - k + 1) if tuple(sent[s:s + k]) == gram]


def _disambiguate(ref, sys, i):
    for k in range(2, max(len(ref), len(sys)) + 1):
        starts = [i, i - k + 1] + list(range(i - k + 2, i))
        seen = set()
        for s in starts:
            if s in seen or s < 0 or s + k > len(sys):
                continue
            seen.add(s)
            gram = tuple(sys[s:s + k])
            ref_hits = _occurrences(ref, gram)
            if len(ref_hits) == 1 and len(_occurrences(sys, gram)) == 1:
                return ref_hits[0] + (i - s)
    return None


def normalized_kendall_tau(positions: Sequence[int]) -> float:
    """Fraction of position pairs that appear in ascending order (0 for fewer than 2)."""
    k = len(positions)
    if k < 2:
        return 0.0
    ascending = sum(1 for a in range(k) for b in range(a + 1, k) if positions[a] < positions[b])
    return ascending / (k * (k - 1) / 2)


def sentence_ribes(ref, sys, alpha: float = 0.25, beta: float = 0.10) -> float:
    """Sentence RIBES on a 0-1 scale."""
    if not sys:
        return 0.0
    align = ribes_alignment(ref, sys)
    nkt = normalized_kendall_tau([r for _, r in align])
    if nkt == 0.0:
        return 0.0
    precision = len(align) / len(sys)
    bp = 1.0 if len(sys) >= len(ref) else math.exp(1.0 - len(ref) / len(sys))
    return nkt * precision ** alpha * bp ** beta


class RibesScorer(Scorer):
    """Mean sentence RIBES; statistics are ``[sum, count]``."""

    name = "ribes"
    num_stats = 2

    def __init__(self, alpha: float = 0.25, beta: float = 0.10):
        self.alpha = alpha
        self.beta = beta

    def sentence_stats(self, ref, sys):
        return np.array([sentence_ribes(ref, sys, self.alpha, self.beta), 1.0])

    def finalize(self, stats):
        return float(100.0 * stats[0] / stats[1]) if stats[1] > 0 else 0.0


class LengthScorer(Scorer):
    """Output-to-reference length ratio; statistics are ``[sys_len, ref_len]``."""

    name = "length"
    num_stats = 2

    def sentence_stats(self, ref, sys):
        return np.array([len(sys), len(ref)], dtype=np.float64)

    def finalize(self, stats):
        if stats[1] == 0:
            raise ValueError("length ratio is undefined for a zero-length reference")
        return float(100.0 * stats[0] / stats[1])


SCORERS: Dict[str, Type[Scorer]] = {
    "bleu": BleuScorer,
    "sentbleu": SentenceBleuScorer,
    "chrf": ChrfScorer,
    "ribes": RibesScorer,
    "length": LengthScorer,
}


def register_scorer(name: str, cls: Type[Scorer]) -> None:
    SCORERS[name] = cls


def create_scorer(name: str, **kwargs) -> Scorer:
    try:
        cls = SCORERS[name]
    except KeyError:
        raise ValueError(f"unknown score_type {name!r} (known: {', '.join(sorted(SCORERS))})") from None
    return cls(**kwargs)


def score_corpus(scorer: Scorer, ref: TokenCorpus, sys: TokenCorpus) -> Score:
    stats = scorer.zero_stats()
    for s in scorer.corpus_stats(ref, sys):
        stats = scorer.combine(stats, s)
    return Score(scorer.describe(), scorer.finalize(stats))


def sentence_bleu_smoothed(ref: Sequence[str], sys: Sequence[str], max_n: int = 4) -> float:
    """Sentence BLEU with add-one smoothing on the precisions of order 2 and up."""
    if not sys:
        return 100.0 if not ref else 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        matches = sum(clipped_match_counts(ref, sys, n).values())
        total = max(len(sys) - n + 1, 0)
        if n == 1:
            if matches == 0:
                return 0.0
            log_sum += math.log(matches / total)
        else:
            log_sum += math.log((matches + 1) / (total + 1))
    bp = 1.0 if len(sys) >= len(ref) else math.exp(1.0 - len(ref) / len(sys))
    return 100.0 * bp * math.exp(log_sum / max_n)


def corpus_bleu(ref: TokenCorpus, sys: TokenCorpus, max_n: int = 4) -> Score:
    return score_corpus(BleuScorer(max_n), ref, sys)


def chrf(ref: TokenCorpus, sys: TokenCorpus, beta: float = 2.0, max_n: int = 6) -> Score:
    return score_corpus(ChrfScorer(beta, max_n), ref, sys)


def ribes(ref: TokenCorpus, sys: TokenCorpus, alpha: float = 0.25, beta: float = 0.10) -> Score:
    return score_corpus(RibesScorer(alpha, beta), ref, sys)


def length_ratio(ref: TokenCorpus, sys: TokenCorpus) -> Score:
    return score_corpus(LengthScorer(), ref, sys)
