"""Characteristic n-grams: which n-grams one system matches more often than another."""

from collections import Counter
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from compare_gen.corpus_io import TokenCorpus, validate_parallel
from compare_gen.metrics import clipped_match_counts


def clipped_ngram_matches(ref_sent: Sequence[str], sys_sent: Sequence[str], n: int) -> Counter:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return clipped_match_counts(ref_sent, sys_sent, n)


def match_ratio(m1: int, m2: int, alpha: float = 1.0) -> float:
    """Smoothed probability that a match of an n-gram came from system 1."""
    return (m1 + alpha) / (m1 + m2 + 2 * alpha)


@dataclass(frozen=True)
class NgramRecord:
    ngram: Tuple[str, ...]
    m1: int
    m2: int
    p: float

    @property
    def text(self) -> str:
        return " ".join(self.ngram)


def corpus_ngram_matches(ref: TokenCorpus, sys: TokenCorpus, min_n: int = 1, max_n: int = 4) -> Counter:
    total = Counter()
    for r, s in zip(ref, sys):
        for n in range(min_n, max_n + 1):
            total.update(clipped_ngram_matches(r, s, n))
    return total


def ngram_difference_report(ref: TokenCorpus, sys1: TokenCorpus, sys2: TokenCorpus, min_n: int = 1,
                            max_n: int = 4, alpha: float = 1.0,
                            k: int = 10) -> Tuple[List[NgramRecord], List[NgramRecord]]:
    """Return the ``k`` n-grams most characteristic of each system.

    The first list is sorted by descending ratio (system 1 strongest), the
    second by ascending ratio. Ties prefer n-grams with more total matches,
    then lexicographic order. N-grams neither system matches are ignored.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not 1 <= min_n <= max_n:
        raise ValueError(f"invalid n-gram range {min_n}..{max_n}")
    validate_parallel([ref, sys1, sys2])
    m1 = corpus_ngram_matches(ref, sys1, min_n, max_n)
    m2 = corpus_ngram_matches(ref, sys2, min_n, max_n)
    records = [NgramRecord(g, m1[g], m2[g], match_ratio(m1[g], m2[g], alpha)) for g in m1.keys() | m2.keys()]
    top = sorted(records, key=lambda r: (-r.p, -(r.m1 + r.m2), r.ngram))[:k]
    bottom = sorted(records, key=lambda r: (r.p, -(r.m1 + r.m2), r.ngram))[:k]
    return top, bottom
