"""Bootstrap confidence intervals and paired bootstrap significance tests.

Sentence statistics are computed once per system; every resample is scored by
summing rows of that matrix, so no n-gram is ever recounted. Each resample
draws its indices from its own child of ``numpy.random.SeedSequence(seed)``,
which keeps results identical no matter how the resamples are scheduled.
"""

from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from compare_gen.corpus_io import TokenCorpus, validate_parallel
from compare_gen.metrics import Score, Scorer

DEFAULT_SEED = 12345


@dataclass(frozen=True)
class SignificanceResult:
    system_a_score: Score
    system_b_score: Score
    ci_a: Optional[Tuple[float, float]]
    ci_b: Optional[Tuple[float, float]]
    winner: Optional[str]  # "A", "B", or None
    p_value: float
    num_samples: int
    seed: int

    def p_value_str(self) -> str:
        return format_p_value(self.p_value, self.num_samples)

    def winner_str(self, name_a: str = "s1", name_b: str = "s2") -> str:
        if self.winner == "A":
            return f"{name_a}>{name_b}"
        if self.winner == "B":
            return f"{name_b}>{name_a}"
        return "-"


def format_p_value(p: float, num_samples: int) -> str:
    if p == 0:
        return f"p<{1.0 / num_samples:g}"
    if p < 0.01:
        return f"p={p:.4f}"
    return f"p={p:.2f}"


def resample_indices(n_items: int, n_samples: int, seed: int) -> Iterator[np.ndarray]:
    """Yield ``n_samples`` index arrays of size ``n_items`` drawn with replacement."""
    for child in np.random.SeedSequence(seed).spawn(n_samples):
        yield np.random.default_rng(child).integers(0, n_items, size=n_items)


def _check_inputs(stats_list, n_samples):
    if len(stats_list[0]) == 0:
        raise ValueError("cannot bootstrap an empty corpus")
    if n_samples < 10:
        raise ValueError(f"n_samples must be >= 10, got {n_samples}")


def bootstrap_scores(scorer: Scorer, stats: np.ndarray, n_samples: int, seed: int) -> np.ndarray:
    _check_inputs([stats], n_samples)
    return np.array([scorer.finalize(stats[idx].sum(axis=0))
                     for idx in resample_indices(len(stats), n_samples, seed)])


def percentile_interval(samples: np.ndarray, confidence: float = 0.95) -> Tuple[float, float]:
    tail = (1.0 - confidence) / 2.0 * 100.0
    lo, hi = np.percentile(samples, [tail, 100.0 - tail], method="linear")
    return float(lo), float(hi)


def bootstrap_interval(scorer: Scorer, ref: TokenCorpus, sys: TokenCorpus, n_samples: int = 1000,
                       seed: int = DEFAULT_SEED, confidence: float = 0.95) -> Tuple[float, float]:
    """Percentile bootstrap confidence interval of the corpus score."""
    stats = scorer.corpus_stats(ref, sys)
    return percentile_interval(bootstrap_scores(scorer, stats, n_samples, seed), confidence)


def paired_bootstrap_from_stats(scorer: Scorer, stats_a: np.ndarray, stats_b: np.ndarray,
                                n_samples: int = 1000, seed: int = DEFAULT_SEED,
                                threshold: float = 0.05, confidence: float = 0.95) -> SignificanceResult:
    if stats_a.shape != stats_b.shape:
        raise ValueError(f"statistics shape mismatch: {stats_a.shape} vs {stats_b.shape}")
    _check_inputs([stats_a], n_samples)
    full_a = scorer.finalize(stats_a.sum(axis=0))
    full_b = scorer.finalize(stats_b.sum(axis=0))
    samples_a = np.empty(n_samples)
    samples_b = np.empty(n_samples)
    for k, idx in enumerate(resample_indices(len(stats_a), n_samples, seed)):
        samples_a[k] = scorer.finalize(stats_a[idx].sum(axis=0))
        samples_b[k] = scorer.finalize(stats_b[idx].sum(axis=0))
    # the provisional winner must strictly outscore the other; ties count against it
    if full_b > full_a:
        provisional, losses = "B", int(np.sum(~(samples_b > samples_a)))
    else:
        provisional, losses = "A", int(np.sum(~(samples_a > samples_b)))
    p_value = losses / n_samples
    return SignificanceResult(
        system_a_score=Score(scorer.describe(), full_a),
        system_b_score=Score(scorer.describe(), full_b),
        ci_a=percentile_interval(samples_a, confidence),
        ci_b=percentile_interval(samples_b, confidence),
        winner=provisional if p_value <= threshold else None,
        p_value=p_value,
        num_samples=n_samples,
        seed=seed,
    )


def paired_bootstrap_test(scorer: Scorer, ref: TokenCorpus, sys_a: TokenCorpus, sys_b: TokenCorpus,
                          n_samples: int = 1000, seed: int = DEFAULT_SEED,
                          threshold: float = 0.05, confidence: float = 0.95) -> SignificanceResult:
    """Paired bootstrap test (Koehn, 2004) applying the same resamples to both systems.

    ``p_value`` is the fraction of resamples in which the system with the
    higher full-corpus score fails to strictly beat the other one. A winner is
    only reported when ``p_value <= threshold``.
    """
    validate_parallel([ref, sys_a, sys_b])
    return paired_bootstrap_from_stats(
        scorer, scorer.corpus_stats(ref, sys_a), scorer.corpus_stats(ref, sys_b),
        n_samples=n_samples, seed=seed, threshold=threshold, confidence=confidence)
