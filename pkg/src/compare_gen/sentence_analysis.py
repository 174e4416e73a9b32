"""Sentence-bucketed statistics and sentence examples ranked by score difference."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from compare_gen.bucketing import SentenceBucketer
from compare_gen.corpus_io import TokenCorpus, validate_parallel
from compare_gen.metrics import Scorer
from compare_gen.word_accuracy import rank_by_difference

STATISTICS = ("score", "count")


@dataclass
class SentenceBucketReport:
    bucketer: SentenceBucketer
    statistic: str
    bucket_labels: List[str]
    # values[system][bucket]; None marks an empty bucket for statistic=score
    values: List[List[Optional[float]]]
    # members[system][bucket] -> sentence indices
    members: List[List[List[int]]]


def assign_buckets(ref: TokenCorpus, sys: TokenCorpus, bucketer: SentenceBucketer) -> List[List[int]]:
    members = [[] for _ in bucketer.bucket_labels]
    for i, (r, s) in enumerate(zip(ref, sys)):
        members[bucketer.assign(r, s)].append(i)
    return members


def sentence_bucket_report(ref: TokenCorpus, sys_list: Sequence[TokenCorpus], bucketer: SentenceBucketer,
                           statistic: str = "score", scorer: Optional[Scorer] = None) -> SentenceBucketReport:
    """Bucket sentences and compute a count or a corpus score per bucket.

    For ``statistic="score"`` the scorer is applied to each bucket's sentences
    jointly (sufficient statistics summed over members), not averaged.
    Membership for length-difference and score buckets is decided per system.
    """
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}")
    if statistic == "score" and scorer is None:
        raise ValueError("statistic=score requires a scorer")
    validate_parallel([ref, *sys_list])
    values, members = [], []
    for sys in sys_list:
        sys_members = assign_buckets(ref, sys, bucketer)
        if statistic == "count":
            sys_values = [float(len(m)) for m in sys_members]
        else:
            stats = scorer.corpus_stats(ref, sys)
            sys_values = []
            for m in sys_members:
                if not m:
                    sys_values.append(None)
                    continue
                try:
                    sys_values.append(scorer.finalize(stats[m].sum(axis=0)))
                except ValueError:
                    sys_values.append(None)
        values.append(sys_values)
        members.append(sys_members)
    return SentenceBucketReport(bucketer, statistic, list(bucketer.bucket_labels), values, members)


@dataclass(frozen=True)
class SentenceExample:
    index: int
    scores: Tuple[float, float]

    @property
    def difference(self) -> float:
        return self.scores[0] - self.scores[1]


def sentence_example_report(ref: TokenCorpus, sys1: TokenCorpus, sys2: TokenCorpus, scorer: Scorer,
                            k: int = 10) -> Tuple[List[SentenceExample], List[SentenceExample]]:
    """The ``k`` sentences most in favour of each system by sentence score difference."""
    validate_parallel([ref, sys1, sys2])
    examples = [SentenceExample(i, (scorer.sentence_score(r, a), scorer.sentence_score(r, b)))
                for i, (r, a, b) in enumerate(zip(ref, sys1, sys2))]
    return rank_by_difference(examples, k)
