"""Holistic comparison of language generation system outputs."""

from compare_gen.corpus_io import CorpusError, load_token_corpus
from compare_gen.metrics import Scorer, Score, create_scorer, register_scorer, score_corpus
from compare_gen.significance import bootstrap_interval, paired_bootstrap_test

__version__ = "0.1.0"
