"""Command line entry points ``compare-gen`` and ``compare-ll``.

Each ``--compare_*`` flag takes one or more analysis spec strings of the form
``key=value,key=value``. Values containing commas or semicolons may be
double-quoted, lists of files are ``;``-separated and label sets are
``+``-separated::

    compare-gen ref sys1 sys2 \\
      --compare_scores score_type=bleu,bootstrap=1000 score_type=length,bootstrap=1000 \\
      --compare_word_accuracies bucket_type=freq,freq_corpus_file=train.txt \\
      --output_directory outputs --sys_names PBMT NMT
"""

import argparse
import logging
import os
import re
import shlex
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from compare_gen.significance import DEFAULT_SEED

logger = logging.getLogger("compare_gen")

SEED_ENV_VAR = "COMPARE_GEN_SEED"

EXIT_OK, EXIT_INPUT_ERROR, EXIT_INTERNAL_ERROR = 0, 1, 2

_INT = re.compile(r"^-?\d+$")
_NUMBER = re.compile(r"^-?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$")

# analysis kind -> (command line flag, recognized keys)
ANALYSES: Dict[str, Tuple[str, Tuple[str, ...]]] = {
    "scores": ("--compare_scores", ("score_type", "bootstrap", "prob_thresh")),
    "word_accuracies": ("--compare_word_accuracies", (
        "bucket_type", "freq_corpus_file", "bucket_cutoffs", "ref_labels", "out_labels", "label_set",
        "statistic", "report_length")),
    "src_word_accuracies": ("--compare_src_word_accuracies", (
        "src", "ref_align", "out_aligns", "bucket_type", "freq_corpus_file", "bucket_cutoffs", "src_labels",
        "label_set", "statistic")),
    "sentence_buckets": ("--compare_sentence_buckets", (
        "bucket_type", "statistic", "score_type", "bucket_cutoffs", "report_length")),
    "ngrams": ("--compare_ngrams", (
        "compare_type", "alpha", "min_ngram_length", "max_ngram_length", "report_length", "ref_labels",
        "out_labels")),
    "sentence_examples": ("--compare_sentence_examples", ("score_type", "report_length")),
}

LL_KEYS = ("bucket_type", "freq_corpus_file", "bucket_cutoffs", "ref_labels", "label_set")


class UsageError(ValueError):
    pass


@dataclass
class AnalysisSpec:
    kind: str
    options: Dict[str, str] = field(default_factory=dict)

    def get(self, key: str, default=None):
        return self.options.get(key, default)


@dataclass
class RunConfig:
    ref: str
    sys: List[str]
    sys_names: Optional[List[str]] = None
    analyses: List[AnalysisSpec] = field(default_factory=list)
    output_directory: Optional[str] = None
    seed: int = DEFAULT_SEED
    lowercase: bool = False
    decimals: int = 2
    freq_corpus_file: Optional[str] = None

    def names(self) -> List[str]:
        return self.sys_names or [f"sys{i + 1}" for i in range(len(self.sys))]


@dataclass
class LLConfig:
    ref: str
    ll_files: List[str]
    ll_names: Optional[List[str]] = None
    analyses: List[AnalysisSpec] = field(default_factory=list)
    output_directory: Optional[str] = None
    lowercase: bool = False
    decimals: int = 4

    def names(self) -> List[str]:
        return self.ll_names or [f"sys{i + 1}" for i in range(len(self.ll_files))]


# --- spec strings ---------------------------------------------------------

def parse_spec_string(text: str) -> Dict[str, str]:
    """Parse ``key=value,key="a;b"`` into an ordered dict."""
    lex = shlex.shlex(text, posix=True)
    lex.whitespace = ","
    lex.whitespace_split = True
    lex.commenters = ""
    try:
        items = list(lex)
    except ValueError as e:
        raise UsageError(f"cannot parse spec {text!r}: {e}") from None
    out = {}
    last_key = None
    for item in items:
        # unquoted cutoff lists: bucket_cutoffs=1,2,5 continues over bare numbers
        if last_key == "bucket_cutoffs" and "=" not in item and _NUMBER.match(item.strip()):
            out[last_key] += "," + item.strip()
            continue
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise UsageError(f"malformed key=value pair {item!r} in {text!r}")
        if key in out:
            raise UsageError(f"duplicate key {key!r} in {text!r}")
        out[key] = value
        last_key = key
    return out


def format_spec_string(options: Dict[str, str]) -> str:
    parts = []
    for key, value in options.items():
        if value == "" or re.search(r'[,;"\\\s\']', value):
            value = '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
        parts.append(f"{key}={value}")
    return ",".join(parts)


def split_list(value: str, sep: str = ";") -> List[str]:
    return [v for v in value.split(sep) if v != ""]


def parse_numbers(value: str) -> List[float]:
    try:
        return [int(v) if _INT.match(v.strip()) else float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bucket_cutoffs must be comma-separated numbers, got {value!r}") from None


def _flag(spec: AnalysisSpec) -> str:
    return ANALYSES[spec.kind][0] if spec.kind in ANALYSES else "--compare_word_likelihoods"


def _int_option(spec: AnalysisSpec, key: str, default: int, minimum: int = None) -> int:
    raw = spec.get(key)
    if raw is None:
        return default
    if not _INT.match(raw):
        raise UsageError(f"{_flag(spec)}: {key} must be an integer, got {raw!r}")
    val = int(raw)
    if minimum is not None and val < minimum:
        raise UsageError(f"{_flag(spec)}: {key} must be >= {minimum}, got {val}")
    return val


def _float_option(spec: AnalysisSpec, key: str, default: float) -> float:
    raw = spec.get(key)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{_flag(spec)}: {key} must be a number, got {raw!r}") from None


def _choice(spec, key, choices, default):
    val = spec.get(key, default)
    if val not in choices:
        raise UsageError(f"{_flag(spec)}: {key} must be one of {', '.join(choices)}, got {val!r}")
    return val


def _require(spec, *keys):
    for key in keys:
        if not spec.get(key):
            raise UsageError(f"{_flag(spec)}: missing required key {key!r}")


def validate_spec(spec: AnalysisSpec, freq_corpus_file: Optional[str] = None) -> None:
    """Check keys and values of one analysis spec; raise :class:`UsageError` on problems."""
    from compare_gen.metrics import SCORERS

    flag, allowed = ANALYSES.get(spec.kind, ("--compare_word_likelihoods", LL_KEYS))
    unknown = [k for k in spec.options if k not in allowed]
    if unknown:
        raise UsageError(f"{flag}: unknown key(s) {', '.join(unknown)} (allowed: {', '.join(allowed)})")
    if "bucket_cutoffs" in spec.options:
        parse_numbers(spec.options["bucket_cutoffs"])
    if "score_type" in allowed:
        _choice(spec, "score_type", sorted(SCORERS), spec.get("score_type", "bleu"))
    if spec.kind == "scores":
        _int_option(spec, "bootstrap", 0, minimum=0)
        _float_option(spec, "prob_thresh", 0.05)
        bs = int(spec.get("bootstrap", "0"))
        if 0 < bs < 10:
            raise UsageError(f"{flag}: bootstrap must be 0 or >= 10, got {bs}")
    if spec.kind in ("word_accuracies", "src_word_accuracies", "word_likelihoods"):
        bt = _choice(spec, "bucket_type", ("freq", "label"), spec.get("bucket_type", "freq"))
        if bt == "freq" and not (spec.get("freq_corpus_file") or freq_corpus_file):
            raise UsageError(f"{flag}: missing required key 'freq_corpus_file'")
        if bt == "label":
            if spec.kind == "word_accuracies":
                _require(spec, "ref_labels", "out_labels")
            elif spec.kind == "src_word_accuracies":
                _require(spec, "src_labels")
            else:
                _require(spec, "ref_labels")
        if spec.kind != "word_likelihoods":
            _choice(spec, "statistic", ("fmeas", "prec", "rec"), spec.get("statistic", "fmeas"))
    if spec.kind == "src_word_accuracies":
        _require(spec, "src", "ref_align", "out_aligns")
    if spec.kind == "sentence_buckets":
        _choice(spec, "bucket_type", ("length", "lengthdiff", "score"), spec.get("bucket_type", "length"))
        _choice(spec, "statistic", ("score", "count"), spec.get("statistic", "score"))
    if spec.kind == "ngrams":
        _choice(spec, "compare_type", ("match",), spec.get("compare_type", "match"))
        if _float_option(spec, "alpha", 1.0) <= 0:
            raise UsageError(f"{flag}: alpha must be positive")
        lo = _int_option(spec, "min_ngram_length", 1, minimum=1)
        hi = _int_option(spec, "max_ngram_length", 4, minimum=1)
        if lo > hi:
            raise UsageError(f"{flag}: min_ngram_length {lo} exceeds max_ngram_length {hi}")
        if bool(spec.get("ref_labels")) != bool(spec.get("out_labels")):
            raise UsageError(f"{flag}: ref_labels and out_labels must be given together")
    if "report_length" in allowed:
        _int_option(spec, "report_length", 10, minimum=0)


# --- argument parsing -----------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def default_analyses(freq_corpus_file: Optional[str]) -> List[AnalysisSpec]:
    specs = [
        AnalysisSpec("scores", {"score_type": "bleu", "bootstrap": "1000"}),
        AnalysisSpec("scores", {"score_type": "length", "bootstrap": "1000"}),
    ]
    if freq_corpus_file:
        specs.append(AnalysisSpec("word_accuracies", {"bucket_type": "freq"}))
    specs += [
        AnalysisSpec("sentence_buckets", {"bucket_type": "length", "statistic": "score"}),
        AnalysisSpec("sentence_buckets", {"bucket_type": "lengthdiff", "statistic": "count"}),
        AnalysisSpec("sentence_buckets", {"bucket_type": "score", "statistic": "count"}),
        AnalysisSpec("ngrams", {"compare_type": "match"}),
        AnalysisSpec("sentence_examples", {"score_type": "sentbleu"}),
    ]
    return specs


def _env_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return DEFAULT_SEED
    if not _INT.match(raw.strip()):
        raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")
    return int(raw)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="compare-gen",
                description="Holistic comparison of language generation system outputs against a reference.")
    p.add_argument("ref_file", help="reference file, one tokenized sentence per line")
    p.add_argument("sys_files", nargs="+", help="system output files, parallel to the reference")
    for kind, (flag, keys) in ANALYSES.items():
        p.add_argument(flag, dest=kind, action="append", nargs="+", metavar="SPEC",
                       help=f"{kind.replace('_', ' ')} analysis; keys: {', '.join(keys)}")
    p.add_argument("--sys_names", nargs="+", help="display names for the systems")
    p.add_argument("--output_directory", help="write the HTML/LaTeX/JSON report tree here")
    p.add_argument("--freq_corpus_file", help="training corpus for frequency buckets when a spec omits it")
    p.add_argument("--seed", type=int, default=None,
                   help=f"bootstrap seed (default ${SEED_ENV_VAR} or {DEFAULT_SEED})")
    p.add_argument("--lowercase", action="store_true", help="lowercase all corpora when loading")
    p.add_argument("--decimals", type=int, default=2, help="decimals for scores")
    return p


def parse_args(argv: List[str]) -> RunConfig:
    args = build_parser().parse_args(argv)
    if args.sys_names is not None and len(args.sys_names) != len(args.sys_files):
        raise UsageError(f"--sys_names gives {len(args.sys_names)} names for {len(args.sys_files)} systems")
    analyses = []
    for kind in ANALYSES:
        for group in getattr(args, kind) or []:
            for text in group:
                spec = AnalysisSpec(kind, parse_spec_string(text))
                validate_spec(spec, args.freq_corpus_file)
                analyses.append(spec)
    if not any(getattr(args, kind) for kind in ANALYSES):
        analyses = default_analyses(args.freq_corpus_file)
    if args.decimals < 0:
        raise UsageError("--decimals must be non-negative")
    return RunConfig(
        ref=args.ref_file,
        sys=list(args.sys_files),
        sys_names=args.sys_names,
        analyses=analyses,
        output_directory=args.output_directory,
        seed=args.seed if args.seed is not None else _env_seed(),
        lowercase=args.lowercase,
        decimals=args.decimals,
        freq_corpus_file=args.freq_corpus_file,
    )


def config_to_argv(config: RunConfig) -> List[str]:
    """Inverse of :func:`parse_args` (analyses are grouped by kind)."""
    argv = [config.ref, *config.sys]
    for kind, (flag, _) in ANALYSES.items():
        specs = [format_spec_string(a.options) for a in config.analyses if a.kind == kind]
        if specs:
            argv += [flag, *specs]
    if config.sys_names:
        argv += ["--sys_names", *config.sys_names]
    if config.output_directory:
        argv += ["--output_directory", config.output_directory]
    if config.freq_corpus_file:
        argv += ["--freq_corpus_file", config.freq_corpus_file]
    argv += ["--seed", str(config.seed), "--decimals", str(config.decimals)]
    if config.lowercase:
        argv.append("--lowercase")
    return argv


def build_ll_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="compare-ll",
                description="Bucketed comparison of per-word log likelihoods of the reference.")
    p.add_argument("ref_file", help="reference file, one tokenized sentence per line")
    p.add_argument("--ll_files", nargs="+", required=True, help="per-token log likelihood files, one per system")
    p.add_argument("--ll_names", nargs="+", help="display names for the systems")
    p.add_argument("--compare_word_likelihoods", dest="word_likelihoods", action="append", nargs="+",
                   metavar="SPEC", required=True, help=f"keys: {', '.join(LL_KEYS)}")
    p.add_argument("--output_directory", help="write the HTML/LaTeX/JSON report tree here")
    p.add_argument("--lowercase", action="store_true", help="lowercase the reference when loading")
    p.add_argument("--decimals", type=int, default=4, help="decimals for mean log likelihoods")
    return p


def parse_ll_args(argv: List[str]) -> LLConfig:
    args = build_ll_parser().parse_args(argv)
    if args.ll_names is not None and len(args.ll_names) != len(args.ll_files):
        raise UsageError(f"--ll_names gives {len(args.ll_names)} names for {len(args.ll_files)} files")
    analyses = []
    for group in args.word_likelihoods:
        for text in group:
            spec = AnalysisSpec("word_likelihoods", parse_spec_string(text))
            validate_spec(spec)
            analyses.append(spec)
    return LLConfig(args.ref_file, list(args.ll_files), args.ll_names, analyses,
                    args.output_directory, args.lowercase, args.decimals)


# --- entry points ---------------------------------------------------------

def _run_main(parse, execute, argv) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    try:
        config = parse(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return execute(config)


def main(argv: Optional[List[str]] = None) -> int:
    from compare_gen.runner import run
    code = _run_main(parse_args, run, sys.argv[1:] if argv is None else argv)
    if argv is None:
        sys.exit(code)
    return code


def main_ll(argv: Optional[List[str]] = None) -> int:
    from compare_gen.runner import run_ll
    code = _run_main(parse_ll_args, run_ll, sys.argv[1:] if argv is None else argv)
    if argv is None:
        sys.exit(code)
    return code


if __name__ == "__main__":
    main()
