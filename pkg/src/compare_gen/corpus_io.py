"""Loading and validation of corpora and their companion files.

Every corpus is held as a tuple of tuples so a loaded object can be shared
freely between analyses without defensive copies.
"""

import math
import os
import re
from typing import Sequence, Tuple, FrozenSet

Sentence = Tuple[str, ...]
TokenCorpus = Tuple[Sentence, ...]
LabelCorpus = Tuple[Tuple[str, ...], ...]
AlignmentCorpus = Tuple[FrozenSet[Tuple[int, int]], ...]
LikelihoodCorpus = Tuple[Tuple[float, ...], ...]

_ASCII_WS = re.compile(r"[ \t\n\r\f\v]+")
_PAIR = re.compile(r"^(\d+)-(\d+)$")


class CorpusError(ValueError):
    """Raised when an input file is malformed or inconsistent with its companions."""


def _read_lines(path: str) -> list:
    with open(path, "rb") as f:
        data = f.read()
    raw_lines = data.split(b"\n")
    # a trailing newline terminates the last sentence rather than opening a new one
    if raw_lines and raw_lines[-1] == b"":
        raw_lines.pop()
    lines = []
    for lineno, raw in enumerate(raw_lines, start=1):
        try:
            lines.append(raw.decode("utf-8"))
        except UnicodeDecodeError as e:
            raise CorpusError(f"{path}: invalid UTF-8 on line {lineno}: {e.reason}") from e
    if not lines:
        raise CorpusError(f"{path}: file contains no sentences")
    return lines


def split_tokens(line: str) -> Sentence:
    return tuple(t for t in _ASCII_WS.split(line) if t)


def _parse_token_lines(path: str, lines: Sequence[str], lowercase: bool) -> TokenCorpus:
    sents = []
    for lineno, line in enumerate(lines, start=1):
        if lowercase:
            line = line.lower()
        toks = split_tokens(line)
        for tok in toks:
            if any(ch.isspace() for ch in tok):
                raise CorpusError(f"{path}: line {lineno}: token {tok!r} contains whitespace")
        sents.append(toks)
    return tuple(sents)


def load_token_corpus(path: str, lowercase: bool = False) -> TokenCorpus:
    """Read one whitespace-tokenized sentence per line.

    Runs of ASCII whitespace separate tokens; an empty line is an empty
    sentence. With ``lowercase`` every line is lowercased before splitting.
    """
    return _parse_token_lines(path, _read_lines(path), lowercase)


def load_label_corpus(path: str, companion: TokenCorpus) -> LabelCorpus:
    labels = _parse_token_lines(path, _read_lines(path), lowercase=False)
    if len(labels) != len(companion):
        raise CorpusError(
            f"{path}: {len(labels)} label lines vs {len(companion)} sentences in the companion corpus")
    for i, (labs, toks) in enumerate(zip(labels, companion)):
        if len(labs) != len(toks):
            raise CorpusError(f"{path}: label count mismatch at sentence {i} ({len(labs)} vs {len(toks)})")
    return labels


def parse_alignment_line(line: str, src_len: int, tgt_len: int, sent_id: int = 0) -> FrozenSet[Tuple[int, int]]:
    pairs = set()
    for item in split_tokens(line):
        m = _PAIR.match(item)
        if m is None:
            raise CorpusError(f"sentence {sent_id}: malformed alignment pair {item!r}")
        i, j = int(m.group(1)), int(m.group(2))
        if i >= src_len or j >= tgt_len:
            raise CorpusError(
                f"sentence {sent_id}: alignment pair {item!r} out of bounds "
                f"(source length {src_len}, target length {tgt_len})")
        pairs.add((i, j))
    return frozenset(pairs)


def load_alignment_corpus(path: str, src: TokenCorpus, tgt: TokenCorpus) -> AlignmentCorpus:
    """Read Pharaoh ``i-j`` alignments (0-based source index, target index)."""
    validate_parallel([src, tgt])
    lines = _read_lines(path)
    if len(lines) != len(src):
        raise CorpusError(f"{path}: {len(lines)} alignment lines vs {len(src)} sentences")
    out = []
    for i, (line, s, t) in enumerate(zip(lines, src, tgt)):
        try:
            out.append(parse_alignment_line(line, len(s), len(t), i))
        except CorpusError as e:
            raise CorpusError(f"{path}: {e}") from None
    return tuple(out)


def load_likelihood_corpus(path: str, ref: TokenCorpus) -> LikelihoodCorpus:
    lines = _read_lines(path)
    if len(lines) != len(ref):
        raise CorpusError(f"{path}: {len(lines)} likelihood lines vs {len(ref)} reference sentences")
    out = []
    for i, (line, toks) in enumerate(zip(lines, ref)):
        vals = []
        for item in split_tokens(line):
            try:
                val = float(item)
            except ValueError:
                raise CorpusError(f"{path}: sentence {i}: non-numeric value {item!r}") from None
            if not math.isfinite(val):
                raise CorpusError(f"{path}: sentence {i}: non-finite value {item!r}")
            vals.append(val)
        if len(vals) != len(toks):
            raise CorpusError(f"{path}: likelihood count mismatch at sentence {i} ({len(vals)} vs {len(toks)})")
        out.append(tuple(vals))
    return tuple(out)


def validate_parallel(corpora: Sequence[TokenCorpus], names: Sequence[str] = None) -> None:
    if len(corpora) < 2:
        return
    counts = [len(c) for c in corpora]
    if len(set(counts)) != 1:
        detail = " vs ".join(str(c) for c in counts)
        if names:
            detail += " (" + ", ".join(os.fspath(n) for n in names) + ")"
        raise CorpusError(f"corpora are not parallel: sentence counts {detail}")


def write_token_corpus(path: str, corpus: TokenCorpus) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for sent in corpus:
            f.write(" ".join(sent) + "\n")
