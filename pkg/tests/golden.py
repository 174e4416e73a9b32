"""The golden end-to-end run on the bundled sample and its sha256 manifest.

Run ``python3 tests/golden.py`` to regenerate the manifest after an
intentional change to the report output.
"""

import contextlib
import hashlib
import io
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
SAMPLE_DIR = os.path.join(HERE, "fixtures", "sample")
MANIFEST = os.path.join(HERE, "fixtures", "golden", "manifest.sha256")

LABEL_SET = "CC+DT+IN+JJ+NN+NNP+NNS+PRP+RB+TO+VB+VBP+VBZ"

# paths are relative to SAMPLE_DIR so results.json is the same on every machine
GOLDEN_ARGV = [
    "ref.txt", "sys1.txt", "sys2.txt",
    "--compare_scores", "score_type=bleu,bootstrap=1000", "score_type=ribes,bootstrap=1000",
    "score_type=length,bootstrap=1000",
    "--compare_word_accuracies", "bucket_type=freq,freq_corpus_file=train.txt",
    f'bucket_type=label,ref_labels=ref.tag,out_labels="sys1.tag;sys2.tag",label_set={LABEL_SET}',
    "--sys_names", "PBMT", "NMT",
]


def run_golden(out_dir: str) -> int:
    """Run the golden command from inside the sample directory; stdout is discarded."""
    from compare_gen.cli import main

    cwd = os.getcwd()
    os.chdir(SAMPLE_DIR)
    try:
        with contextlib.redirect_stdout(io.StringIO()):
            return main(GOLDEN_ARGV + ["--output_directory", os.path.abspath(out_dir)])
    finally:
        os.chdir(cwd)


def tree_digest(out_dir: str) -> dict:
    digest = {}
    for root, _, files in os.walk(out_dir):
        for name in files:
            path = os.path.join(root, name)
            rel = os.path.relpath(path, out_dir).replace(os.sep, "/")
            with open(path, "rb") as f:
                digest[rel] = hashlib.sha256(f.read()).hexdigest()
    return dict(sorted(digest.items()))


def format_manifest(digest: dict) -> str:
    return "".join(f"{h}  {rel}\n" for rel, h in digest.items())


def read_manifest() -> dict:
    with open(MANIFEST, encoding="utf-8") as f:
        return {rel: h for h, rel in (line.rstrip("\n").split("  ", 1) for line in f if line.strip())}


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        code = run_golden(tmp)
        if code != 0:
            sys.exit(code)
        os.makedirs(os.path.dirname(MANIFEST), exist_ok=True)
        with open(MANIFEST, "w", encoding="utf-8", newline="\n") as f:
            f.write(format_manifest(tree_digest(tmp)))
    print(f"wrote {MANIFEST}")
