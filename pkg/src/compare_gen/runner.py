"""Execute a parsed configuration: load inputs, run analyses, render reports."""

import itertools
import json
import logging
import sys
from typing import Dict, List, Optional, Tuple

from compare_gen import bucketing, corpus_io, metrics, ngram_diff, sentence_analysis, significance, word_accuracy
from compare_gen.cli import (EXIT_INPUT_ERROR, EXIT_INTERNAL_ERROR, EXIT_OK, AnalysisSpec, LLConfig, RunConfig,
                             parse_numbers, split_list)
from compare_gen.report_render import (AnalysisReport, Chart, Drilldown, ExampleBlock, build_report_files,
                                       render_text_all, write_report_files)

logger = logging.getLogger("compare_gen")

SCORE_NAMES = {"bleu": "BLEU", "sentbleu": "sentBLEU", "chrf": "chrF", "ribes": "RIBES", "length": "Length"}
STAT_NAMES = {"fmeas": "F-measure", "prec": "precision", "rec": "recall"}


class Inputs:
    """Loads and caches every file an analysis refers to."""

    def __init__(self, config: RunConfig):
        self.lowercase = config.lowercase
        self.ref = corpus_io.load_token_corpus(config.ref, config.lowercase)
        self.systems = [corpus_io.load_token_corpus(p, config.lowercase) for p in config.sys]
        corpus_io.validate_parallel([self.ref, *self.systems], [config.ref, *config.sys])
        self.names = config.names()
        self.default_freq_file = config.freq_corpus_file
        self._cache = {}

    def _cached(self, key, loader):
        if key not in self._cache:
            self._cache[key] = loader()
        return self._cache[key]

    def corpus(self, path):
        return self._cached(("tok", path), lambda: corpus_io.load_token_corpus(path, self.lowercase))

    def labels(self, path, companion):
        return self._cached(("lab", path, id(companion)), lambda: corpus_io.load_label_corpus(path, companion))

    def sys_labels(self, spec_value):
        paths = split_list(spec_value)
        if len(paths) != len(self.systems):
            raise ValueError(f"out_labels lists {len(paths)} files for {len(self.systems)} systems")
        return [self.labels(p, s) for p, s in zip(paths, self.systems)]

    def word_bucketer(self, spec: AnalysisSpec):
        if spec.get("bucket_type", "freq") == "label":
            label_set = spec.get("label_set")
            return bucketing.build_label_bucketer(label_set.split("+") if label_set else None)
        path = spec.get("freq_corpus_file") or self.default_freq_file
        train = self._cached(("freq", path), lambda: self.corpus(path))
        if "bucket_cutoffs" in spec.options:
            return bucketing.build_frequency_bucketer(train, [int(c) for c in parse_numbers(spec.get("bucket_cutoffs"))])
        return bucketing.build_frequency_bucketer(train)


def _fmt(value: Optional[float], decimals: int) -> str:
    return "-" if value is None else f"{value:.{decimals}f}"


def _text(sent) -> str:
    return " ".join(sent)


def _pairs(n: int):
    return list(itertools.combinations(range(n), 2))


# --- aggregate scores -----------------------------------------------------

def scores_analysis(specs: List[AnalysisSpec], inputs: Inputs, seed: int, decimals: int):
    names, n = inputs.names, len(inputs.systems)
    header = ["", *names] + (["Win?"] if n == 2 else [])
    rows, chart_groups, chart_values = [], [], [[] for _ in range(n)]
    pair_rows, results = [], []
    for spec in specs:
        score_type = spec.get("score_type", "bleu")
        scorer = metrics.create_scorer(score_type)
        n_samples = int(spec.get("bootstrap", "0"))
        threshold = float(spec.get("prob_thresh", "0.05"))
        stats = [scorer.corpus_stats(inputs.ref, s) for s in inputs.systems]
        values = [scorer.finalize(st.sum(axis=0)) for st in stats]
        label = SCORE_NAMES.get(score_type, score_type)
        result = {"score_type": score_type, "bootstrap": n_samples, "seed": seed,
                  "scores": dict(zip(names, values)), "intervals": None, "pairwise": []}
        cis = None
        if n_samples:
            cis = [significance.percentile_interval(significance.bootstrap_scores(scorer, st, n_samples, seed))
                   for st in stats]
            result["intervals"] = {nm: list(ci) for nm, ci in zip(names, cis)}
        tests = {}
        if n_samples and n >= 2:
            for a, b in _pairs(n):
                res = significance.paired_bootstrap_from_stats(
                    scorer, stats[a], stats[b], n_samples=n_samples, seed=seed, threshold=threshold)
                tests[(a, b)] = res
                win = res.winner_str(f"s{a + 1}", f"s{b + 1}")
                result["pairwise"].append({"a": names[a], "b": names[b], "winner": win, "p_value": res.p_value})
                pair_rows.append([label, f"{names[a]} vs {names[b]}", win, res.p_value_str()])
        row = [label] + [_fmt(v, decimals) for v in values]
        ci_row = [""] + ([f"[{lo:.{decimals}f},{hi:.{decimals}f}]" for lo, hi in cis] if cis else [])
        if n == 2:
            res = tests.get((0, 1))
            row.append(res.winner_str() if res else "n/a")
            ci_row.append(res.p_value_str() if res else "")
        rows.append(row)
        if cis:
            rows.append(ci_row)
        chart_groups.append(label)
        for i, v in enumerate(values):
            chart_values[i].append(v)
        results.append(result)
    reports = [AnalysisReport(
        key="scores", title="Aggregate scores", header=header, rows=rows,
        chart=Chart(chart_groups, list(names), chart_values, y_label="score"))]
    if n > 2 and pair_rows:
        reports.append(AnalysisReport(key="scores_pairwise", title="Pairwise significance",
                                      header=["Metric", "Pair", "Win?", "p"], rows=pair_rows))
    return reports, {"kind": "scores", "metrics": results}


# --- word accuracy --------------------------------------------------------

def _word_example_blocks(inputs, examples):
    a, b = inputs.names[0], inputs.names[1]
    blocks = []
    for ex in examples:
        if ex.difference == 0:
            continue
        better = a if ex.difference > 0 else b
        blocks.append(ExampleBlock(
            f"line {ex.index + 1}: {better} better ({a} F={ex.f_measures[0]:.4f}, {b} F={ex.f_measures[1]:.4f})",
            [("Ref", _text(inputs.ref[ex.index])),
             (a, _text(inputs.systems[0][ex.index])),
             (b, _text(inputs.systems[1][ex.index]))]))
    return blocks


def word_accuracy_analysis(spec: AnalysisSpec, idx: int, inputs: Inputs):
    bucketer = inputs.word_bucketer(spec)
    statistic = spec.get("statistic", "fmeas")
    k = int(spec.get("report_length", "10"))
    ref_labels = sys_labels = None
    if bucketer.needs_labels:
        ref_labels = inputs.labels(spec.get("ref_labels"), inputs.ref)
        sys_labels = inputs.sys_labels(spec.get("out_labels"))
    buckets = word_accuracy.word_accuracy_report(inputs.ref, inputs.systems, bucketer, ref_labels, sys_labels)
    names = inputs.names
    rows, values = [], [[] for _ in names]
    for b in buckets:
        stats = [wc.statistic(statistic) for wc in b.systems]
        rows.append([b.bucket_label, *[f"{v:.4f}" for v in stats], str(b.systems[0].ref_count)])
        for i, v in enumerate(stats):
            values[i].append(v)
    drilldowns = {}
    notes = []
    if len(names) >= 2:
        for row, b in enumerate(buckets):
            top, bottom = word_accuracy.bucket_example_sentences(
                inputs.ref, inputs.systems[:2], bucketer, b.bucket_label, k, ref_labels,
                sys_labels[:2] if sys_labels else None)
            drilldowns[row] = Drilldown(
                f"Bucket {b.bucket_label}: sentences where {names[0]} or {names[1]} does better",
                _word_example_blocks(inputs, top) + _word_example_blocks(inputs, bottom))
    else:
        notes.append("single system: bucket example drill-downs skipped")
    kind_name = bucketer.describe()
    report = AnalysisReport(
        key=f"word_accuracy_{idx}", title=f"Word {STAT_NAMES[statistic]} by {kind_name} bucket",
        header=["Bucket", *names, "ref count"], rows=rows,
        chart=Chart([b.bucket_label for b in buckets], list(names), values,
                    y_label=STAT_NAMES[statistic], x_label=f"{kind_name} bucket"),
        drilldowns=drilldowns, notes=notes)
    result = {"kind": "word_accuracy", "bucket_type": bucketer.kind, "statistic": statistic,
              "buckets": [{"bucket": b.bucket_label,
                           "systems": {nm: {"matches": wc.matches, "sys_count": wc.sys_count,
                                            "ref_count": wc.ref_count, "precision": wc.precision,
                                            "recall": wc.recall, "f_measure": wc.f_measure}
                                       for nm, wc in zip(names, b.systems)}}
                          for b in buckets]}
    return [report], result


def src_word_accuracy_analysis(spec: AnalysisSpec, idx: int, inputs: Inputs):
    src = inputs.corpus(spec.get("src"))
    corpus_io.validate_parallel([src, inputs.ref], [spec.get("src"), "reference"])
    ref_align = inputs._cached(("align", spec.get("ref_align")),
                               lambda: corpus_io.load_alignment_corpus(spec.get("ref_align"), src, inputs.ref))
    align_paths = split_list(spec.get("out_aligns"))
    if len(align_paths) != len(inputs.systems):
        raise ValueError(f"out_aligns lists {len(align_paths)} files for {len(inputs.systems)} systems")
    sys_aligns = [corpus_io.load_alignment_corpus(p, src, s) for p, s in zip(align_paths, inputs.systems)]
    bucketer = inputs.word_bucketer(spec)
    src_labels = inputs.labels(spec.get("src_labels"), src) if bucketer.needs_labels else None
    statistic = spec.get("statistic", "fmeas")
    buckets = word_accuracy.source_word_accuracy_report(
        src, inputs.ref, inputs.systems, ref_align, sys_aligns, bucketer, src_labels)
    names = inputs.names
    rows, values = [], [[] for _ in names]
    for b in buckets:
        stats = [wc.statistic(statistic) for wc in b.systems]
        rows.append([b.bucket_label, *[f"{v:.4f}" for v in stats], str(b.systems[0].ref_count)])
        for i, v in enumerate(stats):
            values[i].append(v)
    report = AnalysisReport(
        key=f"src_word_accuracy_{idx}",
        title=f"Source word {STAT_NAMES[statistic]} by {bucketer.describe()} bucket",
        header=["Bucket", *names, "ref count"], rows=rows,
        chart=Chart([b.bucket_label for b in buckets], list(names), values, y_label=STAT_NAMES[statistic]))
    result = {"kind": "src_word_accuracy", "bucket_type": bucketer.kind, "statistic": statistic,
              "buckets": [{"bucket": b.bucket_label,
                           "systems": {nm: {"matches": wc.matches, "sys_count": wc.sys_count,
                                            "ref_count": wc.ref_count}
                                       for nm, wc in zip(names, b.systems)}}
                          for b in buckets]}
    return [report], result


# --- sentence buckets -----------------------------------------------------

def sentence_bucket_analysis(spec: AnalysisSpec, idx: int, inputs: Inputs, decimals: int):
    bucket_type = spec.get("bucket_type", "length")
    statistic = spec.get("statistic", "score")
    score_type = spec.get("score_type", "bleu")
    k = int(spec.get("report_length", "10"))
    scorer = metrics.create_scorer(score_type)
    cutoffs = parse_numbers(spec.get("bucket_cutoffs")) if "bucket_cutoffs" in spec.options else None
    bucketer = bucketing.build_sentence_bucketer(bucket_type, cutoffs, scorer if bucket_type == "score" else None)
    rep = sentence_analysis.sentence_bucket_report(inputs.ref, inputs.systems, bucketer, statistic,
                                                   scorer if statistic == "score" else None)
    names = inputs.names
    rows, drilldowns = [], {}
    for b, label in enumerate(rep.bucket_labels):
        if statistic == "count":
            cells = [str(int(rep.values[s][b])) for s in range(len(names))]
        else:
            cells = [_fmt(rep.values[s][b], decimals) for s in range(len(names))]
        rows.append([label, *cells])
        in_bucket = sorted(set().union(*[rep.members[s][b] for s in range(len(names))]))
        blocks = []
        for i in in_bucket[:k]:
            where = [nm for s, nm in enumerate(names) if i in rep.members[s][b]] if bucketer.per_system else []
            heading = f"line {i + 1}" + (f" (bucket for: {', '.join(where)})" if bucketer.per_system else "")
            blocks.append(ExampleBlock(heading, [("Ref", _text(inputs.ref[i]))] +
                                       [(nm, _text(s[i])) for nm, s in zip(names, inputs.systems)]))
        drilldowns[b] = Drilldown(f"{bucketer.describe()} bucket {label}", blocks)
    stat_name = f"{SCORE_NAMES.get(score_type, score_type)}" if statistic == "score" else "sentence count"
    chart_values = [[v if v is not None else 0.0 for v in vals] for vals in rep.values]
    report = AnalysisReport(
        key=f"sentence_buckets_{idx}", title=f"{stat_name} by {bucketer.describe()} bucket",
        header=["Bucket", *names], rows=rows,
        chart=Chart(list(rep.bucket_labels), list(names), chart_values, y_label=stat_name,
                    x_label=f"{bucketer.describe()} bucket"),
        drilldowns=drilldowns)
    result = {"kind": "sentence_buckets", "bucket_type": bucket_type, "statistic": statistic,
              "score_type": score_type if statistic == "score" or bucket_type == "score" else None,
              "buckets": [{"bucket": label, "values": {nm: rep.values[s][b] for s, nm in enumerate(names)}}
                          for b, label in enumerate(rep.bucket_labels)]}
    return [report], result


# --- pairwise analyses ----------------------------------------------------

def ngram_analysis(spec: AnalysisSpec, idx: int, inputs: Inputs):
    alpha = float(spec.get("alpha", "1.0"))
    min_n = int(spec.get("min_ngram_length", "1"))
    max_n = int(spec.get("max_ngram_length", "4"))
    k = int(spec.get("report_length", "10"))
    ref, systems, unit = inputs.ref, inputs.systems, "n-gram"
    if spec.get("ref_labels"):
        ref = inputs.labels(spec.get("ref_labels"), inputs.ref)
        systems = inputs.sys_labels(spec.get("out_labels"))
        unit = "label n-gram"
    names = inputs.names
    reports, results = [], []
    for a, b in _pairs(len(systems)):
        top, bottom = ngram_diff.ngram_difference_report(ref, systems[a], systems[b], min_n, max_n, alpha, k)
        rows = [[r.text, str(r.m1), str(r.m2), f"{r.p:.3f}"] for r in top + bottom]
        reports.append(AnalysisReport(
            key=f"ngrams_{idx}_{a + 1}_{b + 1}", title=f"{unit} difference: {names[a]} vs {names[b]}",
            header=[unit, "m1", "m2", "s"], rows=rows,
            notes=[f"first {len(top)} rows: {unit}s {names[a]} matches more often; "
                   f"last {len(bottom)} rows: {unit}s {names[b]} matches more often (alpha={alpha:g})"]))
        results.append({"a": names[a], "b": names[b],
                        "top": [[r.text, r.m1, r.m2, r.p] for r in top],
                        "bottom": [[r.text, r.m1, r.m2, r.p] for r in bottom]})
    return reports, {"kind": "ngrams", "alpha": alpha, "min_n": min_n, "max_n": max_n, "pairs": results}


def sentence_example_analysis(spec: AnalysisSpec, idx: int, inputs: Inputs, decimals: int):
    score_type = spec.get("score_type", "sentbleu")
    k = int(spec.get("report_length", "10"))
    scorer = metrics.create_scorer(score_type)
    names = inputs.names
    reports, results = [], []
    for a, b in _pairs(len(inputs.systems)):
        top, bottom = sentence_analysis.sentence_example_report(
            inputs.ref, inputs.systems[a], inputs.systems[b], scorer, k)
        blocks = []
        for direction, exs in (("top", top), ("bottom", bottom)):
            for ex in exs:
                better = names[a] if ex.difference > 0 else names[b] if ex.difference < 0 else "neither"
                blocks.append(ExampleBlock(
                    f"line {ex.index + 1}: {better} better by {abs(ex.difference):.{decimals}f}",
                    [("Ref", _text(inputs.ref[ex.index])),
                     (f"{names[a]} {ex.scores[0]:.{decimals}f}", _text(inputs.systems[a][ex.index])),
                     (f"{names[b]} {ex.scores[1]:.{decimals}f}", _text(inputs.systems[b][ex.index]))]))
        reports.append(AnalysisReport(
            key=f"sentence_examples_{idx}_{a + 1}_{b + 1}",
            title=f"Sentence examples by {SCORE_NAMES.get(score_type, score_type)}: {names[a]} vs {names[b]}",
            header=[], rows=[], examples=blocks))
        results.append({"a": names[a], "b": names[b],
                        "top": [[ex.index, *ex.scores] for ex in top],
                        "bottom": [[ex.index, *ex.scores] for ex in bottom]})
    return reports, {"kind": "sentence_examples", "score_type": score_type, "pairs": results}


# --- driver ---------------------------------------------------------------

PAIRWISE = ("ngrams", "sentence_examples")


def execute(config: RunConfig) -> Tuple[List[AnalysisReport], Dict]:
    """Run every analysis and return the reports plus a JSON-serializable summary."""
    inputs = Inputs(config)
    reports, results, notices = [], [], []
    score_specs = [a for a in config.analyses if a.kind == "scores"]
    if score_specs:
        reps, res = scores_analysis(score_specs, inputs, config.seed, config.decimals)
        reports += reps
        results.append(res)
    counters = {}
    for spec in config.analyses:
        if spec.kind == "scores":
            continue
        if spec.kind in PAIRWISE and len(inputs.systems) < 2:
            notices.append(f"{spec.kind.replace('_', ' ')} analysis skipped: it needs at least two systems")
            continue
        idx = counters[spec.kind] = counters.get(spec.kind, 0) + 1
        if spec.kind == "word_accuracies":
            reps, res = word_accuracy_analysis(spec, idx, inputs)
        elif spec.kind == "src_word_accuracies":
            reps, res = src_word_accuracy_analysis(spec, idx, inputs)
        elif spec.kind == "sentence_buckets":
            reps, res = sentence_bucket_analysis(spec, idx, inputs, config.decimals)
        elif spec.kind == "ngrams":
            reps, res = ngram_analysis(spec, idx, inputs)
        else:
            reps, res = sentence_example_analysis(spec, idx, inputs, config.decimals)
        res["options"] = dict(spec.options)
        reports += reps
        results.append(res)
    if notices:
        reports.append(AnalysisReport(key="notices", title="Notices", header=[], rows=[], notes=notices))
    summary = {"systems": inputs.names, "reference": config.ref, "outputs": list(config.sys),
               "seed": config.seed, "num_sentences": len(inputs.ref), "analyses": results}
    return reports, summary


def _finish(reports, summary, out_dir, title) -> int:
    text = render_text_all(reports)
    files = None
    if out_dir:
        files = build_report_files(reports, title, text)
        files["results.json"] = json.dumps(summary, indent=2, ensure_ascii=False) + "\n"
    sys.stdout.write(text)
    if files is not None:
        write_report_files(out_dir, files)
        logger.info(f"wrote {len(files)} files to {out_dir}")
    return EXIT_OK


def _guard(fn, config) -> int:
    try:
        return fn(config)
    except (corpus_io.CorpusError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except Exception:
        logger.exception("internal error")
        return EXIT_INTERNAL_ERROR


def run(config: RunConfig) -> int:
    def _run(cfg):
        reports, summary = execute(cfg)
        return _finish(reports, summary, cfg.output_directory, "System comparison: " + " vs ".join(cfg.names()))
    return _guard(_run, config)


def execute_ll(config: LLConfig) -> Tuple[List[AnalysisReport], Dict]:
    ref = corpus_io.load_token_corpus(config.ref, config.lowercase)
    lls = [corpus_io.load_likelihood_corpus(p, ref) for p in config.ll_files]
    names = config.names()
    reports, results = [], []
    cache = {}
    for idx, spec in enumerate(config.analyses, start=1):
        if spec.get("bucket_type", "freq") == "label":
            label_set = spec.get("label_set")
            bucketer = bucketing.build_label_bucketer(label_set.split("+") if label_set else None)
            ref_labels = corpus_io.load_label_corpus(spec.get("ref_labels"), ref)
        else:
            path = spec.get("freq_corpus_file")
            if path not in cache:
                cache[path] = corpus_io.load_token_corpus(path, config.lowercase)
            cutoffs = ([int(c) for c in parse_numbers(spec.get("bucket_cutoffs"))]
                       if "bucket_cutoffs" in spec.options else bucketing.DEFAULT_FREQ_CUTOFFS)
            bucketer = bucketing.build_frequency_bucketer(cache[path], cutoffs)
            ref_labels = None
        per_sys = word_accuracy.likelihood_report(ref, lls, bucketer, ref_labels)
        labels = [st.bucket_label for st in per_sys[0]]
        rows = []
        for b, label in enumerate(labels):
            rows.append([label, *[_fmt(per_sys[s][b].mean_log_likelihood, config.decimals) for s in range(len(names))],
                         str(per_sys[0][b].token_count)])
        values = [[st.mean_log_likelihood or 0.0 for st in stats] for stats in per_sys]
        reports.append(AnalysisReport(
            key=f"word_likelihoods_{idx}", title=f"Mean word log likelihood by {bucketer.describe()} bucket",
            header=["Bucket", *names, "tokens"], rows=rows,
            chart=Chart(labels, list(names), values, y_label="mean log likelihood")))
        results.append({"kind": "word_likelihoods", "bucket_type": bucketer.kind, "options": dict(spec.options),
                        "buckets": [{"bucket": label, "token_count": per_sys[0][b].token_count,
                                     "mean_log_likelihood": {nm: per_sys[s][b].mean_log_likelihood
                                                             for s, nm in enumerate(names)}}
                                    for b, label in enumerate(labels)]})
    return reports, {"systems": names, "reference": config.ref, "analyses": results}


def run_ll(config: LLConfig) -> int:
    def _run(cfg):
        reports, summary = execute_ll(cfg)
        return _finish(reports, summary, cfg.output_directory, "Log likelihood comparison")
    return _guard(_run, config)
