"""Renderer-agnostic analysis reports and their text, LaTeX, SVG and HTML forms.

Rendering is a pure function of the report objects: no timestamps, no
randomness, fixed number formatting. The HTML output is well-formed XHTML so
it can be checked with any XML parser.
"""

import math
import os
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape as _xml_escape, quoteattr as _xml_quoteattr

# characters XML 1.0 does not allow, even escaped
_XML_ILLEGAL = re.compile("[\x00-\x08\x0b\x0c\x0e-\x1f\ufffe\uffff]")

PALETTE = ("#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#9c755f")


@dataclass
class Chart:
    groups: List[str]
    series: List[str]
    # values[series][group]
    values: List[List[float]]
    y_label: str = ""
    x_label: str = ""


@dataclass
class ExampleBlock:
    heading: str
    # (role, text), e.g. ("Ref", "...") or ("PBMT 41.20", "...")
    lines: List[Tuple[str, str]]


@dataclass
class Drilldown:
    title: str
    examples: List[ExampleBlock]


@dataclass
class AnalysisReport:
    key: str
    title: str
    header: List[str]
    rows: List[List[str]]
    chart: Optional[Chart] = None
    # None: the analysis has no example section; []: an empty one
    examples: Optional[List[ExampleBlock]] = None
    # row index -> drill-down page
    drilldowns: Dict[int, Drilldown] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.header):
                raise ValueError(f"{self.key}: row {row} has {len(row)} cells, header has {len(self.header)}")
        if self.chart is not None:
            if len(self.chart.values) != len(self.chart.series):
                raise ValueError(f"{self.key}: chart has {len(self.chart.values)} value rows "
                                 f"for {len(self.chart.series)} series")
            for vals in self.chart.values:
                if len(vals) != len(self.chart.groups):
                    raise ValueError(f"{self.key}: chart series of length {len(vals)} "
                                     f"for {len(self.chart.groups)} groups")


def escape(text: str) -> str:
    return _xml_escape(_XML_ILLEGAL.sub("\ufffd", text))


def quoteattr(text: str) -> str:
    return _xml_quoteattr(_XML_ILLEGAL.sub("\ufffd", text))


# --- text -----------------------------------------------------------------

def _text_table(header, rows):
    widths = [max(len(r[c]) for r in [header] + rows) for c in range(len(header))]
    lines = []
    for row in [header] + rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    lines.insert(1, "  ".join("-" * w for w in widths))
    return lines


def _text_examples(blocks):
    if not blocks:
        return ["(none)"]
    out = []
    for block in blocks:
        out.append(f"--- {block.heading}")
        width = max(len(role) for role, _ in block.lines) if block.lines else 0
        out.extend(f"{role.ljust(width)} | {text}" for role, text in block.lines)
    return out


def render_text(report: AnalysisReport) -> str:
    lines = [report.title, "=" * len(report.title)]
    lines.extend(report.notes)
    if report.header:
        lines.extend(_text_table(report.header, report.rows))
    if report.examples is not None:
        if report.header:
            lines.append("")
        lines.extend(_text_examples(report.examples))
    return "\n".join(lines) + "\n"


def render_text_all(reports: Sequence[AnalysisReport]) -> str:
    return "\n".join(render_text(r) for r in reports)


# --- LaTeX ----------------------------------------------------------------

_LATEX_SPECIAL = {
    "\\": r"\textbackslash{}", "&": r"\&", "%": r"\%", "$": r"\$", "#": r"\#", "_": r"\_",
    "{": r"\{", "}": r"\}", "~": r"\textasciitilde{}", "^": r"\textasciicircum{}",
    "<": r"$<$", ">": r"$>$", "≥": r"$\geq$", "≤": r"$\leq$",
}


def latex_escape(text: str) -> str:
    return "".join(_LATEX_SPECIAL.get(ch, ch) for ch in text)


def render_latex(report: AnalysisReport) -> str:
    """Render the report table as a ``tabular`` environment."""
    lines = [f"% {latex_escape(report.title)}"]
    if report.header:
        ncols = len(report.header)
        lines += ["\\begin{tabular}{" + "l" + "c" * (ncols - 1) + "}",
                  "\\hline",
                  " & ".join(latex_escape(h) for h in report.header) + " \\\\ \\hline \\hline"]
        for row in report.rows:
            lines.append(" & ".join(latex_escape(c) for c in row) + " \\\\")
        lines += ["\\hline", "\\end{tabular}"]
    if report.examples:
        if report.header:
            lines.append("")
        lines.append("\\begin{tabular}{ll}")
        for block in report.examples:
            lines.append("\\hline")
            lines.append("\\multicolumn{2}{l}{" + latex_escape(block.heading) + "} \\\\")
            for role, text in block.lines:
                lines.append(f"{latex_escape(role)} & {latex_escape(text)} \\\\")
        lines += ["\\hline", "\\end{tabular}"]
    return "\n".join(lines) + "\n"


# --- SVG ------------------------------------------------------------------

def _f(x: float) -> str:
    return f"{x:.2f}"


def _nice_step(span: float) -> float:
    raw = span / 5.0
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if raw <= m * mag:
            return m * mag
    return 10 * mag


def render_svg_bar_chart(chart: Chart, title: str = "") -> str:
    """Grouped bar chart as a standalone SVG document."""
    if not chart.groups or not chart.series:
        raise ValueError("a chart needs at least one group and one series")
    for vals in chart.values:
        for v in vals:
            if not math.isfinite(v):
                raise ValueError(f"non-finite chart value {v}")
    n_groups, n_series = len(chart.groups), len(chart.series)
    bar_w = 14.0
    group_w = bar_w * n_series + 12.0
    left, right, top, bottom = 60.0, 20.0, 30.0 if title else 12.0, 70.0
    plot_h = 220.0
    legend_h = 16.0 * n_series + 8.0
    width = left + group_w * n_groups + right
    height = top + plot_h + bottom + legend_h

    lo = min(0.0, min(min(v) for v in chart.values))
    hi = max(0.0, max(max(v) for v in chart.values))
    if hi == lo:
        hi = lo + 1.0
    step = _nice_step(hi - lo)
    lo = math.floor(lo / step) * step
    hi = math.ceil(hi / step) * step

    def y_of(v):
        return top + plot_h * (hi - v) / (hi - lo)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" '
           f'viewBox="0 0 {_f(width)} {_f(height)}" font-family="sans-serif" font-size="11">']
    if title:
        out.append(f'<text x="{_f(width / 2)}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>')
    # gridlines and y ticks
    n_ticks = int(round((hi - lo) / step))
    for t in range(n_ticks + 1):
        v = lo + t * step
        y = y_of(v)
        out.append(f'<line x1="{_f(left)}" y1="{_f(y)}" x2="{_f(width - right)}" y2="{_f(y)}" stroke="#dddddd"/>')
        out.append(f'<text x="{_f(left - 6)}" y="{_f(y + 4)}" text-anchor="end">{v:g}</text>')
    zero = y_of(0.0)
    for g, group in enumerate(chart.groups):
        gx = left + g * group_w + 6.0
        for s in range(n_series):
            v = chart.values[s][g]
            y = min(y_of(v), zero)
            h = abs(zero - y_of(v))
            out.append(f'<rect class="bar" x="{_f(gx + s * bar_w)}" y="{_f(y)}" width="{_f(bar_w - 1)}" '
                       f'height="{_f(h)}" fill="{PALETTE[s % len(PALETTE)]}">'
                       f'<title>{escape(chart.series[s])} {escape(group)}: {v:.4g}</title></rect>')
        cx = gx + bar_w * n_series / 2
        ly = top + plot_h + 14
        out.append(f'<text x="{_f(cx)}" y="{_f(ly)}" text-anchor="end" '
                   f'transform="rotate(-35 {_f(cx)} {_f(ly)})">{escape(group)}</text>')
    # axes
    out.append(f'<line x1="{_f(left)}" y1="{_f(top)}" x2="{_f(left)}" y2="{_f(top + plot_h)}" stroke="black"/>')
    out.append(f'<line x1="{_f(left)}" y1="{_f(zero)}" x2="{_f(width - right)}" y2="{_f(zero)}" stroke="black"/>')
    if chart.y_label:
        cy = top + plot_h / 2
        out.append(f'<text x="14" y="{_f(cy)}" text-anchor="middle" '
                   f'transform="rotate(-90 14 {_f(cy)})">{escape(chart.y_label)}</text>')
    if chart.x_label:
        out.append(f'<text x="{_f(left + group_w * n_groups / 2)}" y="{_f(top + plot_h + bottom - 6)}" '
                   f'text-anchor="middle">{escape(chart.x_label)}</text>')
    # legend
    for s, name in enumerate(chart.series):
        ly = top + plot_h + bottom + 4 + 16 * s
        out.append(f'<rect class="legend" x="{_f(left)}" y="{_f(ly)}" width="10" height="10" '
                   f'fill="{PALETTE[s % len(PALETTE)]}"/>')
        out.append(f'<text x="{_f(left + 16)}" y="{_f(ly + 9)}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --- HTML -----------------------------------------------------------------

_CSS = """body { font-family: sans-serif; margin: 2em; }
table { border-collapse: collapse; margin: 0.5em 0; }
td, th { border: 1px solid #bbbbbb; padding: 2px 8px; }
th { background: #eeeeee; }
.ex td:first-child { font-weight: bold; white-space: nowrap; }"""


def _page(title: str, body: List[str]) -> str:
    return "\n".join([
        '<?xml version="1.0" encoding="UTF-8"?>',
        "<!DOCTYPE html>",
        '<html xmlns="http://www.w3.org/1999/xhtml" lang="en">',
        "<head>",
        '<meta charset="UTF-8"/>',
        f"<title>{escape(title)}</title>",
        f"<style>\n{_CSS}\n</style>",
        "</head>",
        "<body>",
        *body,
        "</body>",
        "</html>",
    ]) + "\n"


def _html_examples(blocks: List[ExampleBlock]) -> List[str]:
    if not blocks:
        return ["<p>(none)</p>"]
    out = []
    for block in blocks:
        out.append(f"<h3>{escape(block.heading)}</h3>")
        out.append('<table class="ex">')
        out.extend(f"<tr><td>{escape(role)}</td><td>{escape(text)}</td></tr>" for role, text in block.lines)
        out.append("</table>")
    return out


def drilldown_filename(report: AnalysisReport, row: int) -> str:
    return f"{report.key}_{row}.html"


def render_html_section(report: AnalysisReport, chart_svg: Optional[str] = None) -> List[str]:
    out = [f'<h2 id={quoteattr(report.key)}>{escape(report.title)}</h2>']
    out.extend(f"<p>{escape(n)}</p>" for n in report.notes)
    if chart_svg is not None:
        out.append('<div class="chart">')
        out.append(chart_svg.rstrip("\n"))
        out.append("</div>")
    if report.header:
        out.append("<table>")
        out.append("<tr>" + "".join(f"<th>{escape(h)}</th>" for h in report.header) + "</tr>")
        for i, row in enumerate(report.rows):
            cells = [escape(c) for c in row]
            if i in report.drilldowns:
                href = "examples/" + drilldown_filename(report, i)
                cells[0] = f"<a href={quoteattr(href)}>{cells[0]}</a>"
            out.append("<tr>" + "".join(f"<td>{c}</td>" for c in cells) + "</tr>")
        out.append("</table>")
    links = [f'<a href={quoteattr("latex/" + report.key + ".tex")}>LaTeX</a>']
    if report.chart is not None:
        links.append(f'<a href={quoteattr("charts/" + report.key + ".svg")}>SVG</a>')
    out.append("<p>" + " | ".join(links) + "</p>")
    if report.examples is not None:
        out.extend(_html_examples(report.examples))
    return out


def render_drilldown_page(report: AnalysisReport, row: int) -> str:
    dd = report.drilldowns[row]
    body = [f"<h1>{escape(dd.title)}</h1>",
            f'<p><a href={quoteattr("../index.html#" + report.key)}>back to {escape(report.title)}</a></p>']
    body.extend(_html_examples(dd.examples))
    return _page(dd.title, body)


def build_report_files(reports: Sequence[AnalysisReport], title: str = "System comparison",
                       text_report: Optional[str] = None) -> Dict[str, str]:
    """Map each relative path of the report tree to its contents.

    Layout: ``index.html``, ``charts/*.svg``, ``examples/*.html``,
    ``latex/*.tex`` and, when ``text_report`` is given, ``report.txt``.
    """
    keys = [r.key for r in reports]
    if len(set(keys)) != len(keys):
        raise ValueError(f"duplicate report keys: {keys}")
    files = {}
    body = [f"<h1>{escape(title)}</h1>", "<ul>"]
    body.extend(f'<li><a href={quoteattr("#" + r.key)}>{escape(r.title)}</a></li>' for r in reports)
    body.append("</ul>")
    if text_report is not None:
        body.append('<p><a href="report.txt">plain text report</a></p>')
        files["report.txt"] = text_report
    for r in reports:
        svg = None
        if r.chart is not None:
            svg = render_svg_bar_chart(r.chart)
            files[f"charts/{r.key}.svg"] = svg
        body.extend(render_html_section(r, svg))
        files[f"latex/{r.key}.tex"] = render_latex(r)
        for row in sorted(r.drilldowns):
            files["examples/" + drilldown_filename(r, row)] = render_drilldown_page(r, row)
    files["index.html"] = _page(title, body)
    return files


def write_report_files(out_dir: str, files: Dict[str, str]) -> List[str]:
    """Write ``files`` under ``out_dir``; on failure remove whatever was written."""
    written = []
    try:
        for rel in sorted(files):
            path = os.path.join(out_dir, *rel.split("/"))
            os.makedirs(os.path.dirname(path), exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                written.append(path)
                f.write(files[rel])
    except OSError:
        for path in written:
            try:
                os.remove(path)
            except OSError:
                pass
        raise
    return sorted(files)


def render_html_index(reports: Sequence[AnalysisReport], out_dir: str, title: str = "System comparison",
                      text_report: Optional[str] = None) -> List[str]:
    """Write the static report tree and return the relative paths written, sorted."""
    return write_report_files(out_dir, build_report_files(reports, title, text_report))
