"""Result tables, bar-chart data and the run manifest.

Every number written here is read straight off a :class:`RunResult`; nothing
is recomputed at emit time. CSV files carry full-precision ``repr`` floats,
text tables are rounded for reading.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from ..errors import ConfigError
from ..metrics import MultiLabelReport
from ..serial import dumps, sha256_text
from .grid import RunResult

FEATURE_TITLES = {"unigram": "Unigram", "bigram": "Bigram", "trigram": "Trigram", "tfidf": "TFIDF"}
CHART_METRICS = ("weighted-f1", "sample-avg", "auc")
MANIFEST = "manifest.json"


def technique(result: RunResult) -> str:
    """Row label such as ``MLP+TFIDF``."""
    return f"{result.algorithm}+{FEATURE_TITLES[result.feature_mode]}"


@dataclass
class Table:
    """A header plus rows of strings, numbers or None (a failed cell)."""

    header: list[str]
    rows: list[list]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def to_text(self, digits: int = 2) -> str:
        cells = [list(self.header)]
        for row in self.rows:
            cells.append([_fmt(v, digits) for v in row])
        widths = [max(len(r[i]) for r in cells) for i in range(len(self.header))]
        lines = []
        for r in cells:
            first = r[0].ljust(widths[0])
            rest = [v.rjust(w) for v, w in zip(r[1:], widths[1:])]
            lines.append("  ".join([first] + rest).rstrip())
        return "\n".join(lines) + "\n"


def _fmt(v, digits):
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.{digits}f}"
    return str(v)


def read_csv_table(text: str) -> Table:
    """Parse a CSV written by :meth:`Table.to_csv`; numeric cells come back as floats."""
    rows = list(csv.reader(io.StringIO(text)))
    out = []
    for row in rows[1:]:
        parsed = [row[0]]
        for v in row[1:]:
            parsed.append(None if v == "" else float(v))
        out.append(parsed)
    return Table(rows[0], out)


def _ok(results):
    return [r for r in results if r.ok]


def _multi(results) -> bool:
    return any(isinstance(r.report, MultiLabelReport) for r in results)


def _ordered(values):
    return list(dict.fromkeys(values))


def accuracy_matrix(results: Sequence[RunResult]) -> Table:
    """Algorithms down, feature modes across; mean over repeats when there are several."""
    algs = _ordered(r.algorithm for r in results)
    feats = _ordered(r.feature_mode for r in results)
    by_cell = {r.cell: r for r in results}
    rows = []
    for a in algs:
        row = [a]
        for f in feats:
            r = by_cell.get((a, f))
            row.append(r.accuracy_mean if r is not None and r.ok else None)
        rows.append(row)
    return Table(["algorithm"] + [FEATURE_TITLES[f] for f in feats], rows)


def accuracy_range_table(results: Sequence[RunResult]) -> Table:
    """One row per cell with mean, min and max accuracy over repeats."""
    rows = []
    for r in results:
        if r.ok:
            lo, hi = r.accuracy_range
            rows.append([technique(r), r.accuracy_mean, lo, hi, float(len(r.accuracies))])
        else:
            rows.append([technique(r), None, None, None, None])
    return Table(["technique", "mean", "min", "max", "repeats"], rows)


def per_label_accuracy_table(results: Sequence[RunResult]) -> Table:
    """Technique rows, one accuracy column per label, sorted by technique."""
    ok = [r for r in _ok(results) if isinstance(r.report, MultiLabelReport)]
    if not ok:
        raise ConfigError("per-label accuracy needs multi-label results")
    names = ok[0].report.label_names
    rows = [[technique(r)] + list(r.report.per_label_accuracy)
            for r in sorted(ok, key=technique)]
    return Table(["Technique"] + list(names), rows)


def weighted_average_table(results: Sequence[RunResult]) -> Table:
    """Weighted precision, recall, F1 and support, sorted by F1 descending."""
    rows = []
    for r in _ok(results):
        rep = r.report
        if isinstance(rep, MultiLabelReport):
            vals = [rep.weighted_precision, rep.weighted_recall, rep.weighted_f1, rep.support]
        else:
            w = rep.weighted
            vals = [w.precision, w.recall, w.f1, w.support]
        rows.append([technique(r)] + vals)
    rows.sort(key=lambda row: (-row[3], row[0]))
    return Table(["Technique", "Weighted Average Precision", "Weighted Average Recall",
                  "Weighted Average F1-measure", "Weighted Average Support"], rows)


def chart_data(results: Sequence[RunResult], metric: str) -> Table:
    """Bar values per technique, sorted descending by the plotted value.

    ``sample-avg`` and ``auc`` exist only for multi-label results.
    """
    if metric not in CHART_METRICS:
        raise ConfigError(f"unknown chart metric {metric!r}; choose from {list(CHART_METRICS)}")
    ok = _ok(results)
    if metric != "weighted-f1" and not _multi(ok):
        raise ConfigError(f"chart metric {metric!r} is only available for multi-label results")
    if metric == "weighted-f1":
        rows = [[technique(r), r.weighted_f1] for r in ok]
        header = ["technique", "weighted_f1"]
    elif metric == "sample-avg":
        rows = [[technique(r), r.report.sample_precision, r.report.sample_recall,
                 r.report.sample_f1] for r in ok]
        header = ["technique", "sample_precision", "sample_recall", "sample_f1"]
    else:
        rows = [[technique(r), r.report.weighted_auc] for r in ok
                if r.report.weighted_auc is not None]
        header = ["technique", "weighted_auc"]
    rows.sort(key=lambda row: (-row[-1], row[0]))
    return Table(header, rows)


_BAR_COLORS = ("#4C72B0", "#DD8452", "#55A868")


def render_svg(table: Table, title: str) -> str:
    """Horizontal bar chart of every numeric column of ``table`` (values in [0, 1])."""
    series = table.header[1:]
    bar_h, gap, label_w, plot_w = 12, 8, 130, 400
    group_h = bar_h * len(series) + gap
    top = 40
    legend_h = 18 * len(series)
    height = top + group_h * len(table.rows) + legend_h + 30
    width = label_w + plot_w + 70
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{label_w}" y1="{top - 4}" x2="{label_w}" '
        f'y2="{top + group_h * len(table.rows)}" stroke="#000"/>',
    ]
    for i, row in enumerate(table.rows):
        y0 = top + i * group_h
        out.append(f'<text x="{label_w - 6}" y="{y0 + bar_h * len(series) / 2 + 4:.1f}" '
                   f'text-anchor="end">{escape(row[0])}</text>')
        for s, value in enumerate(row[1:]):
            y = y0 + s * bar_h
            w = max(0.0, min(1.0, value)) * plot_w
            color = _BAR_COLORS[s % len(_BAR_COLORS)]
            out.append(f'<rect x="{label_w}" y="{y}" width="{w:.2f}" height="{bar_h - 2}" '
                       f'fill="{color}"/>')
            out.append(f'<text x="{label_w + w + 4:.2f}" y="{y + bar_h - 3}">{value:.3f}</text>')
    ly = top + group_h * len(table.rows) + 16
    for s, name in enumerate(series):
        y = ly + 18 * s
        out.append(f'<rect x="{label_w}" y="{y - 10}" width="10" height="10" '
                   f'fill="{_BAR_COLORS[s % len(_BAR_COLORS)]}"/>')
        out.append(f'<text x="{label_w + 16}" y="{y}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _cell_slug(r: RunResult) -> str:
    return f"{r.algorithm}_{r.feature_mode}"


def results_document(results: Sequence[RunResult], grid=None) -> dict:
    doc = {"results": [r.to_dict() for r in results]}
    if grid is not None:
        doc["grid"] = grid.to_dict()
    return doc


def emit_tables(results: Sequence[RunResult], out_dir, formats=("csv", "text"),
                digits: int = 2) -> list[Path]:
    """Write the accuracy matrix, weighted-average table, per-label table
    (multi-label only) and one classification report per cell."""
    if not results:
        raise ConfigError("no results to emit")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tables = {
        "accuracy": accuracy_matrix(results),
        "weighted_average": weighted_average_table(results),
    }
    if any(len(r.accuracies) > 1 for r in results):
        tables["accuracy_range"] = accuracy_range_table(results)
    if _multi(results):
        tables["per_label_accuracy"] = per_label_accuracy_table(results)
    written = []
    for name, table in tables.items():
        if "csv" in formats:
            written.append(_write(out_dir / f"{name}.csv", table.to_csv()))
        if "text" in formats:
            written.append(_write(out_dir / f"{name}.txt", table.to_text(digits)))
    reports = out_dir / "reports"
    reports.mkdir(exist_ok=True)
    for r in _ok(results):
        slug = _cell_slug(r)
        if isinstance(r.report, MultiLabelReport):
            written.append(_write(reports / f"{slug}.json", dumps(r.report.to_dict()) + "\n"))
        else:
            if "csv" in formats:
                written.append(_write(reports / f"{slug}.csv", r.report.to_csv()))
            if "text" in formats:
                written.append(_write(reports / f"{slug}.txt", r.report.to_text(digits)))
    return written


def emit_chart_data(results: Sequence[RunResult], metric: str, out_dir) -> list[Path]:
    table = chart_data(results, metric)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = metric.replace("-", "_")
    titles = {"weighted-f1": "Weighted average F1-measure",
              "sample-avg": "Sample average precision, recall and F1-measure",
              "auc": "Weighted average AUC"}
    return [_write(out_dir / f"{stem}.csv", table.to_csv()),
            _write(out_dir / f"{stem}.svg", render_svg(table, titles[metric]))]


def emit_all(results: Sequence[RunResult], out_dir, grid=None, formats=("csv", "text"),
             digits: int = 2) -> Path:
    """Tables, charts, ``results.json``, ``timings.csv`` and a manifest of content hashes.

    Timings vary run to run, so they are written beside the manifest but
    left out of it; everything listed in the manifest is reproducible.
    """
    out_dir = Path(out_dir)
    written = emit_tables(results, out_dir, formats, digits)
    metrics = ("weighted-f1", "sample-avg", "auc") if _multi(results) else ("weighted-f1",)
    for metric in metrics:
        written += emit_chart_data(results, metric, out_dir / "charts")
    written.append(_write(out_dir / "results.json", dumps(results_document(results, grid)) + "\n"))
    timing = Table(["technique", "seconds"], [[technique(r), r.seconds] for r in results])
    _write(out_dir / "timings.csv", timing.to_csv())
    return write_manifest(out_dir, written)


def write_manifest(out_dir, files: Sequence[Path]) -> Path:
    out_dir = Path(out_dir)
    entries = {}
    for path in sorted(files):
        entries[path.relative_to(out_dir).as_posix()] = sha256_text(path.read_text(encoding="utf-8"))
    return _write(out_dir / MANIFEST, json.dumps({"files": entries}, indent=2, sort_keys=True) + "\n")


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8", newline="\n")
    return path
