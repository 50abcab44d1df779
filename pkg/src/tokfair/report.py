"""Report tables: CSV, JSON documents and hand-written SVG charts.

Every result object is first flattened into a :class:`Table` with a
``kind`` tag. Output is byte-deterministic: fixed column order, floats
printed with four decimals, and a provenance block that holds no clock
values.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from html import escape
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__
from .coverage import CoverageResult, TokenInspection
from .errors import FormatError
from .info_parity import IPStat
from .parity import TPReport, TPStat
from .registry import Registry, Script, Tier, category_label
from .stats import SMALL_N, MetricVector, ScoreVector, SignedCorrelation

FLOAT_FMT = "{:.4f}"

COLUMNS = {
    "tp": ["model", "code", "corpus_ratio", "mean", "median", "stdev", "n_used", "n_skipped"],
    "ip": ["model", "code", "corpus_ip", "mean_ip", "n_used", "n_skipped"],
    "coverage": ["model", "code", "missing", "total", "proportion"],
    "inspect": ["index", "token", "id", "raw_bytes", "recovered", "fragment_of_char", "ambiguous"],
    "correlation": ["model", "task", "metric", "category", "r", "n", "annotation", "small_n"],
    "vector": ["code", "value"],
}
VALUE_COLUMN = {"tp": "corpus_ratio", "ip": "corpus_ip", "coverage": "proportion", "vector": "value"}
METRIC_NAME = {"tp": "TP", "ip": "IP", "coverage": "missing_proportion"}

CATEGORY_COLORS = {
    (Script.LATIN, Tier.HIGH): "#1f4e9c",
    (Script.LATIN, Tier.MIDDLE): "#4f86d0",
    (Script.LATIN, Tier.LOW): "#9cc3f0",
    (Script.NONLATIN, Tier.HIGH): "#a3341f",
    (Script.NONLATIN, Tier.MIDDLE): "#d9683f",
    (Script.NONLATIN, Tier.LOW): "#f2a883",
}
UNKNOWN_COLOR = "#9a9a9a"


@dataclass
class Table:
    kind: str
    rows: list[list[Any]]
    meta: dict[str, str] = field(default_factory=dict)

    @property
    def columns(self) -> list[str]:
        return COLUMNS[self.kind]

    def records(self) -> list[dict[str, Any]]:
        return [dict(zip(self.columns, r)) for r in self.rows]


@dataclass
class AuditRun:
    command: str
    inputs: list[str] = field(default_factory=list)
    params: dict[str, Any] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    started: float | None = None
    finished: float | None = None
    toolkit_version: str = __version__

    def header(self) -> dict[str, Any]:
        """Provenance written into files; clock values are left out."""
        return {
            "toolkit_version": self.toolkit_version,
            "command": self.command,
            "inputs": list(self.inputs),
            "params": {k: self.params[k] for k in sorted(self.params)},
        }


# -- conversion of result objects -------------------------------------------


def tp_table(report: TPReport) -> Table:
    rows = []
    for model, code, cell in report:
        if isinstance(cell, TPStat):
            rows.append([model, code, cell.corpus_ratio, cell.mean_ratio, cell.median_ratio,
                         cell.stdev_ratio, cell.n_used, cell.n_skipped])
        else:
            rows.append([model, code, None, None, None, None, None, None])
    return Table("tp", rows)


def ip_table(model: str, stats: Iterable[IPStat]) -> Table:
    return Table("ip", [[model, s.code, s.corpus_ip, s.mean_ip, s.n_used, s.n_skipped] for s in stats])


def coverage_table(model: str, results: Iterable[CoverageResult]) -> Table:
    return Table("coverage", [[model, r.code, r.missing, r.total, r.proportion] for r in results])


def inspect_table(records: Sequence[TokenInspection]) -> Table:
    rows = []
    for i, r in enumerate(records):
        d = r.as_dict()
        rows.append([i, d["token"], d["id"], d["raw_bytes"], d["recovered"], d["fragment_of_char"], d["ambiguous"]])
    return Table("inspect", rows)


def correlation_table(results: Iterable[SignedCorrelation]) -> Table:
    rows = []
    for sc in results:
        res = sc.result
        for label, r, n in res.rows():
            rows.append([res.model_name, res.task, res.metric, label, r, n, sc.labels[label], n < SMALL_N])
    return Table("correlation", rows)


def vector_table(values: dict[str, float], meta: dict[str, str] | None = None) -> Table:
    return Table("vector", [[c, v] for c, v in values.items()], dict(meta or {}))


# -- cell formatting ----------------------------------------------------------


def _fmt_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return FLOAT_FMT.format(v)
    return str(v)


def _doc_cell(v: Any) -> Any:
    if isinstance(v, float) and not isinstance(v, bool):
        return float(FLOAT_FMT.format(v))
    return v


# -- writers -------------------------------------------------------------------


def _provenance_lines(run: AuditRun | None, table: Table) -> list[str]:
    lines = [f"tokfair {__version__}", f"kind: {table.kind}"]
    for k in sorted(table.meta):
        lines.append(f"{k}: {table.meta[k]}")
    if run is not None:
        head = run.header()
        lines.append(f"command: {head['command']}")
        for p in head["inputs"]:
            lines.append(f"input: {p}")
        for k, v in head["params"].items():
            lines.append(f"param.{k}: {v}")
    return lines


def render_csv(table: Table, run: AuditRun | None = None) -> str:
    buf = io.StringIO()
    for line in _provenance_lines(run, table):
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_fmt_cell(v) for v in row])
    return buf.getvalue()


def render_doc(table: Table, run: AuditRun | None = None) -> str:
    doc = {
        "provenance": run.header() if run is not None else {"toolkit_version": __version__},
        "kind": table.kind,
        "meta": dict(sorted(table.meta.items())),
        "columns": table.columns,
        "records": [{k: _doc_cell(v) for k, v in rec.items()} for rec in table.records()],
    }
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def render(table: Table, fmt: str, run: AuditRun | None = None, registry: Registry | None = None) -> str:
    if not table.rows:
        raise ValueError("nothing to report: result set is empty")
    if fmt == "csv":
        return render_csv(table, run)
    if fmt == "doc":
        return render_doc(table, run)
    if fmt == "svg":
        if table.kind == "correlation":
            return heatmap_svg(table, run)
        if table.kind in VALUE_COLUMN:
            return bar_chart_svg(table, registry, run)
        raise ValueError(f"no chart for {table.kind} results")
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(table: Table, fmt: str, path: str | Path | None = None, run: AuditRun | None = None,
                registry: Registry | None = None) -> str:
    """Render ``table`` and write it to ``path`` (if given). Returns the text."""
    text = render(table, fmt, run, registry)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    return text


# -- readers -------------------------------------------------------------------


def _parse_cell(col: str, raw: str) -> Any:
    if raw == "":
        return None
    if col in ("n_used", "n_skipped", "missing", "total", "n", "index", "id"):
        return int(raw)
    if col in ("fragment_of_char", "ambiguous", "small_n"):
        return raw == "true"
    if col in ("corpus_ratio", "mean", "median", "stdev", "corpus_ip", "mean_ip", "proportion", "r", "value"):
        return float(raw)
    return raw


def parse_csv(text: str, source: str = "<csv>") -> Table:
    meta: dict[str, str] = {}
    lines = text.splitlines(keepends=True)
    start = 0
    while start < len(lines) and (lines[start].startswith("#") or not lines[start].strip()):
        key, sep, value = lines[start][1:].strip().partition(":")
        if sep:
            meta[key.strip()] = value.strip()
        start += 1
    if start == len(lines):
        raise FormatError(f"{source}: no CSV header")
    reader = csv.reader(io.StringIO("".join(lines[start:]), newline=""))
    header = [h.strip() for h in next(reader)]
    kind = meta.pop("kind", None)
    if kind is None:
        kind = next((k for k, cols in COLUMNS.items() if cols == header), None)
    if kind not in COLUMNS or COLUMNS[kind] != header:
        raise FormatError(f"{source}: unrecognised columns {header}")
    rows = []
    for i, rec in enumerate(reader, 2):
        if not rec:
            continue
        if len(rec) != len(header):
            raise FormatError(f"{source}: row {i} has {len(rec)} fields, expected {len(header)}")
        try:
            rows.append([_parse_cell(c, v.strip()) for c, v in zip(header, rec)])
        except ValueError as e:
            raise FormatError(f"{source}: row {i}: {e}") from None
    for k in [k for k in meta if k.startswith(("tokfair", "command", "input", "param."))]:
        meta.pop(k)
    return Table(kind, rows, meta)


def parse_doc(text: str, source: str = "<doc>") -> Table:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind not in COLUMNS:
        raise FormatError(f"{source}: unknown report kind {kind!r}")
    cols = COLUMNS[kind]
    rows = [[rec.get(c) for c in cols] for rec in doc.get("records", [])]
    return Table(kind, rows, dict(doc.get("meta", {})))


def read_table(path: str | Path) -> Table:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return parse_doc(text, str(path))
    return parse_csv(text, str(path))


def metric_vectors(table: Table, name: str | None = None) -> list[MetricVector]:
    """Per-model metric vectors from a tp/ip/coverage/vector table."""
    if table.kind not in VALUE_COLUMN:
        raise FormatError(f"a {table.kind} table holds no metric values")
    if table.kind == "vector":
        values = {r[0]: r[1] for r in table.rows if r[1] is not None}
        return [MetricVector(name or table.meta.get("metric", "metric"), values, table.meta.get("model", ""))]
    col = table.columns.index(VALUE_COLUMN[table.kind])
    by_model: dict[str, dict[str, float]] = {}
    for r in table.rows:
        if r[col] is not None:
            by_model.setdefault(r[0], {})[r[1]] = r[col]
    label = name or METRIC_NAME[table.kind]
    return [MetricVector(label, vals, model) for model, vals in by_model.items()]


def read_metric_vectors(path: str | Path) -> list[MetricVector]:
    table = read_table(path)
    name = table.meta.get("metric") or (Path(path).stem if table.kind == "vector" else None)
    return metric_vectors(table, name)


def read_score_vector(path: str | Path) -> ScoreVector:
    table = read_table(path)
    if table.kind != "vector":
        raise FormatError(f"{path}: score files use the 'code,value' layout")
    values = {r[0]: r[1] for r in table.rows if r[1] is not None}
    return ScoreVector(
        task=table.meta.get("task", Path(path).stem),
        model_name=table.meta.get("model", ""),
        values=values,
        bounded=table.meta.get("bounded", "false").lower() == "true",
    )


# -- SVG -------------------------------------------------------------------------


def _svg_open(width: int, height: int, run: AuditRun | None, title: str) -> list[str]:
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
    ]
    if run is not None:
        out.append(f"<metadata>{escape(json.dumps(run.header(), ensure_ascii=False, sort_keys=True))}</metadata>")
    out.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>')
    out.append(f'<text x="10" y="18" font-size="14" font-weight="bold">{escape(title)}</text>')
    return out


def _num(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def bar_chart_svg(table: Table, registry: Registry | None, run: AuditRun | None = None) -> str:
    """One panel per model, one bar per language, coloured by script x tier."""
    col = table.columns.index(VALUE_COLUMN[table.kind])
    models: dict[str, dict[str, float]] = {}
    for r in table.rows:
        model = r[0] if table.kind != "vector" else table.meta.get("model", "")
        code = r[1] if table.kind != "vector" else r[0]
        models.setdefault(model, {})
        if r[col] is not None:
            models[model][code] = r[col]
    all_codes = {c for vals in models.values() for c in vals}
    codes = registry.sort_codes(all_codes) if registry else sorted(all_codes)
    vmax = max([v for vals in models.values() for v in vals.values()] + [1.0])
    vmax = math.ceil(vmax * 4) / 4 or 1.0
    bar_w, gap, left, panel_h, label_h = 14, 4, 50, 160, 80
    width = left + len(codes) * (bar_w + gap) + 20
    legend_h = 24
    height = 30 + legend_h + len(models) * (panel_h + label_h + 20)
    title = {"tp": "Tokenization parity", "ip": "Information parity",
             "coverage": "Missing character proportion"}.get(table.kind, table.meta.get("metric", "value"))
    out = _svg_open(max(width, 680), height, run, title)
    # legend
    x = 10
    for (script, tier), color in CATEGORY_COLORS.items():
        out.append(f'<rect x="{x}" y="30" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{x + 14}" y="39">{category_label(script, tier)}</text>')
        x += 110
    y0 = 30 + legend_h
    for model, vals in models.items():
        top = y0 + 16
        base = top + panel_h
        out.append(f'<text x="10" y="{y0 + 10}" font-weight="bold">{escape(model or "(unnamed)")}</text>')
        for tick in range(5):
            v = vmax * tick / 4
            y = base - panel_h * tick / 4
            out.append(f'<line x1="{left - 4}" y1="{y:.1f}" x2="{width - 10}" y2="{y:.1f}" stroke="#e0e0e0"/>')
            out.append(f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end">{_num(v)}</text>')
        if table.kind in ("tp", "ip") and vmax >= 1.0:
            y = base - panel_h / vmax
            out.append(f'<line x1="{left}" y1="{y:.1f}" x2="{width - 10}" y2="{y:.1f}" '
                       f'stroke="#333333" stroke-dasharray="4 3"/>')
        for i, code in enumerate(codes):
            bx = left + i * (bar_w + gap)
            if code in vals:
                h = panel_h * vals[code] / vmax
                color = UNKNOWN_COLOR
                if registry and code in registry:
                    color = CATEGORY_COLORS[registry[code].category]
                out.append(f'<rect x="{bx}" y="{base - h:.1f}" width="{bar_w}" height="{h:.1f}" fill="{color}">'
                           f'<title>{escape(code)}: {FLOAT_FMT.format(vals[code])}</title></rect>')
            lx, ly = bx + bar_w / 2 + 3, base + 6
            out.append(f'<text x="{lx:.1f}" y="{ly}" transform="rotate(-60 {lx:.1f} {ly})" '
                       f'text-anchor="end" font-size="9">{escape(code)}</text>')
        y0 = base + label_h + 20
    out.append("</svg>")
    return "\n".join(out) + "\n"


def diverging_color(r: float | None) -> str:
    """Red for -1, white for 0, blue for +1; grey for undefined."""
    if r is None:
        return "#cccccc"
    r = max(-1.0, min(1.0, r))
    target = (33, 102, 172) if r > 0 else (178, 24, 43)
    t = abs(r)
    rgb = [round(255 + (c - 255) * t) for c in target]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def heatmap_svg(table: Table, run: AuditRun | None = None) -> str:
    """One grid per metric: models down, tasks across, overall r per cell."""
    cells: dict[tuple[str, str, str], tuple[float | None, str]] = {}
    metrics: list[str] = []
    models: list[str] = []
    tasks: list[str] = []
    for rec in table.records():
        if rec["category"] != "overall":
            continue
        for seq, v in ((metrics, rec["metric"]), (models, rec["model"]), (tasks, rec["task"])):
            if v not in seq:
                seq.append(v)
        cells[(rec["metric"], rec["model"], rec["task"])] = (rec["r"], rec["annotation"])
    cw, ch, left, top = 90, 34, 110, 60
    grid_w = len(tasks) * cw
    width = left + len(metrics) * (grid_w + 40) + 20
    height = top + len(models) * ch + 60
    out = _svg_open(max(width, 320), height, run, "Correlation with task scores")
    for mi, metric in enumerate(metrics):
        gx = left + mi * (grid_w + 40)
        out.append(f'<text x="{gx + grid_w / 2:.1f}" y="{top - 24}" text-anchor="middle" '
                   f'font-weight="bold">{escape(metric)}</text>')
        for ti, task in enumerate(tasks):
            out.append(f'<text x="{gx + ti * cw + cw / 2:.1f}" y="{top - 6}" text-anchor="middle">{escape(task)}</text>')
        for ri, model in enumerate(models):
            if mi == 0:
                out.append(f'<text x="{left - 8}" y="{top + ri * ch + ch / 2 + 4:.1f}" '
                           f'text-anchor="end">{escape(model)}</text>')
            for ti, task in enumerate(tasks):
                x, y = gx + ti * cw, top + ri * ch
                if (metric, model, task) not in cells:
                    out.append(f'<rect x="{x}" y="{y}" width="{cw}" height="{ch}" fill="#f4f4f4" stroke="#ffffff"/>')
                    continue
                r, note = cells[(metric, model, task)]
                label = "n/a" if r is None else f"{r:.3f}"
                mark = {"expected": " +", "opposite": " !"}.get(note, "")
                ink = "#ffffff" if r is not None and abs(r) > 0.6 else "#000000"
                out.append(f'<rect x="{x}" y="{y}" width="{cw}" height="{ch}" fill="{diverging_color(r)}" '
                           f'stroke="#ffffff"><title>{escape(model)} / {escape(task)} / {escape(metric)}: '
                           f'{escape(note)}</title></rect>')
                out.append(f'<text x="{x + cw / 2:.1f}" y="{y + ch / 2 + 4:.1f}" text-anchor="middle" '
                           f'fill="{ink}">{label}{mark}</text>')
    out.append(f'<text x="10" y="{height - 12}" font-size="9">cell colour: diverging scale, red = -1, '
               f'white = 0, blue = +1; "+" expected sign, "!" opposite sign</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
