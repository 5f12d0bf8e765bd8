"""Tables, CSV and SVG output for the command-line tool."""

import csv
import io
import os
import tempfile
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from xml.sax.saxutils import escape

import numpy as np

from .errors import NonPositiveRate, PhavailError
from .lindley import (
    Law,
    availability_closed,
    availability_exponential_closed,
    dA_dlambda,
    dA_dmu,
    reliability_lindley,
    steady_state_exponential,
    steady_state_lindley,
)
from .system import Structure, SystemModel, combine, component_curve

SENSITIVITY_MULTIPLIERS = (0.5, 1.0, 1.5, 2.0)


def round_half_away(x: float, places: int) -> str:
    """Format ``x`` with ``places`` decimals, rounding ties away from zero.

    Rounds the shortest repr of the float, i.e. the decimal number a reader
    would see, not its binary expansion.
    """
    q = Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)
    if q == 0:
        q = abs(q)
    return f"{q:.{places}f}"


def fmt_rate(x: float) -> str:
    return f"{x:g}"


def fmt_float(x: float) -> str:
    """17 significant digits: round-trips exactly and ignores locale."""
    return f"{x:.17g}"


@dataclass
class ReportTable:
    title: str
    headers: list
    rows: list
    note: str = ""
    footer: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def render(self) -> str:
        cells = [self.headers] + self.rows
        widths = [max(len(r[i]) for r in cells) for i in range(len(self.headers))]
        lines = [self.title]
        if self.note:
            lines.append(f"({self.note})")
        for r in cells:
            lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w)
                                   for i, (c, w) in enumerate(zip(r, widths))).rstrip())
        lines.extend(self.footer)
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.headers)
        w.writerows(self.rows)
        return buf.getvalue()


# -- tables -------------------------------------------------------------------

def _gain(exp_value, lin_value):
    pp = 100.0 * (lin_value - exp_value)
    rel = 100.0 * (lin_value / exp_value - 1.0)
    return round_half_away(pp, 2), round_half_away(rel, 2)


def steady_state_table(model: SystemModel) -> ReportTable:
    """Long-run availability of every component and the system under both laws."""
    headers = ["unit", "lambda", "mu", "A_inf_exponential", "A_inf_lindley", "abs_gain_pp", "rel_gain_pct"]
    rows = []
    exp_vals, lin_vals = [], []
    for c in model.components:
        p = c.params
        if p.mu <= 0:
            raise NonPositiveRate("mu", p.mu)
        e = steady_state_exponential(p.lam, p.mu)
        ell = steady_state_lindley(p.lam, p.mu)
        exp_vals.append(e)
        lin_vals.append(ell)
        rows.append([c.label, fmt_rate(p.lam), fmt_rate(p.mu),
                     round_half_away(e, 4), round_half_away(ell, 4), *_gain(e, ell)])
    if model.structure is not Structure.SINGLE:
        e = float(combine(model.structure, exp_vals))
        ell = float(combine(model.structure, lin_vals))
        rows.append([f"system ({model.structure.value})", "-", "-",
                     round_half_away(e, 4), round_half_away(ell, 4), *_gain(e, ell)])
    return ReportTable(
        title=f"Steady-state availability: {model.name}",
        headers=headers,
        rows=rows,
        note="closed-form long-run formulas; abs_gain_pp = percentage points, rel_gain_pct = Lindley/exponential - 1",
    )


def sensitivity_table(label, lam, mu, param, values) -> ReportTable:
    """Lindley long-run availability and its partial derivative over ``values``."""
    rows = []
    derivs = []
    for v in values:
        lv, mv = (v, mu) if param == "lambda" else (lam, v)
        a = steady_state_lindley(lv, mv)
        d = dA_dlambda(lv, mv) if param == "lambda" else dA_dmu(lv, mv)
        derivs.append(d)
        rows.append([fmt_rate(v), round_half_away(a, 4), d])
    # three significant figures at the scale of the largest derivative
    places = 1 if max(abs(d) for d in derivs) >= 10 else 2
    for r in rows:
        r[2] = round_half_away(r[2], places)
    held = f"mu = {fmt_rate(mu)}" if param == "lambda" else f"lambda = {fmt_rate(lam)}"
    return ReportTable(
        title=f"Sensitivity of Lindley A_inf to {param}: {label} ({held} fixed)",
        headers=[param, "A_inf_lindley", f"dA_inf/d{param}"],
        rows=rows,
        note="closed-form long-run availability and its analytic derivative",
        meta={"unit": label, "param": param, "held": held},
    )


def sensitivity_tables(model: SystemModel, params=("lambda", "mu"), values=None, component=None):
    """One table per (component, parameter); default values are the nominal rate x 0.5, 1, 1.5, 2.

    Components with identical rates share a table.
    """
    tables = []
    groups = {}
    for c in model.components:
        if component is not None and c.label != component:
            continue
        groups.setdefault((c.params.lam, c.params.mu), []).append(c.label)
    if component is not None and not groups:
        raise PhavailError(f"no component labelled {component!r}")
    for param in params:
        for (lam, mu), labels in groups.items():
            nominal = lam if param == "lambda" else mu
            vals = values if values is not None else [round(m * nominal, 12) for m in SENSITIVITY_MULTIPLIERS]
            tables.append(sensitivity_table("/".join(labels), lam, mu, param, vals))
    return tables


def sensitivity_csv(tables) -> str:
    """All sensitivity tables as one long-format CSV."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["unit", "param", "value", "held_fixed", "A_inf_lindley", "derivative"])
    for t in tables:
        for value, a, d in t.rows:
            w.writerow([t.meta["unit"], t.meta["param"], value, t.meta["held"], a, d])
    return buf.getvalue()


# -- curves -------------------------------------------------------------------

def availability_columns(model: SystemModel, times):
    """``{column: values}`` comparing Lindley and exponential availability."""
    cols = {"t": times}
    for c in model.components:
        p = c.params
        cols[f"{c.label}_lindley"] = np.atleast_1d(availability_closed(p.lam, p.mu, times))
        cols[f"{c.label}_exponential"] = np.atleast_1d(availability_exponential_closed(p.lam, p.mu, times))
    if model.structure is not Structure.SINGLE:
        cols["system"] = combine(model.structure, [np.atleast_1d(component_curve(p, times)) for p in model.params])
    return cols


def reliability_columns(model: SystemModel, times):
    """``{column: values}`` with and without repair for each component."""
    cols = {"t": times}
    for c in model.components:
        p = c.params
        cols[f"{c.label}_with_repair"] = np.atleast_1d(component_curve(p, times))
        if p.law is Law.EXPONENTIAL:
            cols[f"{c.label}_no_repair"] = np.exp(-p.lam * np.asarray(times))
        else:
            cols[f"{c.label}_no_repair"] = np.atleast_1d(reliability_lindley(p.lam, times))
    return cols


def columns_to_csv(cols) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = list(cols)
    w.writerow(names)
    for row in zip(*(cols[n] for n in names)):
        w.writerow([fmt_float(x) for x in row])
    return buf.getvalue()


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [float(v) for v in np.arange(start, hi + step * 1e-9, step)]


def columns_to_svg(cols, title, ylabel, width=720, height=440) -> str:
    """Static SVG 1.1 line chart of every non-``t`` column against ``t``."""
    names = [n for n in cols if n != "t"]
    t = np.asarray(cols["t"], dtype=float)
    ys = np.array([np.asarray(cols[n], dtype=float) for n in names])
    left, right, top, bottom = 70, 170, 40, 55
    pw, ph = width - left - right, height - top - bottom
    x0, x1 = float(t.min()), float(t.max())
    if x1 == x0:
        x1 = x0 + 1.0
    y0, y1 = float(ys.min()), float(ys.max())
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for v in _ticks(x0, x1):
        x = sx(v)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle">{v:g}</text>')
    for v in _ticks(y0, y1):
        y = sy(v)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#dddddd"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{v:g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 15}" text-anchor="middle">t (days)</text>')
    out.append(f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2:.1f})">{escape(ylabel)}</text>')
    for i, (name, y) in enumerate(zip(names, ys)):
        color = _PALETTE[i % len(_PALETTE)]
        dash = ' stroke-dasharray="6 4"' if name.endswith(("_exponential", "_no_repair")) else ""
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{pts}"/>')
        ly = top + 10 + 18 * i
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".phavail-", suffix=".tmp")
    # mkstemp creates 0600; give the file the mode a plain open() would
    umask = os.umask(0)
    os.umask(umask)
    try:
        os.chmod(tmp, 0o666 & ~umask)
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
