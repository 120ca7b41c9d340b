"""Plain-text SVG charts: scatter, heatmap and bars.

Output is a pure function of the plot description: coordinates are
formatted to fixed precision and nothing time- or environment-dependent is
written, so the same plot always produces the same bytes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

KINDS = ("scatter", "heatmap", "bars")
# categorical colors for scatter groups and bars
SERIES_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                 "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80, 150, 50, 70


@dataclass(frozen=True)
class SvgPlot:
    kind: str
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    width: int = 720
    height: int = 520
    x: Sequence[float] = ()
    y: Sequence[float] = ()
    groups: Sequence[str] = ()
    matrix: Sequence[Sequence[float]] = ()
    labels: Sequence[str] = field(default_factory=tuple)


def _f(v: float) -> str:
    return f"{v:.2f}"


def nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("non-finite axis range")
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.floor(lo / step) * step
    ticks, k = [], 0
    while start + k * step <= hi + step * 1e-9:
        ticks.append(start + k * step)
        k += 1
    if ticks[-1] < hi:
        ticks.append(ticks[-1] + step)
    return ticks


def _tick_label(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e5 or abs(v) < 1e-3:
        return f"{v:.3g}"
    return f"{round(v, 6):g}"


def _diverging(v: float) -> str:
    """Blue (-1) through light gray (0) to red (+1)."""
    v = max(-1.0, min(1.0, v))
    gray, blue, red = (220, 220, 220), (59, 76, 192), (180, 4, 38)
    end = red if v >= 0 else blue
    t = abs(v)
    rgb = [round(g + (e - g) * t) for g, e in zip(gray, end)]
    return "#%02x%02x%02x" % tuple(rgb)


class _Doc:
    def __init__(self, width: int, height: int):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        ]

    def add(self, line: str) -> None:
        self.parts.append(line)

    def text(self, x, y, s, size=12, anchor="middle", extra="") -> None:
        self.add(f'<text x="{_f(x)}" y="{_f(y)}" font-family="sans-serif" font-size="{size}" '
                 f'text-anchor="{anchor}"{extra}>{escape(str(s))}</text>')

    def finish(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _frame(doc: _Doc, plot: SvgPlot):
    x0, y0 = MARGIN_LEFT, MARGIN_TOP
    x1, y1 = plot.width - MARGIN_RIGHT, plot.height - MARGIN_BOTTOM
    if plot.title:
        doc.text(plot.width / 2, MARGIN_TOP / 2 + 5, plot.title, size=16)
    if plot.x_label:
        doc.text((x0 + x1) / 2, plot.height - 20, plot.x_label, size=13)
    if plot.y_label:
        cy = (y0 + y1) / 2
        doc.text(22, cy, plot.y_label, size=13, extra=f' transform="rotate(-90 22 {_f(cy)})"')
    return x0, y0, x1, y1


def _axes(doc, box, xticks, yticks, xmap, ymap, xlabels=None):
    x0, y0, x1, y1 = box
    doc.add(f'<line x1="{_f(x0)}" y1="{_f(y1)}" x2="{_f(x1)}" y2="{_f(y1)}" stroke="#000000"/>')
    doc.add(f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x0)}" y2="{_f(y1)}" stroke="#000000"/>')
    for i, t in enumerate(xticks):
        px = xmap(t)
        doc.add(f'<line x1="{_f(px)}" y1="{_f(y1)}" x2="{_f(px)}" y2="{_f(y1 + 5)}" stroke="#000000"/>')
        doc.text(px, y1 + 19, xlabels[i] if xlabels else _tick_label(t), size=11)
    for t in yticks:
        py = ymap(t)
        doc.add(f'<line x1="{_f(x0 - 5)}" y1="{_f(py)}" x2="{_f(x0)}" y2="{_f(py)}" stroke="#000000"/>')
        doc.text(x0 - 8, py + 4, _tick_label(t), size=11, anchor="end")


def _legend(doc, plot, entries):
    lx = plot.width - MARGIN_RIGHT + 15
    for i, (label, color) in enumerate(entries):
        ly = MARGIN_TOP + 10 + 20 * i
        doc.add(f'<rect x="{_f(lx)}" y="{_f(ly - 9)}" width="12" height="12" fill="{color}"/>')
        doc.text(lx + 18, ly + 2, label, size=11, anchor="start")


def _linear(lo, hi, a, b):
    return lambda v: a + (v - lo) * (b - a) / (hi - lo)


def _scatter(plot: SvgPlot) -> str:
    xs, ys = [float(v) for v in plot.x], [float(v) for v in plot.y]
    if not xs or len(xs) != len(ys):
        raise ValueError("scatter needs equal-length, nonempty x and y")
    groups = list(plot.groups) if plot.groups else ["data"] * len(xs)
    if len(groups) != len(xs):
        raise ValueError("groups must align with points")
    doc = _Doc(plot.width, plot.height)
    box = _frame(doc, plot)
    xt, yt = nice_ticks(min(xs), max(xs)), nice_ticks(min(ys), max(ys))
    xmap = _linear(xt[0], xt[-1], box[0], box[2])
    ymap = _linear(yt[0], yt[-1], box[3], box[1])
    _axes(doc, box, xt, yt, xmap, ymap)
    order = sorted(set(groups))
    colors = {g: SERIES_COLORS[i % len(SERIES_COLORS)] for i, g in enumerate(order)}
    for x, y, g in zip(xs, ys, groups):
        doc.add(f'<circle cx="{_f(xmap(x))}" cy="{_f(ymap(y))}" r="3" fill="{colors[g]}" '
                f'fill-opacity="0.75"/>')
    _legend(doc, plot, [(g, colors[g]) for g in order])
    return doc.finish()


def _heatmap(plot: SvgPlot) -> str:
    m = [[float(v) for v in row] for row in plot.matrix]
    n = len(m)
    if n == 0 or any(len(row) != n for row in m):
        raise ValueError("heatmap needs a nonempty square matrix")
    labels = list(plot.labels) if plot.labels else [str(i) for i in range(n)]
    if len(labels) != n:
        raise ValueError("heatmap labels must match the matrix size")
    doc = _Doc(plot.width, plot.height)
    x0, y0, x1, y1 = _frame(doc, plot)
    x0 += 40  # room for row labels
    cell = min((x1 - x0) / n, (y1 - y0) / n)
    for i, row in enumerate(m):
        doc.text(x0 - 6, y0 + (i + 0.5) * cell + 4, labels[i], size=11, anchor="end")
        for j, v in enumerate(row):
            cx, cy = x0 + j * cell, y0 + i * cell
            doc.add(f'<rect x="{_f(cx)}" y="{_f(cy)}" width="{_f(cell)}" height="{_f(cell)}" '
                    f'fill="{_diverging(v)}" stroke="#ffffff"/>')
            ink = "#ffffff" if abs(v) > 0.6 else "#000000"
            doc.text(cx + cell / 2, cy + cell / 2 + 4, f"{v:.2f}", size=11, extra=f' fill="{ink}"')
    for j in range(n):
        px, py = x0 + (j + 0.5) * cell, y0 + n * cell + 14
        doc.text(px, py, labels[j], size=11, anchor="end",
                 extra=f' transform="rotate(-35 {_f(px)} {_f(py)})"')
    _legend(doc, plot, [("+1.00", _diverging(1.0)), ("0.00", _diverging(0.0)),
                        ("-1.00", _diverging(-1.0))])
    return doc.finish()


def _bars(plot: SvgPlot) -> str:
    values = [float(v) for v in plot.y]
    if not values:
        raise ValueError("bar chart needs at least one value")
    labels = list(plot.labels) if plot.labels else [str(i) for i in range(len(values))]
    if len(labels) != len(values):
        raise ValueError("bar labels must align with values")
    doc = _Doc(plot.width, plot.height)
    box = _frame(doc, plot)
    yt = nice_ticks(min(0.0, min(values)), max(0.0, max(values)))
    ymap = _linear(yt[0], yt[-1], box[3], box[1])
    slot = (box[2] - box[0]) / len(values)
    centers = [box[0] + (i + 0.5) * slot for i in range(len(values))]
    _axes(doc, box, range(len(values)), yt, lambda i: centers[i], ymap, xlabels=labels)
    base = ymap(0.0)
    for i, v in enumerate(values):
        top = ymap(v)
        color = SERIES_COLORS[i % len(SERIES_COLORS)]
        doc.add(f'<rect x="{_f(centers[i] - slot * 0.35)}" y="{_f(min(top, base))}" '
                f'width="{_f(slot * 0.7)}" height="{_f(abs(base - top))}" fill="{color}"/>')
        doc.text(centers[i], min(top, base) - 5, _tick_label(v), size=11)
    _legend(doc, plot, [(lab, SERIES_COLORS[i % len(SERIES_COLORS)]) for i, lab in enumerate(labels)])
    return doc.finish()


def render_svg(plot: SvgPlot) -> str:
    if plot.kind == "scatter":
        return _scatter(plot)
    if plot.kind == "heatmap":
        return _heatmap(plot)
    if plot.kind == "bars":
        return _bars(plot)
    raise ValueError(f"unknown plot kind {plot.kind!r}; expected one of {KINDS}")


def emit_svg(plot: SvgPlot, path) -> None:
    Path(path).write_text(render_svg(plot), encoding="utf-8", newline="\n")
