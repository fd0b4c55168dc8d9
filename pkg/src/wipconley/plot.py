"""Deterministic SVG rendering of a map graph with set overlays."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .grid import Grid1D
from .mvmap import CombMap

SIZE = 400
MARGIN = 40
BAR = 6

GRAPH_FILL = "#9ecae1"
GRAPH_STROKE = "#2171b5"


def _spans(grid: Grid1D, cells) -> list[tuple[Fraction, Fraction]]:
    """Point extents of runs of consecutive cell ids, without wrapping."""
    out = []
    run = []
    for c in sorted(cells):
        if run and c != run[-1] + 1:
            out.append((grid.cell_bounds(run[0])[0], grid.cell_bounds(run[-1])[1]))
            run = []
        run.append(c)
    if run:
        out.append((grid.cell_bounds(run[0])[0], grid.cell_bounds(run[-1])[1]))
    return out


class _Frame:
    def __init__(self, dom: Grid1D, cod: Grid1D):
        self.dom, self.cod = dom, cod
        self.span = SIZE - 2 * MARGIN

    def x(self, v) -> str:
        t = (Fraction(v) - self.dom.base) / (self.dom.stop - self.dom.base)
        return f"{MARGIN + float(t) * self.span:.2f}"

    def y(self, v) -> str:
        t = (Fraction(v) - self.cod.base) / (self.cod.stop - self.cod.base)
        return f"{SIZE - MARGIN - float(t) * self.span:.2f}"


def _rect(x0, y0, x1, y1, fill, stroke="none", opacity="1") -> str:
    x, w = min(float(x0), float(x1)), abs(float(x1) - float(x0))
    y, h = min(float(y0), float(y1)), abs(float(y1) - float(y0))
    return (f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
            f'fill="{fill}" stroke="{stroke}" fill-opacity="{opacity}"/>')


def _line(x0, y0, x1, y1, stroke, width=1) -> str:
    return f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="{stroke}" stroke-width="{width}" stroke-linecap="round"/>'


def _text(x, y, s, anchor="middle") -> str:
    return f'<text x="{x}" y="{y}" font-size="10" text-anchor="{anchor}">{s}</text>'


def plot_svg(f: CombMap | None, overlays: Sequence[tuple[str, object, str]] = (), grid: Grid1D | None = None) -> str:
    """SVG of the graph of ``f``; each overlay ``(label, set, colour)`` is drawn
    as a bar under the axis and a translucent square ``set x set``.

    A circle is drawn on its fundamental domain with wrap marks on the
    identified sides.  ``f=None`` draws axes only (``grid`` is then required).
    """
    dom = f.domain if f is not None else grid
    cod = f.codomain if f is not None else grid
    fr = _Frame(dom, cod)
    lo_x, hi_x = fr.x(dom.base), fr.x(dom.stop)
    lo_y, hi_y = fr.y(cod.base), fr.y(cod.stop)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        '<rect width="100%" height="100%" fill="white"/>',
        _rect(lo_x, lo_y, hi_x, hi_y, "none", "black"),
    ]
    for g, axis in ((dom, "x"), (cod, "y")):
        for v in (g.base, g.stop):
            label = str(v)
            if axis == "x":
                out.append(_text(fr.x(v), f"{SIZE - MARGIN + 14}", label))
            else:
                out.append(_text(f"{MARGIN - 4}", fr.y(v), label, "end"))
    if dom.is_circle:
        mid = fr.y((cod.base + cod.stop) / 2)
        for x in (lo_x, hi_x):
            out.append(_line(float(x) - 4, float(mid) - 4, float(x) + 4, float(mid) + 4, "black"))
    if cod.is_circle:
        mid = fr.x((dom.base + dom.stop) / 2)
        for y in (lo_y, hi_y):
            out.append(_line(float(mid) - 4, float(y) - 4, float(mid) + 4, float(y) + 4, "black"))
    for k, (label, s, colour) in enumerate(overlays):
        for a, b in _spans(s.grid, s.cells):
            if s.grid == dom:
                out.append(_rect(fr.x(a), lo_y, fr.x(b), hi_y, colour, opacity="0.08"))
            if s.grid == cod:
                out.append(_rect(lo_x, fr.y(a), hi_x, fr.y(b), colour, opacity="0.08"))
                top = SIZE - MARGIN + 20 + k * (BAR + 2)
                out.append(_line(fr.x(a), top, fr.x(b), top, colour, BAR))
        out.append(_text(f"{SIZE - MARGIN + 4}", f"{SIZE - MARGIN + 23 + k * (BAR + 2)}", label, "start"))
    if f is not None:
        for c in sorted(f.values):
            a, b = dom.cell_bounds(c)
            for ya, yb in _spans(cod, f.values[c]):
                if c % 2:
                    out.append(_rect(fr.x(a), fr.y(ya), fr.x(b), fr.y(yb), GRAPH_FILL, GRAPH_STROKE, "0.6"))
                else:
                    out.append(_line(fr.x(a), fr.y(ya), fr.x(a), fr.y(yb), GRAPH_STROKE, 2))
    out.append("</svg>")
    return "\n".join(out) + "\n"
