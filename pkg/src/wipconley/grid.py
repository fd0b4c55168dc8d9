"""Exact-rational one-dimensional cubical grids.

A grid partitions a segment ``[a, b]`` or a circle ``R / LZ`` into elementary
edges.  Cells are numbered along the space: vertex ``i`` has id ``2*i`` and
edge ``i`` (from breakpoint ``i`` to breakpoint ``i+1``) has id ``2*i + 1``.
On a circle the last edge wraps back to vertex 0.

Two set types live on a grid:

* :class:`CubSet` -- a closed union of cells (face complete).
* :class:`Region` -- an arbitrary union of *open* cells.  Every set that
  arises from closed cell sets under interior, difference and complement is a
  union of open cells, so regions represent those exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

SEGMENT = "segment"
CIRCLE = "circle"


class GridError(ValueError):
    """Operands on different grids, or an ill-formed grid."""


class SetSyntaxError(ValueError):
    """Malformed set text or an endpoint that is not a breakpoint."""

    def __init__(self, message, suggested_subdivision=None):
        super().__init__(message)
        self.suggested_subdivision = suggested_subdivision


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a Fraction, int or str")
    return Fraction(value)


@dataclass(frozen=True)
class Grid1D:
    """A segment or circle cut at strictly increasing rational breakpoints.

    For a circle, ``breakpoints`` lie in ``[base, base + length)`` with
    ``base = breakpoints[0]``; the last edge runs to ``base + length``.
    """

    kind: str
    breakpoints: tuple[Fraction, ...]
    length: Fraction | None = None

    def __post_init__(self):
        bps = tuple(as_fraction(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        if any(b1 >= b2 for b1, b2 in zip(bps, bps[1:])):
            raise GridError("breakpoints must be strictly increasing")
        if self.kind == SEGMENT:
            if len(bps) < 2:
                raise GridError("a segment grid needs at least one edge")
            if self.length is not None:
                raise GridError("segment grids take no length")
        elif self.kind == CIRCLE:
            if self.length is None:
                raise GridError("circle grids need a length")
            length = as_fraction(self.length)
            object.__setattr__(self, "length", length)
            if len(bps) < 3:
                raise GridError("a circle grid needs at least 3 edges")
            if bps[-1] >= bps[0] + length:
                raise GridError("circle breakpoints must fit in one period")
        else:
            raise GridError(f"unknown space kind {self.kind!r}")

    # -- construction -----------------------------------------------------

    @classmethod
    def segment(cls, start, stop, step) -> "Grid1D":
        start, stop, step = map(as_fraction, (start, stop, step))
        count = (stop - start) / step
        if count.denominator != 1 or count <= 0:
            raise GridError("step must divide the segment length")
        return cls(SEGMENT, tuple(start + k * step for k in range(int(count) + 1)))

    @classmethod
    def circle(cls, length, step, base=0) -> "Grid1D":
        length, step, base = map(as_fraction, (length, step, base))
        count = length / step
        if count.denominator != 1:
            raise GridError("step must divide the circumference")
        return cls(CIRCLE, tuple(base + k * step for k in range(int(count))), length)

    # -- combinatorics ----------------------------------------------------

    @property
    def is_circle(self) -> bool:
        return self.kind == CIRCLE

    @property
    def n_edges(self) -> int:
        return len(self.breakpoints) if self.is_circle else len(self.breakpoints) - 1

    @property
    def n_vertices(self) -> int:
        return len(self.breakpoints)

    @property
    def n_cells(self) -> int:
        return self.n_vertices + self.n_edges

    @property
    def base(self) -> Fraction:
        return self.breakpoints[0]

    @property
    def stop(self) -> Fraction:
        """Right end of the fundamental domain."""
        return self.base + self.length if self.is_circle else self.breakpoints[-1]

    def cells(self) -> range:
        return range(self.n_cells)

    @staticmethod
    def is_vertex(cell: int) -> bool:
        return cell % 2 == 0

    @staticmethod
    def dim(cell: int) -> int:
        return cell % 2

    def faces(self, cell: int) -> tuple[int, ...]:
        if cell % 2 == 0:
            return ()
        return (cell - 1, (cell + 1) % self.n_cells)

    def cofaces(self, cell: int) -> tuple[int, ...]:
        if cell % 2 == 1:
            return ()
        if self.is_circle:
            return ((cell - 1) % self.n_cells, cell + 1)
        out = []
        if cell > 0:
            out.append(cell - 1)
        if cell < self.n_cells - 1:
            out.append(cell + 1)
        return tuple(out)

    def coordinate(self, vertex: int) -> Fraction:
        return self.breakpoints[vertex // 2]

    def edge_bounds(self, edge: int) -> tuple[Fraction, Fraction]:
        """Lifted endpoints ``(left, right)`` of an edge."""
        i = edge // 2
        left = self.breakpoints[i]
        right = self.breakpoints[i + 1] if i + 1 < len(self.breakpoints) else self.stop
        return left, right

    def cell_bounds(self, cell: int) -> tuple[Fraction, Fraction]:
        if cell % 2 == 0:
            x = self.coordinate(cell)
            return x, x
        return self.edge_bounds(cell)

    def normalize(self, x) -> Fraction:
        """Map a point into the fundamental domain (identity on segments)."""
        x = as_fraction(x)
        if not self.is_circle:
            return x
        return self.base + (x - self.base) % self.length

    def contains_point(self, x) -> bool:
        x = as_fraction(x)
        return self.is_circle or self.breakpoints[0] <= x <= self.breakpoints[-1]

    def locate(self, x) -> int:
        """Id of the open cell containing the point ``x``."""
        x = self.normalize(x)
        if not self.contains_point(x):
            raise GridError(f"point {x} lies outside the space")
        bps = self.breakpoints
        lo, hi = 0, len(bps) - 1
        if x >= bps[hi]:
            return 2 * hi if x == bps[hi] else 2 * hi + 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if bps[mid] <= x:
                lo = mid
            else:
                hi = mid
        return 2 * lo if bps[lo] == x else 2 * lo + 1

    def is_breakpoint(self, x) -> bool:
        return self.locate(x) % 2 == 0

    def closure_cells(self, cells: Iterable[int]) -> frozenset[int]:
        out = set(cells)
        for c in list(out):
            if c % 2:
                out.update(self.faces(c))
        return frozenset(out)

    def open_star(self, cells: Iterable[int]) -> frozenset[int]:
        """Union of the open stars: every cell having a face in ``cells``."""
        out = set(cells)
        for c in list(out):
            out.update(self.cofaces(c))
        return frozenset(out)

    def lifted_cell(self, x) -> int:
        """Open cell containing ``x`` counted on the universal cover of a circle."""
        x = as_fraction(x)
        if not self.is_circle:
            return self.locate(x)
        turns = (x - self.base) // self.length
        return int(turns) * self.n_cells + self.locate(x)

    def cover(self, lo, hi) -> frozenset[int]:
        """Cells of the smallest closed cell set containing the arc ``[lo, hi]``.

        ``hi`` is a lift (``hi >= lo``); arcs of length at least one period
        cover the whole circle.
        """
        lo, hi = as_fraction(lo), as_fraction(hi)
        if hi < lo:
            raise GridError("cover needs lo <= hi")
        if self.is_circle and hi - lo >= self.length:
            return frozenset(self.cells())
        first, last = self.lifted_cell(lo), self.lifted_cell(hi)
        n = self.n_cells
        return self.closure_cells(c % n for c in range(first, last + 1))

    # -- refinement -------------------------------------------------------

    def subdivide(self, k: int) -> tuple["Grid1D", "Transfer"]:
        if k < 1:
            raise GridError("subdivision factor must be positive")
        bps = []
        n = len(self.breakpoints)
        for i in range(self.n_edges):
            left = self.breakpoints[i]
            right = self.breakpoints[i + 1] if i + 1 < n else self.stop
            step = (right - left) / k
            bps.extend(left + j * step for j in range(k))
        if not self.is_circle:
            bps.append(self.breakpoints[-1])
        fine = Grid1D(self.kind, tuple(bps), self.length)
        return fine, Transfer(self, fine, k)

    def __repr__(self):
        if self.is_circle:
            return f"Grid1D(circle, length={self.length}, edges={self.n_edges}, base={self.base})"
        return f"Grid1D(segment, [{self.breakpoints[0]}, {self.breakpoints[-1]}], edges={self.n_edges})"


class Transfer:
    """Sends cells of a coarse grid to the open cells of its k-fold refinement."""

    def __init__(self, coarse: Grid1D, fine: Grid1D, k: int):
        self.coarse, self.fine, self.k = coarse, fine, k

    def cell(self, cell: int) -> frozenset[int]:
        k = self.k
        if cell % 2 == 0:
            return frozenset({k * cell})
        i = cell // 2
        return frozenset(range(2 * k * i + 1, 2 * k * (i + 1)))

    def parent(self, fine_cell: int) -> int:
        """Coarse open cell containing a fine open cell."""
        j = fine_cell // 2
        if fine_cell % 2 == 0 and j % self.k == 0:
            return 2 * (j // self.k)
        return 2 * (j // self.k) + 1

    def cells(self, cells: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for c in cells:
            out |= self.cell(c)
        return frozenset(out)

    def __call__(self, s):
        if isinstance(s, CubSet):
            _check_grid(s.grid, self.coarse)
            return CubSet(self.fine, self.cells(s.cells))
        if isinstance(s, Region):
            _check_grid(s.grid, self.coarse)
            return Region(self.fine, self.cells(s.cells))
        raise TypeError(f"cannot transfer {type(s).__name__}")


def _check_grid(a: Grid1D, b: Grid1D):
    if a != b:
        raise GridError("operands live on different grids")


# -- sets ---------------------------------------------------------------


class _CellSet:
    __slots__ = ("grid", "cells")

    def __init__(self, grid: Grid1D, cells: Iterable[int] = ()):
        self.grid = grid
        self.cells = frozenset(cells)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.cells))

    def __len__(self):
        return len(self.cells)

    def __bool__(self):
        return bool(self.cells)

    def __hash__(self):
        return hash((type(self).__name__, self.grid, self.cells))

    def __eq__(self, other):
        if not isinstance(other, _CellSet):
            return NotImplemented
        return self.grid == other.grid and self.cells == other.cells

    def __contains__(self, x) -> bool:
        """Point membership for rationals (cell ids are tested with ``has_cell``)."""
        return self.grid.locate(x) in self.cells

    def has_cell(self, cell: int) -> bool:
        return cell in self.cells

    def _other(self, other) -> frozenset[int]:
        _check_grid(self.grid, other.grid)
        return other.cells

    def is_empty(self) -> bool:
        return not self.cells

    def vertices(self) -> list[int]:
        return sorted(c for c in self.cells if c % 2 == 0)

    def edges(self) -> list[int]:
        return sorted(c for c in self.cells if c % 2 == 1)

    def region(self) -> "Region":
        return Region(self.grid, self.cells)

    def issubset(self, other) -> bool:
        return self.cells <= self._other(other)

    __le__ = issubset

    def intervals(self):
        return _intervals(self.grid, self.cells)

    def __str__(self):
        return format_cells(self.grid, self.cells)


class CubSet(_CellSet):
    """A closed union of cells; membership is face complete."""

    __slots__ = ()

    def __init__(self, grid: Grid1D, cells: Iterable[int] = ()):
        super().__init__(grid, cells)
        for c in self.cells:
            if c % 2:
                for f in grid.faces(c):
                    if f not in self.cells:
                        raise GridError(f"cell set is not closed: edge {c} lacks face {f}")

    @classmethod
    def closure_of(cls, grid: Grid1D, cells: Iterable[int]) -> "CubSet":
        return cls(grid, grid.closure_cells(cells))

    @classmethod
    def whole(cls, grid: Grid1D) -> "CubSet":
        return cls(grid, grid.cells())

    @classmethod
    def empty(cls, grid: Grid1D) -> "CubSet":
        return cls(grid, ())

    def __or__(self, other):
        if isinstance(other, CubSet):
            return CubSet(self.grid, self.cells | self._other(other))
        return Region(self.grid, self.cells | self._other(other))

    def __and__(self, other):
        if isinstance(other, CubSet):
            return CubSet(self.grid, self.cells & self._other(other))
        return Region(self.grid, self.cells & self._other(other))

    def __sub__(self, other) -> "Region":
        return set_difference(self, other)

    def __repr__(self):
        return f"CubSet({self})"


class Region(_CellSet):
    """An arbitrary union of open cells; not necessarily closed."""

    __slots__ = ()

    def __or__(self, other):
        return Region(self.grid, self.cells | self._other(other))

    def __and__(self, other):
        return Region(self.grid, self.cells & self._other(other))

    def __sub__(self, other):
        return Region(self.grid, self.cells - self._other(other))

    def is_closed(self) -> bool:
        return self.grid.closure_cells(self.cells) == self.cells

    def as_cubset(self) -> CubSet:
        return CubSet(self.grid, self.cells)

    def __repr__(self):
        return f"Region({self})"


# -- point-set operators ----------------------------------------------------


def closure(s) -> CubSet:
    return CubSet(s.grid, s.grid.closure_cells(s.cells))


def interior(s) -> Region:
    """Interior relative to the ambient space.

    An open edge is interior iff it belongs to the set; a vertex is interior
    iff it and every edge incident to it belong to the set.  The ends of a
    segment have a single incident edge, so they can be interior.
    """
    grid, cells = s.grid, s.cells
    out = set()
    for c in cells:
        if c % 2 or all(e in cells for e in grid.cofaces(c)):
            out.add(c)
    return Region(grid, out)


def complement(s) -> Region:
    return Region(s.grid, frozenset(s.grid.cells()) - s.cells)


def boundary(s) -> Region:
    return Region(s.grid, closure(s).cells - interior(s).cells)


def set_difference(a, b) -> Region:
    _check_grid(a.grid, b.grid)
    return Region(a.grid, a.cells - b.cells)


def union(a, b):
    return a | b


def intersect(a, b):
    return a & b


def open_star(s) -> Region:
    return Region(s.grid, s.grid.open_star(s.cells))


# -- text form ----------------------------------------------------------------


def _runs(grid: Grid1D, cells: frozenset[int]) -> list[list[int]]:
    """Maximal runs of consecutive cells, cyclic on a circle."""
    if not cells:
        return []
    n = grid.n_cells
    ordered = sorted(cells)
    if grid.is_circle and len(cells) == n:
        return [list(range(n))]
    runs = [[ordered[0]]]
    for c in ordered[1:]:
        if c == runs[-1][-1] + 1:
            runs[-1].append(c)
        else:
            runs.append([c])
    if grid.is_circle and len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == n - 1:
        runs[0] = runs.pop() + runs[0]
    return runs


def _intervals(grid: Grid1D, cells: frozenset[int]):
    """Maximal intervals as ``(lo, hi, lo_closed, hi_closed)``; ``hi`` is lifted."""
    out = []
    for run in _runs(grid, cells):
        if len(run) == grid.n_cells and grid.is_circle:
            out.append((grid.base, grid.stop, True, True))
            continue
        first, last = run[0], run[-1]
        lo = grid.cell_bounds(first)[0]
        hi = grid.cell_bounds(last)[1]
        if grid.is_circle and (first > last or (last % 2 and hi <= lo and len(run) > 1)):
            hi += grid.length
        out.append((lo, hi, first % 2 == 0, last % 2 == 0))
    return out


def _fmt(x: Fraction, grid: Grid1D) -> str:
    x = grid.normalize(x) if grid.is_circle else x
    return str(x)


def format_cells(grid: Grid1D, cells: frozenset[int]) -> str:
    """Canonical text: sorted maximal intervals joined by ``∪``; ``∅`` if empty."""
    if not cells:
        return "∅"
    parts = []
    for lo, hi, lc, hc in _intervals(grid, cells):
        if grid.is_circle and hi - lo == grid.length and lc and hc and len(cells) == grid.n_cells:
            parts.append("S")
        elif lo == hi:
            parts.append("{" + _fmt(lo, grid) + "}")
        else:
            parts.append(("[" if lc else "(") + _fmt(lo, grid) + "," + _fmt(hi, grid) + ("]" if hc else ")"))
    return " ∪ ".join(parts)


_ATOM = re.compile(r"\s*([\[\(\{])([^\]\)\}]*)([\]\)\}])\s*")


def _point_cell(grid: Grid1D, text: str) -> int:
    try:
        x = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise SetSyntaxError(f"not a rational number: {text!r}") from None
    if not grid.contains_point(x):
        raise SetSyntaxError(f"point {x} lies outside the space")
    cell = grid.locate(x)
    if cell % 2:
        a, b = grid.edge_bounds(cell)
        off = (grid.normalize(x) - a) / (b - a)
        raise SetSyntaxError(
            f"{x} is not a breakpoint; subdivide the grid by a multiple of {off.denominator}",
            suggested_subdivision=off.denominator,
        )
    return cell


def _arc_cells(grid: Grid1D, lo: int, hi: int, lo_closed: bool, hi_closed: bool) -> set[int]:
    """Cells of the arc between vertex cells ``lo`` and ``hi`` (counterclockwise)."""
    n = grid.n_cells
    if hi < lo:
        if not grid.is_circle:
            raise SetSyntaxError("interval endpoints out of order")
        hi += n
    cells = [c % n for c in range(lo, hi + 1)]
    if not lo_closed:
        cells = cells[1:]
    if not hi_closed:
        cells = cells[:-1]
    return set(cells)


def parse_region(text: str, grid: Grid1D) -> Region:
    """Parse set text such as ``"[2,5] ∪ {0}"`` or ``"(3,4)"``.

    Endpoints must be breakpoints.  On a circle an interval runs
    counterclockwise from its left to its right endpoint and may cross the
    base point, e.g. ``[31/32,1/32]``.  ``S`` / ``X`` denote the whole space.
    """
    stripped = text.strip()
    if not stripped:
        raise SetSyntaxError("empty set text")
    if stripped in {"∅", "empty", "{}"}:
        return Region(grid, ())
    if stripped in {"X", "S", "whole"}:
        return Region(grid, grid.cells())
    cells: set[int] = set()
    for part in re.split(r"∪|\bU\b|\|", stripped):
        m = _ATOM.fullmatch(part)
        if not m:
            raise SetSyntaxError(f"malformed set atom {part.strip()!r}")
        left, body, right = m.groups()
        items = [t for t in body.split(",")]
        if left == "{" or right == "}":
            if not (left == "{" and right == "}"):
                raise SetSyntaxError(f"unbalanced braces in {part.strip()!r}")
            if not body.strip():
                continue
            cells.update(_point_cell(grid, t) for t in items)
            continue
        if len(items) != 2:
            raise SetSyntaxError(f"interval needs two endpoints: {part.strip()!r}")
        lo = _point_cell(grid, items[0])
        hi = _point_cell(grid, items[1])
        if lo == hi:
            if left == "[" and right == "]":
                cells.add(lo)
            continue
        cells |= _arc_cells(grid, lo, hi, left == "[", right == "]")
    return Region(grid, cells)


def parse_set(text: str, grid: Grid1D):
    """Parse set text; closed results come back as :class:`CubSet`."""
    region = parse_region(text, grid)
    return region.as_cubset() if region.is_closed() else region


def parse_cubset(text: str, grid: Grid1D) -> CubSet:
    region = parse_region(text, grid)
    if not region.is_closed():
        raise SetSyntaxError(f"set {text!r} is not closed")
    return region.as_cubset()


def subdivide(grid: Grid1D, k: int) -> tuple[Grid1D, Transfer]:
    return grid.subdivide(k)
