"""Combinatorial multivalued maps on one-dimensional grids.

A :class:`CombMap` assigns to every cell of its (effective) domain a nonempty
closed cell set in the codomain.  The value of a cell encloses the images of
all points of the *closed* cell, so values are face monotone: the value of a
vertex is contained in the value of each incident edge.  Reading the value of
an open cell as the image of its points gives an upper semicontinuous map
with closed values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .grid import (
    CubSet,
    Grid1D,
    GridError,
    Region,
    _runs,
    as_fraction,
    closure,
)


class MapError(ValueError):
    """Inconsistent map data or an operation leaving the effective domain."""


# -- value atoms ----------------------------------------------------------------


@dataclass(frozen=True)
class SetAtom:
    """Closed interval ``[lo, hi]`` of the codomain (``hi`` lifted on circles)."""

    lo: Fraction
    hi: Fraction

    def over(self, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
        return self.lo, self.hi


@dataclass(frozen=True)
class AffineAtom:
    """The single value ``slope * x + offset``."""

    slope: Fraction
    offset: Fraction

    def over(self, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
        ya, yb = self.slope * a + self.offset, self.slope * b + self.offset
        return min(ya, yb), max(ya, yb)


@dataclass(frozen=True)
class Clause:
    lo: Fraction
    hi: Fraction
    lo_closed: bool
    hi_closed: bool
    atoms: tuple

    def contains(self, x: Fraction) -> bool:
        if self.lo < x < self.hi:
            return True
        return (x == self.lo and self.lo_closed) or (x == self.hi and self.hi_closed)


class PiecewiseSpec:
    """Ordered case formula ``interval -> value`` covering the domain."""

    def __init__(self, clauses: Sequence[Clause]):
        self.clauses = tuple(sorted(clauses, key=lambda c: (c.lo, not c.lo_closed)))

    @classmethod
    def parse(cls, lines: Iterable[str], codomain: Grid1D | None = None) -> "PiecewiseSpec":
        return cls([parse_clause(line, codomain) for line in lines if line.strip()])

    def validate(self, domain: Grid1D):
        clauses = self.clauses
        if not clauses:
            raise MapError("piecewise map has no clauses")
        lo, hi = domain.base, domain.stop
        first, last = clauses[0], clauses[-1]
        if first.lo != lo or not first.lo_closed:
            raise MapError(f"clauses must start at {lo} with a closed end")
        if last.hi != hi or (not last.hi_closed and not domain.is_circle):
            raise MapError(f"clauses must end at {hi}")
        if domain.is_circle and last.hi_closed:
            raise MapError(f"circle clauses must leave {hi} open (it is {lo})")
        for left, right in zip(clauses, clauses[1:]):
            if left.hi != right.lo:
                raise MapError(f"gap or overlap between clauses at {left.hi} and {right.lo}")
            if left.hi_closed == right.lo_closed:
                kind = "overlap" if left.hi_closed else "gap"
                raise MapError(f"clause {kind} at {left.hi}")
        for c in clauses:
            for x in (c.lo, c.hi):
                if x != domain.stop and not domain.is_breakpoint(x):
                    raise MapError(f"clause endpoint {x} is not a grid breakpoint")
            if c.lo > c.hi or (c.lo == c.hi and not (c.lo_closed and c.hi_closed)):
                raise MapError(f"empty clause domain at {c.lo}")

    def clause_at(self, x: Fraction) -> Clause:
        for c in self.clauses:
            if c.contains(x):
                return c
        raise MapError(f"no clause covers {x}")

    def build(self, domain: Grid1D, codomain: Grid1D) -> "CombMap":
        return from_piecewise(self, domain, codomain)


_NUM = r"[-+]?\s*\d+(?:/\d+)?"


def _parse_value_atom(text: str, codomain: Grid1D | None):
    t = text.strip()
    if t.startswith("{") and t.endswith("}"):
        return [SetAtom(Fraction(p), Fraction(p)) for p in t[1:-1].split(",") if p.strip()]
    if t.startswith("[") and t.endswith("]"):
        parts = t[1:-1].split(",")
        if len(parts) != 2:
            raise MapError(f"bad interval value {t!r}")
        a, b = Fraction(parts[0].strip()), Fraction(parts[1].strip())
        if b < a:
            if codomain is None or not codomain.is_circle:
                raise MapError(f"interval value {t!r} is reversed")
            b += codomain.length
        return [SetAtom(a, b)]
    m = re.fullmatch(rf"({_NUM})?\s*\*?\s*(-)?x\s*(?:([-+])\s*(\d+(?:/\d+)?))?", t)
    if m:
        coef, neg, sign, off = m.groups()
        slope = Fraction(coef.replace(" ", "")) if coef else Fraction(1)
        if neg:
            slope = -slope
        offset = Fraction(off) if off else Fraction(0)
        if sign == "-":
            offset = -offset
        return [AffineAtom(slope, offset)]
    raise MapError(f"cannot parse value {t!r}")


def parse_clause(line: str, codomain: Grid1D | None = None) -> Clause:
    """Parse ``"[0,1) -> {0}"``, ``"(3,4) -> [3,5]"`` or ``"[-5,0] -> -x"``."""
    if "->" not in line:
        raise MapError(f"clause needs '->': {line!r}")
    dom, val = line.split("->", 1)
    m = re.fullmatch(r"\s*([\[\(])\s*([^,]+),\s*([^\]\)]+)([\]\)])\s*", dom)
    if m:
        lo, hi = Fraction(m.group(2).strip()), Fraction(m.group(3).strip())
        lo_c, hi_c = m.group(1) == "[", m.group(4) == "]"
    else:
        m = re.fullmatch(r"\s*\{\s*([^}]+)\}\s*", dom)
        if not m:
            raise MapError(f"cannot parse clause domain {dom.strip()!r}")
        lo = hi = Fraction(m.group(1).strip())
        lo_c = hi_c = True
    atoms = []
    for part in re.split(r"∪|\|", val):
        atoms.extend(_parse_value_atom(part, codomain))
    if not atoms:
        raise MapError(f"empty clause value in {line!r}")
    return Clause(lo, hi, lo_c, hi_c, tuple(atoms))


# -- the map ----------------------------------------------------------------


class CombMap:
    """Cell-to-cell-set multivalued map with an optional partial domain."""

    def __init__(
        self,
        domain: Grid1D,
        codomain: Grid1D,
        values: Mapping[int, Iterable[int]],
        source=None,
        check: bool = True,
    ):
        self.domain = domain
        self.codomain = codomain
        self.values = {c: frozenset(v) for c, v in values.items()}
        self.source = source
        if check:
            self._check()

    def _check(self):
        for c, v in self.values.items():
            if not 0 <= c < self.domain.n_cells:
                raise MapError(f"cell {c} is not in the domain grid")
            if not v:
                raise MapError(f"cell {c} has an empty value")
            if self.codomain.closure_cells(v) != v:
                raise MapError(f"value of cell {c} is not closed")
        for c, v in self.values.items():
            for f in self.domain.faces(c):
                if f in self.values and not self.values[f] <= v:
                    raise MapError(f"not face monotone: value of {f} escapes value of {c}")

    @classmethod
    def closed_up(cls, domain, codomain, values, source=None) -> "CombMap":
        """Build after enlarging edge values by the values of their faces."""
        vals = {c: set(codomain.closure_cells(v)) for c, v in values.items()}
        for c in list(vals):
            for f in domain.faces(c):
                if f in vals:
                    vals[c] |= vals[f]
        return cls(domain, codomain, vals, source)

    # -- access

    def is_defined(self, cell: int) -> bool:
        return cell in self.values

    @property
    def effective_domain(self) -> frozenset[int]:
        return frozenset(self.values)

    def is_total(self) -> bool:
        return len(self.values) == self.domain.n_cells

    def value(self, cell: int) -> CubSet:
        try:
            return CubSet(self.codomain, self.values[cell])
        except KeyError:
            raise MapError(f"map undefined on cell {cell}") from None

    def __eq__(self, other):
        if not isinstance(other, CombMap):
            return NotImplemented
        return (self.domain, self.codomain, self.values) == (other.domain, other.codomain, other.values)

    def __repr__(self):
        return f"CombMap({self.domain!r} -> {self.codomain!r}, {len(self.values)} cells)"

    # -- set operations

    def image(self, a, partial_ok: bool = False) -> CubSet:
        if a.grid != self.domain:
            raise GridError("set is not on the domain grid")
        out: set[int] = set()
        for c in a.cells:
            v = self.values.get(c)
            if v is None:
                if not partial_ok:
                    raise MapError(f"set meets cell {c} outside the effective domain")
                continue
            out |= v
        return CubSet(self.codomain, out)

    def preimage_raw(self, b) -> Region:
        """Open cells whose value meets ``b``."""
        if b.grid != self.codomain:
            raise GridError("set is not on the codomain grid")
        return Region(self.domain, (c for c, v in self.values.items() if v & b.cells))

    def preimage_large(self, b) -> CubSet:
        """Closure of the cells whose value meets ``b``."""
        return closure(self.preimage_raw(b))

    def preimage_small(self, b):
        """Cells whose value lies in ``b``; a :class:`CubSet` when closed."""
        if b.grid != self.codomain:
            raise GridError("set is not on the codomain grid")
        region = Region(self.domain, (c for c, v in self.values.items() if v <= b.cells))
        return region.as_cubset() if region.is_closed() else region

    def f_boundary(self, a: CubSet) -> CubSet:
        """``cl A ∩ cl(F(A) ∖ A)``."""
        if self.domain != self.codomain:
            raise GridError("F-boundary needs a self-map")
        escaped = closure(self.image(a) - a)
        return CubSet(a.grid, closure(a).cells & escaped.cells)

    def restrict(self, a) -> "CombMap":
        if a.grid != self.domain:
            raise GridError("set is not on the domain grid")
        return CombMap(
            self.domain,
            self.codomain,
            {c: v for c, v in self.values.items() if c in a.cells},
            check=False,
        )

    def check_acyclic_values(self) -> dict[int, bool]:
        """Per-cell flag: value is a single interval, arc or point (not the whole circle)."""
        g = self.codomain
        report = {}
        for c, v in self.values.items():
            runs = _runs(g, v)
            report[c] = len(runs) == 1 and not (g.is_circle and len(v) == g.n_cells)
        return report

    def refine(self, k: int) -> "CombMap":
        """The same map on grids subdivided ``k`` times.

        Maps that remember how they were built are rebuilt on the finer
        grids; others have their values transferred cell by cell.
        """
        if k == 1:
            return self
        dom, transfer = self.domain.subdivide(k)
        if self.codomain == self.domain:
            cod, cod_transfer = dom, transfer
        else:
            cod, cod_transfer = self.codomain.subdivide(k)
        if self.source is not None:
            return self.source.build(dom, cod)
        values = {}
        for fine in dom.cells():
            parent = transfer.parent(fine)
            if parent in self.values:
                values[fine] = cod_transfer.cells(self.values[parent])
        return CombMap.closed_up(dom, cod, values)


# -- constructors -------------------------------------------------------------


def _cover_atoms(codomain: Grid1D, atoms, a: Fraction, b: Fraction) -> set[int]:
    out: set[int] = set()
    for atom in atoms:
        lo, hi = atom.over(a, b)
        if not codomain.is_circle and (lo < codomain.base or hi > codomain.stop):
            raise MapError(f"value [{lo},{hi}] leaves the codomain")
        out |= codomain.cover(lo, hi)
    return out


def from_piecewise(spec: PiecewiseSpec, domain: Grid1D, codomain: Grid1D | None = None) -> CombMap:
    """Smallest cellwise closed enclosure of a case formula."""
    codomain = codomain or domain
    spec.validate(domain)
    values: dict[int, set[int]] = {}
    for v in range(0, domain.n_cells, 2):
        x = domain.coordinate(v)
        values[v] = _cover_atoms(codomain, spec.clause_at(x).atoms, x, x)
    for e in range(1, domain.n_cells, 2):
        a, b = domain.edge_bounds(e)
        clause = spec.clause_at((a + b) / 2)
        if not (clause.lo <= a and b <= clause.hi):
            raise MapError(f"edge [{a},{b}] straddles a clause boundary")
        values[e] = _cover_atoms(codomain, clause.atoms, a, b)
    return CombMap.closed_up(domain, codomain, values, source=spec)


class SampleSpec:
    """Finite sample ``x_i -> y_i`` of a map; duplicate ``x`` are allowed."""

    def __init__(self, points: Sequence, values: Sequence):
        if len(points) != len(values):
            raise MapError("points and values differ in length")
        if not points:
            raise MapError("no samples")
        self.points = tuple(as_fraction(p) for p in points)
        self.values = tuple(as_fraction(v) for v in values)

    def build(self, domain: Grid1D, codomain: Grid1D) -> CombMap:
        return from_samples(self.points, self.values, domain, codomain)


def _nearest_lift(y: Fraction, ref: Fraction, length: Fraction) -> Fraction:
    """Lift of ``y`` closest to ``ref``."""
    shift = round((ref - y) / length)
    return y + shift * length


def _sample_groups(points, values, domain: Grid1D, codomain: Grid1D):
    """Samples grouped by point: sorted list of ``(x, ylo, yhi)`` with lifted y."""
    groups: dict[Fraction, list[Fraction]] = {}
    for x, y in zip(points, values):
        if not domain.contains_point(x):
            raise MapError(f"sample point {x} lies outside the domain")
        if not codomain.contains_point(y):
            raise MapError(f"sample value {y} lies outside the codomain")
        groups.setdefault(domain.normalize(x), []).append(codomain.normalize(y))
    out = []
    for x in sorted(groups):
        ys = groups[x]
        if codomain.is_circle:
            ys = [_nearest_lift(y, ys[0], codomain.length) for y in ys]
        out.append((x, min(ys), max(ys)))
    return out


def _interpolant_pieces(groups, domain: Grid1D, codomain: Grid1D):
    """Linear pieces ``(x0, x1, lo0, lo1, hi0, hi1)`` between consecutive samples."""
    pieces = []
    pairs = list(zip(groups, groups[1:]))
    if domain.is_circle and len(groups) > 1:
        x0, lo0, hi0 = groups[-1]
        x1, lo1, hi1 = groups[0]
        pairs.append(((x0, lo0, hi0), (x1 + domain.length, lo1, hi1)))
    for (x0, lo0, hi0), (x1, lo1, hi1) in pairs:
        if codomain.is_circle:
            shifted = _nearest_lift(lo1, lo0, codomain.length)
            hi1, lo1 = hi1 + (shifted - lo1), shifted
        pieces.append((x0, x1, lo0, lo1, hi0, hi1))
    return pieces


def _piece_range(piece, a: Fraction, b: Fraction):
    """y-range of a piece over ``[a, b]`` (lifted x), or None if disjoint."""
    x0, x1, lo0, lo1, hi0, hi1 = piece
    s, t = max(a, x0), min(b, x1)
    if s > t:
        return None

    def at(y0, y1, x):
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    ys = [at(lo0, lo1, s), at(lo0, lo1, t), at(hi0, hi1, s), at(hi0, hi1, t)]
    return min(ys), max(ys)


def from_samples(points, values, domain: Grid1D, codomain: Grid1D | None = None) -> CombMap:
    """Smallest acyclic enclosure of a finite sample.

    Each sampled value contributes the closed star of the cell containing it
    to every cell whose closure contains the sample point.  Between
    consecutive samples the values are filled by the cells covering the linear
    interpolant, which keeps values connected and face monotone.  Cells
    outside the sampled range (on a segment) that contain no sample stay
    undefined.
    """
    codomain = codomain or domain
    spec = SampleSpec(points, values)
    groups = _sample_groups(spec.points, spec.values, domain, codomain)
    pieces = _interpolant_pieces(groups, domain, codomain)
    values_: dict[int, set[int]] = {}
    L = domain.length
    for cell in domain.cells():
        a, b = domain.cell_bounds(cell)
        out: set[int] = set()
        for x, lo, hi in groups:
            hits = a <= x <= b or (domain.is_circle and a <= x + L <= b)
            if hits:
                for y in (lo, hi):
                    out |= codomain.closure_cells(codomain.open_star({codomain.locate(y)}))
                if hi > lo:
                    out |= codomain.cover(lo, hi)
        for piece in pieces:
            shifts = (0, L, -L) if domain.is_circle else (0,)
            for s in shifts:
                r = _piece_range(piece, a + s, b + s)
                if r is not None:
                    out |= codomain.cover(*r)
        if out:
            values_[cell] = out
    return CombMap.closed_up(domain, codomain, values_, source=spec)


def identity_map(grid: Grid1D) -> CombMap:
    """The thin identity: each cell maps to its own closure."""
    return CombMap(grid, grid, {c: grid.closure_cells({c}) for c in grid.cells()})


def compose(g: CombMap, f: CombMap) -> CombMap:
    """``G ∘ F``: each cell goes to the union of G over its F-value."""
    if f.codomain != g.domain:
        raise GridError("codomain of the inner map is not the domain of the outer map")
    values = {}
    for c, v in f.values.items():
        out: set[int] = set()
        for d in v:
            gv = g.values.get(d)
            if gv is None:
                raise MapError(f"value of cell {c} leaves the effective domain of the outer map")
            out |= gv
        values[c] = out
    return CombMap(f.domain, g.codomain, values, check=False)


def _value_extent(grid: Grid1D, cells: frozenset[int]) -> tuple[Fraction, Fraction]:
    runs = _runs(grid, cells)
    if len(runs) != 1 or (grid.is_circle and len(cells) == grid.n_cells):
        raise MapError("value is not a single interval or proper arc")
    run = runs[0]
    lo = grid.cell_bounds(run[0])[0]
    hi = grid.cell_bounds(run[-1])[1]
    if grid.is_circle and hi < lo:
        hi += grid.length
    return lo, hi


class FamilySource:
    """Recipe for ``(1 - t) * F0 + t * F1``."""

    def __init__(self, f0_source, f1_source, lam):
        self.f0_source, self.f1_source, self.lam = f0_source, f1_source, as_fraction(lam)

    def build(self, domain, codomain):
        f0 = self.f0_source.build(domain, codomain)
        f1 = self.f1_source.build(domain, codomain)
        return convex_family(f0, f1, self.lam)


def convex_family(f0: CombMap, f1: CombMap, lam) -> CombMap:
    """Cellwise hull of ``lam * u + (1 - lam) * v`` for ``u`` in F1 and ``v`` in F0."""
    lam = as_fraction(lam)
    if not 0 <= lam <= 1:
        raise MapError("lambda must lie in [0, 1]")
    if f0.domain != f1.domain or f0.codomain != f1.codomain:
        raise GridError("family endpoints live on different grids")
    source = None
    if f0.source is not None and f1.source is not None:
        source = FamilySource(f0.source, f1.source, lam)
    if lam == 0:
        return CombMap(f0.domain, f0.codomain, f0.values, source)
    if lam == 1:
        return CombMap(f1.domain, f1.codomain, f1.values, source)
    g = f0.codomain
    if f0.effective_domain != f1.effective_domain:
        raise MapError("family endpoints have different effective domains")
    edge = max(b - a for a, b in (g.edge_bounds(e) for e in range(1, g.n_cells, 2)))
    values = {}
    for c in f0.values:
        lo0, hi0 = _value_extent(g, f0.values[c])
        lo1, hi1 = _value_extent(g, f1.values[c])
        if g.is_circle:
            # lift the F1 arc next to the F0 arc
            mid0, mid1 = (lo0 + hi0) / 2, (lo1 + hi1) / 2
            shift = _nearest_lift(mid1, mid0, g.length) - mid1
            lo1, hi1 = lo1 + shift, hi1 + shift
        lo = lam * lo1 + (1 - lam) * lo0
        hi = lam * hi1 + (1 - lam) * hi0
        if g.is_circle and hi - lo > g.length / 2 + edge:
            raise MapError(f"hull of cell {c} exceeds half the circle")
        values[c] = g.cover(lo, hi)
    return CombMap.closed_up(f0.domain, g, values, source)
