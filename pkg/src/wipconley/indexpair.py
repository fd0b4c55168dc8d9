"""Weak index pairs: verification, the two constructions, and the pair T(P)."""

from __future__ import annotations

import os
from dataclasses import dataclass

from .dynamics import Verdict, inv, inv_parts_raw, is_isolating, is_isolating_block, reach_forward
from .grid import CubSet, GridError, Region, boundary, closure, complement, interior, open_star
from .mvmap import CombMap

DEFAULT_SUBDIV_LIMIT = 4
SUBDIV_ENV = "WIPCONLEY_SUBDIV_LIMIT"


class PairError(ValueError):
    """A construction's hypothesis fails or it runs out of subdivisions."""


def subdivision_limit(limit: int | None = None) -> int:
    if limit is not None:
        return limit
    return int(os.environ.get(SUBDIV_ENV, DEFAULT_SUBDIV_LIMIT))


@dataclass(frozen=True)
class WipReport:
    structure: Verdict
    a: Verdict
    b: Verdict
    c: Verdict
    d: Verdict

    @property
    def ok(self) -> bool:
        return all((self.structure, self.a, self.b, self.c, self.d))

    def __bool__(self):
        return self.ok

    def lines(self) -> list[str]:
        out = []
        for name in ("structure", "a", "b", "c", "d"):
            v = getattr(self, name)
            tail = "" if v.ok else f" (cell {v.witness}: {v.reason})"
            out.append(f"({name}) {'pass' if v.ok else 'fail'}{tail}")
        return out


def _subset(region, target, reason) -> Verdict:
    bad = sorted(region.cells - target.cells)
    return Verdict(False, bad[0], reason) if bad else Verdict(True)


def verify_wip(f: CombMap, n: CubSet, p1: CubSet, p2: CubSet) -> WipReport:
    for s in (p1, p2):
        if s.grid != n.grid:
            raise GridError("pair and neighborhood live on different grids")
    structure = _subset(p2, p1, "P2 is not inside P1")
    if structure:
        structure = _subset(p1, n, "P1 is not inside N")
    a = Verdict(True)
    for p in (p1, p2):
        a = _subset(f.image(p, partial_ok=True) & n, p, "image re-enters N outside the set")
        if not a:
            break
    b = _subset(f.f_boundary(p1), p2, "F-boundary of P1 is not inside P2")
    core = p1 - p2
    c = _subset(inv(f, n), interior(core), "invariant part not interior to P1 minus P2")
    d = _subset(core, interior(n), "P1 minus P2 reaches the boundary of N")
    return WipReport(structure, a, b, c, d)


@dataclass(frozen=True)
class WeakIndexPair:
    """Verified pair ``(P1, P2)`` in ``N`` for ``F`` on one grid.

    The constructions may subdivide; ``f`` and ``n`` are then the refined
    map and neighborhood.
    """

    f: CombMap
    n: CubSet
    p1: CubSet
    p2: CubSet
    report: WipReport

    @property
    def grid(self):
        return self.n.grid


@dataclass(frozen=True)
class TPair:
    t1: CubSet
    t2: CubSet


def make_tp(pair: WeakIndexPair) -> TPair:
    """``(P1 ∪ (X ∖ int N), P2 ∪ (X ∖ int N))``."""
    outside = complement(interior(pair.n)).as_cubset()
    return TPair(pair.p1 | outside, pair.p2 | outside)


def _refine(f: CombMap, n: CubSet, k: int = 2):
    g, transfer = f.domain.subdivide(k)
    fine = f.refine(k)
    if fine.domain != g:
        raise GridError("refined map is not on the subdivided grid")
    return fine, transfer(n)


def _from_block_once(f: CombMap, n: CubSet):
    image = f.image(n, partial_ok=True)
    core = closure(n & image & f.preimage_raw(n))
    u = open_star(core)
    if not closure(u).cells <= interior(n).cells:
        return None
    p1 = (image & n) | closure(u)
    p2 = CubSet(n.grid, image.cells & boundary(n).cells)
    return p1, p2


def wip_from_block(f: CombMap, n: CubSet, limit: int | None = None) -> WeakIndexPair:
    """Pair ``((F(N) ∩ N) ∪ cl U, F(N) ∩ bd N)`` with U the open star of the core.

    The grid is halved until the closure of the star fits in the interior of
    ``N``.
    """
    verdict = is_isolating_block(f, n)
    if not verdict:
        raise PairError(f"N is not an isolating block (cell {verdict.witness})")
    for _ in range(subdivision_limit(limit) + 1):
        found = _from_block_once(f, n)
        if found is not None:
            p1, p2 = found
            return WeakIndexPair(f, n, p1, p2, verify_wip(f, n, p1, p2))
        f, n = _refine(f, n)
    raise PairError("subdivision limit exceeded while shrinking the core neighborhood")


def _general_once(f: CombMap, n: CubSet, u: Region | None, v: Region | None):
    plus, minus = inv_parts_raw(f, n)
    inv_minus = closure(minus)
    if u is None:
        u = open_star(closure(plus))
    a = CubSet(n.grid, closure(open_star(inv_minus)).cells & n.cells)
    if v is None:
        v = open_star(a)
    if not (u & v).cells <= interior(n).cells:
        return None
    p1 = reach_forward(f, n, a)
    if not p1.cells <= v.cells:
        return None
    p2 = reach_forward(f, n, closure(p1 - u))
    if not (p1 - p2).cells <= u.cells:
        return None
    report = verify_wip(f, n, p1, p2)
    if not report:
        return None
    return p1, p2, report


def wip_general(
    f: CombMap,
    n: CubSet,
    u: Region | None = None,
    v: Region | None = None,
    limit: int | None = None,
) -> WeakIndexPair:
    """Pair ``P1 = F_N^+(A)``, ``P2 = F_N^+(P1 ∖ U)`` with A a closed star of Inv⁻.

    ``U`` and ``V`` default to open stars of the forward invariant part and
    of A.  When a condition fails the grid is halved and the construction
    repeated; custom ``U``, ``V`` are carried to the finer grid.
    """
    verdict = is_isolating(f, n)
    if not verdict:
        raise PairError(f"N is not isolating (cell {verdict.witness})")
    for _ in range(subdivision_limit(limit) + 1):
        found = _general_once(f, n, u, v)
        if found is not None:
            p1, p2, report = found
            return WeakIndexPair(f, n, p1, p2, report)
        g, transfer = f.domain.subdivide(2)
        u = transfer(u) if u is not None else None
        v = transfer(v) if v is not None else None
        f, n = _refine(f, n)
    raise PairError("subdivision limit exceeded in the general construction")


def build_pair(f: CombMap, n: CubSet, limit: int | None = None) -> WeakIndexPair:
    """Block construction when ``N`` is a block, the general one otherwise."""
    if is_isolating_block(f, n):
        try:
            return wip_from_block(f, n, limit)
        except PairError:
            pass
    return wip_general(f, n, limit=limit)
