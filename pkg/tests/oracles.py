"""Independent reference implementations and random instances for the tests."""

from __future__ import annotations

import random
from fractions import Fraction

from wipconley.grid import CubSet, Grid1D
from wipconley.mvmap import CombMap


def walks_oracle(f: CombMap, n: CubSet) -> tuple[frozenset, frozenset]:
    """Cells of N with forward / backward walks of length |N| inside N.

    A walk longer than the number of cells repeats a cell, so it extends to an
    infinite walk; conversely every infinite walk has such a prefix.
    """
    cells = frozenset(n.cells)
    succ = {c: f.values.get(c, frozenset()) & cells for c in cells}
    pred = {c: frozenset(s for s in cells if c in succ[s]) for c in cells}

    def survive(adj):
        alive = cells
        for _ in range(len(cells)):
            alive = frozenset(c for c in alive if adj[c] & alive)
        return alive

    return survive(succ), survive(pred)


def inv_oracle(f: CombMap, n: CubSet) -> CubSet:
    fwd, bwd = walks_oracle(f, n)
    return CubSet.closure_of(n.grid, fwd & bwd)


def reach_oracle(f: CombMap, n: CubSet, a: CubSet) -> CubSet:
    """Fixpoint of ``R <- R ∪ (F(R) ∩ N)`` starting from A."""
    r = set(a.cells)
    while True:
        grown = set(r)
        for c in r:
            grown |= f.values.get(c, frozenset()) & n.cells
        if grown == r:
            return CubSet(n.grid, r)
        r = grown


def random_grid(rng: random.Random, max_cells: int = 40) -> Grid1D:
    edges = rng.randint(3, max_cells // 2)
    if rng.random() < 0.3:
        return Grid1D.circle(edges, 1)
    return Grid1D.segment(0, edges, 1)


def random_values(rng: random.Random, g: Grid1D, width: int = 3) -> dict[int, frozenset]:
    """Random interval or arc values, not necessarily connected after closing up."""
    vals = {}
    for c in g.cells():
        lo = rng.randint(0, g.n_edges if not g.is_circle else g.n_edges - 1)
        hi = lo + rng.randint(0, width)
        if not g.is_circle:
            hi = min(hi, g.n_edges)
        vals[c] = g.cover(g.base + lo, g.base + hi)
    return vals


def random_comb_map(rng: random.Random, g: Grid1D | None = None, partial: bool = False) -> CombMap:
    g = g or random_grid(rng)
    vals = random_values(rng, g)
    if partial:
        for c in list(vals):
            if rng.random() < 0.1:
                del vals[c]
        # faces of a defined edge stay defined
        for c in list(vals):
            if c % 2:
                for v in g.faces(c):
                    vals.setdefault(v, g.cover(g.coordinate(v), g.coordinate(v)))
    return CombMap.closed_up(g, g, vals)


def random_closed_set(rng: random.Random, g: Grid1D, pieces: int | None = None) -> CubSet:
    cells: set[int] = set()
    for _ in range(pieces or rng.randint(1, 3)):
        a = rng.randrange(g.n_edges)
        length = rng.randint(0, max(1, g.n_edges // 3))
        for k in range(length + 1):
            cells.add((2 * (a + k)) % g.n_cells)
        for k in range(length):
            cells.add((2 * (a + k) + 1) % g.n_cells)
    return CubSet.closure_of(g, cells)


def probes(g: Grid1D, per_edge: int = 10) -> list[Fraction]:
    """Rational points: every breakpoint plus ``per_edge`` interior points per edge."""
    pts = []
    for e in range(1, g.n_cells, 2):
        a, b = g.edge_bounds(e)
        pts.append(a)
        pts += [a + (b - a) * Fraction(j, per_edge + 1) for j in range(1, per_edge + 1)]
    if not g.is_circle:
        pts.append(g.stop)
    return pts


def random_matrix(rng: random.Random, n: int, lo: int = -3, hi: int = 3) -> list[list[int]]:
    return [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]


def random_unimodular(rng: random.Random, n: int, steps: int = 6) -> list[list[int]]:
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        q = rng.choice((-1, 1))
        for k in range(n):
            m[i][k] += q * m[j][k]
    if rng.random() < 0.5 and n:
        m[0] = [-x for x in m[0]]
    return m


GOLDEN = [
    ("f_ib", "F", "N"),
    ("f_ib2", "F", "N"),
    ("f_add1", "F", "N1"),
    ("f_add1", "F", "N2"),
    ("f_add2", "F", "N1"),
    ("f_add2", "F", "N2"),
    ("f_add2", "F", "N"),
    ("hom1", "D", "N"),
    ("hom1", "f", "N"),
    ("hom1", "F", "N"),
    ("hom2", "D", "N"),
    ("hom2", "f", "N"),
    ("com1", "F", "M"),
    ("com2", "F", "M"),
    ("com2", "G", "N"),
]


def golden_instances(resolution=None):
    """``(label, map, N)`` for every scenario neighborhood that isolates."""
    from wipconley.harness import load_scenario

    out = []
    for name, mapname, setname in GOLDEN:
        prob = load_scenario(name)
        inst = prob.instance(resolution)
        f = inst.map(mapname)
        n = inst.closed_set(setname, prob.maps[mapname].domain)
        out.append((f"{name}:{mapname}:{setname}", f, n))
    return out


def random_instances(seed: int, count: int):
    """Isolating ``(map, N)`` pairs from the harness generator."""
    from wipconley.dynamics import is_isolating
    from wipconley.harness import random_map, random_neighborhood

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        f = random_map(rng, rng.randint(3, 8))
        n = random_neighborhood(rng, f.domain)
        if is_isolating(f, n):
            out.append((f, n))
    return out
