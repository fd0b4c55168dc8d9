"""Relative cubical cohomology of one-dimensional pairs over the integers.

Cochains on a pair ``(A, B)`` live on the cells of ``A`` not in ``B``.  Edges
are oriented left to right (counterclockwise on a circle), so the coboundary
of a 0-cochain ``f`` is ``(δf)(e) = f(right face) - f(left face)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .grid import CubSet, GridError
from .mvmap import CombMap

Matrix = list[list[int]]


class CohomologyError(ValueError):
    """Torsion, a non-unimodular inverse, or a selector that cannot be built."""


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix, inner: int | None = None) -> Matrix:
    if inner is None:
        inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def transpose(a: Matrix, cols: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(cols or 0)]
    return [list(r) for r in zip(*a)]


def format_matrix(m: Matrix) -> str:
    return "[" + "; ".join(" ".join(str(x) for x in row) for row in m) + "]"


# -- Smith normal form -------------------------------------------------------


@dataclass
class SmithForm:
    """``S · D · T = diag(d_1, …, d_r, 0, …)`` with unimodular ``S`` and ``T``."""

    diag: list[int]
    s: Matrix
    s_inv: Matrix
    t: Matrix
    t_inv: Matrix

    @property
    def rank(self) -> int:
        return len(self.diag)


def smith_form(d: Matrix, rows: int, cols: int) -> SmithForm:
    a = [list(r) for r in d]
    s, s_inv = identity(rows), identity(rows)
    t, t_inv = identity(cols), identity(cols)

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        s[i], s[j] = s[j], s[i]
        for r in s_inv:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in t:
            r[i], r[j] = r[j], r[i]
        t_inv[i], t_inv[j] = t_inv[j], t_inv[i]

    def row_add(dst, src, q):
        # row_dst += q * row_src
        if q == 0:
            return
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        s[dst] = [x + q * y for x, y in zip(s[dst], s[src])]
        for r in s_inv:
            r[src] -= q * r[dst]

    def col_add(dst, src, q):
        # col_dst += q * col_src
        if q == 0:
            return
        for r in a:
            r[dst] += q * r[src]
        for r in t:
            r[dst] += q * r[src]
        t_inv[src] = [x - q * y for x, y in zip(t_inv[src], t_inv[dst])]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        s[i] = [-x for x in s[i]]
        for r in s_inv:
            r[i] = -r[i]

    diag = []
    p = 0
    while p < min(rows, cols):
        pivot = None
        best = None
        for i in range(p, rows):
            for j in range(p, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < best):
                    best, pivot = abs(a[i][j]), (i, j)
        if pivot is None:
            break
        row_swap(p, pivot[0])
        col_swap(p, pivot[1])
        while True:
            done = True
            for i in range(p + 1, rows):
                if a[i][p]:
                    row_add(i, p, -(a[i][p] // a[p][p]))
                    if a[i][p]:
                        done = False
            for j in range(p + 1, cols):
                if a[p][j]:
                    col_add(j, p, -(a[p][j] // a[p][p]))
                    if a[p][j]:
                        done = False
            if done:
                # divisibility: fold a row with an entry the pivot does not divide
                bad = next(
                    (i for i in range(p + 1, rows) for j in range(p + 1, cols) if a[i][j] % a[p][p]),
                    None,
                )
                if bad is None:
                    break
                row_add(p, bad, 1)
                continue
            # move the smallest remainder to the pivot and repeat
            best, pivot = abs(a[p][p]), (p, p)
            for i in range(p + 1, rows):
                if a[i][p] and abs(a[i][p]) < best:
                    best, pivot = abs(a[i][p]), (i, p)
            for j in range(p + 1, cols):
                if a[p][j] and abs(a[p][j]) < best:
                    best, pivot = abs(a[p][j]), (p, j)
            row_swap(p, pivot[0])
            col_swap(p, pivot[1])
        if a[p][p] < 0:
            row_neg(p)
        diag.append(a[p][p])
        p += 1
    return SmithForm(diag, s, s_inv, t, t_inv)


# -- cochain complexes and cohomology ---------------------------------------------


@dataclass
class CochainComplex:
    """Relative cochains of a pair ``(A, B)`` with the coboundary ``δ⁰``."""

    a: CubSet
    b: CubSet
    vertices: list[int]
    edges: list[int]
    delta: Matrix

    @classmethod
    def of(cls, a: CubSet, b: CubSet) -> "CochainComplex":
        if a.grid != b.grid:
            raise GridError("pair lives on two grids")
        if not b.cells <= a.cells:
            raise GridError("pair needs B inside A")
        cells = sorted(a.cells - b.cells)
        vertices = [c for c in cells if c % 2 == 0]
        edges = [c for c in cells if c % 2 == 1]
        vidx = {v: i for i, v in enumerate(vertices)}
        delta = [[0] * len(vertices) for _ in edges]
        for r, e in enumerate(edges):
            left, right = a.grid.faces(e)
            if right in vidx:
                delta[r][vidx[right]] += 1
            if left in vidx:
                delta[r][vidx[left]] -= 1
        return cls(a, b, vertices, edges, delta)

    def basis(self, k: int) -> list[int]:
        return self.vertices if k == 0 else self.edges


@dataclass
class GradedGroup:
    """Free graded group ``H^0 ⊕ H^1`` of a pair with bases from a Smith form."""

    complex: CochainComplex
    smith: SmithForm

    @property
    def ranks(self) -> tuple[int, int]:
        r = self.smith.rank
        return len(self.complex.vertices) - r, len(self.complex.edges) - r

    def rank(self, k: int) -> int:
        return self.ranks[k] if k in (0, 1) else 0

    def generators(self, k: int) -> list[list[int]]:
        """Cocycles representing the basis of ``H^k``."""
        r = self.smith.rank
        if k == 0:
            n = len(self.complex.vertices)
            return [[self.smith.t[i][j] for i in range(n)] for j in range(r, n)]
        n = len(self.complex.edges)
        return [[self.smith.s_inv[i][j] for i in range(n)] for j in range(r, n)]

    def coordinates(self, k: int, cocycle: Sequence[int]) -> list[int]:
        """Coordinates of a cocycle's class in the chosen basis."""
        r = self.smith.rank
        m = self.smith.t_inv if k == 0 else self.smith.s
        return [sum(m[i][j] * cocycle[j] for j in range(len(cocycle))) for i in range(r, len(m))]


def cohomology(a: CubSet, b: CubSet) -> GradedGroup:
    cx = CochainComplex.of(a, b)
    sf = smith_form(cx.delta, len(cx.edges), len(cx.vertices))
    if any(abs(x) != 1 for x in sf.diag):
        raise CohomologyError(f"torsion in a one-dimensional pair: {sf.diag}")
    return GradedGroup(cx, sf)


@dataclass
class GradedMatrix:
    """Per-degree integer matrices; ``blocks[k]`` has one column per source generator."""

    blocks: dict[int, Matrix]

    def __getitem__(self, k: int) -> Matrix:
        return self.blocks[k]

    def __eq__(self, other):
        return isinstance(other, GradedMatrix) and self.blocks == other.blocks

    def compose(self, other: "GradedMatrix") -> "GradedMatrix":
        """``self ∘ other``."""
        return GradedMatrix({k: matmul(self.blocks[k], other.blocks[k]) for k in self.blocks})

    def __str__(self):
        return ", ".join(f"{k}: {format_matrix(m)}" for k, m in sorted(self.blocks.items()))


def _descend(src: GradedGroup, dst: GradedGroup, cochain_maps: dict[int, Matrix]) -> GradedMatrix:
    """Matrix of ``H^*(dst) -> H^*(src)`` from cochain maps ``C^k(dst) -> C^k(src)``."""
    blocks = {}
    for k in (0, 1):
        m = cochain_maps[k]
        cols = []
        for gen in dst.generators(k):
            image = [sum(row[j] * gen[j] for j in range(len(gen))) for row in m]
            cols.append(src.coordinates(k, image))
        blocks[k] = transpose(cols, src.rank(k)) if cols else [[] for _ in range(src.rank(k))]
    return GradedMatrix(blocks)


def induced_inclusion(sub: tuple[CubSet, CubSet], sup: tuple[CubSet, CubSet]) -> GradedMatrix:
    """Restriction ``H^*(sup) -> H^*(sub)`` of an inclusion of pairs."""
    (a1, b1), (a2, b2) = sub, sup
    if not (a1.cells <= a2.cells and b1.cells <= b2.cells):
        raise GridError("not an inclusion of pairs")
    src, dst = cohomology(a1, b1), cohomology(a2, b2)
    maps = {}
    for k in (0, 1):
        index = {c: j for j, c in enumerate(dst.complex.basis(k))}
        rows = []
        for c in src.complex.basis(k):
            row = [0] * len(index)
            if c in index:
                row[index[c]] = 1
            rows.append(row)
        maps[k] = rows
    return _descend(src, dst, maps)


# -- acyclic-carrier chain selector --------------------------------------------------


@dataclass
class ChainMap:
    """Chains of the source pair sent to chains of the target pair.

    ``phi0[v]`` and ``phi1[e]`` are sparse chains ``{cell: coefficient}``
    relative to the target's second set.
    """

    phi0: dict[int, dict[int, int]]
    phi1: dict[int, dict[int, int]]
    chosen: dict[int, int]


def _boundary(grid, chain: dict[int, int], ground: frozenset[int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for e, x in chain.items():
        left, right = grid.faces(e)
        for v, s in ((right, x), (left, -x)):
            if v not in ground:
                out[v] = out.get(v, 0) + s
    return {v: x for v, x in out.items() if x}


def _carrier_graph(grid, value: frozenset[int], ground: frozenset[int]):
    """Vertices and edges of ``value`` with its part in ``ground`` collapsed to one node."""
    g = "ground"
    nodes = {v for v in value if v % 2 == 0 and v not in ground}
    if any(v in ground for v in value):
        nodes.add(g)
    adj: dict = {n: [] for n in nodes}
    for e in value:
        if e % 2 == 0 or e in ground:
            continue
        left, right = grid.faces(e)
        p = g if left in ground else left
        q = g if right in ground else right
        adj[p].append((e, q))
        adj[q].append((e, p))
    return adj


def _node(v, ground):
    return "ground" if v in ground else v


def _tree_chain(grid, value: frozenset[int], ground: frozenset[int], demand: dict[int, int]) -> dict[int, int]:
    """The unique 1-chain in ``value`` (modulo ``ground``) with the given boundary.

    Only the component carrying the demand is used; it must be a tree.
    """
    adj = _carrier_graph(grid, value, ground)
    if not demand:
        return {}
    root = "ground" if "ground" in adj else min(demand)
    if root not in adj:
        raise CohomologyError("boundary demand outside the carrier")
    parent: dict = {root: None}
    order = [root]
    for n in order:
        for e, m in adj[n]:
            if m not in parent:
                parent[m] = (e, n)
                order.append(m)
    if any(v not in parent for v in demand):
        raise CohomologyError("carrier is not connected between the chosen vertices")
    n_edges = len({e for n in order for e, _ in adj[n]})
    if n_edges != len(order) - 1:
        raise CohomologyError("carrier is not acyclic")
    total = {n: demand.get(n, 0) for n in order}
    chain: dict[int, int] = {}
    for n in reversed(order[1:]):
        e, p = parent[n]
        # coefficient x on e adds +x at its right face, -x at its left face
        right = _node(grid.faces(e)[1], ground)
        x = total[n] if right == n else -total[n]
        if x:
            chain[e] = x
        total[p] += total[n]
    if root != "ground" and total[root] != 0:
        raise CohomologyError("boundary demand does not sum to zero")
    return chain


def _edge_chain(grid, value: frozenset[int], ground: frozenset[int], start: int, end: int) -> dict[int, int]:
    """Chain in ``value`` from ``start`` to ``end``, reduced modulo ``ground``.

    The absolute carrier is tried first; if the two vertices are not joined
    by a tree inside it, the carrier with ``ground`` collapsed is used.
    """
    demand = {} if start == end else {end: 1, start: -1}
    try:
        chain = _tree_chain(grid, value, frozenset(), demand)
    except CohomologyError:
        rel: dict[int, int] = {}
        for v, x in demand.items():
            if v not in ground:
                rel[v] = rel.get(v, 0) + x
        return _tree_chain(grid, value, ground, {v: x for v, x in rel.items() if x})
    return {c: x for c, x in chain.items() if c not in ground}


def _components(grid, value: frozenset[int], ground: frozenset[int]) -> dict[int, object]:
    """Component label of every vertex of ``value`` modulo ``ground``."""
    adj = _carrier_graph(grid, value, ground)
    label: dict = {}
    for start in sorted(adj, key=str):
        if start in label:
            continue
        label[start] = start
        stack = [start]
        while stack:
            n = stack.pop()
            for _, m in adj[n]:
                if m not in label:
                    label[m] = start
                    stack.append(m)
    return {v: label[_node(v, ground)] for v in value if v % 2 == 0}


def _choose_vertices(f: CombMap, p1: CubSet, active_edges, ground, rng) -> dict[int, int]:
    """One vertex in the value of every vertex of ``P1``, joinable along every active edge."""
    grid = f.codomain
    domains = {}
    for v in sorted(c for c in p1.cells if c % 2 == 0):
        options = sorted(c for c in f.values[v] if c % 2 == 0)
        if rng:
            rng.shuffle(options)
        domains[v] = options
    links = []
    for e in active_edges:
        left, right = f.domain.faces(e)
        links.append((left, right, _components(grid, f.values[e], ground)))
    by_vertex: dict[int, list] = {v: [] for v in domains}
    for i, (left, right, _) in enumerate(links):
        by_vertex[left].append(i)
        by_vertex[right].append(i)

    def propagate(doms):
        queue = list(range(len(links)))
        while queue:
            i = queue.pop()
            left, right, comp = links[i]
            for x, y in ((left, right), (right, left)):
                reach = {comp[w] for w in doms[y]}
                kept = [w for w in doms[x] if comp[w] in reach]
                if len(kept) != len(doms[x]):
                    if not kept:
                        return False
                    doms[x] = kept
                    queue.extend(j for j in by_vertex[x] if j != i)
        return True

    if not propagate(domains):
        raise CohomologyError("no vertex selection is compatible with the edge values")
    for v in sorted(domains):
        for w in domains[v]:
            trial = dict(domains)
            trial[v] = [w]
            if propagate(trial):
                domains = trial
                break
        else:
            raise CohomologyError("no vertex selection is compatible with the edge values")
    return {v: d[0] for v, d in domains.items()}


def chain_selector(
    f: CombMap,
    src: tuple[CubSet, CubSet],
    dst: tuple[CubSet, CubSet],
    rng: random.Random | None = None,
) -> ChainMap:
    """Chain map carried by the values of ``f``.

    Each vertex goes to one vertex of its value (the first one in grid order
    that admits a compatible choice, or a random one when ``rng`` is given);
    each edge goes to the chain inside its value, modulo the target's second
    set, joining the images of its faces.
    """
    (p1, p2), (t1, t2) = src, dst
    grid = f.codomain
    ground = frozenset(t2.cells)
    for s, t in ((p1, t1), (p2, t2)):
        if not f.image(s).cells <= t.cells:
            raise CohomologyError("map does not send the source pair into the target pair")
    active = sorted(c for c in p1.cells - p2.cells if c % 2 == 1)
    chosen = _choose_vertices(f, p1, active, ground, rng)
    phi0 = {}
    for v in sorted(c for c in p1.cells - p2.cells if c % 2 == 0):
        w = chosen[v]
        phi0[v] = {} if w in ground else {w: 1}
    phi1 = {}
    for e in active:
        left, right = f.domain.faces(e)
        chain = _edge_chain(grid, f.values[e], ground, chosen[left], chosen[right])
        expect: dict[int, int] = {}
        for v, s in ((chosen[right], 1), (chosen[left], -1)):
            if v not in ground:
                expect[v] = expect.get(v, 0) + s
        if _boundary(grid, chain, ground) != {v: x for v, x in expect.items() if x}:
            raise CohomologyError(f"chain map identity fails at edge {e}")
        phi1[e] = chain
    return ChainMap(phi0, phi1, chosen)


def check_chain_map(f: CombMap, src, dst, cm: ChainMap) -> bool:
    """``∂φ₁ = φ₀∂`` on relative chains, plus carrier containment."""
    (_p1, _p2), (_t1, t2) = src, dst
    ground = frozenset(t2.cells)
    for e, chain in cm.phi1.items():
        if not set(chain) <= f.values[e]:
            return False
        left, right = f.domain.faces(e)
        expect: dict[int, int] = {}
        for v, s in ((right, 1), (left, -1)):
            if v in cm.phi0:
                for w, x in cm.phi0[v].items():
                    expect[w] = expect.get(w, 0) + s * x
        expect = {w: x for w, x in expect.items() if x}
        if _boundary(f.codomain, chain, ground) != expect:
            return False
    return all(set(ch) <= f.values[v] for v, ch in cm.phi0.items())


def induced_map(f: CombMap, src, dst, rng: random.Random | None = None) -> GradedMatrix:
    """``H^*(dst) -> H^*(src)`` induced by ``f`` through a chain selector."""
    cm = chain_selector(f, src, dst, rng)
    hs, hd = cohomology(*src), cohomology(*dst)
    maps = {}
    for k, phi in ((0, cm.phi0), (1, cm.phi1)):
        index = {c: j for j, c in enumerate(hd.complex.basis(k))}
        rows = []
        for c in hs.complex.basis(k):
            row = [0] * len(index)
            for w, x in phi[c].items():
                row[index[w]] += x
            rows.append(row)
        maps[k] = rows
    return _descend(hs, hd, maps)


def invert_iso(m: GradedMatrix) -> GradedMatrix:
    """Exact integer inverse of a per-degree unimodular matrix."""
    return GradedMatrix({k: invert_unimodular(b) for k, b in m.blocks.items()})


def invert_unimodular(b: Matrix) -> Matrix:
    n = len(b)
    if any(len(r) != n for r in b):
        raise CohomologyError("matrix is not square")
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(b)]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise CohomologyError("matrix is singular")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                q = a[r][col]
                a[r] = [x - q * y for x, y in zip(a[r], a[col])]
    if abs(det) != 1:
        raise CohomologyError(f"matrix is not unimodular (determinant {det})")
    out = [[x for x in row[n:]] for row in a]
    if any(x.denominator != 1 for row in out for x in row):
        raise CohomologyError("inverse is not integral")
    return [[int(x) for x in row] for row in out]
