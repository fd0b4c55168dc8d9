"""Transition digraph of a combinatorial map restricted to a set, invariant
parts, forward reachability and the isolation predicates."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .grid import CubSet, GridError, Region, closure, interior
from .mvmap import CombMap


@dataclass
class TransitionGraph:
    """Cells of ``N`` with an arc ``s -> t`` whenever ``t`` lies in the value of ``s``."""

    cells: frozenset[int]
    succ: dict[int, frozenset[int]]
    pred: dict[int, frozenset[int]] = field(repr=False)

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted((s, t) for s in self.succ for t in self.succ[s])


def build_graph(f: CombMap, n) -> TransitionGraph:
    if n.grid != f.domain or f.domain != f.codomain:
        raise GridError("transition graphs need a self-map and a set on its grid")
    cells = frozenset(n.cells)
    succ = {c: (f.values.get(c, frozenset()) & cells) for c in cells}
    pred: dict[int, set[int]] = {c: set() for c in cells}
    for s, ts in succ.items():
        for t in ts:
            pred[t].add(s)
    return TransitionGraph(cells, succ, {c: frozenset(p) for c, p in pred.items()})


def _cyclic_cells(graph: TransitionGraph) -> set[int]:
    """Cells on a cycle: members of a nontrivial strongly connected component or self-loops."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out: set[int] = set()
    counter = 0
    for root in sorted(graph.cells):
        if root in index:
            continue
        work = [(root, iter(sorted(graph.succ[root])))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(graph.succ[w]))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) > 1 or v in graph.succ[v]:
                    out.update(comp)
    return out


def _reach(start, adjacency) -> set[int]:
    seen = set(start)
    queue = deque(start)
    while queue:
        v = queue.popleft()
        for w in adjacency[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def inv_parts_raw(f: CombMap, n) -> tuple[Region, Region]:
    """Open cells with an infinite forward walk, and with an infinite backward walk, in ``N``."""
    graph = build_graph(f, n)
    cyclic = _cyclic_cells(graph)
    plus = _reach(cyclic, graph.pred)
    minus = _reach(cyclic, graph.succ)
    return Region(n.grid, plus), Region(n.grid, minus)


def inv_plus(f: CombMap, n) -> CubSet:
    return closure(inv_parts_raw(f, n)[0])


def inv_minus(f: CombMap, n) -> CubSet:
    return closure(inv_parts_raw(f, n)[1])


def inv_raw(f: CombMap, n) -> Region:
    plus, minus = inv_parts_raw(f, n)
    return plus & minus


def inv(f: CombMap, n) -> CubSet:
    """Invariant part of ``N``, closed up along faces."""
    return closure(inv_raw(f, n))


def reach_forward(f: CombMap, n, a) -> CubSet:
    """Smallest set containing ``A`` whose image stays in it as long as it stays in ``N``."""
    if not a.cells <= n.cells:
        raise GridError("reach_forward needs A inside N")
    graph = build_graph(f, n)
    return CubSet(n.grid, _reach(a.cells, graph.succ))


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def _inside(region, target, reason: str) -> Verdict:
    bad = sorted(region.cells - target.cells)
    if bad:
        return Verdict(False, bad[0], reason)
    return Verdict(True)


def is_isolating(f: CombMap, n) -> Verdict:
    """``Inv N ⊂ int N`` with the invariant cells taken closed."""
    return _inside(inv(f, n), interior(n), "invariant part touches the boundary")


def is_strongly_isolating(f: CombMap, n) -> Verdict:
    """``Inv N ∪ F(Inv N) ⊂ int N``."""
    s = inv(f, n)
    return _inside(s | f.image(s), interior(n), "invariant part or its image touches the boundary")


def is_isolating_block(f: CombMap, n) -> Verdict:
    """``N ∩ F(N) ∩ F^{-1}(N) ⊂ int N`` (counter image taken cellwise)."""
    core = n & f.image(n, partial_ok=True) & f.preimage_raw(n)
    return _inside(core, interior(n), "a point of the boundary maps into N and is hit from N")
