"""Executable checks for the properties of the index and the scenario runner.

Every check returns a report with a status ``PASS``, ``FAIL`` or
``HYPOTHESIS-NOT-MET`` and human-readable lines.  Scenario files list the
checks to run (``check ...``) and golden values (``expect ...``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable

from .conley import ConleyIndex, conley_index, index_equal, index_product
from .dynamics import inv, is_isolating, is_isolating_block, is_strongly_isolating
from .grid import CubSet, Grid1D, _runs
from .indexpair import PairError, build_pair
from .mvmap import CombMap, PiecewiseSpec, compose, convex_family
from .problem import Problem, ProblemError, parse_problem

PASS = "PASS"
FAIL = "FAIL"
HNM = "HYPOTHESIS-NOT-MET"


@dataclass
class Report:
    name: str
    status: str
    lines: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def render(self) -> str:
        head = f"{self.status} {self.name}"
        return "\n".join([head] + [f"  {line}" for line in self.lines])


def _one_line(idx: ConleyIndex) -> str:
    return " | ".join(idx.render().splitlines())


# -- additivity -------------------------------------------------------------------


def check_additivity(f: CombMap, n1: CubSet, n2: CubSet) -> Report:
    """Index of ``Inv(N1 ∪ N2)`` against the product, gated on ``F(S_i) ∩ S_j = ∅``."""
    rep = Report("additivity", PASS)
    if n1.cells & n2.cells:
        rep.status, rep.lines = HNM, ["neighborhoods are not disjoint"]
        return rep
    for name, n in (("N1", n1), ("N2", n2), ("N1 ∪ N2", n1 | n2)):
        v = is_isolating(f, n)
        if not v:
            rep.status = HNM
            rep.lines.append(f"{name} is not isolating (cell {v.witness})")
            return rep
    s1, s2 = inv(f, n1), inv(f, n2)
    hit12 = f.image(s1).cells & s2.cells
    hit21 = f.image(s2).cells & s1.cells
    separated = not hit12 and not hit21
    c1 = conley_index(f, n1).index
    c2 = conley_index(f, n2).index
    c = conley_index(f, n1 | n2).index
    prod = index_product(c1, c2)
    equal = index_equal(c, prod)
    rep.data.update(separated=separated, index1=c1, index2=c2, index=c, product=prod, equal=equal)
    rep.lines += [
        f"S1 = {s1}, S2 = {s2}",
        f"C(S1) = {_one_line(c1)}",
        f"C(S2) = {_one_line(c2)}",
        f"C(S1 ∪ S2) = {_one_line(c)}",
        f"C(S1) x C(S2) = {_one_line(prod)}",
    ]
    if separated:
        rep.lines.append("separation holds; indices " + ("agree" if equal else "differ"))
        rep.status = PASS if equal else FAIL
    else:
        rep.lines.append("separation violated: F(S1) ∩ S2 ≠ ∅" if hit12 else "separation violated: F(S2) ∩ S1 ≠ ∅")
        rep.lines.append("indices " + ("agree" if equal else "differ") + " (not asserted)")
        rep.status = HNM
    return rep


# -- continuation -----------------------------------------------------------------


def check_continuation(f0: CombMap, f1: CombMap, n: CubSet, lambdas: Iterable) -> Report:
    """Indices of ``Inv(N)`` along ``(1 - t) F0 + t F1`` must agree."""
    rep = Report("continuation", PASS)
    indices = []
    for lam in lambdas:
        lam = Fraction(lam)
        fl = convex_family(f0, f1, lam)
        v = is_isolating(fl, n)
        if not v:
            rep.status = HNM
            rep.lines.append(f"t={lam}: N is not isolating (cell {v.witness})")
            continue
        c = conley_index(fl, n).index
        indices.append((lam, c))
        rep.lines.append(f"t={lam}: Inv = {inv(fl, n)}; C = {_one_line(c)}")
    rep.data["indices"] = indices
    if rep.status == HNM:
        return rep
    if all(index_equal(indices[0][1], c) for _, c in indices[1:]):
        rep.lines.append("all indices equal")
    else:
        rep.status = FAIL
        rep.lines.append("indices differ along the family")
    return rep


# -- candidate neighborhoods and non-isolation ---------------------------------------------


def candidate_neighborhoods(s: CubSet, radius: int) -> list[CubSet]:
    """Closed neighborhoods of ``S`` obtained by widening each component by 1..radius edges per side.

    On a segment, candidates touching an end point are dropped: interiors are
    relative to the space, so such sets isolate for a trivial reason.
    """
    g = s.grid
    n = g.n_cells
    comps = _runs(g, s.cells)
    if not comps:
        return []
    choices = [(a, b) for a in range(1, radius + 1) for b in range(1, radius + 1)]
    out: dict[frozenset, CubSet] = {}

    def widen(run, a, b):
        first, last = run[0], run[-1]
        if g.is_circle:
            return {c % n for c in range(first - 2 * a, first + len(run) + 2 * b)}
        lo, hi = max(first - 2 * a, 0), min(last + 2 * b, n - 1)
        return set(range(lo, hi + 1))

    def rec(k, acc):
        if k == len(comps):
            cells = frozenset(g.closure_cells(acc))
            if not g.is_circle and (0 in cells or n - 1 in cells):
                return
            out.setdefault(cells, CubSet(g, cells))
            return
        for a, b in choices:
            rec(k + 1, acc | widen(comps[k], a, b))

    rec(0, set())
    return [out[k] for k in sorted(out, key=lambda c: sorted(c))]


def check_nonisolation(f: CombMap, s: CubSet, radius: int = 3) -> Report:
    """Every candidate neighborhood of ``S`` must fail to isolate."""
    rep = Report("nonisolation", PASS)
    cands = candidate_neighborhoods(s, radius)
    isolating = [n for n in cands if is_isolating(f, n)]
    rep.data.update(candidates=len(cands), isolating=isolating)
    rep.lines.append(f"resolution {_resolution(s.grid)}: {len(cands)} candidates around {s}, {len(isolating)} isolating")
    if isolating:
        rep.status = FAIL
        rep.lines.append(f"isolating candidate {isolating[0]} with Inv = {inv(f, isolating[0])}")
    return rep


def _resolution(g: Grid1D) -> Fraction:
    a, b = g.edge_bounds(1)
    return b - a


# -- commutativity ------------------------------------------------------------------


def is_cell_injective(phi: CombMap) -> bool:
    """No two distinct edges share an edge of their values (thin maps)."""
    seen: dict[int, int] = {}
    for c, v in phi.values.items():
        if c % 2 == 0:
            continue
        for e in v:
            if e % 2 == 1:
                if e in seen and seen[e] != c:
                    return False
                seen[e] = c
    return True


def check_commutativity(
    phi: CombMap,
    psi: CombMap,
    m: CubSet,
    n: CubSet | None = None,
    radius: int = 3,
) -> Report:
    """``C(S, Ψφ)`` against ``C(φ(S), φΨ)``, asserted only under the theorems' hypotheses."""
    rep = Report("commutativity", PASS)
    f, g = compose(psi, phi), compose(phi, psi)
    v = is_isolating(f, m)
    if not v:
        rep.status = HNM
        rep.lines.append(f"M is not isolating for F (cell {v.witness})")
        return rep
    s = inv(f, m)
    injective = is_cell_injective(phi)
    strong = bool(is_strongly_isolating(f, m))
    phis = phi.image(s)
    cf = conley_index(f, m).index
    rep.data.update(injective=injective, strong=strong, S=s, phiS=phis, index_F=cf)
    rep.lines += [
        f"S = {s}, phi(S) = {phis}",
        f"phi injective: {'yes' if injective else 'no'}; S strongly isolated: {'yes' if strong else 'no'}",
        f"C(S, F) = {_one_line(cf)}",
    ]
    asserted = injective or strong
    if n is None:
        cands = candidate_neighborhoods(phis, radius)
        isolating = [c for c in cands if is_isolating(g, c)]
        rep.data.update(candidates=len(cands), isolating=isolating)
        rep.lines.append(f"{len(cands)} candidate neighborhoods of phi(S), {len(isolating)} isolating for G")
        if not isolating:
            rep.lines.append("phi(S) is not isolated by any candidate")
            rep.status = FAIL if asserted else HNM
            return rep
        n = isolating[0]
    vg = is_isolating(g, n)
    if not vg:
        rep.lines.append(f"N is not isolating for G (cell {vg.witness})")
        rep.status = FAIL if asserted else HNM
        return rep
    cg = conley_index(g, n).index
    equal = index_equal(cf, cg)
    rep.data.update(index_G=cg, equal=equal)
    rep.lines.append(f"C(phi(S), G) = {_one_line(cg)}")
    rep.lines.append("indices " + ("agree" if equal else "differ") + ("" if asserted else " (not asserted)"))
    if asserted:
        rep.status = PASS if equal else FAIL
    else:
        rep.status = HNM
    return rep


# -- Wazewski corpus -------------------------------------------------------------------


def random_map(rng: random.Random, edges: int, slope: int = 2) -> CombMap:
    """Random upper semicontinuous step map on ``[0, edges]`` with unit grid.

    Open edges get interval values whose centres follow a walk with bounded
    steps; a vertex value contains the values of both adjacent edges, so the
    graph is closed.  Built from clauses, so refinement rebuilds it exactly.
    """
    g = Grid1D.segment(0, edges, 1)

    def clamp(x):
        return max(0, min(edges, x))

    centre = rng.randint(0, edges)
    open_vals = []
    for _ in range(edges):
        centre = clamp(centre + rng.randint(-slope, slope))
        open_vals.append((centre, clamp(centre + rng.choice((0, 0, 1)))))
    lines = []
    for i in range(edges + 1):
        near = [open_vals[j] for j in (i - 1, i) if 0 <= j < edges]
        lo = clamp(min(a for a, _ in near) - rng.choice((0, 0, 0, 1)))
        hi = clamp(max(b for _, b in near) + rng.choice((0, 0, 0, 1)))
        lines.append(f"{{{i}}} -> [{lo},{hi}]")
        if i < edges:
            a, b = open_vals[i]
            lines.append(f"({i},{i + 1}) -> [{a},{b}]")
    return PiecewiseSpec.parse(lines, g).build(g, g)


def random_neighborhood(rng: random.Random, g: Grid1D) -> CubSet:
    edges = g.n_edges
    cells: set[int] = set()
    for _ in range(rng.choice((1, 1, 2))):
        a = rng.randint(0, edges - 1)
        b = rng.randint(a + 1, edges)
        cells |= set(range(2 * a, 2 * b + 1))
    return CubSet(g, cells)


def check_wazewski(seed: int = 0, count: int = 1000, max_edges: int = 8) -> Report:
    """Seeded random isolating instances: a nonzero index forces a nonempty invariant set."""
    rng = random.Random(seed)
    rep = Report("wazewski", PASS)
    found = violations = vacuous = failures = attempts = 0
    while found < count and attempts < 100 * count:
        attempts += 1
        f = random_map(rng, rng.randint(3, max_edges))
        n = random_neighborhood(rng, f.domain)
        if not is_isolating(f, n):
            continue
        found += 1
        try:
            c = conley_index(f, n).index
        except PairError:
            failures += 1
            continue
        empty = inv(f, n).is_empty()
        vacuous += c.is_zero()
        if not c.is_zero() and empty:
            violations += 1
            rep.lines.append(f"violation at instance {found}: {f!r}, N = {n}")
    rep.data.update(seed=seed, instances=found, violations=violations, zero_index=vacuous, failures=failures)
    rep.lines.insert(0, f"seed {seed}: {found} isolating instances, {violations} violations, "
                     f"{vacuous} with zero index, {failures} pair failures")
    if violations or found < count:
        rep.status = FAIL
    return rep


# -- scenarios -------------------------------------------------------------------------


SCENARIOS = ("f_ib", "f_ib2", "f_add1", "f_add2", "f_add2_points", "hom1", "hom2", "com1", "com2")


def scenario_text(name: str) -> str:
    return resources.files("wipconley").joinpath("scenarios", f"{name}.txt").read_text(encoding="utf-8")


def load_scenario(name: str) -> Problem:
    return parse_problem(scenario_text(name))


def _kv(args: list[str]) -> tuple[list[str], dict[str, list[str]]]:
    """Split positional arguments from ``key value...`` options."""
    keys = {"radius", "resolutions", "lambdas", "expect", "seed", "count"}
    pos, opts, cur = [], {}, None
    for a in args:
        if a in keys:
            cur = a
            opts[cur] = []
        elif cur is None:
            pos.append(a)
        else:
            opts[cur].append(a)
    return pos, opts


def _yes(text: str) -> bool:
    if text not in ("yes", "no"):
        raise ProblemError(f"expected yes or no, got {text!r}")
    return text == "yes"


def run_directive(prob: Problem, d, resolution=None, seed=None) -> Report:
    inst = prob.instance(resolution)
    pos, opts = _kv(d.args)
    want = opts.get("expect", [PASS])[0]
    kw = d.keyword
    if kw in ("isolating", "block", "strong"):
        fname, nname, answer = pos
        f, n = inst.map(fname), inst.closed_set(nname, prob.maps[fname].domain)
        pred = {"isolating": is_isolating, "block": is_isolating_block, "strong": is_strongly_isolating}[kw]
        v = pred(f, n)
        ok = bool(v) == _yes(answer)
        rep = Report(f"{kw} {fname} {nname}", PASS if ok else FAIL,
                     [f"{kw}: {'yes' if v else 'no'}" + ("" if v else f" (cell {v.witness})")])
    elif kw == "inv":
        fname, nname, *text = pos
        f, n = inst.map(fname), inst.closed_set(nname, prob.maps[fname].domain)
        got = str(inv(f, n))
        expect = " ".join(text)
        rep = Report(f"inv {fname} {nname}", PASS if got == expect else FAIL, [f"Inv = {got}"])
    elif kw == "pair":
        fname, nname = pos[:2]
        f, n = inst.map(fname), inst.closed_set(nname, prob.maps[fname].domain)
        p = build_pair(f, n)
        rep = Report(f"pair {fname} {nname}", PASS if p.report.ok else FAIL,
                     [f"P1 = {p.p1}", f"P2 = {p.p2}"] + p.report.lines())
    elif kw == "index":
        fname, nname, *text = pos
        f, n = inst.map(fname), inst.closed_set(nname, prob.maps[fname].domain)
        c = conley_index(f, n).index
        got = c.render().splitlines()
        expected = [t.strip() for t in " ".join(text).split(";") if t.strip()]
        ok = all(e in got for e in expected)
        rep = Report(f"index {fname} {nname}", PASS if ok else FAIL, got)
    elif kw == "additivity":
        fname, a, b = pos
        f = inst.map(fname)
        dom = prob.maps[fname].domain
        rep = check_additivity(f, inst.closed_set(a, dom), inst.closed_set(b, dom))
    elif kw == "continuation":
        f0, f1, nname = pos
        lambdas = opts.get("lambdas", ["0", "1/4", "1/2", "3/4", "1"])
        rep = check_continuation(inst.map(f0), inst.map(f1), inst.closed_set(nname, prob.maps[f0].domain), lambdas)
    elif kw == "commutativity":
        phi, psi, mname, *rest = pos
        radius = int(opts.get("radius", ["3"])[0])
        dom, cod = prob.maps[phi].domain, prob.maps[phi].codomain
        resolutions = opts.get("resolutions") or [None]
        rep = Report("commutativity", PASS)
        for r in resolutions:
            ri = prob.instance(r) if r is not None else inst
            n = ri.closed_set(rest[0], cod) if rest else None
            sub = check_commutativity(ri.map(phi), ri.map(psi), ri.closed_set(mname, dom), n, radius)
            rep.lines += ([f"resolution {r}:"] if r else []) + sub.lines
            rep.data.setdefault("runs", []).append(sub)
            if sub.status == FAIL or (sub.status == HNM and rep.status == PASS):
                rep.status = sub.status
    elif kw == "nonisolation":
        fname, sname = pos
        radius = int(opts.get("radius", ["3"])[0])
        resolutions = opts.get("resolutions") or [None]
        rep = Report(f"nonisolation {fname} {sname}", PASS)
        for r in resolutions:
            ri = prob.instance(r) if r is not None else inst
            sub = check_nonisolation(ri.map(fname), ri.closed_set(sname, prob.maps[fname].domain), radius)
            rep.lines += sub.lines
            rep.data.setdefault("runs", []).append(sub)
            if sub.status != PASS:
                rep.status = sub.status
    elif kw == "wazewski":
        count = int(opts.get("count", ["1000"])[0])
        s = seed if seed is not None else int(opts.get("seed", ["0"])[0])
        rep = check_wazewski(s, count)
    else:
        raise ProblemError(f"line {d.line}: unknown check {kw!r}")
    rep.name = f"{kw}: {d.text}" if kw not in ("isolating", "block", "strong", "inv", "pair", "index") else rep.name
    if want != PASS:
        actual = rep.status
        rep.lines.append(f"expected status {want}, got {actual}")
        rep.status = PASS if actual == want else FAIL
    return rep


def run_problem(prob: Problem, resolution=None, seed=None, suite: str | None = None) -> list[Report]:
    reports = []
    for d in prob.checks + prob.expects:
        if suite and d.keyword != suite:
            continue
        reports.append(run_directive(prob, d, resolution, seed))
    return reports


def overall_status(reports: list[Report]) -> str:
    statuses = {r.status for r in reports}
    if FAIL in statuses:
        return FAIL
    if HNM in statuses:
        return HNM
    return PASS
