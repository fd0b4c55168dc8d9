import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_comb_map
from strategies import comb_maps, cubsets, map_and_set
from wipconley.grid import CubSet, Grid1D, parse_set
from wipconley.harness import load_scenario
from wipconley.mvmap import (
    CombMap,
    MapError,
    PiecewiseSpec,
    SampleSpec,
    compose,
    convex_family,
    from_samples,
    identity_map,
    parse_clause,
)

F_IB = [
    "[0,1) -> {0}",
    "{1} -> [0,1]",
    "(1,3) -> {1}",
    "{3} -> [1,5]",
    "(3,4) -> [3,5]",
    "{4} -> [2,5]",
    "(4,6] -> {2}",
]
X6 = Grid1D.segment(0, 6, 1)


def f_ib(grid=X6):
    return PiecewiseSpec.parse(F_IB, grid).build(grid, grid)


def test_piecewise_values_cover_closed_cells():
    f = f_ib()
    assert f.value(7) == parse_set("[1,5]", X6)
    assert f.value(2) == parse_set("[0,1]", X6)
    # edge [1,2]: clause value {1} closed up with the vertex values [0,1] and {1}
    assert f.value(3) == parse_set("[0,1]", X6)
    assert f.image(parse_set("[2,5]", X6)) == parse_set("[1,5]", X6)


def test_f_boundary_example():
    f = f_ib()
    assert f.f_boundary(parse_set("[3,4]", X6)) == parse_set("{3} ∪ {4}", X6)
    assert f.f_boundary(parse_set("∅", X6)).is_empty()


def test_f_ib2_values_and_block_core():
    f = load_scenario("f_ib2").instance().map("F")
    g = f.domain
    n = parse_set("[2,5]", g)
    assert f.value(7) == parse_set("[3,4]", g)
    core = f.image(n) & f.preimage_large(n) & n
    assert core == parse_set("[3,4]", g)


def test_constant_map():
    f = PiecewiseSpec.parse(["[0,6] -> {0}"], X6).build(X6, X6)
    assert all(v == frozenset({0}) for v in f.values.values())


def test_refine_rebuilds_from_clauses():
    f = f_ib()
    fine = f.refine(4)
    g = fine.domain
    # the edge [5/4,3/2] only sees the clause value {1}
    assert fine.value(g.locate(Fraction(11, 8))) == parse_set("{1}", g)
    assert fine.value(g.locate(Fraction(15, 4))) == parse_set("[3,5]", g)


@pytest.mark.parametrize(
    "lines",
    [
        ["[0,3) -> {0}", "(3,6] -> {1}"],  # gap at 3
        ["[0,4] -> {0}", "[3,6] -> {1}"],  # overlap
        ["[0,5/2) -> {0}", "[5/2,6] -> {1}"],  # not a breakpoint
        ["[0,6] -> {9}"],  # outside the codomain
    ],
)
def test_piecewise_errors(lines):
    with pytest.raises(MapError):
        PiecewiseSpec.parse(lines, X6).build(X6, X6)


def test_circle_last_clause_must_be_open():
    c = Grid1D.circle(1, Fraction(1, 4))
    with pytest.raises(MapError):
        PiecewiseSpec.parse(["[0,1] -> 2*x"], c).build(c, c)


def test_parse_clause_forms():
    cl = parse_clause("(1,3) -> [1,2] ∪ {5}")
    assert not cl.lo_closed and not cl.hi_closed and len(cl.atoms) == 2
    assert parse_clause("{3} -> -x").contains(Fraction(3))
    with pytest.raises(MapError):
        parse_clause("[1,2] => {0}")


def test_single_sample_partial_domain():
    g = Grid1D.segment(0, 4, 1)
    f = from_samples([0], [0], g)
    assert set(f.values) == {0, 1}
    assert not f.is_total()
    with pytest.raises(MapError):
        f.image(parse_set("[0,2]", g))
    assert f.image(parse_set("[0,2]", g), partial_ok=True) == parse_set("[0,1]", g)


def test_identity_samples_map_into_closed_star():
    g = Grid1D.segment(0, 8, 1)
    pts = [Fraction(k, 2) for k in range(17)]
    f = SampleSpec(pts, pts).build(g, g)
    for c, v in f.values.items():
        star = g.closure_cells(g.open_star(g.closure_cells({c})))
        assert v <= star


def test_doubling_enclosure_near_zero():
    c = Grid1D.circle(1, Fraction(1, 16), Fraction(1, 32))
    pts = [Fraction(i, 16) for i in range(16)]
    d = from_samples(pts, [(2 * p) % 1 for p in pts], c)
    v = d.value(c.locate(0))
    # the cell around 0 carries the samples 15/16, 0, 1/16 mapped to 7/8, 0, 1/8
    for y in (Fraction(15, 16), Fraction(0), Fraction(1, 16)):
        assert y in v
    assert Fraction(1, 2) not in v
    assert all(d.check_acyclic_values().values())


def test_convex_family_endpoints_and_midpoint():
    prob = load_scenario("hom1")
    inst = prob.instance(Fraction(1, 16))
    f, d = inst.map("f"), inst.map("D")
    assert convex_family(f, d, 0) == f
    assert convex_family(f, d, 1) == d
    half = convex_family(f, d, Fraction(1, 2))
    g = f.domain
    for cell in g.cells():
        # midpoint hull: centres of both values sit inside
        a0, b0 = _extent(g, f.values[cell])
        a1, b1 = _extent(g, d.values[cell])
        shift = round(((a0 + b0) - (a1 + b1)) / 2)
        a1, b1 = a1 + shift, b1 + shift
        for y in ((a0 + a1) / 2, (b0 + b1) / 2, (a0 + b0 + a1 + b1) / 4):
            assert g.normalize(y) in CubSet(g, half.values[cell])


def _extent(g, cells):
    from wipconley.mvmap import _value_extent

    return _value_extent(g, frozenset(cells))


def test_convex_family_pointwise_segment():
    g = Grid1D.segment(0, 4, Fraction(1, 2))
    f0 = PiecewiseSpec.parse(["[0,4] -> 1/2*x"], g).build(g, g)
    f1 = PiecewiseSpec.parse(["[0,2) -> [0,1]", "{2} -> [0,4]", "(2,4] -> [3,4]"], g).build(g, g)
    rng = random.Random(3)
    for lam in (Fraction(1, 4), Fraction(1, 2), Fraction(2, 3)):
        fl = convex_family(f0, f1, lam)
        for cell in g.cells():
            v0, v1 = CubSet(g, f0.values[cell]), CubSet(g, f1.values[cell])
            lo0, hi0 = _extent(g, v0.cells)
            lo1, hi1 = _extent(g, v1.cells)
            for _ in range(10):
                y0 = lo0 + (hi0 - lo0) * Fraction(rng.randint(0, 8), 8)
                y1 = lo1 + (hi1 - lo1) * Fraction(rng.randint(0, 8), 8)
                assert (1 - lam) * y0 + lam * y1 in CubSet(g, fl.values[cell])


def test_compose_identity_and_restrict():
    f = f_ib()
    ident = identity_map(X6)
    assert compose(ident, f) == f
    assert compose(f, ident) == f
    assert f.restrict(CubSet.empty(X6)).effective_domain == frozenset()


def test_compose_leaving_domain_raises():
    g = Grid1D.segment(0, 4, 1)
    partial = from_samples([0], [0], g)
    total = PiecewiseSpec.parse(["[0,4] -> {3}"], g).build(g, g)
    with pytest.raises(MapError):
        compose(partial, total)


def test_commutativity_composition_reproduces_absolute_value_map():
    prob = load_scenario("com1")
    inst = prob.instance(1)
    g_comp = inst.map("G")
    y = inst.grid("Y")
    direct = PiecewiseSpec.parse(
        ["[0,1) -> {5}", "{1} -> [2,5]", "(1,2) -> [2,3]", "[2,3) -> [0,3]", "{3} -> [0,5]", "(3,5] -> {5}"], y
    ).build(y, y)
    assert g_comp == direct


def test_face_monotone_enforced():
    g = Grid1D.segment(0, 2, 1)
    with pytest.raises(MapError):
        CombMap(g, g, {0: {0}, 1: {4}, 2: {4}})
    with pytest.raises(MapError):
        CombMap(g, g, {0: {1}})


def test_acyclic_report():
    g = Grid1D.circle(3, 1)
    f = CombMap.closed_up(g, g, {0: g.cover(0, 1), 1: frozenset(range(6)), 2: {0, 4}})
    report = f.check_acyclic_values()
    assert report[0] and not report[1] and not report[2]


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_monotone_image_and_preimage(data):
    f = data.draw(comb_maps())
    a = data.draw(cubsets(f.domain))
    b = a | data.draw(cubsets(f.domain))
    assert f.image(a).cells <= f.image(b).cells
    assert f.preimage_large(a).cells <= f.preimage_large(b).cells


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_small_preimage_adjunction(data):
    f, a = data.draw(map_and_set())
    b = data.draw(cubsets(f.codomain))
    assert (a.cells <= f.preimage_small(b).cells) == (f.image(a).cells <= b.cells)


def test_piecewise_contains_pointwise_values():
    rng = random.Random(11)
    for name, mapname in (("f_ib", "F"), ("f_add1", "F"), ("f_add2", "F"), ("com1", "psi")):
        prob = load_scenario(name)
        inst = prob.instance()
        f = inst.map(mapname)
        spec = PiecewiseSpec.parse(prob.maps[mapname].body, f.codomain)
        g = f.domain
        for cell in g.cells():
            a, b = g.cell_bounds(cell)
            pts = [a] if a == b else [a + (b - a) * Fraction(rng.randint(1, 999), 1000) for _ in range(50)]
            value = CubSet(f.codomain, f.values[cell])
            for x in pts:
                for atom in spec.clause_at(x).atoms:
                    lo, hi = atom.over(x, x)
                    assert lo in value and hi in value and (lo + hi) / 2 in value


def test_compose_associative_on_random_triples():
    rng = random.Random(5)
    for _ in range(60):
        g = Grid1D.segment(0, rng.randint(3, 10), 1)
        f, h, k = (random_comb_map(rng, g) for _ in range(3))
        assert compose(k, compose(h, f)) == compose(compose(k, h), f)
