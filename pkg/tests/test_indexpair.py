import pytest

from oracles import golden_instances, random_instances
from wipconley.dynamics import inv_minus, inv_plus, is_isolating
from wipconley.grid import Region, boundary, interior, open_star, parse_set
from wipconley.harness import load_scenario
from wipconley.indexpair import (
    PairError,
    WeakIndexPair,
    build_pair,
    make_tp,
    verify_wip,
    wip_from_block,
    wip_general,
)


def _pair_invariants(pair: WeakIndexPair):
    f, n = pair.f, pair.n
    assert verify_wip(f, n, pair.p1, pair.p2).ok
    tp = make_tp(pair)
    assert f.image(pair.p1).cells <= tp.t1.cells
    assert f.image(pair.p2).cells <= tp.t2.cells
    excised = Region(n.grid, (tp.t1 - tp.t2).cells)
    assert excised == Region(n.grid, (pair.p1 - pair.p2).cells & interior(n).cells)


def test_paper_pair_for_f_add2():
    inst = load_scenario("f_add2").instance()
    f = inst.map("F")
    g = f.domain
    for n_text, p2_text in (("N1", "{3/2} ∪ {7/2}"), ("N2", "{9/2} ∪ {13/2}")):
        n = inst.closed_set(n_text)
        report = verify_wip(f, n, n, parse_set(p2_text, g))
        assert report.ok, report.lines()
        pair = wip_general(f, n)
        assert (pair.p1, pair.p2) == (n, parse_set(p2_text, g))


def test_block_pair_matches_formula():
    inst = load_scenario("f_ib2").instance()
    f, n = inst.map("F"), inst.closed_set("N")
    pair = wip_from_block(f, n)
    fn, nn = pair.f, pair.n
    assert pair.p2.cells == fn.image(nn).cells & boundary(nn).cells
    assert (fn.image(nn) & nn).cells <= pair.p1.cells
    _pair_invariants(pair)


def test_block_construction_rejects_non_blocks():
    inst = load_scenario("f_ib").instance()
    with pytest.raises(PairError):
        wip_from_block(inst.map("F"), inst.closed_set("N"))


def test_non_isolating_rejected():
    inst = load_scenario("f_add1").instance(1)
    f, n = inst.map("F"), inst.closed_set("N1")
    assert not is_isolating(f, n)
    with pytest.raises(PairError):
        wip_general(f, n)


def test_verify_reports_failing_conditions():
    inst = load_scenario("f_ib").instance()
    f, n = inst.map("F"), inst.closed_set("N")
    empty = parse_set("∅", f.domain)
    report = verify_wip(f, n, n, empty)
    assert not report.ok
    assert not report.d.ok
    assert any(line.startswith("(d) fail") for line in report.lines())


def test_custom_neighborhoods():
    inst = load_scenario("f_ib").instance()
    f, n = inst.map("F"), inst.closed_set("N")
    u = open_star(inv_plus(f, n))
    v = open_star(open_star(inv_minus(f, n)))
    pair = wip_general(f, n, u=u, v=v)
    _pair_invariants(pair)


@pytest.mark.parametrize("label,f,n", golden_instances(), ids=lambda x: x if isinstance(x, str) else "")
def test_constructions_on_golden_scenarios(label, f, n):
    pair = build_pair(f, n)
    _pair_invariants(pair)
    general = wip_general(f, n)
    _pair_invariants(general)


def test_constructions_on_random_corpus():
    for f, n in random_instances(7, 200):
        pair = build_pair(f, n)
        _pair_invariants(pair)
