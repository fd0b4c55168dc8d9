"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL (...)`` line, visible
even under output capture, and enforces its runtime budget.
"""

import io
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from oracles import GOLDEN, golden_instances, inv_oracle, random_closed_set, random_comb_map, random_grid, random_matrix, random_unimodular, reach_oracle
from wipconley.cli import main
from wipconley.cohomology import chain_selector, check_chain_map, induced_inclusion, invert_unimodular, matmul
from wipconley.conley import GradedEndo, conley_index, determinant, index_equal, index_product, invariant_factors, leray
from wipconley.dynamics import inv, is_isolating, reach_forward
from wipconley.grid import CubSet, interior, parse_set
from wipconley.harness import (
    PASS,
    check_commutativity,
    check_continuation,
    check_nonisolation,
    check_wazewski,
    load_scenario,
)
from wipconley.indexpair import build_pair, make_tp, wip_from_block


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(number, budget):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            within = elapsed < budget
            with capsys.disabled():
                status = "PASS" if ok and within else "FAIL"
                print(f"\ncriterion {number}: {status} ({elapsed:.2f} s, budget {budget} s)")
        assert within, f"criterion {number} took {elapsed:.2f} s"

    return run


def cli(*argv):
    buf = io.StringIO()
    return main(list(argv), out=buf), buf.getvalue().splitlines()


def test_criterion_01_isolating_not_block(criterion):
    with criterion(1, 1):
        code, lines = cli("isolate", "f_ib", "--set", "N", "--block", "--resolution", "1/4")
        assert lines[0] == "isolating: yes"
        assert lines[1].startswith("block: no")
        assert code == 1
        inst = load_scenario("f_ib").instance(Fraction(1, 4))
        f, n = inst.map("F"), inst.closed_set("N")
        s = inv(f, n)
        assert s.cells <= interior(n).cells
        assert parse_set("[3,4]", f.domain).cells <= s.cells


def test_criterion_02_block_pair(criterion):
    with criterion(2, 1):
        inst = load_scenario("f_ib2").instance()
        f, n = inst.map("F"), inst.closed_set("N")
        code, lines = cli("isolate", "f_ib2", "--set", "N", "--block")
        assert code == 0 and lines[1] == "block: yes"
        pair = wip_from_block(f, n)
        assert pair.report.ok and all((pair.report.a, pair.report.b, pair.report.c, pair.report.d))
        core = f.image(n).cells & f.preimage_large(n).cells & n.cells
        assert inv(f, n).cells == core


def test_criterion_03_additivity_fails(criterion):
    with criterion(3, 2):
        inst = load_scenario("f_add2").instance()
        f = inst.map("F")
        c1 = conley_index(f, inst.closed_set("N1")).index
        c2 = conley_index(f, inst.closed_set("N2")).index
        c = conley_index(f, inst.closed_set("N")).index
        assert c1.degrees[1].render() == c2.degrees[1].render() == "rank 1, frobenius [x - 1]"
        assert c.degrees[1].render() == "rank 2, frobenius [x^2 - 2x + 1]"
        assert not index_equal(c, index_product(c1, c2))


def test_criterion_04_sum_not_isolated(criterion):
    with criterion(4, 2):
        prob = load_scenario("f_add1")
        for res in (1, Fraction(1, 2), Fraction(1, 4)):
            inst = prob.instance(res)
            rep = check_nonisolation(inst.map("F"), inst.closed_set("S"), 3)
            assert rep.status == PASS and rep.data["candidates"] > 0 and rep.data["isolating"] == []


def test_criterion_05_homotopy(criterion):
    with criterion(5, 5):
        inst = load_scenario("hom1").instance()
        d, f = inst.map("D"), inst.map("f")
        assert d.domain.is_circle and len(inst.problem.maps["D"].body) == 16
        n = inst.closed_set("N")
        rep = check_continuation(f, d, n, ["0", "1/4", "1/2", "3/4", "1"])
        assert rep.status == PASS and len(rep.data["indices"]) == 5
        inst = load_scenario("hom2").instance()
        idx = conley_index(inst.map("D"), inst.closed_set("N")).index
        assert idx.degrees[1].render() == "rank 2, frobenius [x^2 - 1]"


def test_criterion_06_commutativity(criterion):
    with criterion(6, 2):
        inst = load_scenario("com2").instance()
        rep = check_commutativity(inst.map("phi"), inst.map("psi"), inst.closed_set("M"), inst.closed_set("N", "Y"))
        assert not rep.data["injective"]
        assert rep.data["index_F"].degrees[1].render() == "rank 1, frobenius [x - 1]"
        assert rep.data["index_G"].is_zero()
        inst = load_scenario("com1").instance()
        rep = check_commutativity(inst.map("phi"), inst.map("psi"), inst.closed_set("M"))
        assert not rep.data["injective"]
        assert rep.data["candidates"] > 0 and rep.data["isolating"] == []


def test_criterion_07_wazewski(criterion):
    with criterion(7, 20):
        rep = check_wazewski(seed=0, count=1000)
        assert rep.data["instances"] == 1000
        assert rep.data["violations"] == 0
        assert rep.status == PASS


def test_criterion_08_oracles(criterion):
    with criterion(8, 10):
        rng = random.Random(8)
        for _ in range(200):
            g = random_grid(rng, 38)
            assert g.n_cells <= 40
            f = random_comb_map(rng, g)
            n = random_closed_set(rng, g)
            assert inv(f, n) == inv_oracle(f, n)
            a = CubSet(g, random_closed_set(rng, g).cells & n.cells)
            assert reach_forward(f, n, a) == reach_oracle(f, n, a)


def test_criterion_09_algebra(criterion):
    with criterion(9, 10):
        for label, f, n in golden_instances():
            pair = build_pair(f, n)
            tp = make_tp(pair)
            src, dst = (pair.p1, pair.p2), (tp.t1, tp.t2)
            assert check_chain_map(pair.f, src, dst, chain_selector(pair.f, src, dst)), label
            incl = induced_inclusion(src, dst)
            for block in incl.blocks.values():
                if block:
                    assert abs(determinant(block)) == 1, label
        rng = random.Random(9)
        for _ in range(500):
            size = rng.randint(1, 5)
            a = random_matrix(rng, size)
            idx = leray(GradedEndo({0: (), 1: tuple(map(tuple, a))}))
            assert index_equal(leray(idx.as_endo()), idx)
            p = random_unimodular(rng, size)
            conj = matmul(matmul(p, a), invert_unimodular(p))
            assert invariant_factors(conj) == invariant_factors(a)


def test_criterion_10_subdivision(criterion):
    with criterion(10, 10):
        for name, mapname, setname in GOLDEN:
            prob = load_scenario(name)
            coarse = prob.instance()
            fine = prob.instance(coarse.resolution / 2)
            space = prob.maps[mapname].domain
            indices = []
            for inst in (coarse, fine):
                f, n = inst.map(mapname), inst.closed_set(setname, space)
                assert is_isolating(f, n), (name, mapname, inst.resolution)
                indices.append(conley_index(f, n).index)
            assert index_equal(*indices), (name, mapname, setname)
