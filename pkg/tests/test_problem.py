from fractions import Fraction

import pytest

from wipconley.harness import SCENARIOS, load_scenario, scenario_text
from wipconley.problem import ProblemError, UndefinedName, load_problem, parse_problem, validate_sets

BASE = """\
space X segment 0 4 step 1
map F : X -> X piecewise
  [0,4] -> {2}
end
set N = [1,3]
"""


def test_minimal_problem():
    prob = parse_problem(BASE + "check isolating F N yes\n")
    assert prob.default_map() == "F"
    inst = prob.instance()
    assert str(inst.closed_set("N")) == "[1,3]"
    assert inst.map("F").value(inst.grid("X").locate(2)).cells == frozenset({4})
    assert [d.keyword for d in prob.checks] == ["isolating"]


def test_resolution_override():
    prob = parse_problem(BASE)
    g = prob.instance(Fraction(1, 2)).grid("X")
    assert g.n_edges == 8
    with pytest.raises(ProblemError):
        prob.instance(Fraction(2, 3)).grid("X")


def test_comments_and_blank_lines():
    prob = parse_problem("# header\n\n" + BASE.replace("set N", "# note\nset N"))
    assert "N" in prob.sets


@pytest.mark.parametrize(
    "text",
    [
        "",
        "space X line 0 4 step 1\n",
        "space X segment 0 4 step 1 colour red\n",
        "space X segment 0 4 step 1 base 1\n",
        "space X segment 0 x step 1\n",
        "space X segment 0 4 step 1\nmap F : X -> X piecewise\n  [0,4] -> {2}\n",
        "space X segment 0 4 step 1\nmap F : X -> X wiggle\nend\n",
        "space X segment 0 4 step 1\nset N [1,2]\n",
        "space X segment 0 4 step 1\nfrobnicate\n",
        "space X segment 0 4 step 1\nmap G : X -> X compose F\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ProblemError):
        parse_problem(text)


def test_undefined_names():
    with pytest.raises(UndefinedName):
        parse_problem("space X segment 0 4 step 1\nmap F : Y -> X piecewise\n[0,4] -> {2}\nend\n")
    prob = parse_problem(BASE)
    inst = prob.instance()
    with pytest.raises(UndefinedName):
        inst.map("G")
    with pytest.raises(UndefinedName):
        inst.set("M")
    with pytest.raises(UndefinedName):
        inst.grid("Y")


def test_bad_map_body_is_problem_error():
    prob = parse_problem("space X segment 0 4 step 1\nmap F : X -> X piecewise\n  [0,2) -> {2}\nend\n")
    with pytest.raises(ProblemError):
        prob.instance().map("F")


def test_malformed_set_text_reported_on_validation():
    prob = parse_problem("space X segment 0 4 step 1\nset N = [1,2\n")
    with pytest.raises(ProblemError):
        validate_sets(prob)


def test_open_set_is_not_closed():
    prob = parse_problem(BASE + "set U = (1,3)\n")
    with pytest.raises(ProblemError):
        prob.instance().closed_set("U")


@pytest.mark.parametrize("name", SCENARIOS)
def test_scenarios_parse_and_build(name, tmp_path):
    path = tmp_path / f"{name}.txt"
    path.write_text(scenario_text(name))
    prob = load_problem(path)
    inst = prob.instance()
    for m in prob.maps:
        assert inst.map(m).is_total()
    assert prob.checks or prob.expects
    validate_sets(prob)
    assert load_scenario(name).source == prob.source
