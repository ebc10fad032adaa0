import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopw.central import (
    FAMILY_NAMES,
    CocycleFamily,
    TwoCocycle,
    check_two_cocycle,
    family_to_cocycle,
    family_values,
    solve_central,
)
from loopw.core import CLW, Element, I, L
from loopw.exactalg import D, LAM, ZERO, Poly
import oracles
from oracles import to_sympy


def cocycle_to_sympy(phi: TwoCocycle) -> dict:
    return {((x.family, x.index), (y.family, y.index)): to_sympy(v) for (x, y), v in phi.values.items()}


def test_family_examples():
    phi = family_to_cocycle(-1, CocycleFamily({"B'''": {0: 1}}), 2)
    assert phi.value(L(2), I(-2)) == LAM**3
    assert phi.value(I(-2), L(2)) == LAM**3
    assert family_values("1/2", CocycleFamily({"C": {1: 5}}), 1)["II"] == Poly.const(5)
    # B only contributes at b = 1
    assert family_values(2, CocycleFamily({"B": {0: 1}}), 0)["LI"] == ZERO
    assert family_values(1, CocycleFamily({"B": {0: 1}}), 0)["LI"] == Poly.const(1)


def test_family_json_roundtrip():
    fam = CocycleFamily({"A": {0: "1/2", 1: 3}, "C'": {-1: -2}})
    assert CocycleFamily.loads(fam.dumps()) == fam
    with pytest.raises(ValueError):
        CocycleFamily({"Z": {0: 1}})


def test_extension_to_elements():
    phi = family_to_cocycle(0, CocycleFamily({"A'": {0: 1}}), 1)
    # φ_λ(∂L_0, L_0) = -λ · λ³
    assert phi.phi(Element.gen(L(0), D), Element.gen(L(0))) == -(LAM**4)
    assert phi.phi(Element.gen(L(0)), Element.gen(L(0), D)) == LAM**4


def test_lambda_squared_fails_skew():
    vals = {}
    for x in CLW(0).generators(range(-1, 2)):
        for y in CLW(0).generators(range(-1, 2)):
            vals[(x, y)] = LAM**2
    rep = check_two_cocycle(0, TwoCocycle(vals), 1)
    assert not rep.ok
    assert any(v.axiom == "skew" for v in rep.violations)
    assert not oracles.central_cocycle_ok(0, cocycle_to_sympy(TwoCocycle(vals)), 1)


def test_zero_cocycle_passes():
    zero = family_to_cocycle(1, CocycleFamily({}), 2)
    assert check_two_cocycle(1, zero, 2).ok


all_but_c = [n for n in FAMILY_NAMES if n != "C"]
fams = st.fixed_dictionaries(
    {n: st.dictionaries(st.integers(-2, 2), st.integers(-3, 3), max_size=2) for n in all_but_c}
).map(CocycleFamily)


@given(fams, st.sampled_from(["-1", "0", "1/2", "1", "2"]))
@settings(max_examples=25, deadline=None)
def test_families_are_cocycles(fam, b):
    assert check_two_cocycle(b, family_to_cocycle(b, fam, 2), 2).ok


@pytest.mark.parametrize("b", ["-1", "0", "1"])
def test_checker_agrees_with_oracle(b):
    fam = CocycleFamily({"A": {0: 1, 1: 2}, "B'": {0: -1}, "B''": {1: 1}, "B'''": {-1: 2}, "B": {0: 1}, "C'": {1: 3}})
    phi = family_to_cocycle(b, fam, 1)
    assert check_two_cocycle(b, phi, 1).ok
    assert oracles.central_cocycle_ok(b, cocycle_to_sympy(phi), 1)
    bad = family_to_cocycle(b, fam, 1)
    bad.values[(L(0), L(1))] = bad.values[(L(0), L(1))] + LAM**2
    bad.values[(L(1), L(0))] = bad.values[(L(1), L(0))] - LAM**2
    assert not check_two_cocycle(b, bad, 1).ok
    assert not oracles.central_cocycle_ok(b, cocycle_to_sympy(bad), 1)


def test_constant_ii_term_at_half_contradicts_skew():
    # φ(I_i, I_j) = C(i+j) would need C = -C under the skew rule
    phi = family_to_cocycle("1/2", CocycleFamily({"C": {0: 1}}), 1)
    rep = check_two_cocycle("1/2", phi, 1)
    assert not rep.ok and "skew" in {v.axiom for v in rep.violations}
    assert not oracles.central_cocycle_ok("1/2", cocycle_to_sympy(phi), 1)


def kappa_cocycle(b, window, kappa):
    """φ(L_i, I_j) = i κ(i+j), constant in λ; everything else zero."""
    idx = range(-window, window + 1)
    vals = {}
    for i in idx:
        for j in idx:
            vals[(L(i), L(j))] = ZERO
            vals[(I(i), I(j))] = ZERO
            vals[(L(i), I(j))] = Poly.const(i * kappa.get(i + j, 0))
            vals[(I(j), L(i))] = Poly.const(-i * kappa.get(i + j, 0))
    return TwoCocycle(vals)


@pytest.mark.parametrize("b,ok", [("2", True), ("0", False), ("1", False), ("3", False)])
def test_extra_cocycle_at_two(b, ok):
    phi = kappa_cocycle(b, 2, {0: 1, 1: -2})
    assert check_two_cocycle(b, phi, 2).ok == ok
    assert oracles.central_cocycle_ok(b, cocycle_to_sympy(kappa_cocycle(b, 1, {0: 1, 1: -2})), 1) == ok


def test_solver_b0_display():
    rep = solve_central(0, window=2, interior=1, ldeg=4)
    assert rep.structure_ok
    assert all(s == [1] for s in rep.supports["II"].values())
    assert all(s == [1, 2] for s in rep.supports["LI"].values())
    assert all(s == [1, 3] for s in rep.supports["LL"].values())


@pytest.mark.parametrize("b", ["-1", "1"])
def test_solver_matches_families(b):
    rep = solve_central(b, window=2, interior=1, ldeg=4)
    assert rep.family_match and rep.sum_only and rep.structure_ok


def test_solver_reports_extra_class_at_two():
    rep = solve_central(2, window=2, interior=1, ldeg=4)
    assert not rep.sum_only and not rep.family_match
    assert all(s == [0, 1] for s in rep.supports["LI"].values())
    js = rep.to_json()
    assert js["structure_ok"] is False and js["expected_supports"]["LI"] == [1]
