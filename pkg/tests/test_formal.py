import pytest
from gmpy2 import mpq

from loopw.core import Element, I, L, clw_bracket
from loopw.exactalg import D
from loopw.formal import (
    LoopParams,
    Mode,
    ModeSelectionError,
    NotInSpan,
    check_mode_commutation,
    check_mode_lie,
    fourier_lambda_bracket,
    i_dist,
    j_product,
    l_dist,
    locality_order,
    loop_bracket,
    recognize,
    verify_closure,
)
import oracles

WIN = list(range(-6, 7))


def test_loop_bracket_examples():
    p = LoopParams(1, 0)
    assert loop_bracket(p, Mode("L", 2, 1), Mode("I", 3, 4)) == {Mode("I", 5, 5): -4}
    assert loop_bracket(p, Mode("L", 1, 0), Mode("L", 1, 0)) == {}
    assert loop_bracket(p, Mode("I", 1, 0), Mode("I", -2, 3)) == {}


def test_mode_algebra_is_lie():
    p = LoopParams("1/2", 3)
    modes = [Mode(f, a, i) for f in "LI" for a in (-1, 0, 2) for i in (0, 1)]
    assert check_mode_lie(p, modes).ok


@pytest.mark.parametrize("a,b", [(2, 1), (0, 0), (-1, 1), (3, -1)])
def test_j_products_match_bruteforce(a, b):
    p = LoopParams(a, b)
    x = int(p.closing_weight)
    pairs = [(l_dist(1), l_dist(-2)), (l_dist(0), i_dist(2, x)), (i_dist(1, x), l_dist(0)), (i_dist(0, x), i_dist(1, x))]
    for da, db in pairs:
        fam = "I" if "I" in (da.family, db.family) else "L"
        ref = 2 if fam == "L" else x
        for j in range(3):
            s = j_product(p, x, da, db, j, range(-2, 3))
            for m in range(-2, 3):
                ours = {(k.family, k.alpha, k.loop): v for k, v in s.coeffs[m].items()}
                theirs = oracles.j_product_bruteforce(
                    a, b, da.family, int(da.weight), da.loop, db.family, int(db.weight), db.loop, j, m, ref
                )
                assert ours == {k: mpq(int(v)) for k, v in theirs.items()}


def test_j_product_examples():
    p = LoopParams(2, 1)
    x = p.closing_weight
    s1 = j_product(p, x, l_dist(1), l_dist(2), 1, WIN)
    assert recognize(s1, 2, WIN) == Element.gen(L(3), 2 * D**0)
    s0 = j_product(p, x, l_dist(1), i_dist(2, x), 0, WIN)
    assert recognize(s0, x, WIN) == Element.gen(I(3), D)
    assert all(j_product(p, x, i_dist(0, x), i_dist(1, x), j, WIN).is_zero() for j in range(4))
    s00 = j_product(p, x, l_dist(0), l_dist(0), 0, WIN)
    assert recognize(s00, 2, WIN) == Element.gen(L(0), D)


def test_recognize_rejects_wrong_weight():
    p = LoopParams(2, 1)
    s = j_product(p, 1, l_dist(0), i_dist(0, 1), 0, WIN)
    with pytest.raises(NotInSpan):
        recognize(s, 1, WIN)
    with pytest.raises(ValueError):
        recognize(s, 1, [0, 1, 2])


def test_non_integer_weight_is_structural_failure():
    p = LoopParams(2, 1)
    with pytest.raises(ModeSelectionError):
        j_product(p, "1/2", i_dist(0, "1/2"), l_dist(0), 0, WIN)
    rep = verify_closure(p, "1/2", 1)
    assert not rep.ok
    assert any("mode selection" in str(v.residual) for v in rep.violations)


@pytest.mark.parametrize("a,b", [(2, 1), (0, 0), (-1, 1)])
def test_closure_dichotomy(a, b):
    p = LoopParams(a, b)
    for shift in (-1, 0, 1, 2):
        assert verify_closure(p, a - b + shift, 2, fail_fast=True).ok == (shift == 1)


def test_locality_orders():
    p = LoopParams(3, 0)
    x = p.closing_weight
    assert locality_order(p, x, l_dist(0), l_dist(1), 4, WIN) == 2
    assert locality_order(p, x, l_dist(0), i_dist(1, x), 4, WIN) == 2
    assert locality_order(p, x, i_dist(0, x), i_dist(1, x), 4, WIN) == 0
    # at b = 1 the (L, I) bracket has no λ term, so only the 0th product survives
    p1 = LoopParams(2, 1)
    assert locality_order(p1, p1.closing_weight, l_dist(0), i_dist(1, 2), 4, WIN) == 1


@pytest.mark.parametrize("a,b", [(2, 1), (0, 0), (-1, 1), ("7/2", "1/2")])
def test_fourier_matches_clw(a, b):
    p = LoopParams(a, b)
    x = p.closing_weight
    for da, gx in ((l_dist(1), L(1)), (i_dist(-1, x), I(-1))):
        for db, gy in ((l_dist(2), L(2)), (i_dist(0, x), I(0))):
            assert fourier_lambda_bracket(p, da, db) == clw_bracket(b, gx, gy)


def test_mode_commutation_examples():
    p = LoopParams(2, 1)
    rep = check_mode_commutation(p, Mode("L", 1, 0), Mode("L", -1, 0))
    assert rep.ok and rep.checked == 1
    assert loop_bracket(p, Mode("L", 1, 0), Mode("L", -1, 0)) == {Mode("L", 0, 0): 2}
    q = LoopParams(1, 0)
    # I-modes have label n = α + x - 1; pick α so the label is >= 0
    assert check_mode_commutation(q, Mode("I", 0, 0), Mode("I", 3, 1)).ok
    rep = check_mode_commutation(q, Mode("L", 0, 1), Mode("I", 0, 2))
    assert rep.ok and rep.checked == 1
    assert loop_bracket(q, Mode("L", 0, 1), Mode("I", 0, 2)) == {Mode("I", 0, 3): -1}


def test_mode_commutation_sweep():
    p = LoopParams(0, 0)
    for fa in "LI":
        wa = 2 if fa == "L" else 1
        for m in (0, 1, 2):
            for fb in "LI":
                for beta in range(-4, 5):
                    assert check_mode_commutation(p, Mode(fa, m - wa + 1, 1), Mode(fb, beta, -1)).ok
