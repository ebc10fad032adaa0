"""Acceptance gate: one test and one printed PASS/FAIL line per criterion.

Run directly (``python3 tests/test_acceptance.py``) or through pytest; the
lines are also echoed in pytest's terminal summary.  All comparisons are
exact; each criterion also has a wall-clock budget.
"""

from __future__ import annotations

import random
import sys
import time

import pytest

from loopw.central import FAMILY_NAMES, CocycleFamily, check_two_cocycle, family_to_cocycle, solve_central
from loopw.core import CLW, Element, Gen, L, TableAlgebra, check_all, check_skew, clw_bracket
from loopw.derivations import SeqA, d_family, is_derivation, is_inner_on, solve_derivations
from loopw.exactalg import D, LAM, Poly, combine, rat
from loopw.extensions import (
    ExtCocycleCM,
    ExtCocycleMC,
    ExtParams,
    check_ext_cm,
    check_ext_cm_direct,
    check_ext_mc,
    check_ext_mc_direct,
    cocycle_from_vector_cm,
    cocycle_from_vector_mc,
    known_discrepancy_mc,
    solve_ext_cm,
    solve_ext_mc,
)
from loopw.formal import LoopParams, Mode, check_mode_commutation, fourier_lambda_bracket, i_dist, l_dist, verify_closure
from loopw.modules import (
    ModuleParams,
    Rank1Action,
    check_module,
    check_rank1_direct,
    search_degree_one_submodules,
    solve_rank1,
    standard_action,
)

RESULTS: list[str] = []


def record(n: int, ok: bool, elapsed: float, budget: float, detail: str) -> bool:
    within = elapsed < budget
    passed = ok and within
    line = f"criterion {n}: {'PASS' if passed else 'FAIL'} ({elapsed:.2f}s / {budget:.0f}s) {detail}"
    if ok and not within:
        line += " [over time budget]"
    RESULTS.append(line)
    print(line)
    return passed


# ---------------------------------------------------------------------------


def criterion_1():
    t = time.perf_counter()
    bad = []
    for b in ("-1", "0", "1/2", "1", "2", "5/7"):
        reps = check_all(CLW(b), 4)
        bad += [f"b={b}:{k}" for k, r in reps.items() if not r.ok or r.skipped]
    mutated = TableAlgebra.from_algebra(CLW(0), 1).with_entry(L(0), L(0), Element.gen(L(0), D + 3 * LAM))
    mutation_caught = not check_skew(mutated, 1).ok
    ok = not bad and mutation_caught
    return record(1, ok, time.perf_counter() - t, 5, f"failures={bad} mutation_caught={mutation_caught}")


def criterion_2():
    t = time.perf_counter()
    problems = []
    for a, b in ((2, 1), (0, 0), (-1, 1)):
        p = LoopParams(a, b)
        for shift in (-1, 0, 1, 2):
            x = a - b + shift
            ok = verify_closure(p, x, 3, fail_fast=True).ok
            if ok != (shift == 1):
                problems.append(f"closure a={a} b={b} x={x} -> {ok}")
        x = p.closing_weight
        for fa in "LI":
            for fb in "LI":
                for i in range(-3, 4):
                    for j in range(-3, 4):
                        da = l_dist(i) if fa == "L" else i_dist(i, x)
                        db = l_dist(j) if fb == "L" else i_dist(j, x)
                        if fourier_lambda_bracket(p, da, db) != clw_bracket(b, Gen(fa, i), Gen(fb, j)):
                            problems.append(f"fourier a={a} b={b} {fa}{i},{fb}{j}")
        checked = 0
        for fa in "LI":
            wa = 2 if fa == "L" else x
            for m in (0, 1, 2):
                alpha = int(m - wa + 1)
                for fb in "LI":
                    for beta in range(-4, 5):
                        for i, j in ((0, 0), (1, -2)):
                            r = check_mode_commutation(p, Mode(fa, alpha, i), Mode(fb, beta, j))
                            checked += r.checked
                            if not r.ok:
                                problems.append(f"modes a={a} b={b} {fa}[{alpha}] {fb}[{beta}]")
        if not checked:
            problems.append("no mode commutation checked")
    return record(2, not problems, time.perf_counter() - t, 10, f"problems={problems[:5]}")


def criterion_3():
    t = time.perf_counter()
    got = {}
    for b in ("0", "1", "2", "-1", "5/7"):
        for c in (-1, 0, 1):
            rep = solve_derivations(b, c, window=4, interior=2, pdeg=3, ldeg=3)
            got[(b, c)] = rep.quotient_dim
    wrong = {k: v for k, v in got.items() if v != (1 if k[0] == "0" else 0)}
    fam_ok = True
    for seq in ({0: 1}, {1: 2}, {0: 1, 2: -1}, {-1: "3/4"}):
        s = SeqA.of(seq)
        for c in {k for k in seq}:
            single = d_family(SeqA.of({c: seq[c]}), 3)
            fam_ok &= not is_inner_on(single, 0, c, 2)
        fam_ok &= is_derivation(CLW(0), d_family(s, 4), 3).ok
    ok = not wrong and fam_ok
    return record(3, ok, time.perf_counter() - t, 20, f"quotient_dims={ {f'{k[0]},{k[1]}': v for k, v in got.items()} } non_inner_family={fam_ok}")


def criterion_4():
    t = time.perf_counter()
    problems = []
    samples = [
        (0, ModuleParams("1/2", 3, 2, 0)),
        (0, ModuleParams(1, "-1/3", "1/2", 5)),
        (1, ModuleParams("2/3", 1, -1, 0)),
        (2, ModuleParams(0, 4, 3, 0)),
        (-1, ModuleParams(-2, "5/7", "2/3", 0)),
        ("1/2", ModuleParams(3, 0, -2, 0)),
    ]
    for b, prm in samples:
        act = standard_action(b, prm, 3)
        if not check_module(CLW(b), act.to_module(), 3).ok or not check_rank1_direct(b, act).ok:
            problems.append(f"standard b={b} {prm}")
    for b in ("0", "1", "-1", "2", "1/2"):
        for sol in solve_rank1(b, 2, ["1/3", 2], ["2/5", -1], [2, "-1/3"]):
            want = 1 if rat(b) == 0 else 0
            if sol.g_space.dimension != want or not sol.g_is_geometric:
                problems.append(f"g b={b} Δ={sol.delta} dim={sol.g_space.dimension}")
    sub_cases = [
        (0, ModuleParams(0, 5, 2, 0), True),
        (0, ModuleParams(0, 5, 2, 1), False),
        (0, ModuleParams(1, 5, 2, 0), False),
        (1, ModuleParams(0, "-3/2", 3, 0), True),
        (2, ModuleParams("1/2", 1, 1, 0), False),
        (-1, ModuleParams(0, 0, "1/3", 0), True),
        (-1, ModuleParams(2, 7, 2, 0), False),
    ]
    for b, prm, nonempty in sub_cases:
        roots = search_degree_one_submodules(b, prm, 3)
        want = {prm.alpha} if nonempty else set()
        if roots != want:
            problems.append(f"submodules b={b} {prm} -> {roots}")
    return record(4, not problems, time.perf_counter() - t, 5, f"problems={problems}")


def criterion_5():
    t = time.perf_counter()
    problems = []
    expected_li = {"1": [0, 1], "0": [1, 2], "-1": [1, 3]}
    for b in ("-1", "0", "1/2", "1", "2", "3"):
        rep = solve_central(b, window=3, interior=1, ldeg=5)
        if rep.interior_dims["LL"] != 6:
            problems.append(f"b={b} LL dim {rep.interior_dims['LL']}")
        li_want = expected_li.get(b, [1])
        ii_want = [0] if b == "1/2" else [1] if b == "0" else []
        for m in (-1, 0, 1):
            if rep.supports["LL"][m] != [1, 3]:
                problems.append(f"b={b} m={m} LL support {rep.supports['LL'][m]}")
            if rep.supports["LI"][m] != li_want:
                problems.append(f"b={b} m={m} LI support {rep.supports['LI'][m]} want {li_want}")
            if rep.supports["II"][m] != ii_want:
                problems.append(f"b={b} m={m} II support {rep.supports['II'][m]} want {ii_want}")
        for name in FAMILY_NAMES:
            fam = CocycleFamily({name: {-1: 2, 0: "1/3", 1: -1}})
            if not check_two_cocycle(b, family_to_cocycle(b, fam, 2), 2).ok:
                problems.append(f"b={b} family {name} not a cocycle")
    return record(5, not problems, time.perf_counter() - t, 30, f"problems={problems}")


MC_CASES = [
    ((0, 1, 0, 0, 1, 0), 2),
    ((0, -1, 0, 0, 1, 0), 1),
    ((0, 2, 0, 0, 1, 0), 1),
    ((0, -1, "1/2", "-1/2", 2, 0), 1),
    ((0, 1, 1, 2, 1, 0), 0),
    ((2, 2, 1, 0, 1, 0), 0),
    ((0, 1, 0, 0, 1, 1), 0),
    ((0, 2, 0, 0, 1, "1/2"), 0),
    ((2, 2, 0, 0, 1, 0), 2),
    ((1, 1, 0, 0, 1, 0), 2),
    ((-1, -1, 0, 0, 1, 0), 2),
    ((3, 3, 0, 0, 1, 0), 1),
    ((2, 2, 3, -3, "-1/2", 0), 2),
]
MC_KNOWN = [(3, 1, 0, 0, 1, 0), (3, -1, 0, 0, 1, 0), (1, 2, 0, 0, 1, 0), (-1, 1, 0, 0, 1, 0), (2, -1, 0, 0, 2, 0)]


def criterion_6():
    t = time.perf_counter()
    problems = []
    for args, want in MC_CASES:
        rep = solve_ext_mc(ExtParams.of(*args), window=4, interior=2, ldeg=4)
        if rep.dim_ext != want or rep.unexplained:
            problems.append(f"{args}: dim_ext={rep.dim_ext} want {want}")
    for args in MC_KNOWN:
        p = ExtParams.of(*args)
        rep = solve_ext_mc(p, window=4, interior=2, ldeg=4)
        if not known_discrepancy_mc(p) or not rep.discrepancy_notes or rep.unexplained:
            problems.append(f"{args}: no discrepancy note")
    return record(6, not problems, time.perf_counter() - t, 30, f"problems={problems}")


CM_CASES = [
    ((1, 1, 0, 0, 1, 0), 1),
    ((0, 1, 0, 0, 1, 0), 1),
    ((2, 1, "1/3", "-1/3", 2, 0), 1),
    ((0, 1, 0, 0, 1, 1), 0),
    ((0, 1, 0, 0, 2, "-1/2"), 0),
    ((1, 2, 0, 0, 1, 0), 0),
    ((1, 7, 0, 0, 1, 0), 0),
    ((0, "1/2", 0, 0, 1, 0), 0),
    ((1, 1, 1, 0, 1, 0), 0),
    ((0, 1, 2, 1, 1, 0), 0),
]


def criterion_7():
    t = time.perf_counter()
    problems = []
    for args, want in CM_CASES:
        rep = solve_ext_cm(ExtParams.of(*args), window=3, interior=1, pdeg=2, ldeg=2)
        if rep.dim_ext != want or not rep.l_vanishes:
            problems.append(f"{args}: dim_ext={rep.dim_ext} want {want} l_vanishes={rep.l_vanishes}")
    return record(7, not problems, time.perf_counter() - t, 20, f"problems={problems}")


def _rand_rat(rng: random.Random):
    return rat(f"{rng.randint(-4, 4)}/{rng.randint(1, 3)}")


def _rand_poly(rng: random.Random, dvar: bool, deg: int = 2) -> Poly:
    out = Poly()
    for _ in range(rng.randint(0, 3)):
        out = out + Poly.monomial(rng.randint(0, deg) if dvar else 0, rng.randint(0, deg), 0, _rand_rat(rng))
    return out


def criterion_8(n: int = 50):
    t = time.perf_counter()
    rng = random.Random(20240611)
    disagree = []
    verdicts = {"mc": [0, 0], "cm": [0, 0], "rank1": [0, 0]}
    window = 2
    for k in range(n):
        b = rng.choice([0, 0, 1, -1, 2, "1/2"])
        delta = rng.choice([-1, 0, 1, 2, "1/2"])
        alpha = rng.choice([0, 1, "-1/2"])
        beta = rng.choice([0, -alpha if not isinstance(alpha, str) else "1/2", 1])
        c = rng.choice([1, 2, "-1/2"])
        d = rng.choice([0, 0, 1])
        p = ExtParams.of(b, delta, alpha, beta, c, d)
        idx = range(-window, window + 1)
        if k % 2 == 0:
            space = solve_ext_mc(p, window, 1, 3).cocycles
            vec = combine([_rand_rat(rng) for _ in space.basis], space.basis)
            cx = cocycle_from_vector_mc(vec, window)
        else:
            cx = ExtCocycleMC({i: _rand_poly(rng, False) for i in idx}, {i: _rand_poly(rng, False) for i in idx})
        g, dr = check_ext_mc(p, cx, window).ok, check_ext_mc_direct(p, cx, window).ok
        verdicts["mc"][g] += 1
        if g != dr:
            disagree.append(("mc", k))
        if k % 2 == 0:
            space = solve_ext_cm(p, window, 1, 1, 2).cocycles
            vec = combine([_rand_rat(rng) for _ in space.basis], space.basis)
            cy = cocycle_from_vector_cm(vec, window)
        else:
            cy = ExtCocycleCM(_rand_poly(rng, True).subs(l=Poly()), {i: _rand_poly(rng, True) for i in idx}, {i: _rand_poly(rng, True) for i in idx})
        g, dr = check_ext_cm(p, cy, window).ok, check_ext_cm_direct(p, cy, window).ok
        verdicts["cm"][g] += 1
        if g != dr:
            disagree.append(("cm", k))
        prm = p.module
        if k % 2 == 0:
            act = standard_action(b, prm, window)
        else:
            act = Rank1Action({i: _rand_poly(rng, True, 1) for i in idx}, {i: _rand_poly(rng, True, 1) for i in idx})
        g, dr = check_module(CLW(b), act.to_module(), window).ok, check_rank1_direct(b, act).ok
        verdicts["rank1"][g] += 1
        if g != dr:
            disagree.append(("rank1", k))
    both_kinds = all(v[0] and v[1] for v in verdicts.values())
    ok = not disagree and both_kinds
    return record(8, ok, time.perf_counter() - t, 10, f"disagreements={disagree} fail/pass counts={verdicts}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_criterion(crit):
    assert crit()


if __name__ == "__main__":
    results = [crit() for crit in CRITERIA]
    sys.exit(0 if all(results) else 1)
