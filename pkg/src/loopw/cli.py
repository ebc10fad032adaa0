"""Command-line front end.  Every subcommand writes one JSON report.

Exit codes: 0 pass, 1 axiom failure or theorem discrepancy, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import CLW, I, L, TableAlgebra, check_all, clw_bracket
from .exactalg import rat, rat_str

SUBCOMMANDS = ("verify-algebra", "verify-distribution", "derivations", "rank1", "central", "ext")


class UsageError(Exception):
    pass


def _rational(text: str):
    try:
        return rat(text)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from e


def _nonneg(text: str) -> int:
    try:
        n = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from e
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="loopw", description="exact checks and solvers for the loop W(a,b) conformal algebra")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, window, interior=None):
        p.add_argument("--window", type=_nonneg, default=window)
        if interior is not None:
            p.add_argument("--interior", type=_nonneg, default=interior)
        p.add_argument("--out", type=Path)

    p = sub.add_parser("verify-algebra")
    p.add_argument("--b", type=_rational, default=rat(0))
    p.add_argument("--input", type=Path, help="bracket table file (overrides --b)")
    common(p, 4)

    p = sub.add_parser("verify-distribution")
    p.add_argument("--a", type=_rational, required=True)
    p.add_argument("--b", type=_rational, required=True)
    p.add_argument("--x", type=_rational)
    p.add_argument("--modes", type=_nonneg, default=6)
    common(p, 3)

    p = sub.add_parser("derivations")
    p.add_argument("--b", type=_rational, required=True)
    p.add_argument("--degree", type=int, default=0)
    p.add_argument("--pdeg", type=_nonneg, default=3)
    p.add_argument("--ldeg", type=_nonneg, default=3)
    common(p, 4, 2)

    p = sub.add_parser("rank1")
    p.add_argument("--b", type=_rational, required=True)
    p.add_argument("--delta", type=_rational, required=True)
    p.add_argument("--alpha", type=_rational, required=True)
    p.add_argument("--c", type=_rational, required=True)
    p.add_argument("--d", type=_rational, default=rat(0))
    p.add_argument("--input", type=Path, help="module action file to check instead of the standard one")
    common(p, 3)

    p = sub.add_parser("central")
    p.add_argument("--b", type=_rational, required=True)
    p.add_argument("--ldeg", type=_nonneg, default=5)
    p.add_argument("--input", type=Path, help="cocycle family file to verify")
    common(p, 3, 1)

    p = sub.add_parser("ext")
    p.add_argument("--dir", choices=("mc", "cm"), required=True)
    p.add_argument("--b", type=_rational, required=True)
    p.add_argument("--delta", type=_rational, required=True)
    p.add_argument("--alpha", type=_rational, required=True)
    p.add_argument("--beta", type=_rational, required=True)
    p.add_argument("--c", type=_rational, default=rat(1))
    p.add_argument("--d", type=_rational, default=rat(0))
    p.add_argument("--pdeg", type=_nonneg, default=2)
    p.add_argument("--ldeg", type=_nonneg)
    common(p, 4, 2)
    return ap


def _config(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("out", "command") or v is None:
            continue
        out[k] = str(v) if isinstance(v, Path) else (rat_str(v) if not isinstance(v, (int, str)) else v)
    return out


# ---------------------------------------------------------------------------
# subcommands; each returns (verdicts, extra report fields, failed?)


def _cmd_verify_algebra(args):
    if args.input:
        alg = TableAlgebra.loads(args.input.read_text())
    else:
        alg = CLW(args.b)
    reps = check_all(alg, args.window)
    verdicts = {k: r.to_json() for k, r in reps.items()}
    return verdicts, {}, not all(r.ok for r in reps.values())


def _cmd_verify_distribution(args):
    from .formal import LoopParams, Mode, check_mode_commutation, fourier_lambda_bracket, i_dist, l_dist, verify_closure

    p = LoopParams(args.a, args.b)
    x = p.closing_weight if args.x is None else args.x
    closure = verify_closure(p, x, args.window, modes=args.modes)
    verdicts = {"closure": closure.to_json()}
    extra = {"closing_weight": rat_str(p.closing_weight), "x": rat_str(x)}
    failed = not closure.ok
    if closure.ok:
        mism = []
        idx = range(-args.window, args.window + 1)
        for fa, mk in (("L", L), ("I", I)):
            for fb, mk2 in (("L", L), ("I", I)):
                for i in idx:
                    for j in idx:
                        da = l_dist(i) if fa == "L" else i_dist(i, x)
                        db = l_dist(j) if fb == "L" else i_dist(j, x)
                        if fourier_lambda_bracket(p, da, db, x=x) != clw_bracket(p.b, mk(i), mk2(j)):
                            mism.append(f"{fa}{i},{fb}{j}")
        verdicts["fourier"] = {"status": "fail" if mism else "pass", "mismatches": mism}
        failed |= bool(mism)
        mc_fail, checked = [], 0
        for fa in ("L", "I"):
            for fb in ("L", "I"):
                wa = 2 if fa == "L" else x
                for m in (0, 1, 2):
                    alpha = m - wa + 1
                    if rat(alpha).denominator != 1:
                        continue
                    for beta in range(-2, 3):
                        for i, j in ((0, 0), (1, -1), (2, 1)):
                            r = check_mode_commutation(p, Mode(fa, int(alpha), i), Mode(fb, beta, j), xw=x)
                            checked += r.checked
                            mc_fail += [str(v.inputs) for v in r.violations]
        verdicts["mode_commutation"] = {"status": "fail" if mc_fail else "pass", "checked": checked, "failures": mc_fail}
        failed |= bool(mc_fail)
    return verdicts, extra, failed


def _cmd_derivations(args):
    from .derivations import contains_inner, solve_derivations

    rep = solve_derivations(args.b, args.degree, args.window, args.interior, args.pdeg, args.ldeg)
    expected = int(rep.b == 0)
    inner_ok = contains_inner(rep)
    notes = []
    if rep.quotient_dim != expected:
        notes.append(f"quotient dimension {rep.quotient_dim} differs from the classification ({expected})")
    if not inner_ok:
        notes.append("solution space does not contain the bounded inner derivations")
    extra = dict(rep.to_json(), theorem_quotient_dim=expected, discrepancy_notes=notes)
    return {"inner_contained": inner_ok}, extra, bool(notes)


def _cmd_rank1(args):
    from .modules import (
        ModuleAction,
        ModuleParams,
        check_module,
        check_rank1_direct,
        ii_kernel,
        search_degree_one_submodules,
        solve_g,
        standard_action,
    )

    prm = ModuleParams(args.delta, args.alpha, args.c, args.d)
    alg = CLW(args.b)
    if args.input:
        action = ModuleAction.loads(args.input.read_text())
        rep = check_module(alg, action, args.window)
        return {"module": rep.to_json()}, {}, not rep.ok
    act = standard_action(args.b, prm, args.window)
    generic = check_module(alg, act.to_module(), args.window)
    direct = check_rank1_direct(args.b, act)
    linear = solve_g(args.b, prm, args.window)
    g_space = ii_kernel(linear, args.window)
    roots = search_degree_one_submodules(args.b, prm, args.window)
    b = rat(args.b)
    expect_sub = prm.delta == 0 and (b != 0 or prm.d == 0)
    notes = []
    if g_space.dimension != int(b == 0):
        notes.append(f"g-space dimension {g_space.dimension} differs from the classification ({int(b == 0)})")
    found = roots is not None and bool(roots)
    if found != expect_sub:
        notes.append("degree-one submodule search disagrees with the irreducibility criterion")
    verdicts = {"module_generic": generic.to_json(), "module_direct": direct.to_json()}
    extra = {
        "params": prm.to_json(),
        "g_linear_dimension": linear.dimension,
        "g_dimension": g_space.dimension,
        "g_basis": [{k: rat_str(v) for k, v in sorted(vec.items())} for vec in g_space.basis],
        "submodule_roots": None if roots is None else sorted(rat_str(r) for r in roots),
        "discrepancy_notes": notes,
    }
    failed = not generic.ok or not direct.ok or generic.ok != direct.ok or bool(notes)
    return verdicts, extra, failed


def _cmd_central(args):
    from .central import CocycleFamily, check_two_cocycle, family_to_cocycle, solve_central

    verdicts = {}
    failed = False
    if args.input:
        fam = CocycleFamily.loads(args.input.read_text())
        r = check_two_cocycle(args.b, family_to_cocycle(args.b, fam, args.window), args.window)
        verdicts["family"] = r.to_json()
        failed |= not r.ok
    rep = solve_central(args.b, args.window, args.interior, args.ldeg)
    verdicts["structure"] = "pass" if rep.structure_ok else "fail"
    failed |= not rep.structure_ok
    return verdicts, rep.to_json(), failed


def _cmd_ext(args):
    from .extensions import ExtParams, solve_ext_cm, solve_ext_mc

    p = ExtParams.of(args.b, args.delta, args.alpha, args.beta, args.c, args.d)
    if args.dir == "mc":
        rep = solve_ext_mc(p, args.window, args.interior, 4 if args.ldeg is None else args.ldeg)
    else:
        rep = solve_ext_cm(p, args.window, args.interior, args.pdeg, 2 if args.ldeg is None else args.ldeg)
    return {"dimension": "fail" if rep.unexplained else "pass"}, rep.to_json(), rep.unexplained


HANDLERS = {
    "verify-algebra": _cmd_verify_algebra,
    "verify-distribution": _cmd_verify_distribution,
    "derivations": _cmd_derivations,
    "rank1": _cmd_rank1,
    "central": _cmd_central,
    "ext": _cmd_ext,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    interior = getattr(args, "interior", None)
    if interior is not None and interior > args.window:
        print(f"loopw: error: --interior {interior} exceeds --window {args.window}", file=sys.stderr)
        return 2
    try:
        verdicts, extra, failed = HANDLERS[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as e:
        print(f"loopw: error: {e}", file=sys.stderr)
        return 2
    code = 1 if failed else 0
    report = {
        "command": args.command,
        "config": _config(args),
        "verdicts": verdicts,
        "status": "fail" if failed else "pass",
        "exit_code": code,
        **extra,
    }
    text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
