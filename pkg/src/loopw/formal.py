"""Mode algebra LW(a,b), formal distributions and j-products by residues.

A distribution ``F(z) = Σ_α F_α z^{-α-Δ}`` is stored by family, loop index
and weight Δ (2 for L, x for I).  The j-product

    a_{(j)} b (w) = Res_z (z - w)^j [a(z), b(w)]

is computed mode by mode: each binomial term z^k of (z-w)^j selects the
single mode α = k - Δ_a + 1 of a(z), so nothing is ever truncated.  The
delta distribution never appears.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Iterable

from gmpy2 import mpq

from .core import AxiomReport, Element, Gen, Violation
from .exactalg import D, LAM, ZERO, Rat, rat, solve_affine

ModeCombination = dict  # Mode -> Rat


@dataclass(frozen=True, order=True)
class Mode:
    family: str
    alpha: int
    loop: int

    def __str__(self) -> str:
        return f"{self.family}[{self.alpha},{self.loop}]"


@dataclass(frozen=True)
class LoopParams:
    a: Rat
    b: Rat

    def __post_init__(self):
        object.__setattr__(self, "a", rat(self.a))
        object.__setattr__(self, "b", rat(self.b))

    @property
    def closing_weight(self) -> Rat:
        """The I-weight for which the distributions close under ∂."""
        return self.a - self.b + 1


@dataclass(frozen=True)
class Distribution:
    family: str
    loop: int
    weight: Rat

    def __post_init__(self):
        object.__setattr__(self, "weight", rat(self.weight))

    def __str__(self) -> str:
        return f"{self.family}_{self.loop}(z)"


def l_dist(i: int) -> Distribution:
    return Distribution("L", i, 2)


def i_dist(j: int, x) -> Distribution:
    return Distribution("I", j, x)


class ModeSelectionError(ValueError):
    """The residue asked for a mode with non-integer index."""


class NotInSpan(ValueError):
    def __init__(self, witness: int, message: str = ""):
        super().__init__(message or f"series is not a ℂ[∂]-combination (first failing mode {witness})")
        self.witness = witness


def _add_into(out: dict, key, c) -> None:
    s = out.get(key, 0) + c
    if s:
        out[key] = s
    else:
        out.pop(key, None)


def loop_bracket(p: LoopParams, x: Mode, y: Mode) -> ModeCombination:
    fx, fy = x.family, y.family
    loop = x.loop + y.loop
    alpha = x.alpha + y.alpha
    if fx == "L" and fy == "L":
        c = mpq(x.alpha - y.alpha)
        fam = "L"
    elif fx == "L" and fy == "I":
        c = -(p.a + p.b * x.alpha + y.alpha)
        fam = "I"
    elif fx == "I" and fy == "L":
        c = p.a + p.b * y.alpha + x.alpha
        fam = "I"
    else:
        return {}
    return {Mode(fam, alpha, loop): c} if c else {}


def bracket_combinations(p: LoopParams, u: ModeCombination, v: ModeCombination) -> ModeCombination:
    out: dict = {}
    for x, cx in u.items():
        for y, cy in v.items():
            for z, cz in loop_bracket(p, x, y).items():
                _add_into(out, z, cx * cy * cz)
    return out


def _as_int(q: Rat, what: str) -> int:
    q = rat(q)
    if q.denominator != 1:
        raise ModeSelectionError(f"{what} = {q} is not an integer")
    return int(q)


@dataclass
class ModeSeries:
    """Coefficients u_m of w^{-m-Δ} for m in a window, Δ the reference weight."""

    family: str
    loop: int
    weight: Rat
    coeffs: dict[int, dict] = field(default_factory=dict)

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs.values())

    def window(self) -> list[int]:
        return sorted(self.coeffs)


def result_family(a: Distribution, b: Distribution) -> str:
    return "I" if "I" in (a.family, b.family) else "L"


def j_product(
    p: LoopParams, x_weight, a: Distribution, b: Distribution, j: int, out_window: Iterable[int]
) -> ModeSeries:
    if j < 0:
        raise ValueError("j-products are defined for j >= 0")
    fam = result_family(a, b)
    ref = mpq(2) if fam == "L" else rat(x_weight)
    series = ModeSeries(fam, a.loop + b.loop, ref)
    for m in out_window:
        u: dict = {}
        for k in range(j + 1):
            # z^k (-w)^{j-k}: residue picks α with k - α - Δ_a = -1
            alpha = _as_int(k - a.weight + 1, f"mode of {a} selected by z^{k}")
            # w-power j-k-β-Δ_b must equal -m-Δ_ref
            beta = _as_int(m + ref + j - k - b.weight, f"mode of {b} for output m={m}")
            sign = -1 if (j - k) % 2 else 1
            term = loop_bracket(p, Mode(a.family, alpha, a.loop), Mode(b.family, beta, b.loop))
            for z, c in term.items():
                _add_into(u, z, sign * comb(j, k) * c)
        series.coeffs[m] = u
    return series


def derivative_factor(m: int, weight: Rat, k: int) -> Rat:
    """Coefficient of F_{m-k} in the w^{-m-Δ} coefficient of ∂^k F(w)."""
    c = mpq(1)
    for t in range(k):
        c *= -(m - k) - weight - t
    return c


def recognize(series: ModeSeries, basis_weight, window: Iterable[int] | None = None, max_dpow: int = 2) -> Element:
    """Write the series as p(∂) F_{loop}(w) with deg p <= max_dpow, or raise NotInSpan."""
    ms = sorted(window) if window is not None else series.window()
    if len(ms) < max_dpow + 3:
        raise ValueError(f"recognition needs at least {max_dpow + 3} modes, got {len(ms)}")
    weight = rat(basis_weight)
    labels = [f"c{k}" for k in range(max_dpow + 1)]

    def rows_for(m):
        target = series.coeffs[m]
        rows: dict[Mode, dict] = {}
        for k in range(max_dpow + 1):
            mode = Mode(series.family, m - k, series.loop)
            f = derivative_factor(m, weight, k)
            if f:
                rows.setdefault(mode, {})[labels[k]] = f
        for mode in set(rows) | set(target):
            yield rows.get(mode, {}), target.get(mode, 0)

    all_rows = [r for m in ms for r in rows_for(m)]
    sol = solve_affine(labels, all_rows)
    if sol is None:
        acc = []
        for m in ms:
            acc.extend(rows_for(m))
            if solve_affine(labels, acc) is None:
                raise NotInSpan(m)
        raise NotInSpan(ms[-1])
    poly = ZERO
    for k in range(max_dpow + 1):
        poly = poly + sol[labels[k]] * D**k
    return Element.gen(Gen(series.family, series.loop), poly)


def locality_order(
    p: LoopParams, x_weight, a: Distribution, b: Distribution, j_max: int, probe_window: Iterable[int]
):
    """Smallest N <= j_max with every j-product, N <= j <= j_max, zero on the probe window."""
    probe = list(probe_window)
    n = j_max + 1
    for j in range(j_max, -1, -1):
        if j_product(p, x_weight, a, b, j, probe).is_zero():
            n = j
        else:
            break
    return n if n <= j_max else "exceeds j_max"


def _weight_for(family: str, x) -> Rat:
    return mpq(2) if family == "L" else rat(x)


def verify_closure(
    p: LoopParams, x, window: int | Iterable[int], modes: int = 6, j_max: int = 3, slack: int = 2, fail_fast: bool = False
) -> AxiomReport:
    """Every j-product of pairs from {L_i(z), I_j(z)} is a ℂ[∂]-combination of the family.

    With ``fail_fast`` the sweep stops at the first violation.
    """
    loops = range(-window, window + 1) if isinstance(window, int) else list(window)
    out_window = list(range(-modes, modes + 1))
    rec_window = out_window[slack: len(out_window) - slack] if slack else out_window
    rep = AxiomReport()
    for fa in ("L", "I"):
        for fb in ("L", "I"):
            for i in loops:
                for k in loops:
                    a = Distribution(fa, i, _weight_for(fa, x))
                    b = Distribution(fb, k, _weight_for(fb, x))
                    for j in range(j_max + 1):
                        rep.checked += 1
                        try:
                            s = j_product(p, x, a, b, j, out_window)
                            recognize(s, s.weight, rec_window)
                        except ModeSelectionError as e:
                            rep.violations.append(Violation("closure", (a, b, j), f"mode selection: {e}"))
                        except NotInSpan as e:
                            rep.violations.append(Violation("closure", (a, b, j), f"not in span at mode {e.witness}"))
                    try:
                        local = j_product(p, x, a, b, j_max, out_window).is_zero()
                    except ModeSelectionError:
                        continue
                    if not local:
                        rep.violations.append(Violation("locality", (a, b), f"{j_max}-th product nonzero"))
                    if fail_fast and rep.violations:
                        return rep
    return rep


def fourier_lambda_bracket(
    p: LoopParams, a: Distribution, b: Distribution, window: Iterable[int] | None = None, j_max: int = 4, x=None
) -> Element:
    """Σ_j λ^j/j! (a_{(j)} b), each j-product recognized as p(∂) applied to a generator."""
    x = p.closing_weight if x is None else rat(x)
    win = list(window) if window is not None else list(range(-4, 5))
    order = locality_order(p, x, a, b, j_max, win)
    if order == "exceeds j_max":
        raise NotInSpan(win[0], f"pair ({a}, {b}) is not local up to j = {j_max}")
    out = Element()
    for j in range(order):
        s = j_product(p, x, a, b, j, win)
        if s.is_zero():
            continue
        elem = recognize(s, s.weight, win)
        out = out + elem * (LAM**j * mpq(1, factorial(j)))
    return out


def mode_index(mode: Mode, x) -> Rat:
    """Label n of the mode in the expansion Σ a_(n) z^{-n-1}."""
    return mode.alpha + _weight_for(mode.family, x) - 1


def element_mode(elem: Element, n: int, x) -> ModeCombination:
    """Coefficient of w^{-n-1} in a ℂ[∂]-combination of distributions."""
    out: dict = {}
    for g, poly in elem.items():
        weight = _weight_for(g.family, x)
        for (dpow, lpow, mpow), c in poly.items():
            if lpow or mpow:
                raise ValueError("element coefficients must be polynomials in ∂ only")
            alpha = _as_int(n + 1 - weight - dpow, f"mode of ∂^{dpow}{g}")
            f = derivative_factor(alpha + dpow, weight, dpow)
            _add_into(out, Mode(g.family, alpha, g.index), c * f)
    return out


def check_mode_commutation(p: LoopParams, x: Mode, y: Mode, window: Iterable[int] | None = None, xw=None) -> AxiomReport:
    """[a_(m), b_(n)] = Σ_j binom(m, j) (a_(j) b)_(m+n-j), with j-products recognized first."""
    xw = p.closing_weight if xw is None else rat(xw)
    win = list(window) if window is not None else list(range(-6, 7))
    rep = AxiomReport()
    m = _as_int(mode_index(x, xw), "left mode label")
    n = _as_int(mode_index(y, xw), "right mode label")
    if m < 0:
        rep.skipped += 1
        return rep
    a = Distribution(x.family, x.loop, _weight_for(x.family, xw))
    b = Distribution(y.family, y.loop, _weight_for(y.family, xw))
    lhs = loop_bracket(p, x, y)
    rhs: dict = {}
    for j in range(m + 1):
        s = j_product(p, xw, a, b, j, win)
        if s.is_zero():
            continue
        elem = recognize(s, s.weight, win)
        for mode, c in element_mode(elem, m + n - j, xw).items():
            _add_into(rhs, mode, comb(m, j) * c)
    rep.checked += 1
    diff = dict(lhs)
    for mode, c in rhs.items():
        _add_into(diff, mode, -c)
    if diff:
        rep.violations.append(Violation("mode-commutation", (x, y), {str(k): str(v) for k, v in sorted(diff.items())}))
    return rep


def check_mode_lie(p: LoopParams, modes: list[Mode]) -> AxiomReport:
    """Antisymmetry and Jacobi of the mode bracket on all pairs/triples of the sample."""
    rep = AxiomReport()
    for x in modes:
        for y in modes:
            rep.checked += 1
            s = dict(loop_bracket(p, x, y))
            for z, c in loop_bracket(p, y, x).items():
                _add_into(s, z, c)
            if s:
                rep.violations.append(Violation("mode-skew", (x, y), s))
    for x in modes:
        for y in modes:
            for z in modes:
                rep.checked += 1
                X, Y, Z = {x: mpq(1)}, {y: mpq(1)}, {z: mpq(1)}
                t = bracket_combinations(p, X, bracket_combinations(p, Y, Z))
                for mm, c in bracket_combinations(p, Y, bracket_combinations(p, Z, X)).items():
                    _add_into(t, mm, c)
                for mm, c in bracket_combinations(p, Z, bracket_combinations(p, X, Y)).items():
                    _add_into(t, mm, c)
                if t:
                    rep.violations.append(Violation("mode-jacobi", (x, y, z), t))
    return rep
