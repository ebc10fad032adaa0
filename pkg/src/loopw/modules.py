"""Conformal modules over graded conformal algebras.

A module is one of four shapes built from a free rank-one part ℂ[∂]v and a
one-dimensional part ℂv_β on which ∂ acts by β.  Elements are pairs
``(free, scalar)``: ``free`` is a polynomial in ∂ (times v) and ``scalar``
a ∂-free coefficient of v_β.  Both may carry λ, μ as parameters.

The λ-action of a generator is stored on the two basis vectors; it extends
to everything else by ``a_λ (p(∂)u) = p(∂+λ) (a_λ u)`` with ∂ acting through
the shape's ∂-rule, which for ``ext_cm`` mixes in the cocycle ρ(∂).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from math import lcm
from typing import Callable, Iterable, Mapping

from gmpy2 import mpq

from .core import AlgebraSpec, AxiomReport, Element, Gen, I, L, Violation, WindowExceeded
from .exactalg import (
    D,
    LAM,
    MU,
    ONE,
    ZERO,
    Coeff,
    LinPoly,
    LinSystem,
    Poly,
    Rat,
    SolutionSpace,
    nullspace,
    rat,
    rat_str,
)

SHAPES = ("rank1", "onedim", "ext_mc", "ext_cm")


@dataclass(frozen=True)
class ModuleParams:
    delta: Rat
    alpha: Rat
    c: Rat
    d: Rat = mpq(0)

    def __post_init__(self):
        for name in ("delta", "alpha", "c", "d"):
            object.__setattr__(self, name, rat(getattr(self, name)))

    def to_json(self) -> dict:
        return {k: rat_str(getattr(self, k)) for k in ("delta", "alpha", "c", "d")}


@dataclass(frozen=True)
class ModuleShape:
    kind: str
    beta: Rat = mpq(0)

    def __post_init__(self):
        if self.kind not in SHAPES:
            raise ValueError(f"unknown module shape {self.kind!r}")
        object.__setattr__(self, "beta", rat(self.beta))

    def basis(self) -> list[str]:
        return {"rank1": ["v"], "onedim": ["v_beta"]}.get(self.kind, ["v", "v_beta"])


@dataclass(frozen=True)
class ModElem:
    free: Coeff = ZERO
    scalar: Coeff = ZERO

    def __add__(self, other: "ModElem") -> "ModElem":
        return ModElem(self.free + other.free, self.scalar + other.scalar)

    def __neg__(self) -> "ModElem":
        return ModElem(-self.free, -self.scalar)

    def __sub__(self, other: "ModElem") -> "ModElem":
        return self + (-other)

    def __mul__(self, c) -> "ModElem":
        return ModElem(self.free * c, self.scalar * c)

    __rmul__ = __mul__

    def subs(self, mapping=None, **images) -> "ModElem":
        return ModElem(self.free.subs(mapping, **images), self.scalar.subs(mapping, **images))

    def __bool__(self) -> bool:
        return bool(self.free) or bool(self.scalar)

    def parts(self) -> list[Coeff]:
        return [self.free, self.scalar]

    def __str__(self) -> str:
        return f"({self.free})v + ({self.scalar})v_β"


BASIS = {"v": ModElem(ONE, ZERO), "v_beta": ModElem(ZERO, ONE)}


def _split_d(p: Coeff) -> dict[int, Coeff]:
    """p = Σ_k p_k ∂^k with each p_k free of ∂."""
    out: dict[int, Coeff] = {}
    if isinstance(p, LinPoly):
        for label, poly in p.parts.items():
            for k, c in _split_d(poly).items():
                term = LinPoly.unknown(label, c)
                out[k] = out[k] + term if k in out else term
        return out
    for (dp, lp, mp), c in p.items():
        term = Poly.monomial(0, lp, mp, c)
        out[dp] = out[dp] + term if dp in out else term
    return out


@dataclass
class ModuleAction:
    """λ-actions of generators on the basis vectors of a module shape.

    ``on_v[g]`` and ``on_vbeta[g]`` are ModElems in the variables ∂, λ;
    missing entries act by zero.  ``rho`` is the ∂-mixing term of ``ext_cm``.
    """

    shape: ModuleShape
    on_v: dict[Gen, ModElem] = field(default_factory=dict)
    on_vbeta: dict[Gen, ModElem] = field(default_factory=dict)
    rho: Coeff = ZERO
    window: list[int] | None = None

    def defined(self, g: Gen) -> bool:
        return self.window is None or g.index in self.window

    # -- ∂ on the module --------------------------------------------------
    def d_apply(self, u: ModElem) -> ModElem:
        kind, beta = self.shape.kind, self.shape.beta
        if kind == "rank1":
            return ModElem(D * u.free, ZERO)
        if kind == "onedim":
            return ModElem(ZERO, u.scalar * beta)
        if kind == "ext_mc":
            return ModElem(D * u.free, u.scalar * beta)
        return ModElem(D * u.free + u.scalar * self.rho, u.scalar * beta)

    def poly_apply(self, p: Coeff, u: ModElem) -> ModElem:
        """p(∂)·u where ∂ acts by the shape's rule and λ, μ are scalars."""
        if not u.scalar and self.shape.kind in ("rank1", "ext_mc", "ext_cm"):
            return ModElem(p * u.free, ZERO)
        out = ModElem()
        power = u
        pieces = _split_d(p)
        top = max(pieces, default=-1)
        for k in range(top + 1):
            if k in pieces:
                out = out + power * pieces[k]
            if k < top:
                power = self.d_apply(power)
        return out

    # -- λ-action -----------------------------------------------------------
    def _basis_action(self, g: Gen, which: str, theta: Poly) -> ModElem:
        if not self.defined(g):
            raise WindowExceeded(g, g)
        table = self.on_v if which == "v" else self.on_vbeta
        val = table.get(g)
        if val is None:
            return ModElem()
        return val if theta is LAM else val.subs(l=theta)

    def act(self, g: Gen, theta: Poly, u: ModElem) -> ModElem:
        out = ModElem()
        if u.free:
            out = out + self.poly_apply(u.free.subs(d=D + theta), self._basis_action(g, "v", theta))
        if u.scalar:
            out = out + self._basis_action(g, "v_beta", theta) * u.scalar
        return out

    def act_elem(self, x: Element, theta: Poly, u: ModElem) -> ModElem:
        out = ModElem()
        for g, q in x.items():
            out = out + self.act(g, theta, u) * q.subs(d=-theta)
        return out

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        acts = []
        for which, table in (("v", self.on_v), ("v_beta", self.on_vbeta)):
            for g, val in sorted(table.items()):
                acts.append(
                    {"generator": g.to_json(), "on": which, "free": val.free.to_records(), "scalar": val.scalar.to_records()}
                )
        return {
            "shape": self.shape.kind,
            "beta": rat_str(self.shape.beta),
            "rho": self.rho.to_records(),
            "window": self.window,
            "actions": acts,
        }

    @classmethod
    def from_json(cls, obj) -> "ModuleAction":
        act = cls(ModuleShape(obj["shape"], obj.get("beta", "0")), rho=Poly.from_records(obj.get("rho", [])))
        act.window = obj.get("window")
        for rec in obj.get("actions", []):
            val = ModElem(Poly.from_records(rec.get("free", [])), Poly.from_records(rec.get("scalar", [])))
            (act.on_v if rec["on"] == "v" else act.on_vbeta)[Gen.from_json(rec["generator"])] = val
        return act

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "ModuleAction":
        return cls.from_json(json.loads(text))


def _window(window) -> list[int]:
    return list(range(-window, window + 1)) if isinstance(window, int) else sorted(window)


def module_residuals(
    alg: AlgebraSpec,
    action: ModuleAction,
    window,
    pair_filter: Callable[[Gen, Gen], bool] | None = None,
    include_compat: bool = True,
):
    """Yield (rule, inputs, residual ModElem) for every module identity on the window."""
    idx = _window(window)
    gens = alg.generators(idx)
    basis = action.shape.basis()
    if include_compat:
        for a in gens:
            for name in basis:
                u = BASIS[name]
                au = action.act(a, LAM, u)
                yield "left-sesqui", (a, name), action.act_elem(Element.gen(a, D), LAM, u) + au * LAM
                yield "right-sesqui", (a, name), action.act(a, LAM, action.d_apply(u)) - action.poly_apply(D + LAM, au)
    inside = set(idx)
    for a in gens:
        for b in gens:
            if pair_filter is not None and not pair_filter(a, b):
                continue
            br = alg.gen_bracket(a, b)
            if any(g.index not in inside for g in br.support()):
                continue
            for name in basis:
                u = BASIS[name]
                lhs = action.act(a, LAM, action.act(b, MU, u)) - action.act(b, MU, action.act(a, LAM, u))
                yield "commutator", (a, b, name), lhs - action.act_elem(br, LAM + MU, u)


def check_module(alg: AlgebraSpec, action: ModuleAction, window) -> AxiomReport:
    rep = AxiomReport()
    for rule, inputs, res in module_residuals(alg, action, window):
        rep.checked += 1
        if res:
            rep.violations.append(Violation(rule, inputs, str(res)))
    return rep


def residual_system(labels: list[str], residuals) -> LinSystem:
    sys = LinSystem(labels)
    for _, _, res in residuals:
        sys.add([p for p in res.parts() if isinstance(p, LinPoly)])
        for p in res.parts():
            if isinstance(p, Poly) and p:
                raise ValueError("residual has a nonzero part independent of the unknowns")
    return sys


# ---------------------------------------------------------------------------
# rank-one modules


@dataclass
class Rank1Action:
    f: dict[int, Coeff]
    g: dict[int, Coeff]

    @property
    def window(self) -> list[int]:
        return sorted(set(self.f) | set(self.g))

    def to_module(self) -> ModuleAction:
        act = ModuleAction(ModuleShape("rank1"), window=self.window)
        for i, p in self.f.items():
            act.on_v[L(i)] = ModElem(p, ZERO)
        for i, p in self.g.items():
            act.on_v[I(i)] = ModElem(p, ZERO)
        return act


def _power(c: Rat, i: int) -> Rat:
    return c**i if i >= 0 else 1 / c ** (-i)


def standard_action(b, prm: ModuleParams, window=3) -> Rank1Action:
    """M(Δ, α, c, d): L_i ↦ c^i(∂+Δλ+α), I_i ↦ δ_{b,0} d c^i."""
    b = rat(b)
    idx = _window(window)
    f = {i: (D + prm.delta * LAM + prm.alpha) * _power(prm.c, i) for i in idx}
    g = {i: Poly.const(prm.d * _power(prm.c, i) if b == 0 else 0) for i in idx}
    return Rank1Action(f, g)


def standard_module(b, prm: ModuleParams, window=3) -> ModuleAction:
    return standard_action(b, prm, window).to_module()


def rank1_direct_residuals(b, act: Rank1Action):
    """The three functional equations for (f_i, g_i), on pairs with i, j, i+j in the window."""
    b = rat(b)
    idx = act.window
    inside = set(idx)
    f = lambda i: act.f.get(i, ZERO)  # noqa: E731
    g = lambda i: act.g.get(i, ZERO)  # noqa: E731
    for i in idx:
        for j in idx:
            if i + j not in inside:
                continue
            yield "LL", (i, j), (
                f(j).subs(d=D + LAM, l=MU) * f(i)
                - f(i).subs(d=D + MU) * f(j).subs(l=MU)
                - (LAM - MU) * f(i + j).subs(l=LAM + MU)
            )
            yield "LI", (i, j), (
                g(j).subs(d=D + LAM, l=MU) * f(i)
                - f(i).subs(d=D + MU) * g(j).subs(l=MU)
                + (b * LAM + MU) * g(i + j).subs(l=LAM + MU)
            )
            yield "II", (i, j), g(j).subs(d=D + LAM, l=MU) * g(i) - g(i).subs(d=D + MU) * g(j).subs(l=MU)


def check_rank1_direct(b, act: Rank1Action) -> AxiomReport:
    rep = AxiomReport()
    for rule, inputs, res in rank1_direct_residuals(b, act):
        rep.checked += 1
        if res:
            rep.violations.append(Violation(rule, inputs, str(res)))
    return rep


def loop_scalars(window, t1) -> dict[int, Rat]:
    """Values forced on t_i by t_i t_j = t_{i+j} on the window once t_1 is fixed.

    Raises ValueError if the constraints are inconsistent.
    """
    idx = _window(window)
    inside = set(idx)
    t: dict[int, Rat] = {1: rat(t1)}
    changed = True
    while changed:
        changed = False
        for i in idx:
            for j in idx:
                k = i + j
                if k not in inside:
                    continue
                ti, tj, tk = t.get(i), t.get(j), t.get(k)
                if ti is not None and tj is not None:
                    if tk is None:
                        t[k] = ti * tj
                        changed = True
                    elif tk != ti * tj:
                        raise ValueError(f"t_{i} t_{j} != t_{k}")
                elif ti is not None and tk is not None and ti and tj is None:
                    t[j] = tk / ti
                    changed = True
                elif tj is not None and tk is not None and tj and ti is None:
                    t[i] = tk / tj
                    changed = True
    return dict(sorted(t.items()))


def ansatz_quadratic(delta, alpha) -> tuple[Poly, Poly]:
    """For f_i = t_i(∂+Δλ+α) the (L,L) identity reads t_i t_j P - t_{i+j} Q = 0; returns (P, Q)."""
    base = D + rat(delta) * LAM + rat(alpha)
    p = base.subs(d=D + LAM, l=MU) * base - base.subs(d=D + MU) * base.subs(l=MU)
    q = (LAM - MU) * base.subs(l=LAM + MU)
    return p, q


def g_unknowns(window, pdeg: int = 2, ldeg: int = 2) -> tuple[list[str], dict[int, LinPoly]]:
    labels, g = [], {}
    for i in _window(window):
        acc = LinPoly()
        for dp in range(pdeg + 1):
            for lp in range(ldeg + 1):
                lab = f"g[{i}].d{dp}l{lp}"
                labels.append(lab)
                acc = acc + LinPoly.unknown(lab, Poly.monomial(dp, lp))
        g[i] = acc
    return labels, g


def solve_g(b, prm: ModuleParams, window=3, pdeg: int = 2, ldeg: int = 2) -> SolutionSpace:
    """Linear solve for the I-actions g_i given f_i = c^i(∂+Δλ+α).

    Only the (L, I) identities are imposed here (they are linear in g); the
    quadratic (I, I) identity is verified on the resulting basis by the caller.
    """
    from .core import CLW

    labels, g = g_unknowns(window, pdeg, ldeg)
    std = standard_action(0, prm, window)
    act = Rank1Action(std.f, g).to_module()
    res = module_residuals(
        CLW(b), act, window, pair_filter=lambda x, y: {x.family, y.family} == {"L", "I"}, include_compat=False
    )
    return nullspace(residual_system(labels, res))


def _ii_pairing(u: Mapping[int, Poly], w: Mapping[int, Poly], idx: list[int]):
    """Polarized (I, I) identity: R(u, w) + R(w, u), one residual per (i, j)."""
    for i in idx:
        for j in idx:
            yield (
                u[j].subs(d=D + LAM, l=MU) * w[i] - w[i].subs(d=D + MU) * u[j].subs(l=MU)
                + w[j].subs(d=D + LAM, l=MU) * u[i] - u[i].subs(d=D + MU) * w[j].subs(l=MU)
            )


def ii_kernel(space: SolutionSpace, window) -> SolutionSpace:
    """Part of a linear g-space on which the quadratic (I, I) identity vanishes identically.

    The identity is a quadratic form on the coordinates; its polarization is
    bilinear, and the kernel of that pairing is the linear part of the
    solution set (the whole set when the space has dimension <= 1).
    """
    idx = _window(window)
    gs = [{i: _g_from_vector(vec, i) for i in idx} for vec in space.basis]
    ys = [f"y{k}" for k in range(len(gs))]
    sys = LinSystem(ys)
    for l_, wl in enumerate(gs):
        acc: list[LinPoly] = []
        for k, uk in enumerate(gs):
            for n, res in enumerate(_ii_pairing(uk, wl, idx)):
                if len(acc) <= n:
                    acc.append(LinPoly())
                acc[n] = acc[n] + LinPoly.unknown(ys[k], res)
        sys.add(acc)
    ker = nullspace(sys)
    basis = []
    for sol in ker.basis:
        vec: dict[str, Rat] = {}
        for y, c in sol.items():
            for k2, v in space.basis[int(y[1:])].items():
                vec[k2] = vec.get(k2, 0) + c * v
        vec = {k2: v for k2, v in vec.items() if v}
        if vec:
            basis.append(vec)
    return SolutionSpace(list(space.labels), basis)


@dataclass
class Rank1Solution:
    delta: Rat
    alpha: Rat
    c: Rat
    t: dict[int, Rat]
    linear_g_space: SolutionSpace
    g_space: SolutionSpace
    g_is_geometric: bool

    def to_json(self) -> dict:
        return {
            "delta": rat_str(self.delta),
            "alpha": rat_str(self.alpha),
            "c": rat_str(self.c),
            "t": {str(i): rat_str(v) for i, v in self.t.items()},
            "g_linear_dimension": self.linear_g_space.dimension,
            "g_dimension": self.g_space.dimension,
            "g_basis": [{k: rat_str(v) for k, v in sorted(vec.items())} for vec in self.g_space.basis],
            "g_is_geometric": self.g_is_geometric,
        }


def solve_rank1(b, window, deltas: Iterable, alphas: Iterable, cs: Iterable) -> list[Rank1Solution]:
    """Sweep rational grids for (Δ, α, c) with f_i = t_i(∂+Δλ+α) and solve for g.

    For each grid point the (L, L) identity is first reduced symbolically to
    t_i t_j = t_{i+j}; t is then propagated from t_1 = c.
    """
    b = rat(b)
    out = []
    for delta in deltas:
        for alpha in alphas:
            p, q = ansatz_quadratic(delta, alpha)
            if p != q:
                raise AssertionError("the (L,L) identity did not reduce to t_i t_j = t_{i+j}")
            for c in cs:
                c = rat(c)
                t = loop_scalars(window, c)
                if any(t[i] != _power(c, i) for i in t):
                    raise AssertionError("loop scalars are not powers of t_1")
                prm = ModuleParams(delta, alpha, c, 0)
                linear = solve_g(b, prm, window)
                space = ii_kernel(linear, window)
                geometric = True
                for vec in space.basis:
                    gs = {i: _g_from_vector(vec, i) for i in _window(window)}
                    g0 = gs[0]
                    geometric &= g0.degree() == 0 and all(gs[i] == g0 * _power(c, i) for i in gs)
                out.append(Rank1Solution(rat(delta), rat(alpha), c, t, linear, space, geometric))
    return out


def _g_from_vector(vec: Mapping[str, Rat], i: int) -> Poly:
    terms = {}
    prefix = f"g[{i}]."
    for k, v in vec.items():
        if k.startswith(prefix):
            spec = k[len(prefix):]
            dp, lp = spec[1:].split("l")
            terms[(int(dp), int(lp), 0)] = v
    return Poly(terms)


# ---------------------------------------------------------------------------
# degree-one submodules


def _uni_trim(p: list) -> list:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def _uni_mod(a: list, b: list) -> list:
    a = list(a)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for k, c in enumerate(b):
            a[k + shift] -= f * c
        a = _uni_trim(a)
    return a


def _uni_gcd(a: list, b: list) -> list:
    a, b = _uni_trim(a), _uni_trim(b)
    while b:
        a, b = b, _uni_mod(a, b)
    return [c / a[-1] for c in a] if a else a


def _rational_roots(p: list) -> set[Rat]:
    p = _uni_trim(p)
    if len(p) <= 1:
        return set()
    den = reduce(lcm, (int(rat(c).denominator) for c in p), 1)
    ints = [int(rat(c) * den) for c in p]
    roots = set()
    if ints[0] == 0:
        roots.add(mpq(0))
        while ints and ints[0] == 0:
            ints.pop(0)
    if len(ints) <= 1:
        return roots

    def divisors(n: int) -> list[int]:
        n = abs(n)
        return [k for k in range(1, n + 1) if n % k == 0]

    for num in divisors(ints[0]):
        for den_ in divisors(ints[-1]):
            for s in (1, -1):
                r = mpq(s * num, den_)
                if sum(c * r**k for k, c in enumerate(ints)) == 0:
                    roots.add(r)
    return roots


def search_degree_one_submodules(b, prm: ModuleParams, window=3):
    """All s with ℂ[∂](∂+s)v invariant: every action polynomial vanishes at ∂ = -s.

    Returns a set of rationals, or None when every s works (trivial action).
    """
    act = standard_action(b, prm, window)
    polys = list(act.f.values()) + list(act.g.values())
    conds: list[list] = []
    for p in polys:
        # μ stands in for the unknown s
        at = (p * LAM).subs(d=-MU)
        by_l: dict[int, dict[int, Rat]] = {}
        for (dp, lp, mp), c in at.items():
            by_l.setdefault(lp, {})[mp] = c
        for coeffs in by_l.values():
            top = max(coeffs)
            conds.append([coeffs.get(k, mpq(0)) for k in range(top + 1)])
    if not conds:
        return None
    g = reduce(_uni_gcd, conds[1:], _uni_trim(conds[0]))
    if not g:
        return None
    return _rational_roots(g)


def is_irreducible_by_search(b, prm: ModuleParams, window=3) -> bool:
    found = search_degree_one_submodules(b, prm, window)
    return found is not None and not found
