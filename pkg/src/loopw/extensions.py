"""Extensions between ℂ_β and the rank-one modules M(Δ, α, c, d).

Two directions:

* ``mc``: 0 -> ℂ_β -> E -> M -> 0 with
  ``L_i λ v = c^i(∂+Δλ+α)v + f_i(λ)v_β`` and ``I_i λ v = δ_{b,0}dc^i v + g_i(λ)v_β``.
* ``cm``: 0 -> M -> E -> ℂ_β -> 0 with ``∂v_β = βv_β + ρ(∂)v``,
  ``L_i λ v_β = h_i(∂,λ)v`` and ``I_i λ v_β = l_i(∂,λ)v``.

Each direction has two independent checkers: the generic module-shape check
and the functional equations written out by hand.  Coboundaries come from the
basis changes ``v -> v + k v_β`` and ``v_β -> v_β + q(∂)v``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .core import CLW, AxiomReport, I, L, Violation
from .exactalg import (
    D,
    LAM,
    MU,
    ZERO,
    Coeff,
    LinPoly,
    Poly,
    Rat,
    SolutionSpace,
    nullspace,
    rat,
    rat_str,
    span_rank,
    subspace_within,
)
from .modules import ModElem, ModuleAction, ModuleParams, ModuleShape, _power, check_module, module_residuals, residual_system


def _idx(window) -> list[int]:
    return list(range(-window, window + 1)) if isinstance(window, int) else sorted(window)


@dataclass(frozen=True)
class ExtParams:
    b: Rat
    module: ModuleParams
    beta: Rat

    def __post_init__(self):
        object.__setattr__(self, "b", rat(self.b))
        object.__setattr__(self, "beta", rat(self.beta))
        if not self.module.c:
            raise ValueError("c must be nonzero")

    @classmethod
    def of(cls, b, delta, alpha, beta, c=1, d=0) -> "ExtParams":
        return cls(b, ModuleParams(delta, alpha, c, d), beta)

    @property
    def shift(self) -> Rat:
        """α + β"""
        return self.module.alpha + self.beta

    @property
    def dd(self) -> Rat:
        """δ_{b,0} d"""
        return self.module.d if self.b == 0 else rat(0)

    def cpow(self, i: int) -> Rat:
        return _power(self.module.c, i)

    def l_action(self, i: int) -> Poly:
        m = self.module
        return (D + m.delta * LAM + m.alpha) * self.cpow(i)

    def to_json(self) -> dict:
        return {"b": rat_str(self.b), "beta": rat_str(self.beta), **self.module.to_json()}


@dataclass
class ExtCocycleMC:
    f: dict[int, Coeff] = field(default_factory=dict)
    g: dict[int, Coeff] = field(default_factory=dict)

    def fi(self, i: int) -> Coeff:
        return self.f.get(i, ZERO)

    def gi(self, i: int) -> Coeff:
        return self.g.get(i, ZERO)

    def to_json(self) -> dict:
        return {
            "f": {str(i): p.to_records() for i, p in sorted(self.f.items()) if p},
            "g": {str(i): p.to_records() for i, p in sorted(self.g.items()) if p},
        }


@dataclass
class ExtCocycleCM:
    rho: Coeff = ZERO
    h: dict[int, Coeff] = field(default_factory=dict)
    l: dict[int, Coeff] = field(default_factory=dict)

    def hi(self, i: int) -> Coeff:
        return self.h.get(i, ZERO)

    def li(self, i: int) -> Coeff:
        return self.l.get(i, ZERO)

    def to_json(self) -> dict:
        return {
            "rho": self.rho.to_records(),
            "h": {str(i): p.to_records() for i, p in sorted(self.h.items()) if p},
            "l": {str(i): p.to_records() for i, p in sorted(self.l.items()) if p},
        }


# ---------------------------------------------------------------------------
# module shapes


def mc_module(p: ExtParams, cx: ExtCocycleMC, window) -> ModuleAction:
    act = ModuleAction(ModuleShape("ext_mc", p.beta), window=_idx(window))
    for i in _idx(window):
        act.on_v[L(i)] = ModElem(p.l_action(i), cx.fi(i))
        act.on_v[I(i)] = ModElem(Poly.const(p.dd * p.cpow(i)), cx.gi(i))
    return act


def cm_module(p: ExtParams, cx: ExtCocycleCM, window) -> ModuleAction:
    act = ModuleAction(ModuleShape("ext_cm", p.beta), rho=cx.rho, window=_idx(window))
    for i in _idx(window):
        act.on_v[L(i)] = ModElem(p.l_action(i), ZERO)
        act.on_v[I(i)] = ModElem(Poly.const(p.dd * p.cpow(i)), ZERO)
        act.on_vbeta[L(i)] = ModElem(cx.hi(i), ZERO)
        act.on_vbeta[I(i)] = ModElem(cx.li(i), ZERO)
    return act


# ---------------------------------------------------------------------------
# functional equations written out directly


def _pairs(window):
    idx = _idx(window)
    inside = set(idx)
    for i in idx:
        for j in idx:
            if i + j in inside:
                yield i, j


def mc_direct_residuals(p: ExtParams, cx: ExtCocycleMC, window) -> Iterator[tuple[str, tuple, Coeff]]:
    """v_β-components of the (L,L), (L,I), (I,I) identities on v."""
    s, delta, b, dd = p.shift, p.module.delta, p.b, p.dd
    for i, j in _pairs(window):
        ci, cj = p.cpow(i), p.cpow(j)
        fi, fj = cx.fi(i), cx.fi(j).subs(l=MU)
        gi, gj = cx.gi(i), cx.gi(j).subs(l=MU)
        yield "LL", (i, j), (
            fi * ((LAM + delta * MU + s) * cj) - fj * ((MU + delta * LAM + s) * ci) - cx.fi(i + j).subs(l=LAM + MU) * (LAM - MU)
        )
        yield "LI", (i, j), (
            fi * (dd * cj) - gj * ((MU + delta * LAM + s) * ci) + cx.gi(i + j).subs(l=LAM + MU) * (b * LAM + MU)
        )
        yield "II", (i, j), gi * (dd * cj) - gj * (dd * ci)


def cm_direct_residuals(p: ExtParams, cx: ExtCocycleCM, window) -> Iterator[tuple[str, tuple, Coeff]]:
    """v-components of the ∂-compatibility and bracket identities on v_β."""
    beta, b, dd = p.beta, p.b, p.dd
    rho_shift = cx.rho.subs(d=D + LAM)
    for i in _idx(window):
        ci = p.cpow(i)
        yield "dL", (i,), cx.hi(i) * (D + LAM - beta) - rho_shift * p.l_action(i)
        yield "dI", (i,), cx.li(i) * (D + LAM - beta) - rho_shift * (dd * ci)
    for i, j in _pairs(window):
        ci, cj = p.cpow(i), p.cpow(j)
        li_ = p.l_action(i)
        lj_mu = p.l_action(j).subs(l=MU)
        hj = cx.hi(j).subs(d=D + LAM, l=MU)
        hi = cx.hi(i).subs(d=D + MU)
        lj = cx.li(j).subs(d=D + LAM, l=MU)
        li = cx.li(i).subs(d=D + MU)
        yield "LL", (i, j), hj * li_ - hi * lj_mu - cx.hi(i + j).subs(l=LAM + MU) * (LAM - MU)
        yield "LI", (i, j), lj * li_ - hi * (dd * cj) + cx.li(i + j).subs(l=LAM + MU) * (b * LAM + MU)
        yield "II", (i, j), lj * (dd * ci) - li * (dd * cj)


def _report(residuals) -> AxiomReport:
    rep = AxiomReport()
    for rule, inputs, res in residuals:
        rep.checked += 1
        if res:
            rep.violations.append(Violation(rule, inputs, res))
    return rep


def check_ext_mc(p: ExtParams, cx: ExtCocycleMC, window) -> AxiomReport:
    return check_module(CLW(p.b), mc_module(p, cx, window), window)


def check_ext_mc_direct(p: ExtParams, cx: ExtCocycleMC, window) -> AxiomReport:
    return _report(mc_direct_residuals(p, cx, window))


def check_ext_cm(p: ExtParams, cx: ExtCocycleCM, window) -> AxiomReport:
    return check_module(CLW(p.b), cm_module(p, cx, window), window)


def check_ext_cm_direct(p: ExtParams, cx: ExtCocycleCM, window) -> AxiomReport:
    return _report(cm_direct_residuals(p, cx, window))


# ---------------------------------------------------------------------------
# coboundaries


def coboundary_mc(p: ExtParams, k, window) -> ExtCocycleMC:
    # With v' = v + k v_β:  L_i λ v' = c^i(∂+Δλ+α)v + k c^i(β+Δλ+α)v_β + f_i v_β, and
    # c^i(∂+Δλ+α)v = c^i(∂+Δλ+α)v' - k c^i(β+Δλ+α)v_β, so f shifts by k c^i(α+β+Δλ).
    # The same computation on I_i gives g shifting by k δ_{b,0} d c^i.
    k = rat(k)
    f = {i: (p.module.delta * LAM + p.shift) * (k * p.cpow(i)) for i in _idx(window)}
    g = {i: Poly.const(k * p.dd * p.cpow(i)) for i in _idx(window)}
    return ExtCocycleMC(f, g)


def coboundary_cm(p: ExtParams, q: Poly, window) -> ExtCocycleCM:
    # With v_β' = v_β + q(∂)v:  ∂v_β' = βv_β' + (ρ + (∂-β)q)v, and
    # L_i λ v_β' = (h_i + q(∂+λ) c^i(∂+Δλ+α))v, I_i λ v_β' = (l_i + q(∂+λ) δ_{b,0}dc^i)v.
    qs = q.subs(d=D + LAM)
    h = {i: qs * p.l_action(i) for i in _idx(window)}
    l = {i: qs * (p.dd * p.cpow(i)) for i in _idx(window)}
    return ExtCocycleCM(q * (D - p.beta), h, l)


# ---------------------------------------------------------------------------
# theorem and lemma predictions


def theorem_dim_mc(p: ExtParams) -> int:
    b, delta, s, d = p.b, p.module.delta, p.shift, p.module.d
    if b != 0:
        if s == 0 and delta == b:
            return 1 + (b == -1) + (b == 1) + (b == 2)
        return 0
    if s == 0 and d == 0:
        if delta in (-1, 2):
            return 1
        if delta == 1:
            return 2
    return 0


def lemma_dim_mc(p: ExtParams) -> int:
    """f-classes from the f-lemma plus g-classes from the g-lemmas."""
    b, delta, s, d = p.b, p.module.delta, p.shift, p.module.d
    if s != 0:
        return 0
    if b == 0 and d != 0:
        return 0
    f_part = int(delta in (-1, 1, 2))
    g_part = int(delta == b) if b != 0 else int(delta == 1 and d == 0)
    return f_part + g_part


def known_discrepancy_mc(p: ExtParams) -> bool:
    return p.b != 0 and p.shift == 0 and p.module.delta in (-1, 1, 2) and p.module.delta != p.b


def theorem_dim_cm(p: ExtParams) -> int:
    b, delta, s, d = p.b, p.module.delta, p.shift, p.module.d
    if b != 0:
        return int(s == 0 and delta == 1)
    return int(s == 0 and d == 0 and delta == 1)


# ---------------------------------------------------------------------------
# solvers


@dataclass
class ExtReport:
    direction: str
    params: ExtParams
    window: int
    interior: int
    cocycles: SolutionSpace
    dim_cocycles: int
    dim_coboundaries: int
    basis: list[dict]
    theorem_dim: int
    discrepancy_notes: list[str]
    unexplained: bool
    l_vanishes: bool | None = None

    @property
    def dim_ext(self) -> int:
        return self.dim_cocycles - self.dim_coboundaries

    def to_json(self) -> dict:
        out = {
            "direction": self.direction,
            "params": self.params.to_json(),
            "window": self.window,
            "interior": self.interior,
            "dim_cocycles": self.dim_cocycles,
            "dim_coboundaries": self.dim_coboundaries,
            "dim_ext": self.dim_ext,
            "theorem_dim_ext": self.theorem_dim,
            "basis": [{k: rat_str(v) for k, v in sorted(vec.items())} for vec in self.basis],
            "discrepancy_notes": self.discrepancy_notes,
            "unexplained_discrepancy": self.unexplained,
        }
        if self.l_vanishes is not None:
            out["l_vanishes"] = self.l_vanishes
        return out


def _label_index(label: str) -> int | None:
    """Loop index of a label such as 'f[3].l2'; None for ρ."""
    if "[" not in label:
        return None
    return int(label[label.index("[") + 1 : label.index("]")])


def _quotient(space: SolutionSpace, cob: list[dict], interior: int):
    keep = lambda k: _label_index(k) is None or abs(_label_index(k)) <= interior
    proj = lambda vs: [{k: v for k, v in vec.items() if keep(k)} for vec in vs]
    ps, pc = proj(space.basis), proj(cob)
    dim_s, dim_c = span_rank(ps), span_rank(pc)
    reps, acc, base = [], list(pc), dim_c
    for vec in ps:
        r = span_rank(acc + [vec])
        if r > base:
            acc.append(vec)
            reps.append(vec)
            base = r
    return dim_s, dim_c, reps


def _poly_vec(prefix: str, poly: Poly, dvar: bool) -> dict[str, Rat]:
    out = {}
    for (dp, lp, _), c in poly.items():
        out[f"{prefix}.d{dp}l{lp}" if dvar else f"{prefix}.l{lp}"] = c
    return out


def solve_ext_mc(p: ExtParams, window: int = 4, interior: int = 2, ldeg: int = 4) -> ExtReport:
    if interior > window:
        raise ValueError("interior must not exceed window")
    idx = _idx(window)
    labels: list[str] = []
    f: dict[int, LinPoly] = {}
    g: dict[int, LinPoly] = {}
    for name, store in (("f", f), ("g", g)):
        for i in idx:
            lp = LinPoly()
            for q in range(ldeg + 1):
                lab = f"{name}[{i}].l{q}"
                labels.append(lab)
                lp = lp + LinPoly.unknown(lab, Poly.monomial(0, q))
            store[i] = lp
    cx = ExtCocycleMC(f, g)
    sys = residual_system(labels, module_residuals(CLW(p.b), mc_module(p, cx, window), window))
    space = nullspace(sys)
    cb = coboundary_mc(p, 1, window)
    vec = {}
    for i in idx:
        vec.update(_poly_vec(f"f[{i}]", cb.fi(i), False))
        vec.update(_poly_vec(f"g[{i}]", cb.gi(i), False))
    allowed = set(labels)
    cob = subspace_within([vec], lambda k: k in allowed) if vec else []
    dim_s, dim_c, reps = _quotient(space, cob, interior)

    theorem = theorem_dim_mc(p)
    notes, unexplained = [], False
    dim = dim_s - dim_c
    if dim != theorem:
        if known_discrepancy_mc(p) and dim == lemma_dim_mc(p):
            notes.append(
                f"computed dim_ext {dim} differs from the b != 0 dimension theorem ({theorem}); "
                f"it agrees with the f- and g-lemmas, which allow f-classes at Δ in {{-1, 1, 2}} for any b"
            )
        else:
            unexplained = True
            notes.append(f"computed dim_ext {dim} differs from the dimension theorem ({theorem}) and from the lemmas ({lemma_dim_mc(p)})")
    return ExtReport("mc", p, window, interior, space, dim_s, dim_c, reps, theorem, notes, unexplained)


def solve_ext_cm(p: ExtParams, window: int = 3, interior: int = 1, pdeg: int = 2, ldeg: int = 2) -> ExtReport:
    if interior > window:
        raise ValueError("interior must not exceed window")
    idx = _idx(window)
    labels: list[str] = []
    rho = LinPoly()
    for k in range(pdeg + 1):
        lab = f"rho.d{k}"
        labels.append(lab)
        rho = rho + LinPoly.unknown(lab, Poly.monomial(k))
    h: dict[int, LinPoly] = {}
    l: dict[int, LinPoly] = {}
    for name, store in (("h", h), ("l", l)):
        for i in idx:
            lp = LinPoly()
            for dp in range(pdeg + 1):
                for q in range(ldeg + 1):
                    lab = f"{name}[{i}].d{dp}l{q}"
                    labels.append(lab)
                    lp = lp + LinPoly.unknown(lab, Poly.monomial(dp, q))
            store[i] = lp
    cx = ExtCocycleCM(rho, h, l)
    sys = residual_system(labels, module_residuals(CLW(p.b), cm_module(p, cx, window), window))
    space = nullspace(sys)

    cob_raw = []
    for k in range(pdeg + 1):
        cb = coboundary_cm(p, Poly.monomial(k), window)
        vec = {f"rho.d{dp}": c for (dp, _, _), c in cb.rho.items()}
        for i in idx:
            vec.update(_poly_vec(f"h[{i}]", cb.hi(i), True))
            vec.update(_poly_vec(f"l[{i}]", cb.li(i), True))
        cob_raw.append(vec)
    allowed = set(labels)
    cob = subspace_within(cob_raw, lambda k: k in allowed)
    dim_s, dim_c, reps = _quotient(space, cob, interior)
    l_zero = all(not k.startswith("l[") for vec in reps for k in vec)

    theorem = theorem_dim_cm(p)
    dim = dim_s - dim_c
    notes, unexplained = [], False
    if dim != theorem:
        unexplained = True
        notes.append(f"computed dim_ext {dim} differs from the dimension theorem ({theorem})")
    if not l_zero:
        unexplained = True
        notes.append("a surviving class has a nonzero l-component")
    return ExtReport("cm", p, window, interior, space, dim_s, dim_c, reps, theorem, notes, unexplained, l_zero)


def cocycle_from_vector_mc(vec: dict, window) -> ExtCocycleMC:
    f: dict[int, Poly] = {}
    g: dict[int, Poly] = {}
    for k, v in vec.items():
        name, rest = k.split("[")
        i = int(rest[: rest.index("]")])
        q = int(rest[rest.index(".l") + 2 :])
        store = f if name == "f" else g
        store[i] = store.get(i, ZERO) + Poly.monomial(0, q, 0, v)
    return ExtCocycleMC(f, g)


def cocycle_from_vector_cm(vec: dict, window) -> ExtCocycleCM:
    rho = ZERO
    h: dict[int, Poly] = {}
    l: dict[int, Poly] = {}
    for k, v in vec.items():
        if k.startswith("rho"):
            rho = rho + Poly.monomial(int(k[5:]), 0, 0, v)
            continue
        name, rest = k.split("[")
        i = int(rest[: rest.index("]")])
        dl = rest[rest.index(".d") + 2 :]
        dp, q = (int(x) for x in dl.split("l"))
        store = h if name == "h" else l
        store[i] = store.get(i, ZERO) + Poly.monomial(dp, q, 0, v)
    return ExtCocycleCM(rho, h, l)
