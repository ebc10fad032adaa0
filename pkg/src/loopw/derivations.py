"""Conformal derivations of CLW(b) and a graded bounded-degree solver.

A conformal linear map is stored by its images on generators; it extends by
``φ_λ(p(∂)x) = p(∂+λ) φ_λ(x)``.  The derivation identity checked here is::

    D_λ [a_μ b] = [(D_λ a)_{λ+μ} b] + [a_μ (D_λ b)]
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import AlgebraSpec, AxiomReport, CLW, Element, Gen, I, L, Violation, WindowExceeded
from .exactalg import (
    D,
    LAM,
    MU,
    LinPoly,
    LinSystem,
    Poly,
    Rat,
    SolutionSpace,
    nullspace,
    rat,
    rat_str,
    span_rank,
    subspace_within,
)


@dataclass
class ConformalMap:
    images: dict[Gen, Element] = field(default_factory=dict)
    window: list[int] | None = None
    degree: int | None = None

    def image(self, g: Gen) -> Element:
        if self.window is not None and g.index not in self.window:
            raise WindowExceeded(g, g)
        return self.images.get(g, Element())


def apply_map(m: ConformalMap, x: Element, theta: Poly = LAM) -> Element:
    out = Element()
    for g, p in x.items():
        img = m.image(g)
        if theta is not LAM:
            img = img.subs(l=theta)
        out = out + img * p.subs(d=D + theta)
    return out


def derivation_residual(alg: AlgebraSpec, m: ConformalMap, a: Element, b: Element) -> Element:
    return (
        apply_map(m, alg.bracket(a, b, MU))
        - alg.bracket(apply_map(m, a), b, LAM + MU)
        - alg.bracket(a, apply_map(m, b), MU)
    )


def _pairs(alg: AlgebraSpec, window: list[int]):
    inside = set(window)
    gens = alg.generators(window)
    for x in gens:
        for y in gens:
            if x.index + y.index in inside:
                yield x, y


def is_derivation(alg: AlgebraSpec, m: ConformalMap, window) -> AxiomReport:
    idx = _idx(window)
    rep = AxiomReport()
    for x, y in _pairs(alg, idx):
        try:
            res = derivation_residual(alg, m, Element.gen(x), Element.gen(y))
        except WindowExceeded:
            rep.skipped += 1
            continue
        rep.checked += 1
        if res:
            rep.violations.append(Violation("derivation", (x, y), res))
    return rep


def _idx(window) -> list[int]:
    return list(range(-window, window + 1)) if isinstance(window, int) else sorted(window)


def inner(x: Element, alg: AlgebraSpec, window) -> ConformalMap:
    """ad_x restricted to generators with index in ``window``."""
    idx = _idx(window)
    imgs = {g: alg.bracket(x, Element.gen(g)) for g in alg.generators(idx)}
    return ConformalMap(imgs, idx)


@dataclass(frozen=True)
class SeqA:
    """Finitely supported sequence c -> a_c."""

    values: tuple[tuple[int, Rat], ...] = ()

    @classmethod
    def of(cls, mapping: dict[int, object]) -> "SeqA":
        return cls(tuple(sorted((int(k), rat(v)) for k, v in mapping.items() if rat(v))))

    def items(self):
        return self.values


def d_family(seq: SeqA, window) -> ConformalMap:
    """L_i -> Σ a_c I_{i+c}, I_i -> 0."""
    idx = _idx(window)
    imgs = {}
    for i in idx:
        el = Element()
        for c, a in seq.items():
            el = el + Element.gen(I(i + c), Poly.const(a))
        imgs[L(i)] = el
    return ConformalMap(imgs, idx)


# ---------------------------------------------------------------------------
# solver


def _label(g: Gen, fam: str, p: int, q: int) -> str:
    return f"D[{g.family}{g.index}].{fam}.d{p}l{q}"


def _source_index(label: str) -> int:
    return int(label[3 : label.index("]")])


@dataclass
class DerivationReport:
    b: Rat
    degree: int
    window: int
    interior: int
    solutions: SolutionSpace
    inner_vectors: list[dict]
    dim_inner: int
    quotient_dim: int
    basis: list[dict]

    def to_json(self) -> dict:
        return {
            "b": rat_str(self.b),
            "degree": self.degree,
            "window": self.window,
            "interior": self.interior,
            "dim_solutions": self.solutions.dimension,
            "dim_inner": self.dim_inner,
            "quotient_dim": self.quotient_dim,
            "basis": [{k: rat_str(v) for k, v in sorted(vec.items())} for vec in self.basis],
        }


def _unknown_map(gens: list[Gen], c: int, pdeg: int, ldeg: int):
    labels: list[str] = []
    imgs: dict[Gen, Element] = {}
    for g in gens:
        el = Element()
        for fam, mk in (("L", L), ("I", I)):
            coeff = LinPoly()
            for p in range(pdeg + 1):
                for q in range(ldeg + 1):
                    lab = _label(g, fam, p, q)
                    labels.append(lab)
                    coeff = coeff + LinPoly.unknown(lab, Poly.monomial(p, q))
            el = el + Element.gen(mk(g.index + c), coeff)
        imgs[g] = el
    return labels, imgs


def _map_vector(m: ConformalMap, gens: list[Gen], c: int) -> dict[str, Rat]:
    """Coordinates of a degree-c map in the solver's labels (any degrees)."""
    vec: dict[str, Rat] = {}
    for g in gens:
        for h, poly in m.image(g).items():
            if h.index != g.index + c:
                raise ValueError(f"map is not homogeneous of degree {c}")
            for (p, q, r), v in poly.items():
                if r:
                    raise ValueError("image depends on μ")
                vec[_label(g, h.family, p, q)] = v
    return vec


def solve_derivations(b, degree: int, window: int = 4, interior: int = 2, pdeg: int = 3, ldeg: int = 3) -> DerivationReport:
    """Degree-``degree`` derivations of CLW(b) with bounded ∂- and λ-degrees.

    The quotient dimension is read on the interior: the rank of the solution
    space projected to interior sources minus that of the inner derivations
    ad_x that fit the ansatz.
    """
    if interior > window:
        raise ValueError("interior must not exceed window")
    b = rat(b)
    alg = CLW(b)
    idx = _idx(window)
    gens = alg.generators(idx)
    labels, imgs = _unknown_map(gens, degree, pdeg, ldeg)
    m = ConformalMap(imgs, idx, degree)
    sys = LinSystem(labels)
    for x, y in _pairs(alg, idx):
        res = derivation_residual(alg, m, Element.gen(x), Element.gen(y))
        sys.add([p for _, p in res.items()])
    space = nullspace(sys)

    allowed = set(labels)
    inner_raw = []
    for n in range(pdeg + 1):
        for mk in (L, I):
            x = Element.gen(mk(degree), D**n)
            inner_raw.append(_map_vector(inner(x, alg, idx), gens, degree))
    inner_fit = subspace_within(inner_raw, lambda k: k in allowed)

    keep = lambda k: abs(_source_index(k)) <= interior
    proj = lambda vs: [{k: v for k, v in vec.items() if keep(k)} for vec in vs]
    dim_s = span_rank(proj(space.basis))
    dim_inner = span_rank(proj(inner_fit))
    # representatives of the quotient on the interior
    reps: list[dict] = []
    acc = proj(inner_fit)
    base = span_rank(acc)
    for vec in proj(space.basis):
        r = span_rank(acc + [vec])
        if r > base:
            acc.append(vec)
            reps.append(vec)
            base = r
    return DerivationReport(b, degree, window, interior, space, inner_fit, dim_inner, dim_s - dim_inner, reps)


def contains_inner(rep: DerivationReport) -> bool:
    return span_rank(rep.solutions.basis + rep.inner_vectors) == rep.solutions.dimension


def is_inner_on(m: ConformalMap, b, degree: int, window, pdeg: int = 3) -> bool:
    """Whether m agrees on ``window`` with some ad_x, x = Σ p_n ∂^n L_c + q_n ∂^n I_c."""
    alg = CLW(b)
    idx = _idx(window)
    gens = alg.generators(idx)
    target = _map_vector(m, gens, degree)
    vecs = []
    for n in range(pdeg + 1):
        for mk in (L, I):
            vecs.append(_map_vector(inner(Element.gen(mk(degree), D**n), alg, idx), gens, degree))
    return span_rank(vecs + [target]) == span_rank(vecs)
