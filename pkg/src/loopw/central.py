"""One-dimensional central extensions of CLW(b): 2-cocycles, checker and solver.

The center is killed by ∂, so cocycle values are polynomials in λ alone and
``φ_{-∂-λ}`` reduces to ``φ_{-λ}``.  A cocycle stored on generator pairs
extends to elements by ``φ_θ(p(∂)a, q(∂)b) = p(-θ) q(θ) φ_θ(a, b)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core import CLW, AxiomReport, Element, Gen, I, L, Violation, WindowExceeded
from .exactalg import (
    D,
    LAM,
    MU,
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
    span_rank,
)

FAMILY_NAMES = ("A", "A'", "B", "B'", "B''", "B'''", "C", "C'")
NEG = -LAM


def _idx(window) -> list[int]:
    return list(range(-window, window + 1)) if isinstance(window, int) else sorted(window)


@dataclass
class TwoCocycle:
    values: dict[tuple[Gen, Gen], Coeff] = field(default_factory=dict)

    def value(self, x: Gen, y: Gen) -> Coeff:
        if (x, y) in self.values:
            return self.values[(x, y)]
        if (y, x) in self.values:
            return -self.values[(y, x)].subs(l=NEG)
        raise WindowExceeded(x, y)

    def phi(self, x: Element, y: Element, theta: Poly = LAM) -> Coeff:
        out = ZERO
        for g, p in x.items():
            left = p.subs(d=-theta)
            for h, q in y.items():
                val = self.value(g, h)
                if theta is not LAM:
                    val = val.subs(l=theta)
                out = out + val * (left * q.subs(d=theta))
        return out

    def to_json(self) -> list[dict]:
        return [
            {"left": x.to_json(), "right": y.to_json(), "value": v.to_records()}
            for (x, y), v in sorted(self.values.items())
            if v
        ]


@dataclass
class CocycleFamily:
    """Functions m -> value for each of the named families (finitely supported)."""

    funcs: dict[str, dict[int, Rat]] = field(default_factory=dict)

    def __post_init__(self):
        bad = set(self.funcs) - set(FAMILY_NAMES)
        if bad:
            raise ValueError(f"unknown family names {sorted(bad)}")
        self.funcs = {k: {int(m): rat(v) for m, v in f.items()} for k, f in self.funcs.items()}

    def get(self, name: str, m: int) -> Rat:
        return self.funcs.get(name, {}).get(m, rat(0))

    def to_json(self) -> dict:
        return {k: [{"m": m, "value": rat_str(v)} for m, v in sorted(f.items())] for k, f in sorted(self.funcs.items())}

    @classmethod
    def from_json(cls, obj) -> "CocycleFamily":
        return cls({k: {int(r["m"]): r["value"] for r in recs} for k, recs in obj.items()})

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "CocycleFamily":
        return cls.from_json(json.loads(text))


def family_values(b, fam: CocycleFamily, m: int) -> dict[str, Poly]:
    """λ-polynomials for the (L,L), (L,I), (I,I) slots at pair sum m."""
    b = rat(b)
    g = fam.get
    ll = g("A", m) * LAM + g("A'", m) * LAM**3
    li = (
        Poly.const(g("B", m) if b == 1 else 0)
        + g("B'", m) * LAM
        + (g("B''", m) if b == 0 else 0) * LAM**2
        + (g("B'''", m) if b == -1 else 0) * LAM**3
    )
    ii = Poly.const(g("C", m) if 2 * b == 1 else 0) + (g("C'", m) if b == 0 else 0) * LAM
    return {"LL": ll, "LI": li, "II": ii}


def family_to_cocycle(b, fam: CocycleFamily, window) -> TwoCocycle:
    idx = _idx(window)
    vals = {}
    for i in idx:
        for j in idx:
            fv = family_values(b, fam, i + j)
            vals[(L(i), L(j))] = fv["LL"]
            vals[(L(i), I(j))] = fv["LI"]
            vals[(I(i), L(j))] = -fv["LI"].subs(l=NEG)
            vals[(I(i), I(j))] = fv["II"]
    return TwoCocycle(vals)


def cocycle_residuals(b, phi: TwoCocycle, window):
    """Yield (rule, inputs, residual) for skew, sesquilinearity and Jacobi on the window."""
    alg = CLW(b)
    idx = _idx(window)
    inside = set(idx)
    gens = alg.generators(idx)
    for x in gens:
        for y in gens:
            yield "skew", (x, y), phi.value(x, y) + phi.value(y, x).subs(l=NEG)
    for x in gens:
        ex = Element.gen(x)
        for y in gens:
            ey = Element.gen(y)
            base = phi.phi(ex, ey)
            yield "sesqui-left", (x, y), phi.phi(Element.gen(x, D), ey) + base * LAM
            yield "sesqui-right", (x, y), phi.phi(ex, Element.gen(y, D)) - base * LAM
    for x in gens:
        ex = Element.gen(x)
        for y in gens:
            if x.index + y.index not in inside:
                continue
            ey = Element.gen(y)
            xy = alg.bracket(ex, ey, LAM)
            for z in gens:
                if y.index + z.index not in inside or x.index + z.index not in inside:
                    continue
                ez = Element.gen(z)
                res = (
                    phi.phi(xy, ez, LAM + MU)
                    - phi.phi(ex, alg.bracket(ey, ez, MU), LAM)
                    + phi.phi(ey, alg.bracket(ex, ez, LAM), MU)
                )
                yield "jacobi", (x, y, z), res


def check_two_cocycle(b, phi: TwoCocycle, window) -> AxiomReport:
    rep = AxiomReport()
    for rule, inputs, res in cocycle_residuals(b, phi, window):
        rep.checked += 1
        if res:
            rep.violations.append(Violation(rule, inputs, res))
    return rep


# ---------------------------------------------------------------------------
# solver


def _kind(x: Gen, y: Gen) -> str:
    return x.family + y.family


def _label(x: Gen, y: Gen, q: int) -> str:
    return f"phi[{x.family}{x.index},{y.family}{y.index}].l{q}"


def _parse(label: str) -> tuple[str, int, int, int]:
    """kind, i, j, λ-degree"""
    a, rest = label[4:].split("]")
    left, right = a.split(",")
    return left[0] + right[0], int(left[1:]), int(right[1:]), int(rest[2:])


@dataclass
class CentralReport:
    b: Rat
    window: int
    interior: int
    ldeg: int
    solutions: SolutionSpace
    sum_only: bool
    supports: dict[str, dict[int, list[int]]]
    interior_dims: dict[str, int]
    family_match: bool
    expected_supports: dict[str, list[int]]

    @property
    def structure_ok(self) -> bool:
        return self.sum_only and self.family_match and all(
            sorted(s) == self.expected_supports[k] for k, per in self.supports.items() for s in per.values()
        )

    def to_json(self) -> dict:
        return {
            "b": rat_str(self.b),
            "window": self.window,
            "interior": self.interior,
            "ldeg": self.ldeg,
            "center": "∂ acts by 0 on the center, so φ_{-∂-λ} is evaluated as φ_{-λ}",
            "dim_solutions": self.solutions.dimension,
            "sum_only": self.sum_only,
            "supports": {k: {str(m): v for m, v in sorted(per.items())} for k, per in sorted(self.supports.items())},
            "expected_supports": self.expected_supports,
            "interior_dims": self.interior_dims,
            "family_match": self.family_match,
            "structure_ok": self.structure_ok,
        }


def expected_supports(b) -> dict[str, list[int]]:
    b = rat(b)
    li = sorted({1} | ({0} if b == 1 else set()) | ({2} if b == 0 else set()) | ({3} if b == -1 else set()))
    ii = sorted(({0} if 2 * b == 1 else set()) | ({1} if b == 0 else set()))
    return {"LL": [1, 3], "LI": li, "II": ii}


def unknown_cocycle(window, ldeg: int) -> tuple[list[str], TwoCocycle]:
    gens = CLW(0).generators(_idx(window))
    labels = []
    vals = {}
    for x in gens:
        for y in gens:
            lp = LinPoly()
            for q in range(ldeg + 1):
                lab = _label(x, y, q)
                labels.append(lab)
                lp = lp + LinPoly.unknown(lab, Poly.monomial(0, q))
            vals[(x, y)] = lp
    return labels, TwoCocycle(vals)


def _interior_pairs(window: int, interior: int):
    """Pairs read for classification: both indices in the window, sum in the interior range."""
    for i in range(-window, window + 1):
        for j in range(-window, window + 1):
            if abs(i + j) <= interior:
                yield i, j


def solve_central(b, window: int = 3, interior: int = 1, ldeg: int = 5) -> CentralReport:
    if interior > window:
        raise ValueError("interior must not exceed window")
    b = rat(b)
    labels, phi = unknown_cocycle(window, ldeg)
    sys = LinSystem(labels)
    for _, _, res in cocycle_residuals(b, phi, window):
        if isinstance(res, LinPoly):
            sys.add(res)
    space = nullspace(sys)

    pairs = set(_interior_pairs(window, interior))
    kinds = ("LL", "LI", "II")

    def interior_label(k: str) -> bool:
        kind, i, j, _ = _parse(k)
        return kind in kinds and (i, j) in pairs

    # (i) values depend on the pair only through its sum
    sum_only = True
    for vec in space.basis:
        seen: dict[tuple, dict] = {}
        per_pair: dict[tuple, dict[int, Rat]] = {}
        for k, v in vec.items():
            kind, i, j, q = _parse(k)
            if kind in kinds and (i, j) in pairs:
                per_pair.setdefault((kind, i, j), {})[q] = v
        for kind in kinds:
            for i, j in pairs:
                key = (kind, i + j)
                val = per_pair.get((kind, i, j), {})
                if key in seen and seen[key] != val:
                    sum_only = False
                seen.setdefault(key, val)

    supports: dict[str, dict[int, set]] = {k: {m: set() for m in range(-interior, interior + 1)} for k in kinds}
    for vec in space.basis:
        for k, v in vec.items():
            kind, i, j, q = _parse(k)
            if kind in kinds and (i, j) in pairs and v:
                supports[kind][i + j].add(q)

    proj = [{k: v for k, v in vec.items() if interior_label(k)} for vec in space.basis]
    dims = {kind: span_rank([{k: v for k, v in p.items() if k.startswith(f"phi[{kind[0]}") and f",{kind[1]}" in k} for p in proj]) for kind in kinds}

    # the theorem's families restricted to the same interior pairs
    fam_vecs = []
    for name in FAMILY_NAMES:
        for m in range(-interior, interior + 1):
            coc = family_to_cocycle(b, CocycleFamily({name: {m: 1}}), window)
            vec = {}
            for (x, y), val in coc.values.items():
                if _kind(x, y) in kinds and (x.index, y.index) in pairs and x.index + y.index == m:
                    for (_, q, _), c in val.items():
                        vec[_label(x, y, q)] = c
            if vec:
                fam_vecs.append(vec)
    rs, rf = span_rank(proj), span_rank(fam_vecs)
    match = rs == rf == span_rank(proj + fam_vecs)

    return CentralReport(
        b,
        window,
        interior,
        ldeg,
        space,
        sum_only,
        {k: {m: sorted(s) for m, s in per.items()} for k, per in supports.items()},
        dims,
        match,
        expected_supports(b),
    )
