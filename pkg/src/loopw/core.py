"""Lie conformal algebras given by λ-brackets on a ℂ[∂]-basis of generators.

Elements are finite combinations ``Σ p_g(∂, ...) g``; the coefficient of a
generator may carry λ and μ as scalar parameters, which is how λ-bracket
values and nested Jacobi terms are represented.

The generic bracket rule (for a spectral parameter θ that is any polynomial)::

    [p(∂) g _θ q(∂) h] = p(-θ) q(∂+θ) [g _θ h]

is the single place where conformal sesquilinearity is implemented.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, NamedTuple

from .exactalg import D, LAM, MU, ONE, ZERO, Coeff, LinPoly, Poly, Rat, rat


class Gen(NamedTuple):
    family: str
    index: int

    def __str__(self) -> str:
        return f"{self.family}_{self.index}"

    def to_json(self) -> dict:
        return {"family": self.family, "index": self.index}

    @classmethod
    def from_json(cls, obj) -> "Gen":
        if isinstance(obj, str):
            fam, _, idx = obj.partition("_")
            return cls(fam, int(idx))
        return cls(str(obj["family"]), int(obj["index"]))


def L(i: int) -> Gen:
    return Gen("L", i)


def I(i: int) -> Gen:
    return Gen("I", i)


class Element:
    """Finitely supported map ``Gen -> coefficient``; zero coefficients are dropped.

    Used both for algebra elements (coefficients in ∂) and for λ-bracket
    values (coefficients in ∂, λ, μ); ``LambdaElement`` is the same class.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[Gen, Coeff] | None = None):
        self._c: dict[Gen, Coeff] = {}
        for g, p in (coeffs or {}).items():
            if not isinstance(p, (Poly, LinPoly)):
                p = Poly.const(p)
            if p:
                self._c[Gen(*g)] = p

    @classmethod
    def gen(cls, g: Gen, coeff: Coeff = ONE) -> "Element":
        return cls({g: coeff})

    def items(self) -> list[tuple[Gen, Coeff]]:
        return sorted(self._c.items())

    def coeff(self, g: Gen) -> Coeff:
        return self._c.get(g, ZERO)

    def support(self) -> list[Gen]:
        return sorted(self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def __eq__(self, other) -> bool:
        if isinstance(other, Element):
            return self._c == other._c
        if other == 0:
            return not self._c
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __add__(self, other: "Element") -> "Element":
        if not isinstance(other, Element):
            if other == 0:
                return self
            return NotImplemented
        out = dict(self._c)
        for g, p in other._c.items():
            out[g] = out[g] + p if g in out else p
        return Element(out)

    __radd__ = __add__

    def __neg__(self) -> "Element":
        return Element({g: -p for g, p in self._c.items()})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __mul__(self, c) -> "Element":
        """Multiply every coefficient by a polynomial (∂ included: this is the ℂ[∂]-action)."""
        return Element({g: p * c for g, p in self._c.items()})

    __rmul__ = __mul__

    def map_coeffs(self, fn: Callable[[Coeff], Coeff]) -> "Element":
        return Element({g: fn(p) for g, p in self._c.items()})

    def subs(self, mapping=None, **images) -> "Element":
        return self.map_coeffs(lambda p: p.subs(mapping, **images))

    def __repr__(self) -> str:
        return f"Element({self})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        return " + ".join(f"({p}){g}" for g, p in self.items())

    def to_json(self) -> list[dict]:
        return [{"generator": g.to_json(), "poly": p.to_records()} for g, p in self.items()]

    @classmethod
    def from_json(cls, obj) -> "Element":
        out = Element()
        for rec in obj:
            out = out + Element.gen(Gen.from_json(rec["generator"]), Poly.from_records(rec["poly"]))
        return out


LambdaElement = Element


def skew_subs(p: Coeff) -> Coeff:
    """λ ↦ -∂-λ with ∂ acting as a commuting multiplier on the coefficient."""
    return p.subs(l=-D - LAM)


class WindowExceeded(KeyError):
    """A bracket was requested outside the generators a table algebra knows."""

    def __init__(self, left: Gen, right: Gen):
        super().__init__(f"bracket [{left} λ {right}] is outside the table window")
        self.left, self.right = left, right


class AlgebraSpec:
    """A ℤ-graded Lie conformal algebra presented on ℂ[∂]-generators.

    Subclasses implement :meth:`gen_bracket`, the λ-bracket of two generators
    as an Element with coefficients in ∂ and λ.
    """

    def gen_bracket(self, x: Gen, y: Gen) -> Element:
        raise NotImplementedError

    def degree(self, g: Gen) -> int:
        raise NotImplementedError

    def generators(self, window: int | Iterable[int]) -> list[Gen]:
        raise NotImplementedError

    def bracket(self, x: Element, y: Element, theta: Poly = LAM) -> Element:
        """λ-bracket of elements at spectral parameter ``theta`` (any polynomial)."""
        out: dict[Gen, Coeff] = {}
        for g, p in x.items():
            left = p.subs(d=-theta)
            for h, q in y.items():
                right = q.subs(d=D + theta)
                pref = left * right
                for k, r in self.gen_bracket(g, h).items():
                    term = pref * r.subs(l=theta) if theta is not LAM else pref * r
                    out[k] = out[k] + term if k in out else term
        return Element(out)


def _window_range(window) -> list[int]:
    if isinstance(window, int):
        return list(range(-window, window + 1))
    return sorted(set(window))


@dataclass(frozen=True)
class CLW(AlgebraSpec):
    """The loop W(a,b) conformal algebra; its λ-brackets depend on b only."""

    b: Rat

    def __post_init__(self):
        object.__setattr__(self, "b", rat(self.b))

    def gen_bracket(self, x: Gen, y: Gen) -> Element:
        return _clw_bracket(self.b, x, y)

    def degree(self, g: Gen) -> int:
        return g.index

    def generators(self, window) -> list[Gen]:
        idx = _window_range(window)
        return [L(i) for i in idx] + [I(i) for i in idx]


@lru_cache(maxsize=None)
def _clw_bracket(b: Rat, x: Gen, y: Gen) -> Element:
    k = x.index + y.index
    if x.family == "L" and y.family == "L":
        return Element.gen(L(k), D + 2 * LAM)
    if x.family == "L" and y.family == "I":
        return Element.gen(I(k), D + (1 - b) * LAM)
    if x.family == "I" and y.family == "L":
        return -_clw_bracket(b, y, x).map_coeffs(skew_subs)
    if x.family == "I" and y.family == "I":
        return Element()
    raise ValueError(f"unknown generator families {x.family}, {y.family}")


def clw_bracket(b, x: Gen, y: Gen) -> Element:
    return _clw_bracket(rat(b), Gen(*x), Gen(*y))


@dataclass
class TableAlgebra(AlgebraSpec):
    """Finite table of generator brackets with an explicit grading.

    A pair missing from the table is obtained from its reverse by the skew
    rule; if neither is stored the lookup raises :class:`WindowExceeded`.
    """

    grading: dict[Gen, int]
    entries: dict[tuple[Gen, Gen], Element] = field(default_factory=dict)

    def gen_bracket(self, x: Gen, y: Gen) -> Element:
        if (x, y) in self.entries:
            return self.entries[(x, y)]
        if (y, x) in self.entries:
            return -self.entries[(y, x)].map_coeffs(skew_subs)
        raise WindowExceeded(x, y)

    def degree(self, g: Gen) -> int:
        if g not in self.grading:
            raise WindowExceeded(g, g)
        return self.grading[g]

    def generators(self, window=None) -> list[Gen]:
        gens = sorted(self.grading)
        if window is None:
            return gens
        idx = set(_window_range(window))
        return [g for g in gens if g.index in idx]

    @classmethod
    def from_algebra(cls, alg: AlgebraSpec, window) -> "TableAlgebra":
        gens = alg.generators(window)
        known = set(gens)
        entries = {}
        for x in gens:
            for y in gens:
                val = alg.gen_bracket(x, y)
                if all(g in known for g in val.support()):
                    entries[(x, y)] = val
        return cls({g: alg.degree(g) for g in gens}, entries)

    def with_entry(self, x: Gen, y: Gen, value: Element) -> "TableAlgebra":
        entries = dict(self.entries)
        entries[(x, y)] = value
        if (y, x) in entries and x != y:
            del entries[(y, x)]
        return TableAlgebra(dict(self.grading), entries)

    def to_json(self) -> dict:
        return {
            "generators": [
                {"family": g.family, "index": g.index, "degree": d} for g, d in sorted(self.grading.items())
            ],
            "brackets": [
                {"left": x.to_json(), "right": y.to_json(), "value": v.to_json()}
                for (x, y), v in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "TableAlgebra":
        grading = {Gen(g["family"], int(g["index"])): int(g.get("degree", g["index"])) for g in obj["generators"]}
        entries = {}
        for br in obj.get("brackets", []):
            entries[(Gen.from_json(br["left"]), Gen.from_json(br["right"]))] = Element.from_json(br["value"])
        return cls(grading, entries)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "TableAlgebra":
        return cls.from_json(json.loads(text))


def extend_bracket(alg: AlgebraSpec, x: Element, y: Element) -> Element:
    return alg.bracket(x, y, LAM)


# ---------------------------------------------------------------------------
# axiom checks


@dataclass
class Violation:
    axiom: str
    inputs: tuple
    residual: object

    def to_json(self) -> dict:
        res = self.residual
        return {
            "axiom": self.axiom,
            "inputs": [str(x) for x in self.inputs],
            "residual": res.to_json() if hasattr(res, "to_json") else (res.to_records() if isinstance(res, Poly) else str(res)),
        }


@dataclass
class AxiomReport:
    violations: list[Violation] = field(default_factory=list)
    checked: int = 0
    skipped: int = 0

    @property
    def status(self) -> str:
        return "pass" if not self.violations else "fail"

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: "AxiomReport") -> "AxiomReport":
        return AxiomReport(self.violations + other.violations, self.checked + other.checked, self.skipped + other.skipped)

    def to_json(self, limit: int = 20) -> dict:
        return {
            "status": self.status,
            "checked": self.checked,
            "skipped": self.skipped,
            "violations": [v.to_json() for v in self.violations[:limit]],
            "violation_count": len(self.violations),
        }


def check_skew(alg: AlgebraSpec, window) -> AxiomReport:
    rep = AxiomReport()
    gens = alg.generators(window)
    for x in gens:
        for y in gens:
            try:
                res = alg.gen_bracket(x, y) + alg.gen_bracket(y, x).map_coeffs(skew_subs)
            except WindowExceeded:
                rep.skipped += 1
                continue
            rep.checked += 1
            if res:
                rep.violations.append(Violation("skew", (x, y), res))
    return rep


def jacobi_residual(alg: AlgebraSpec, a: Element, b: Element, c: Element) -> Element:
    """[a_λ [b_μ c]] - [[a_λ b]_{λ+μ} c] - [b_μ [a_λ c]]"""
    return (
        alg.bracket(a, alg.bracket(b, c, MU), LAM)
        - alg.bracket(alg.bracket(a, b, LAM), c, LAM + MU)
        - alg.bracket(b, alg.bracket(a, c, LAM), MU)
    )


def check_jacobi(alg: AlgebraSpec, window) -> AxiomReport:
    rep = AxiomReport()
    gens = alg.generators(window)
    inner_mu: dict = {}
    inner_lam: dict = {}

    def br(memo, x, y, theta):
        if (x, y) not in memo:
            try:
                memo[(x, y)] = alg.bracket(Element.gen(x), Element.gen(y), theta)
            except WindowExceeded as e:
                memo[(x, y)] = e
        val = memo[(x, y)]
        if isinstance(val, WindowExceeded):
            raise val
        return val

    for x in gens:
        ex = Element.gen(x)
        for y in gens:
            ey = Element.gen(y)
            for z in gens:
                try:
                    res = (
                        alg.bracket(ex, br(inner_mu, y, z, MU), LAM)
                        - alg.bracket(br(inner_lam, x, y, LAM), Element.gen(z), LAM + MU)
                        - alg.bracket(ey, br(inner_lam, x, z, LAM), MU)
                    )
                except WindowExceeded:
                    rep.skipped += 1
                    continue
                rep.checked += 1
                if res:
                    rep.violations.append(Violation("jacobi", (x, y, z), res))
    return rep


def check_graded(alg: AlgebraSpec, window) -> AxiomReport:
    rep = AxiomReport()
    gens = alg.generators(window)
    for x in gens:
        for y in gens:
            try:
                val = alg.gen_bracket(x, y)
                target = alg.degree(x) + alg.degree(y)
                off = [g for g in val.support() if _safe_degree(alg, g) != target]
            except WindowExceeded:
                rep.skipped += 1
                continue
            rep.checked += 1
            if off:
                rep.violations.append(Violation("graded", (x, y), val))
    return rep


def _safe_degree(alg: AlgebraSpec, g: Gen):
    try:
        return alg.degree(g)
    except WindowExceeded:
        return None


def check_all(alg: AlgebraSpec, window) -> dict[str, AxiomReport]:
    return {"skew": check_skew(alg, window), "jacobi": check_jacobi(alg, window), "graded": check_graded(alg, window)}


def virasoro() -> TableAlgebra:
    """ℂ[∂]L_0 with [L λ L] = (∂+2λ)L."""
    return TableAlgebra({L(0): 0}, {(L(0), L(0)): Element.gen(L(0), D + 2 * LAM)})
