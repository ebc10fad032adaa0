"""Exact rational arithmetic: scalars, polynomials in (∂, λ, μ), nullspaces.

Scalars are ``gmpy2.mpq`` values.  A :class:`Poly` is a sparse map from
exponent triples ``(d, l, m)`` (powers of ∂, λ, μ) to nonzero rationals.
A :class:`LinPoly` is a polynomial whose coefficients are linear forms in
named unknowns; it is what the solvers push through the same bracket code
the checkers use.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence, Union

from gmpy2 import mpq

Rat = type(mpq(0))
Exp = tuple[int, int, int]

VARS = ("d", "l", "m")
_VAR_INDEX = {"d": 0, "l": 1, "m": 2}


_RAT_RE = re.compile(r"[+-]?\d+(?:/\d+)?")


def rat(x) -> Rat:
    """Coerce int, Fraction, mpq or a ``"p/q"`` string to an exact rational."""
    if isinstance(x, Rat):
        return x
    if isinstance(x, str):
        if not _RAT_RE.fullmatch(x.strip()):
            raise ValueError(f"expected an integer or p/q literal, got {x!r}")
        return mpq(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact scalars")
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return mpq(int(x.numerator), int(x.denominator))
    return mpq(x)


def rat_str(x) -> str:
    return str(rat(x))


class Poly:
    """Immutable sparse polynomial in ∂, λ, μ with rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exp, object] | None = None):
        t = {}
        if terms:
            for e, c in terms.items():
                c = rat(c)
                if c:
                    t[tuple(e)] = c
        self._terms: dict[Exp, Rat] = t
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = object.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(0, 0, 0): c})

    @classmethod
    def var(cls, name: str) -> "Poly":
        e = [0, 0, 0]
        e[_VAR_INDEX[name]] = 1
        return cls({tuple(e): 1})

    @classmethod
    def monomial(cls, d: int = 0, l: int = 0, m: int = 0, c=1) -> "Poly":
        return cls({(d, l, m): c})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[Exp, Rat]:
        return dict(self._terms)

    def items(self):
        """Terms in canonical (lexicographic exponent) order."""
        return sorted(self._terms.items())

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coeff(self, d: int = 0, l: int = 0, m: int = 0) -> Rat:
        return self._terms.get((d, l, m), mpq(0))

    def degree(self, var: str | None = None) -> int:
        """Degree in one variable, or total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        if var is None:
            return max(sum(e) for e in self._terms)
        k = _VAR_INDEX[var]
        return max(e[k] for e in self._terms)

    def variables(self) -> set[str]:
        return {VARS[k] for e in self._terms for k in range(3) if e[k]}

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self._terms == other._terms
        if isinstance(other, (int, Rat)) or hasattr(other, "denominator"):
            return self._terms == Poly.const(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, LinPoly):
            return other + self
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        t = dict(self._terms)
        for e, c in other._terms.items():
            s = t.get(e, 0) + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return Poly._raw(t)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, LinPoly):
            return (-other) + self
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LinPoly):
            return other * self
        if isinstance(other, Poly):
            return _mul(self, other)
        c = _as_scalar(other)
        if c is None:
            return NotImplemented
        if not c:
            return ZERO
        return Poly._raw({e: v * c for e, v in self._terms.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, c) -> "Poly":
        return self * rat(c)

    def subs(self, mapping: Mapping[str, "Poly"] | None = None, **images) -> "Poly":
        """Simultaneous substitution of variables by polynomials."""
        imgs = dict(mapping or {})
        imgs.update(images)
        return _subs(self, tuple(_as_poly(imgs.get(v)) if v in imgs else None for v in VARS))

    # -- display ----------------------------------------------------------
    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items(), reverse=True):
            mono = "*".join(
                s if k == 1 else f"{s}^{k}" for s, k in zip(("∂", "λ", "μ"), e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_records(self) -> list[dict]:
        return [{"coeff": rat_str(c), "d": e[0], "l": e[1], "m": e[2]} for e, c in self.items()]

    @classmethod
    def from_records(cls, records: Iterable[Mapping]) -> "Poly":
        t: dict[Exp, Rat] = {}
        for r in records:
            e = (int(r.get("d", 0)), int(r.get("l", 0)), int(r.get("m", 0)))
            if min(e) < 0:
                raise ValueError(f"negative exponent in {r!r}")
            t[e] = t.get(e, 0) + rat(r["coeff"])
        return cls(t)


def _as_scalar(x):
    if isinstance(x, Rat):
        return x
    if isinstance(x, int) or hasattr(x, "denominator"):
        return rat(x)
    return None


def _as_poly(x):
    if isinstance(x, Poly) or x is None:
        return x
    c = _as_scalar(x)
    if c is None:
        return None
    return Poly.const(c)


_MUL_CACHE: dict = {}
_SUBS_CACHE: dict = {}
_CACHE_LIMIT = 200_000


def _mul(p: Poly, q: Poly) -> Poly:
    if not p._terms or not q._terms:
        return ZERO
    key = (p, q)
    hit = _MUL_CACHE.get(key)
    if hit is not None:
        return hit
    t: dict[Exp, Rat] = {}
    for (a0, a1, a2), x in p._terms.items():
        for (b0, b1, b2), y in q._terms.items():
            e = (a0 + b0, a1 + b1, a2 + b2)
            s = t.get(e, 0) + x * y
            if s:
                t[e] = s
            else:
                del t[e]
    out = Poly._raw(t)
    if len(_MUL_CACHE) > _CACHE_LIMIT:
        _MUL_CACHE.clear()
    _MUL_CACHE[key] = out
    return out


def _subs(p: Poly, images: tuple) -> Poly:
    if all(img is None for img in images) or not p._terms:
        return p
    key = (p, images)
    hit = _SUBS_CACHE.get(key)
    if hit is not None:
        return hit
    powers: list[dict[int, Poly]] = [{0: ONE} for _ in range(3)]

    def power(k: int, n: int) -> Poly:
        cache = powers[k]
        if n not in cache:
            cache[n] = power(k, n - 1) * images[k]
        return cache[n]

    out = ZERO
    for e, c in p._terms.items():
        kept = [0, 0, 0]
        term = ONE
        for k in range(3):
            if images[k] is None:
                kept[k] = e[k]
            elif e[k]:
                term = term * power(k, e[k])
        out = out + term * Poly._raw({tuple(kept): c})
    if len(_SUBS_CACHE) > _CACHE_LIMIT:
        _SUBS_CACHE.clear()
    _SUBS_CACHE[key] = out
    return out


ZERO = Poly()
ONE = Poly.const(1)
D = Poly.var("d")
LAM = Poly.var("l")
MU = Poly.var("m")


def poly_arith(p: Poly, q: Poly | None, op: str, scalar=None) -> Poly:
    """Dispatch form of the four basic operations (``add``, ``sub``, ``mul``, ``scale``)."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "scale":
        return p.scale(scalar)
    raise ValueError(f"unknown op {op!r}")


def substitute(p: Poly, var: str, image: Poly) -> Poly:
    return p.subs({var: image})


class LinPoly:
    """Polynomial whose coefficients are linear forms in opaque unknown labels.

    Stored as ``label -> Poly``.  Multiplying two ``LinPoly`` values is refused:
    every residual the solvers build is linear in the unknowns.
    """

    __slots__ = ("_parts",)

    def __init__(self, parts: Mapping[str, Poly] | None = None):
        self._parts: dict[str, Poly] = {k: v for k, v in (parts or {}).items() if v}

    @classmethod
    def unknown(cls, label: str, poly: Poly = ONE) -> "LinPoly":
        return cls({label: poly})

    @property
    def parts(self) -> dict[str, Poly]:
        return dict(self._parts)

    def __bool__(self) -> bool:
        return bool(self._parts)

    def is_zero(self) -> bool:
        return not self._parts

    def labels(self) -> set[str]:
        return set(self._parts)

    def __add__(self, other):
        if isinstance(other, Poly) or _as_scalar(other) is not None:
            if not _as_poly(other):
                return self
            if not self._parts:
                # an empty form is just zero, so the sum stays a polynomial
                return _as_poly(other)
            raise TypeError("adding a constant polynomial to a linear form")
        if not isinstance(other, LinPoly):
            return NotImplemented
        out = dict(self._parts)
        for k, v in other._parts.items():
            s = out[k] + v if k in out else v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return LinPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "LinPoly":
        return LinPoly({k: -v for k, v in self._parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LinPoly):
            raise TypeError("product of two linear forms is not linear")
        if not isinstance(other, Poly):
            other = _as_poly(other)
            if other is None:
                return NotImplemented
        if not other:
            return LinPoly()
        return LinPoly({k: v * other for k, v in self._parts.items()})

    __rmul__ = __mul__

    def subs(self, mapping: Mapping[str, Poly] | None = None, **images) -> "LinPoly":
        return LinPoly({k: v.subs(mapping, **images) for k, v in self._parts.items()})

    def evaluate(self, values: Mapping[str, object]) -> Poly:
        """Plug numbers in for the unknowns (missing labels count as zero)."""
        out = ZERO
        for k, v in self._parts.items():
            c = values.get(k, 0)
            if c:
                out = out + v * rat(c)
        return out

    def rows(self) -> list[dict[str, Rat]]:
        """One linear form per monomial: the conditions for this polynomial to vanish."""
        by_mono: dict[Exp, dict[str, Rat]] = {}
        for label, poly in self._parts.items():
            for e, c in poly._terms.items():
                by_mono.setdefault(e, {})[label] = c
        return [by_mono[e] for e in sorted(by_mono)]

    def __repr__(self) -> str:
        return "LinPoly(" + ", ".join(f"{k}: {v}" for k, v in sorted(self._parts.items())) + ")"


Coeff = Union[Poly, LinPoly]


# ---------------------------------------------------------------------------
# linear systems


@dataclass
class LinSystem:
    labels: list[str]
    rows: list[dict[str, Rat]] = field(default_factory=list)

    def __post_init__(self):
        self.labels = list(self.labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate unknown labels")
        known = set(self.labels)
        for r in self.rows:
            bad = set(r) - known
            if bad:
                raise ValueError(f"row references undeclared unknowns {sorted(bad)[:3]}")

    def add(self, residual) -> None:
        """Require a residual (``LinPoly``, or iterable of them) to vanish identically."""
        if isinstance(residual, LinPoly):
            residual = [residual]
        known = set(self.labels)
        for lp in residual:
            for r in lp.rows():
                bad = set(r) - known
                if bad:
                    raise ValueError(f"residual references undeclared unknowns {sorted(bad)[:3]}")
                self.rows.append(r)


@dataclass
class SolutionSpace:
    labels: list[str]
    basis: list[dict[str, Rat]]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def vectors(self) -> list[tuple[Rat, ...]]:
        return [tuple(v.get(k, mpq(0)) for k in self.labels) for v in self.basis]

    def projected_rank(self, keep) -> int:
        """Rank of the basis after restricting to the labels selected by ``keep``."""
        return span_rank([{k: c for k, c in v.items() if keep(k)} for v in self.basis])


def _integer_row(row: Mapping[int, object]) -> dict[int, int]:
    vals = {k: rat(v) for k, v in row.items() if v}
    if not vals:
        return {}
    den = reduce(lcm, (int(v.denominator) for v in vals.values()), 1)
    ints = {k: int(v * den) for k, v in vals.items()}
    return _primitive(ints)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = reduce(gcd, row.values(), 0)
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g != 1:
        row = {k: v // g for k, v in row.items()}
    return row


def _echelon(rows: Iterable[dict[int, int]]) -> dict[int, dict[int, int]]:
    """Fraction-free row reduction; returns pivot column -> fully reduced row."""
    pivots: dict[int, dict[int, int]] = {}
    seen: set = set()
    for row in rows:
        if not row:
            continue
        key = frozenset(row.items())
        if key in seen:
            continue
        seen.add(key)
        row = dict(row)
        while row:
            col = min(row)
            prow = pivots.get(col)
            if prow is None:
                pivots[col] = _primitive(row)
                break
            a, p = row[col], prow[col]
            g = gcd(a, p)
            fa, fp = p // g, a // g
            new = {k: v * fa for k, v in row.items()}
            for k, v in prow.items():
                s = new.get(k, 0) - fp * v
                if s:
                    new[k] = s
                else:
                    new.pop(k, None)
            row = _primitive(new) if new else new
    # back substitution to reduced echelon form
    for col in sorted(pivots, reverse=True):
        prow = pivots[col]
        p = prow[col]
        for other_col, orow in pivots.items():
            if other_col >= col or col not in orow:
                continue
            a = orow[col]
            g = gcd(a, p)
            fa, fp = p // g, a // g
            new = {k: v * fa for k, v in orow.items()}
            for k, v in prow.items():
                s = new.get(k, 0) - fp * v
                if s:
                    new[k] = s
                else:
                    new.pop(k, None)
            pivots[other_col] = _primitive(new)
    return pivots


def nullspace(sys: LinSystem) -> SolutionSpace:
    """Exact basis of the solutions of ``sys`` (one vector per free unknown)."""
    index = {k: i for i, k in enumerate(sys.labels)}
    pivots = _echelon(_integer_row({index[k]: v for k, v in r.items()}) for r in sys.rows)
    free_deps: dict[int, list[tuple[int, Rat]]] = {}
    for col, row in pivots.items():
        p = row[col]
        for k, v in row.items():
            if k != col:
                free_deps.setdefault(k, []).append((col, mpq(-v, p)))
    basis = []
    for j, label in enumerate(sys.labels):
        if j in pivots:
            continue
        vec = {label: mpq(1)}
        for col, c in free_deps.get(j, ()):
            vec[sys.labels[col]] = c
        basis.append(vec)
    return SolutionSpace(list(sys.labels), basis)


def span_rank(vectors: Sequence[Mapping[str, object]]) -> int:
    """Rank of a family of sparse vectors."""
    order: dict[str, int] = {}
    for v in vectors:
        for k in v:
            order.setdefault(k, len(order))
    return len(_echelon(_integer_row({order[k]: c for k, c in v.items()}) for v in vectors))


def combine(coeffs: Sequence[object], vectors: Sequence[Mapping[str, object]]) -> dict[str, Rat]:
    out: dict[str, Rat] = {}
    for c, v in zip(coeffs, vectors):
        c = rat(c)
        if not c:
            continue
        for k, x in v.items():
            s = out.get(k, 0) + c * rat(x)
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def subspace_within(vectors: Sequence[Mapping[str, object]], allowed) -> list[dict[str, Rat]]:
    """Basis of the combinations of ``vectors`` supported on labels where ``allowed`` holds."""
    ys = [f"y{i}" for i in range(len(vectors))]
    rows: dict[str, dict[str, Rat]] = {}
    for y, v in zip(ys, vectors):
        for k, c in v.items():
            if not allowed(k):
                rows.setdefault(k, {})[y] = rat(c)
    space = nullspace(LinSystem(ys, list(rows.values())))
    out = []
    for sol in space.basis:
        vec = combine([sol.get(y, 0) for y in ys], vectors)
        if vec:
            out.append(vec)
    return out


def in_span(vector: Mapping[str, object], vectors: Sequence[Mapping[str, object]]) -> bool:
    return span_rank(list(vectors) + [vector]) == span_rank(vectors)


def solve_affine(labels: Sequence[str], rows: Sequence[tuple[Mapping[str, object], object]]):
    """Particular solution of ``sum(row) == rhs`` for every row, or ``None`` if inconsistent.

    Free unknowns are set to zero, so the answer is canonical.
    """
    one = "__rhs__"
    hom = [dict(r, **{one: -rat(rhs)}) if rhs else dict(r) for r, rhs in rows]
    index = {k: i for i, k in enumerate(labels)}
    index[one] = len(labels)
    pivots = _echelon(_integer_row({index[k]: v for k, v in r.items()}) for r in hom)
    if index[one] in pivots:
        return None
    sol = {k: mpq(0) for k in labels}
    for col, row in pivots.items():
        rhs = row.get(index[one], 0)
        sol[labels[col]] = mpq(-rhs, row[col])
    return sol
