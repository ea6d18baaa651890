"""Laurent polynomials in two variables with exact rational coefficients:
parsing, ring arithmetic, algebraic mutations and period sequences."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DomainError
from .geom import Polygon, Vector2
from .mutation import MutationData, factor_for

Exponent = tuple[int, int]

VAR_NAMES = ("x", "y")
_ALIASES = {"x": 0, "x1": 0, "y": 1, "x2": 1}


class LaurentSyntaxError(DomainError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class ZeroDenominator(DomainError):
    pass


class ZeroPolynomial(DomainError):
    pass


class DivisibilityFails(DomainError):
    def __init__(self, grade: int):
        super().__init__(f"coefficient of grade {grade} is not divisible by g^{grade}")
        self.grade = grade


class LaurentPoly:
    """Finite map from integer exponent pairs to nonzero rational
    coefficients, with exact ring arithmetic."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Exponent, Fraction] | None = None):
        cleaned: dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            c = Fraction(c)
            if c != 0:
                cleaned[(int(e[0]), int(e[1]))] = c
        object.__setattr__(self, "terms", cleaned)

    def __setattr__(self, *a):  # pragma: no cover - guard only
        raise AttributeError("LaurentPoly is immutable")

    # --- constructors ---

    @staticmethod
    def zero() -> "LaurentPoly":
        return LaurentPoly({})

    @staticmethod
    def const(c) -> "LaurentPoly":
        return LaurentPoly({(0, 0): Fraction(c)})

    @staticmethod
    def monomial(e1: int, e2: int, c=1) -> "LaurentPoly":
        return LaurentPoly({(e1, e2): Fraction(c)})

    # --- queries ---

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, e1: int, e2: int) -> Fraction:
        return self.terms.get((e1, e2), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coefficient(0, 0)

    def support(self) -> list[Exponent]:
        return sorted(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # --- ring operations ---

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return LaurentPoly(out)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        out: dict[Exponent, Fraction] = {}
        for (a1, a2), ca in self.terms.items():
            for (b1, b2), cb in other.terms.items():
                e = (a1 + b1, a2 + b2)
                out[e] = out.get(e, Fraction(0)) + ca * cb
        return LaurentPoly(out)

    def scale(self, c) -> "LaurentPoly":
        c = Fraction(c)
        return LaurentPoly({e: c * v for e, v in self.terms.items()})

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if len(self.terms) != 1:
                raise DomainError("negative powers need a single monomial")
            return _mono_pow(self, n)
        out = LaurentPoly.const(1)
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # --- rendering ---

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            factors = []
            for name, exp in zip(VAR_NAMES, e):
                if exp == 1:
                    factors.append(name)
                elif exp != 0:
                    factors.append(f"{name}^{exp}")
            body = "*".join(factors)
            if not body:
                parts.append((c < 0, str(abs(c))))
            elif abs(c) == 1:
                parts.append((c < 0, body))
            else:
                parts.append((c < 0, f"{abs(c)}*{body}"))
        out = []
        for i, (neg, text) in enumerate(parts):
            if i == 0:
                out.append(("-" if neg else "") + text)
            else:
                out.append((" - " if neg else " + ") + text)
        return "".join(out)

    def __repr__(self) -> str:
        return f"LaurentPoly({self.render()})"


def _mono_pow(poly: LaurentPoly, n: int) -> LaurentPoly:
    ((e1, e2), c), = poly.terms.items()
    return LaurentPoly({(n * e1, n * e2): c**n})


class _Scanner:
    def __init__(self, s: str):
        self.s = s
        self.i = 0

    def skip_ws(self) -> None:
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self) -> tuple[str, str, int]:
        self.skip_ws()
        i = self.i
        s = self.s
        if i >= len(s):
            return ("end", "", i)
        ch = s[i]
        if ch.isdigit():
            j = i
            while j < len(s) and s[j].isdigit():
                j += 1
            return ("num", s[i:j], i)
        if ch.isalpha():
            j = i
            while j < len(s) and (s[j].isalnum() or s[j] == "_"):
                j += 1
            return ("name", s[i:j], i)
        if ch in "+-*/^()":
            return ("op", ch, i)
        raise LaurentSyntaxError(f"unexpected character {ch!r}", i)

    def advance(self, tok: tuple[str, str, int]) -> None:
        self.i = tok[2] + len(tok[1])


class _Parser:
    def __init__(self, s: str):
        self.sc = _Scanner(s)

    def parse(self) -> LaurentPoly:
        poly = self._expr()
        kind, val, pos = self.sc.peek()
        if kind != "end":
            raise LaurentSyntaxError(f"unexpected {val!r}", pos)
        return poly

    def _expr(self) -> LaurentPoly:
        sign = 1
        tok = self.sc.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.sc.advance(tok)
            sign = -1 if tok[1] == "-" else 1
        acc = self._term().scale(sign)
        while True:
            kind, val, _ = self.sc.peek()
            if kind == "op" and val in "+-":
                self.sc.advance(self.sc.peek())
                nxt = self._term()
                acc = acc + (nxt.scale(-1) if val == "-" else nxt)
            else:
                return acc

    def _term(self) -> LaurentPoly:
        acc = self._factor()
        while True:
            kind, val, _ = self.sc.peek()
            if kind == "op" and val == "*":
                self.sc.advance(self.sc.peek())
                acc = acc * self._factor()
            elif kind in ("num", "name") or (kind == "op" and val == "("):
                acc = acc * self._factor()  # juxtaposition
            else:
                return acc

    def _factor(self) -> LaurentPoly:
        kind, val, pos = self.sc.peek()
        if kind == "num":
            self.sc.advance((kind, val, pos))
            num = int(val)
            kind2, val2, pos2 = self.sc.peek()
            if kind2 == "op" and val2 == "/":
                self.sc.advance((kind2, val2, pos2))
                kind3, val3, pos3 = self.sc.peek()
                if kind3 != "num":
                    raise LaurentSyntaxError("expected a denominator", pos3)
                self.sc.advance((kind3, val3, pos3))
                den = int(val3)
                if den == 0:
                    raise ZeroDenominator(f"zero denominator at offset {pos3}")
                return LaurentPoly.const(Fraction(num, den))
            return LaurentPoly.const(num)
        if kind == "name":
            if val not in _ALIASES:
                raise LaurentSyntaxError(f"unknown variable {val!r}", pos)
            self.sc.advance((kind, val, pos))
            axis = _ALIASES[val]
            exp = self._optional_exponent()
            e = [0, 0]
            e[axis] = exp
            return LaurentPoly.monomial(e[0], e[1])
        if kind == "op" and val == "(":
            self.sc.advance((kind, val, pos))
            inner = self._expr()
            kind2, val2, pos2 = self.sc.peek()
            if not (kind2 == "op" and val2 == ")"):
                raise LaurentSyntaxError("expected ')'", pos2)
            self.sc.advance((kind2, val2, pos2))
            exp = self._optional_exponent()
            if exp == 1:
                return inner
            if exp >= 0:
                return inner**exp
            if len(inner.terms) == 1:
                return _mono_pow(inner, exp)
            raise LaurentSyntaxError("negative power of a non-monomial", pos)
        raise LaurentSyntaxError(f"expected a term, found {val!r}" if val else "unexpected end of input", pos)

    def _optional_exponent(self) -> int:
        kind, val, _ = self.sc.peek()
        if not (kind == "op" and val == "^"):
            return 1
        self.sc.advance(self.sc.peek())
        sign = 1
        kind, val, pos = self.sc.peek()
        if kind == "op" and val == "-":
            self.sc.advance((kind, val, pos))
            sign = -1
            kind, val, pos = self.sc.peek()
        if kind != "num":
            raise LaurentSyntaxError("expected an integer exponent", pos)
        self.sc.advance((kind, val, pos))
        return sign * int(val)


def parse(s: str) -> LaurentPoly:
    """Parse an expression in x, y (aliases x1, x2) with integer or p/q
    coefficients, signed integer exponents, and parenthesized
    subexpressions with integer powers (expanded eagerly)."""
    return _Parser(s).parse()


def render(f: LaurentPoly) -> str:
    """Canonical string form; parse(render(f)) == f."""
    return f.render()


def div_exact(f: LaurentPoly, g: LaurentPoly) -> Optional[LaurentPoly]:
    """Exact quotient f/g in the Laurent ring, or None when not divisible.

    Monomial units are stripped first; divisibility then reduces to exact
    division of ordinary polynomials, decided by reduction against the
    lex-leading term of the divisor.
    """
    if g.is_zero():
        raise DomainError("division by the zero polynomial")
    if f.is_zero():
        return LaurentPoly.zero()
    fs, fshift = _strip_units(f)
    gs, gshift = _strip_units(g)
    lt_g = max(gs)
    lc_g = gs[lt_g]
    rem = dict(fs)
    quo: dict[Exponent, Fraction] = {}
    while rem:
        lt_r = max(rem)
        d = (lt_r[0] - lt_g[0], lt_r[1] - lt_g[1])
        if d[0] < 0 or d[1] < 0:
            return None
        c = rem[lt_r] / lc_g
        quo[d] = c
        for e, ce in gs.items():
            key = (e[0] + d[0], e[1] + d[1])
            nv = rem.get(key, Fraction(0)) - c * ce
            if nv == 0:
                rem.pop(key, None)
            else:
                rem[key] = nv
    shift = (fshift[0] - gshift[0], fshift[1] - gshift[1])
    return LaurentPoly({(e[0] + shift[0], e[1] + shift[1]): c for e, c in quo.items()})


def _strip_units(f: LaurentPoly) -> tuple[dict[Exponent, Fraction], Exponent]:
    m1 = min(e[0] for e in f.terms)
    m2 = min(e[1] for e in f.terms)
    return {(e[0] - m1, e[1] - m2): c for e, c in f.terms.items()}, (m1, m2)


def newton_polytope(f: LaurentPoly) -> Polygon:
    """Convex hull of the exponent vectors."""
    if f.is_zero():
        raise ZeroPolynomial("the zero polynomial has no Newton polytope")
    return Polygon([Vector2(e1, e2) for e1, e2 in f.terms])


@dataclass(frozen=True)
class MutationSpec:
    """Which variable gets divided, and the Laurent polynomial g in the
    other variable that divides it."""

    divide: str  # "x" or "y"
    g: LaurentPoly

    def __post_init__(self):
        if self.divide not in VAR_NAMES:
            raise DomainError(f"divide must be one of {VAR_NAMES}: {self.divide!r}")
        if self.g.is_zero():
            raise DomainError("g must be nonzero")
        other = self.other_axis
        if any(e[self.axis] != 0 for e in self.g.terms):
            raise DomainError(f"g may only involve {VAR_NAMES[other]}")

    @property
    def axis(self) -> int:
        return _ALIASES[self.divide]

    @property
    def other_axis(self) -> int:
        return 1 - self.axis


def _grades(f: LaurentPoly, axis: int) -> dict[int, LaurentPoly]:
    out: dict[int, dict[Exponent, Fraction]] = {}
    for e, c in f.terms.items():
        i = e[axis]
        rest = list(e)
        rest[axis] = 0
        out.setdefault(i, {})[tuple(rest)] = c  # type: ignore[index]
    return {i: LaurentPoly(t) for i, t in out.items()}


def algebraic_mutate(f: LaurentPoly, spec: MutationSpec, strict: bool = False) -> LaurentPoly:
    """Substitute the divided variable v by v/g: writing f as a sum of
    graded pieces f_i * v^i, positive grades are divided by g^i (raising
    DivisibilityFails if impossible) and negative grades are multiplied.

    The deformation story needs the origin inside the Newton polytope and
    grades on both sides of zero; by default a violation only warns.
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot mutate the zero polynomial")
    axis = spec.axis
    grades = _grades(f, axis)
    k, l = min(grades), max(grades)
    origin_ok = newton_polytope(f).contains(Vector2(0, 0))
    if not (k < 0 < l) or not origin_ok:
        msg = (
            "mutation input does not satisfy the deformation hypotheses "
            f"(grades span [{k}, {l}], origin inside Newton polytope: {origin_ok})"
        )
        if strict:
            raise DomainError(msg)
        warnings.warn(msg, stacklevel=2)
    out = LaurentPoly.zero()
    for i in sorted(grades):
        fi = grades[i]
        if i > 0:
            q = div_exact(fi, spec.g**i)
            if q is None:
                raise DivisibilityFails(i)
        elif i < 0:
            q = fi * spec.g ** (-i)
        else:
            q = fi
        e = [0, 0]
        e[axis] = i
        out = out + q * LaurentPoly.monomial(e[0], e[1])
    return out


def derive_mutation_data(f: LaurentPoly, spec: MutationSpec) -> tuple[MutationData, Vector2]:
    """Mutation data on the Newton polygon implied by an algebraic mutation.

    Returns (md, c): md has w = -(unit of the divided axis) and the factor
    translated to start at the origin; c is the translation from the true
    Newton segment of g, so Newt(mutate(f)) equals the md-mutation of
    Newt(f) sheared by v -> v + <w, v> * c (c = 0 whenever g has a nonzero
    constant term).
    """
    axis = spec.axis
    w = Vector2(0, -1) if axis == 1 else Vector2(-1, 0)
    exps = [e[spec.other_axis] for e in spec.g.terms]
    lo, hi = min(exps), max(exps)
    t = hi - lo
    e = [0, 0]
    e[spec.other_axis] = lo
    c = Vector2(e[0], e[1])
    md = factor_for(newton_polytope(f), w, t)
    return md, c


def period_sequence(f: LaurentPoly, dmax: int) -> list[Fraction]:
    """Constant terms of f^d for d = 0..dmax (the period coefficients)."""
    if dmax < 0:
        raise DomainError("dmax must be nonnegative")
    out = [Fraction(1)]
    power = LaurentPoly.const(1)
    for _ in range(dmax):
        power = power * f
        out.append(power.constant_term())
    return out
