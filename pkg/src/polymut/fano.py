"""Fano triangles, fake-plane weights, the mutation Diophantine invariant,
and Markov-triple machinery."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .geom import Polygon, Vector2, is_primitive

WeightTriple = tuple[int, int, int]
MarkovTriple = tuple[int, int, int]


class NotATriangle(DomainError):
    pass


class NotFano(DomainError):
    pass


class NotWellFormed(DomainError):
    pass


class NotDivisible(DomainError):
    pass


@dataclass(frozen=True)
class FakePlaneData:
    """Weights plus the index of the vertex sublattice."""

    weights: WeightTriple
    multiplicity: int


@dataclass(frozen=True)
class DiophantineClass:
    """The equation m*x1*x2*x3 = k*(c1*x1^2 + c2*x2^2 + c3*x3^2) that the
    weights of a fake plane solve; c is the sorted squarefree-part multiset."""

    m: int
    k: int
    c: tuple[int, int, int]

    def to_json(self) -> dict:
        return {"m": self.m, "k": self.k, "c": list(self.c)}


def is_fano(P: Polygon) -> bool:
    """Origin strictly interior and all vertices primitive lattice points."""
    if P.dim() != 2 or not P.is_lattice():
        return False
    if not P.contains_origin_interior():
        return False
    return all(is_primitive(v) for v in P.vertices)


def _vertex_minors(v1: Vector2, v2: Vector2, v3: Vector2) -> tuple[int, int, int]:
    for v in (v1, v2, v3):
        if not v.is_integral():
            raise NotFano(f"triangle vertex is not a lattice point: {v}")
    d23 = v2.cross(v3)
    d13 = v1.cross(v3)
    d12 = v1.cross(v2)
    raw = (d23, -d13, d12)
    if all(r < 0 for r in raw):
        raw = tuple(-r for r in raw)
    if not all(r > 0 for r in raw):
        raise NotFano("vertices do not positively span the plane around the origin")
    return tuple(int(r) for r in raw)  # type: ignore[return-value]


def weights_of_vertices(v1: Vector2, v2: Vector2, v3: Vector2) -> WeightTriple:
    """Coprime positive (a,b,c) with a*v1 + b*v2 + c*v3 = 0, in vertex order."""
    raw = _vertex_minors(v1, v2, v3)
    g = math.gcd(*raw)
    return (raw[0] // g, raw[1] // g, raw[2] // g)


def _triangle_vertices(T: Polygon) -> tuple[Vector2, Vector2, Vector2]:
    if len(T.vertices) != 3:
        raise NotATriangle(f"expected a triangle, got {len(T.vertices)} vertices")
    return T.vertices  # type: ignore[return-value]


def weights(T: Polygon) -> WeightTriple:
    """Weights of the fake plane of a Fano triangle, in canonical vertex order."""
    v1, v2, v3 = _triangle_vertices(T)
    if not is_fano(T):
        raise NotFano("weights are defined for Fano triangles only")
    return weights_of_vertices(v1, v2, v3)


def multiplicity(T: Polygon) -> int:
    """Index of the sublattice generated by the three vertices.

    Equals the gcd of the three 2x2 vertex-pair determinants; the triangle
    presents a genuine weighted projective plane exactly when this is 1.
    """
    v1, v2, v3 = _triangle_vertices(T)
    return math.gcd(*_vertex_minors(v1, v2, v3))


def fake_plane_data(T: Polygon) -> FakePlaneData:
    return FakePlaneData(weights(T), multiplicity(T))


def _unimodular_elim(l1: int, l2: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """2x2 determinant-1 matrix sending the column (l1, l2) to (gcd, 0)."""
    g, x, y = _extgcd(l1, l2)
    return ((x, y), (-l2 // g, l1 // g))


def _extgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def triangle_from_weights(w: WeightTriple) -> Polygon:
    """A Fano triangle with the given pairwise-coprime weights and
    multiplicity 1, built by completing the weight column to a basis of Z^3
    and projecting the standard basis along the complementary rows."""
    l1, l2, l3 = w
    if min(w) < 1:
        raise NotWellFormed("weights must be positive")
    for i, j in ((0, 1), (0, 2), (1, 2)):
        if math.gcd(w[i], w[j]) != 1:
            raise NotWellFormed(f"weights {w[i]} and {w[j]} share a factor")
    # Row-reduce (l1,l2,l3) to e1 with unimodular row operations; the two
    # trailing rows of the accumulated matrix kill the weight vector.
    (a, b), (c, d) = _unimodular_elim(l1, l2)
    g12 = a * l1 + b * l2
    A = [[a, b, 0], [c, d, 0], [0, 0, 1]]
    (e, f), (gg, hh) = _unimodular_elim(g12, l3)
    A = [
        [e * A[0][0], e * A[0][1], f],
        A[1],
        [gg * A[0][0], gg * A[0][1], hh],
    ]
    r2, r3 = A[1], A[2]
    verts = [Vector2(r2[j], r3[j]) for j in range(3)]
    T = Polygon(verts)
    got = sorted(weights(T))
    if got != sorted(w) or multiplicity(T) != 1:  # pragma: no cover - sanity
        raise AssertionError(f"triangle construction failed for {w}: got {got}")
    return T


def predicted_mutation_weights(w: WeightTriple, i: int) -> WeightTriple:
    """Weights after mutating away the i-th one (0-based): the other two
    weights followed by (their sum)^2 over the removed weight, reduced to
    coprime form."""
    if i not in (0, 1, 2):
        raise DomainError(f"weight index out of range: {i}")
    li = w[i]
    lj, lk = (w[j] for j in range(3) if j != i)
    s2 = (lj + lk) ** 2
    if s2 % li != 0:
        raise NotDivisible(f"{li} does not divide ({lj}+{lk})^2 = {s2}")
    out = (lj, lk, s2 // li)
    g = math.gcd(*out)
    return (out[0] // g, out[1] // g, out[2] // g)


def squarefree_part(n: int) -> tuple[int, int]:
    """(c, x) with n = c * x^2 and c squarefree, by trial division."""
    if n < 1:
        raise DomainError("squarefree part needs a positive integer")
    c, x = 1, 1
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if e % 2:
                c *= p
            x *= p ** (e // 2)
        p += 1 if p == 2 else 2
    c *= m
    return c, x


def diophantine_class(w: WeightTriple) -> DiophantineClass:
    """Invariant of the relabelled-mutation chain through the weights w."""
    parts = [squarefree_part(l) for l in w]
    cs = tuple(sorted(c for c, _ in parts))
    xprod = 1
    for _, x in parts:
        xprod *= x
    mk = Fraction(sum(w), xprod)
    m, k = mk.numerator, mk.denominator
    # identity check: m*x1*x2*x3 == k*sum(ci*xi^2) by construction
    assert m * xprod == k * sum(c * x * x for c, x in parts)
    return DiophantineClass(m, k, cs)  # type: ignore[arg-type]


def is_markov(t: MarkovTriple) -> bool:
    a, b, c = t
    return a > 0 and b > 0 and c > 0 and a * a + b * b + c * c == 3 * a * b * c


def markov_neighbors(t: MarkovTriple) -> tuple[MarkovTriple, ...]:
    """The distinct Vieta mutations of a Markov triple, each sorted."""
    if not is_markov(t):
        raise DomainError(f"not a Markov triple: {t}")
    a, b, c = t
    raw = [
        (3 * b * c - a, b, c),
        (a, 3 * a * c - b, c),
        (a, b, 3 * a * b - c),
    ]
    out = sorted({tuple(sorted(r)) for r in raw})
    return tuple(out)  # type: ignore[return-value]


def markov_tree(depth: int) -> set[MarkovTriple]:
    """All triples reachable from (1,1,1) in at most `depth` Vieta steps."""
    if depth < 0:
        raise DomainError("depth must be nonnegative")
    seen: set[MarkovTriple] = {(1, 1, 1)}
    frontier: set[MarkovTriple] = {(1, 1, 1)}
    for _ in range(depth):
        nxt: set[MarkovTriple] = set()
        for t in frontier:
            for n in markov_neighbors(t):
                if n not in seen:
                    seen.add(n)
                    nxt.add(n)
        frontier = nxt
    return seen
