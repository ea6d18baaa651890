"""Exact 2D lattice geometry over the rationals.

All coordinates are `fractions.Fraction`; every predicate is exact, so
results compare with ``==``.  Vectors, segments and polygons are immutable
values and safe to share between threads.

A vector may play the role of a point of the one-parameter-subgroup
lattice or of a character (height function); the pairing between the two
is the dot product.  Which role a vector plays is a documentation-level
convention, not a runtime tag.

Polygons are stored canonically: counterclockwise, strictly convex (no
three collinear vertices), lexicographically smallest vertex first.
Points and segments are degenerate polygons (one or two vertices) and
participate in all operations without special-casing by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import DomainError


class OriginNotInterior(DomainError):
    pass


class ZeroVector(DomainError):
    pass


class NotFullDimensional(DomainError):
    pass


class NotLattice(DomainError):
    pass


RationalLike = Union[int, str, Fraction]

# 2x2 integer matrix as nested tuples ((a, b), (c, d)), acting on column vectors.
Mat2 = tuple[tuple[int, int], tuple[int, int]]


def to_fraction(v: RationalLike) -> Fraction:
    """Coerce an int, Fraction or 'p/q' string to an exact Fraction."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise DomainError(f"not an exact rational: {v!r}")


def fraction_str(q: Fraction) -> str:
    """Canonical string of a reduced fraction: '5', '-1/2'."""
    q = Fraction(q)
    return str(q)


@dataclass(frozen=True, order=True)
class Vector2:
    """A point/vector of the rational plane with exact coordinates."""

    x: Fraction
    y: Fraction

    def __init__(self, x: RationalLike, y: RationalLike):
        object.__setattr__(self, "x", to_fraction(x))
        object.__setattr__(self, "y", to_fraction(y))

    def __add__(self, other: "Vector2") -> "Vector2":
        return Vector2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vector2") -> "Vector2":
        return Vector2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Vector2":
        return Vector2(-self.x, -self.y)

    def scale(self, r: RationalLike) -> "Vector2":
        r = to_fraction(r)
        return Vector2(r * self.x, r * self.y)

    def dot(self, other: "Vector2") -> Fraction:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vector2") -> Fraction:
        return self.x * other.y - self.y * other.x

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    def as_ints(self) -> tuple[int, int]:
        if not self.is_integral():
            raise NotLattice(f"not a lattice vector: {self}")
        return int(self.x), int(self.y)

    def __repr__(self) -> str:
        return f"({fraction_str(self.x)}, {fraction_str(self.y)})"


ORIGIN = Vector2(0, 0)


def primitivize(v: Vector2) -> Vector2:
    """Divide an integer vector by the gcd of its components."""
    if v.is_zero():
        raise ZeroVector("cannot primitivize the zero vector")
    a, b = v.as_ints()
    g = math.gcd(a, b)
    return Vector2(a // g, b // g)


def is_primitive(v: Vector2) -> bool:
    if v.is_zero() or not v.is_integral():
        return False
    a, b = v.as_ints()
    return math.gcd(a, b) == 1


@dataclass(frozen=True)
class Segment:
    """A possibly degenerate segment; endpoints are stored lex-sorted."""

    a: Vector2
    b: Vector2

    def __init__(self, a: Vector2, b: Vector2):
        if (b.x, b.y) < (a.x, a.y):
            a, b = b, a
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def is_point(self) -> bool:
        return self.a == self.b

    def vertices(self) -> tuple[Vector2, ...]:
        return (self.a,) if self.is_point() else (self.a, self.b)

    def translate(self, v: Vector2) -> "Segment":
        return Segment(self.a + v, self.b + v)

    def lattice_length(self) -> int:
        """Number of primitive steps along an integral segment."""
        if self.is_point():
            return 0
        d = self.b - self.a
        dx, dy = d.as_ints()
        return math.gcd(dx, dy)

    def __repr__(self) -> str:
        return f"Segment[{self.a}, {self.b}]"


def _hull_of(points: Iterable[Vector2]) -> list[Vector2]:
    pts = sorted(set(points))
    if not pts:
        raise DomainError("empty point set has no hull")
    if len(pts) == 1:
        return pts

    def chain(seq: Sequence[Vector2]) -> list[Vector2]:
        out: list[Vector2] = []
        for p in seq:
            while len(out) >= 2 and (out[-1] - out[-2]).cross(p - out[-1]) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if not hull:  # all points equal (cannot happen: len(pts) > 1 and distinct)
        hull = [pts[0]]
    if len(hull) == 1 and len(pts) > 1:  # collinear input collapses to extremes
        hull = [pts[0], pts[-1]]
    return hull


class Polygon:
    """Convex rational polygon in canonical vertex form.

    Construction runs a convex hull, so any point list yields the canonical
    representative: CCW, no collinear triples, lex-smallest vertex first.
    """

    __slots__ = ("vertices",)

    def __init__(self, points: Iterable[Vector2]):
        object.__setattr__(self, "vertices", tuple(_hull_of(points)))

    def __setattr__(self, *a):  # pragma: no cover - guard only
        raise AttributeError("Polygon is immutable")

    def __eq__(self, other) -> bool:
        return isinstance(other, Polygon) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return "Polygon[" + ", ".join(map(repr, self.vertices)) + "]"

    def dim(self) -> int:
        return min(len(self.vertices) - 1, 2)

    def is_lattice(self) -> bool:
        return all(v.is_integral() for v in self.vertices)

    def edges(self) -> list[tuple[Vector2, Vector2]]:
        v = self.vertices
        if len(v) == 1:
            return []
        if len(v) == 2:
            return [(v[0], v[1])]
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def translate(self, t: Vector2) -> "Polygon":
        return Polygon([v + t for v in self.vertices])

    def contains(self, p: Vector2, strict: bool = False) -> bool:
        if strict and self.dim() < 2:
            return False
        for n, c in _halfplanes(self):
            d = n.dot(p)
            if d < c or (strict and d == c):
                return False
        return True

    def contains_origin_interior(self) -> bool:
        return self.contains(ORIGIN, strict=True)


def convex_hull(points: Iterable[Vector2]) -> Polygon:
    """Minimal canonical polygon containing the given points."""
    return Polygon(points)


def dilate(P: Polygon, r: RationalLike) -> Polygon:
    return Polygon([v.scale(r) for v in P.vertices])


def apply_unimodular(U: Mat2, P: Polygon) -> Polygon:
    return Polygon([mat_apply(U, v) for v in P.vertices])


def mat_apply(U: Mat2, v: Vector2) -> Vector2:
    (a, b), (c, d) = U
    return Vector2(a * v.x + b * v.y, c * v.x + d * v.y)


def mat_det(U: Mat2) -> int:
    (a, b), (c, d) = U
    return a * d - b * c


def mat_mul(U: Mat2, V: Mat2) -> Mat2:
    (a, b), (c, d) = U
    (e, f), (g, h) = V
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def mat_inv_unimodular(U: Mat2) -> Mat2:
    det = mat_det(U)
    if det not in (1, -1):
        raise DomainError("matrix is not unimodular")
    (a, b), (c, d) = U
    return ((d // det, -b // det), (-c // det, a // det))


def area(P: Polygon) -> Fraction:
    """Euclidean area by the shoelace formula (0 for points and segments)."""
    v = P.vertices
    if len(v) < 3:
        return Fraction(0)
    s = Fraction(0)
    for i in range(len(v)):
        s += v[i].cross(v[(i + 1) % len(v)])
    return abs(s) / 2


def _halfplanes(P: Polygon) -> list[tuple[Vector2, Fraction]]:
    """Inequalities n.x >= c cutting out P, valid in every dimension."""
    v = P.vertices
    if len(v) == 1:
        p = v[0]
        return [
            (Vector2(1, 0), p.x),
            (Vector2(-1, 0), -p.x),
            (Vector2(0, 1), p.y),
            (Vector2(0, -1), -p.y),
        ]
    if len(v) == 2:
        a, b = v
        d = b - a
        n = Vector2(-d.y, d.x)
        return [
            (n, n.dot(a)),
            (-n, -n.dot(a)),
            (d, d.dot(a)),
            (-d, -d.dot(b)),
        ]
    out = []
    for a, b in P.edges():
        d = b - a
        n = Vector2(-d.y, d.x)  # inward for CCW order
        out.append((n, n.dot(a)))
    return out


def _clip(loop: list[Vector2], n: Vector2, c: Fraction) -> list[Vector2]:
    """One Sutherland-Hodgman step: keep the side n.x >= c."""
    if not loop:
        return []
    if len(loop) == 1:
        return loop if n.dot(loop[0]) >= c else []
    out: list[Vector2] = []
    m = len(loop)
    for i in range(m):
        cur, nxt = loop[i], loop[(i + 1) % m]
        fc = n.dot(cur) - c
        fn = n.dot(nxt) - c
        if fc >= 0:
            out.append(cur)
        if (fc > 0 > fn) or (fc < 0 < fn):
            t = fc / (fc - fn)
            out.append(cur + (nxt - cur).scale(t))
    return out


def intersect(P: Polygon, Q: Polygon) -> Optional[Polygon]:
    """Exact intersection of two convex polygons, or None if empty."""
    loop = list(P.vertices)
    for n, c in _halfplanes(Q):
        loop = _clip(loop, n, c)
        if not loop:
            return None
    return Polygon(loop)


def minkowski_sum(A: Polygon, B: Polygon) -> Polygon:
    return Polygon([a + b for a in A.vertices for b in B.vertices])


def minkowski_difference(A: Polygon, F: Polygon) -> Optional[Polygon]:
    """Maximal polygon G with G + F inside A, or None if there is none."""
    res: Optional[Polygon] = A.translate(-F.vertices[0])
    for f in F.vertices[1:]:
        res = intersect(res, A.translate(-f))
        if res is None:
            return None
    return res


def dual(P: Polygon) -> Polygon:
    """The polar dual {u : <u, v> >= -1 for all v in P}.

    Requires a full-dimensional polygon with the origin strictly interior;
    then the dual is again such a polygon and dual(dual(P)) == P.
    """
    if P.dim() != 2:
        raise NotFullDimensional("dual needs a full-dimensional polygon")
    if not P.contains_origin_interior():
        raise OriginNotInterior("dual needs the origin strictly inside")
    verts = []
    for a, b in P.edges():
        det = a.cross(b)
        verts.append(Vector2((a.y - b.y) / det, (b.x - a.x) / det))
    return Polygon(verts)


def height_range(P: Polygon, w: Vector2) -> tuple[Fraction, Fraction]:
    """Exact (min, max) of <w, v> over P."""
    if w.is_zero():
        raise ZeroVector("height function must be nonzero")
    hs = [w.dot(v) for v in P.vertices]
    return min(hs), max(hs)


def height_basis(w: Vector2) -> tuple[Vector2, Vector2, Vector2]:
    """For primitive w return (f0, vw, s) adapted to the grading by w.

    f0 spans the kernel of w, <w, vw> = 1, and s is the integral functional
    with s(f0) = 1, s(vw) = 0, so v -> (<w,v>, <s,v>) is unimodular with
    inverse (h, k) -> k*f0 + h*vw.
    """
    if not is_primitive(w):
        raise DomainError(f"height function must be primitive: {w}")
    p, q = w.as_ints()
    f0 = Vector2(-q, p)
    g, a, b = _extgcd(p, q)
    vw = Vector2(a, b)  # a*p + b*q == 1
    s = Vector2(-b, a)
    return f0, vw, s


def _extgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with x*a + y*b == g == gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_x, x = x, old_x - qt * x
        old_y, y = y, old_y - qt * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def _row_interval(P: Polygon, w: Vector2, h: Fraction) -> Optional[tuple[Fraction, Fraction]]:
    """Exact k-interval of the rational slice of P at height h, in the
    coordinates of height_basis(w); None if the slice is empty."""
    f0, vw, s = height_basis(w)
    hs = [w.dot(v) for v in P.vertices]
    lo = min(hs)
    hi = max(hs)
    if h < lo or h > hi:
        return None
    ks: list[Fraction] = []
    verts = P.vertices
    n = len(verts)
    if n == 1:
        return (s.dot(verts[0]), s.dot(verts[0]))
    for i in range(n if n > 2 else 1):
        a = verts[i]
        b = verts[(i + 1) % n]
        ha, hb = w.dot(a), w.dot(b)
        if (ha - h) * (hb - h) > 0:
            continue
        if ha == hb:  # edge inside the slice line
            ks.extend([s.dot(a), s.dot(b)])
        else:
            t = (h - ha) / (hb - ha)
            ks.append(s.dot(a) + t * (s.dot(b) - s.dot(a)))
    if not ks:
        return None
    return min(ks), max(ks)


def lattice_slice(P: Polygon, w: Vector2, h: int) -> Optional[Segment]:
    """Hull of the lattice points of P at height h (not the rational slice)."""
    iv = _row_interval(P, w, Fraction(h))
    if iv is None:
        return None
    lo, hi = iv
    klo = math.ceil(lo)
    khi = math.floor(hi)
    if klo > khi:
        return None
    f0, vw, _ = height_basis(w)
    base = vw.scale(h)
    return Segment(base + f0.scale(klo), base + f0.scale(khi))


def lattice_points(P: Polygon) -> list[Vector2]:
    """All lattice points in P, sorted lexicographically."""
    if P.dim() == 0:
        v = P.vertices[0]
        return [v] if v.is_integral() else []
    out = []
    ylo = math.ceil(min(v.y for v in P.vertices))
    yhi = math.floor(max(v.y for v in P.vertices))
    for k in range(ylo, yhi + 1):
        iv = _row_interval(P, Vector2(0, 1), Fraction(k))
        if iv is None:
            continue
        lo, hi = iv
        # _row_interval with w=(0,1) parametrizes by s=(-1,0): k-coords are -x
        xlo = math.ceil(-hi)
        xhi = math.floor(-lo)
        out.extend(Vector2(x, k) for x in range(xlo, xhi + 1))
    out.sort()
    return out


def _solve_pair_map(d1: Vector2, d2: Vector2, e1: Vector2, e2: Vector2) -> Optional[Mat2]:
    """Integer U with U d1 = e1 and U d2 = e2, if unimodular; else None."""
    det = d1.cross(d2)
    u00 = (e1.x * d2.y - e2.x * d1.y) / det
    u01 = (-e1.x * d2.x + e2.x * d1.x) / det
    u10 = (e1.y * d2.y - e2.y * d1.y) / det
    u11 = (-e1.y * d2.x + e2.y * d1.x) / det
    if any(u.denominator != 1 for u in (u00, u01, u10, u11)):
        return None
    U = ((int(u00), int(u01)), (int(u10), int(u11)))
    if mat_det(U) not in (1, -1):
        return None
    return U


def lattice_equivalent(P: Polygon, Q: Polygon) -> Optional[tuple[Mat2, Vector2]]:
    """Unimodular U and integer translation t with U*P + t == Q, or None.

    Brute-force vertex matching: anchor an edge-adjacent basis at one vertex
    of P and try every vertex of Q with both orientations.
    """
    _require_lattice_2d(P, Q)
    vp, vq = P.vertices, Q.vertices
    n = len(vp)
    if len(vq) != n or area(P) != area(Q):
        return None
    p0 = vp[0]
    d1 = vp[1] - p0
    d2 = vp[-1] - p0
    qset = set(vq)
    for i in range(n):
        q0 = vq[i]
        for sgn in (1, -1):
            e1 = vq[(i + sgn) % n] - q0
            e2 = vq[(i - sgn) % n] - q0
            U = _solve_pair_map(d1, d2, e1, e2)
            if U is None:
                continue
            t = q0 - mat_apply(U, p0)
            if not t.is_integral():
                continue
            if {mat_apply(U, v) + t for v in vp} == qset:
                return U, t
    return None


def linear_equivalent(P: Polygon, Q: Polygon) -> Optional[Mat2]:
    """Unimodular U with U*P == Q (no translation), or None.

    This is the right equivalence for Fano polygons, whose origin is pinned.
    """
    _require_lattice_2d(P, Q)
    vp, vq = P.vertices, Q.vertices
    n = len(vp)
    if len(vq) != n or area(P) != area(Q):
        return None
    pa = vp[0]
    pb = next((v for v in vp[1:] if pa.cross(v) != 0), None)
    if pb is None:
        return None
    qset = set(vq)
    for qa in vq:
        for qb in vq:
            if qa == qb:
                continue
            U = _solve_pair_map(pa, pb, qa, qb)
            if U is None:
                continue
            if {mat_apply(U, v) for v in vp} == qset:
                return U
    return None


def _require_lattice_2d(*polys: Polygon) -> None:
    for P in polys:
        if P.dim() != 2:
            raise NotFullDimensional("equivalence needs full-dimensional polygons")
        if not P.is_lattice():
            raise NotLattice("equivalence needs lattice polygons")


# --- JSON interchange -------------------------------------------------------

def vector_to_json(v: Vector2) -> list[str]:
    return [fraction_str(v.x), fraction_str(v.y)]


def vector_from_json(obj) -> Vector2:
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise DomainError(f"bad vector: {obj!r}")
    return Vector2(_rat_from_json(obj[0]), _rat_from_json(obj[1]))


def _rat_from_json(v) -> Fraction:
    if isinstance(v, bool) or isinstance(v, float):
        raise DomainError(f"coordinates must be exact integers or 'p/q' strings: {v!r}")
    return to_fraction(v)


def polygon_to_json(P: Polygon) -> dict:
    return {"vertices": [vector_to_json(v) for v in P.vertices]}


def polygon_from_json(obj) -> Polygon:
    pts = parse_vertices(obj)
    return Polygon(pts)


def parse_vertices(obj) -> list[Vector2]:
    """Vertex list from a polygon JSON object, in the order given."""
    if not isinstance(obj, dict) or "vertices" not in obj:
        raise DomainError("polygon JSON must be an object with a 'vertices' key")
    vs = obj["vertices"]
    if not isinstance(vs, list) or not vs:
        raise DomainError("polygon 'vertices' must be a nonempty list")
    return [vector_from_json(v) for v in vs]


def segment_to_json(s: Optional[Segment]):
    if s is None:
        return None
    return {"a": vector_to_json(s.a), "b": vector_to_json(s.b)}
