"""Combinatorial mutations of Fano polygons.

A mutation is driven by a primitive height function w, a factor segment
F = conv(0, t*f0) lying in the kernel of w, and slab polytopes G_h at the
negative heights squeezed between the height-h vertices and the lattice
slice at height h.  The mutated polygon shrinks the negative-height slabs
and fattens the nonnegative slices by h copies of F.

Sign convention: for Laurent polynomials, dividing the second variable by
g(x) corresponds to w = (0,-1) with F = Newt(g); this is the unique choice
under which the Newton polygon of the mutated polynomial equals the
mutation of the Newton polygon.  CLI certificates record it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .errors import DomainError
from . import fano
from .geom import (
    Polygon,
    Segment,
    Vector2,
    height_basis,
    is_primitive,
    linear_equivalent,
    primitivize,
)


class NotPrimitive(DomainError):
    pass


class InvalidFactor(DomainError):
    pass


@dataclass(frozen=True)
class MutationData:
    """Height function w, factor conv(0, t*f0), and slab segments G_h.

    gh maps every height h in [h_min, -1] to the maximal slab (a Segment)
    or to None where no slab is needed or possible.
    """

    w: Vector2
    t: int
    f0: Vector2
    gh: Mapping[int, Optional[Segment]] = field(hash=False)

    @property
    def factor(self) -> Segment:
        return Segment(Vector2(0, 0), self.f0.scale(self.t))

    @property
    def pl_map(self) -> "PLMap":
        return PLMap(self.w, self.factor.vertices())

    def __eq__(self, other) -> bool:
        if not isinstance(other, MutationData):
            return NotImplemented
        return (self.w, self.t, self.f0, dict(self.gh)) == (
            other.w,
            other.t,
            other.f0,
            dict(other.gh),
        )

    def __hash__(self) -> int:
        return hash((self.w, self.t, self.f0))

    def to_json(self) -> dict:
        from .geom import segment_to_json, vector_to_json

        return {
            "w": vector_to_json(self.w),
            "t": self.t,
            "f0": vector_to_json(self.f0),
            "F": segment_to_json(self.factor),
            "gh": {str(h): segment_to_json(s) for h, s in sorted(self.gh.items())},
            "convention": "w=(0,-1) matches dividing the second variable by g",
        }


@dataclass(frozen=True)
class PLMap:
    """The piecewise-linear transform u -> u - u_min*w on the dual side,
    where u_min minimizes <u, .> over the factor vertices."""

    w: Vector2
    f_vertices: tuple[Vector2, ...]


def _hk_vertices(P: Polygon, w: Vector2) -> tuple[list[tuple[int, int]], Vector2, Vector2]:
    """Vertices of a lattice polygon in (height, kernel-step) coordinates."""
    f0, vw, s = height_basis(w)
    hk = [(int(w.dot(v)), int(s.dot(v))) for v in P.vertices]
    return hk, f0, vw


def _hk_chains(hk: list[tuple[int, int]]):
    """Lower and upper k-envelopes of the hull of integer (h, k) points,
    each a list of breakpoints with strictly increasing h."""
    by_h_min: dict[int, int] = {}
    by_h_max: dict[int, int] = {}
    for h, k in hk:
        if h not in by_h_min or k < by_h_min[h]:
            by_h_min[h] = k
        if h not in by_h_max or k > by_h_max[h]:
            by_h_max[h] = k
    lower: list[tuple[int, int]] = []
    for p in sorted(by_h_min.items()):
        while len(lower) >= 2 and _cross3(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in sorted(by_h_max.items()):
        while len(upper) >= 2 and _cross3(upper[-2], upper[-1], p) >= 0:
            upper.pop()
        upper.append(p)
    return lower, upper


def _cross3(a, b, c) -> int:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _chain_segments(chain: list[tuple[int, int]]):
    """Per-piece (h0, k0, dh, dk) linear data for a breakpoint chain."""
    segs = []
    for (h0, k0), (h1, k1) in zip(chain, chain[1:]):
        segs.append((h0, k0, h1 - h0, k1 - k0))
    if not segs:
        h0, k0 = chain[0]
        segs.append((h0, k0, 1, 0))
    return segs


class _Profile:
    """Integer slice bounds A_h = ceil(kmin(h)), B_h = floor(kmax(h)) of a
    lattice polygon in the (h, k) frame of a height function."""

    def __init__(self, P: Polygon, w: Vector2):
        hk, f0, vw = _hk_vertices(P, w)
        self.f0 = f0
        self.vw = vw
        lower, upper = _hk_chains(hk)
        self.hmin = lower[0][0]
        self.hmax = lower[-1][0]
        # vertical-edge columns: lower/upper chains built from all points
        # share hmin/hmax since every h coordinate appears in both chains
        self.lo_segs = _chain_segments(lower)
        self.up_segs = _chain_segments(upper)
        self.heights_of_vertices: dict[int, list[int]] = {}
        for h, k in hk:
            self.heights_of_vertices.setdefault(h, []).append(k)

    def bounds(self, h: int) -> Optional[tuple[int, int]]:
        """(A_h, B_h) or None when the slice has no lattice point."""
        if h < self.hmin or h > self.hmax:
            return None
        a = _eval_ceil(self.lo_segs, h)
        b = _eval_floor(self.up_segs, h)
        if a > b:
            return None
        return a, b

    def from_hk(self, h: int, k: int) -> Vector2:
        return self.f0.scale(k) + self.vw.scale(h)


def _find_seg(segs, h):
    # linear scan is fine: callers sweep monotonically or polygons are tiny
    for h0, k0, dh, dk in segs:
        if h0 <= h <= h0 + dh:
            return h0, k0, dh, dk
    return segs[-1]


def _eval_ceil(segs, h) -> int:
    h0, k0, dh, dk = _find_seg(segs, h)
    num = k0 * dh + dk * (h - h0)
    return -((-num) // dh)


def _eval_floor(segs, h) -> int:
    h0, k0, dh, dk = _find_seg(segs, h)
    num = k0 * dh + dk * (h - h0)
    return num // dh


def _require_fano(P: Polygon) -> None:
    if not fano.is_fano(P):
        raise fano.NotFano("operation requires a Fano polygon")


def find_factors(P: Polygon, w: Vector2) -> list[MutationData]:
    """All nontrivial factors conv(0, t*f0) of P with respect to w.

    Each valid t comes with the maximal slab map: G_h is the Minkowski
    difference of the height-h lattice slice by (-h) copies of the factor,
    checked to contain the height-h vertices.  The list is empty when no
    factor exists (for instance when some negative-height vertex sits alone
    in a point slice).
    """
    _require_fano(P)
    if not is_primitive(w):
        raise NotPrimitive(f"height function must be primitive: {w}")
    prof = _Profile(P, w)
    hmin = prof.hmin
    if hmin >= 0:  # cannot happen for Fano P; guard anyway
        return []
    mandatory = {h for h in prof.heights_of_vertices if h < 0}
    # factor length bound: at each vertex-carrying height the slice must
    # survive removing (-h)*t steps
    t_max = None
    for h in mandatory:
        b = prof.bounds(h)
        assert b is not None  # vertices are lattice points of P
        cap = (b[1] - b[0]) // (-h)
        t_max = cap if t_max is None else min(t_max, cap)
    if not t_max:
        return []
    out = []
    for t in range(1, t_max + 1):
        gh: dict[int, Optional[Segment]] = {}
        ok = True
        for h in range(hmin, 0):
            b = prof.bounds(h)
            if b is None:
                gh[h] = None
                continue
            a, bb = b
            hi = bb + h * t
            if hi < a:
                if h in mandatory:  # slab too short for its vertices
                    ok = False
                    break
                gh[h] = None
                continue
            seg = Segment(prof.from_hk(h, a), prof.from_hk(h, hi))
            if h in mandatory:
                lo_v = min(prof.heights_of_vertices[h])
                hi_v = max(prof.heights_of_vertices[h])
                # G_h + (-h)F must cover the vertices at height h
                if not (a <= lo_v and hi_v <= hi + (-h) * t):
                    ok = False
                    break
            gh[h] = seg
        if ok:
            out.append(MutationData(w=w, t=t, f0=prof.f0, gh=gh))
    return out


def factor_for(P: Polygon, w: Vector2, t: int) -> MutationData:
    """The factor of length t for (P, w), or InvalidFactor if there is none."""
    if t == 0:
        prof = _Profile(P, primitivize(w))
        return MutationData(w=primitivize(w), t=0, f0=prof.f0, gh={})
    for md in find_factors(P, w):
        if md.t == t:
            return md
    raise InvalidFactor(f"no factor of length {t} for w={w}")


def _signed_length(prof: _Profile, md: MutationData) -> int:
    """Factor length measured along prof.f0 (negative if md.f0 = -prof.f0)."""
    if md.t == 0:
        return 0
    if md.f0 == prof.f0:
        return md.t
    if md.f0 == -prof.f0:
        return -md.t
    raise InvalidFactor("factor direction does not span the kernel of w")


def _validate_mutation_data(P: Polygon, md: MutationData) -> tuple[_Profile, int]:
    if not is_primitive(md.w):
        raise InvalidFactor(f"w must be primitive: {md.w}")
    if md.t < 0:
        raise InvalidFactor("factor length must be nonnegative")
    if not md.f0.is_integral() or md.w.dot(md.f0) != 0:
        raise InvalidFactor("factor direction must be a lattice vector killed by w")
    if md.t > 0 and not is_primitive(md.f0):
        raise InvalidFactor("factor direction must be primitive")
    _require_fano(P)
    prof = _Profile(P, md.w)
    ts = _signed_length(prof, md)
    if ts == 0:
        return prof, 0
    _, _, s = height_basis(md.w)
    for h in range(prof.hmin, 0):
        g = md.gh.get(h)
        b = prof.bounds(h)
        verts = prof.heights_of_vertices.get(h, [])
        if g is None:
            if verts:
                raise InvalidFactor(f"height {h} has vertices but an empty slab")
            continue
        if b is None:
            raise InvalidFactor(f"height {h} has a slab but no lattice slice")
        if md.w.dot(g.a) != h or md.w.dot(g.b) != h:
            raise InvalidFactor(f"slab at height {h} sits at the wrong height")
        ka, kb = sorted((int(s.dot(g.a)), int(s.dot(g.b))))
        lo, hi = b
        # (-h)F spans [min(0, (-h)ts), max(0, (-h)ts)] along prof.f0
        span = (-h) * ts
        add_lo, add_hi = min(0, span), max(0, span)
        # G_h + (-h)F inside the lattice slice, vertices covered
        if not (lo <= ka + add_lo and kb + add_hi <= hi):
            raise InvalidFactor(f"slab at height {h} does not fit in the slice")
        for kv in verts:
            if not (ka + add_lo <= kv <= kb + add_hi):
                raise InvalidFactor(f"slab at height {h} misses a vertex")
    return prof, ts


def mutate(P: Polygon, md: MutationData) -> Polygon:
    """The combinatorial mutation of P by md.

    Hull of the maximal slabs at negative heights together with the lattice
    slices fattened by h copies of the factor at nonnegative heights; the
    result does not depend on the particular valid slab choice stored in md.
    """
    prof, t = _validate_mutation_data(P, md)
    lo_hull: list[tuple[int, int]] = []
    up_hull: list[tuple[int, int]] = []
    lo_push = _make_pusher(lo_hull, 1)
    up_push = _make_pusher(up_hull, -1)
    lo_i = up_i = 0
    lo_segs, up_segs = prof.lo_segs, prof.up_segs
    for h in range(prof.hmin, prof.hmax + 1):
        while lo_i + 1 < len(lo_segs) and h > lo_segs[lo_i][0] + lo_segs[lo_i][2]:
            lo_i += 1
        while up_i + 1 < len(up_segs) and h > up_segs[up_i][0] + up_segs[up_i][2]:
            up_i += 1
        h0, k0, dh, dk = lo_segs[lo_i]
        num = k0 * dh + dk * (h - h0)
        a = -((-num) // dh)
        h0, k0, dh, dk = up_segs[up_i]
        num = k0 * dh + dk * (h - h0)
        b = num // dh
        if a > b:
            continue
        # slabs at h<0 and fattened slices at h>=0 share one interval form:
        # the endpoint on the factor side moves by h*t primitive steps
        if t >= 0:
            a2, b2 = a, b + h * t
        else:
            a2, b2 = a + h * t, b
        if h < 0 and a2 > b2:
            continue
        lo_push((h, a2))
        lo_push((h, b2))
        up_push((h, a2))
        up_push((h, b2))
    pts = {prof.from_hk(h, k) for h, k in lo_hull + up_hull}
    Q = Polygon(pts)
    if not Q.is_lattice():  # pragma: no cover - structural guarantee
        raise AssertionError("mutation produced a non-lattice polygon")
    return Q


def _make_pusher(stack: list[tuple[int, int]], orient: int):
    """Online monotone-chain insert for lex-increasing points; orient=1
    builds the lower hull, orient=-1 the upper hull."""

    def push(p: tuple[int, int]) -> None:
        while len(stack) >= 2:
            a, b = stack[-2], stack[-1]
            cr = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
            if cr * orient <= 0:
                stack.pop()
            else:
                break
        if not stack or stack[-1] != p:
            stack.append(p)

    return push


def inverse_data(P: Polygon, md: MutationData) -> MutationData:
    """Mutation data that undoes md on mutate(P, md): the height function
    is negated and the factor segment kept, so mutating back recovers P."""
    Q = mutate(P, md)
    w2 = -md.w
    prof = _Profile(Q, w2)
    md_probe = MutationData(w=w2, t=md.t, f0=md.f0, gh={})
    ts = _signed_length(prof, md_probe)
    gh: dict[int, Optional[Segment]] = {}
    for h in range(prof.hmin, 0):
        b = prof.bounds(h)
        if b is None:
            gh[h] = None
            continue
        a, bb = b
        if ts >= 0:
            a2, b2 = a, bb + h * ts
        else:
            a2, b2 = a + h * ts, bb
        if a2 > b2:
            gh[h] = None
            continue
        gh[h] = Segment(prof.from_hk(h, a2), prof.from_hk(h, b2))
    return MutationData(w=w2, t=md.t, f0=md.f0, gh=gh)


def dual_map(pm: PLMap, Q: Polygon) -> Polygon:
    """Image of Q under u -> u - u_min(u)*w, splitting Q along the loci
    where the minimizing factor vertex changes; area is preserved."""
    fv = pm.f_vertices
    if len(fv) == 1:
        f = fv[0]
        return Polygon([u - pm.w.scale(u.dot(f)) for u in Q.vertices])
    fa, fb = fv
    d = fa - fb
    from .geom import _clip  # reuse the exact clipper

    pieces = []
    for n, f in ((d, fb), (-d, fa)):
        # on the side <u, d> >= 0 the minimizer is fb (and vice versa)
        loop = _clip(list(Q.vertices), n, Fraction(0))
        if loop:
            pieces.extend(u - pm.w.scale(u.dot(f)) for u in loop)
    return Polygon(pieces)


@dataclass(frozen=True)
class GraphNode:
    polygon: Polygon
    weights: Optional[tuple[int, int, int]]
    multiplicity: Optional[int]


@dataclass(frozen=True)
class GraphEdge:
    source: int
    target: int
    w: Vector2
    t: int


@dataclass(frozen=True)
class MutationGraph:
    nodes: tuple[GraphNode, ...]
    edges: tuple[GraphEdge, ...]
    metadata: dict

    def weight_triples(self) -> set[tuple[int, int, int]]:
        return {tuple(sorted(n.weights)) for n in self.nodes if n.weights}

    def to_json(self) -> dict:
        from .geom import polygon_to_json, vector_to_json

        return {
            "nodes": [
                {
                    "index": i,
                    "polygon": polygon_to_json(n.polygon),
                    "weights": sorted(n.weights) if n.weights else None,
                    "multiplicity": n.multiplicity,
                }
                for i, n in enumerate(self.nodes)
            ],
            "edges": [
                {
                    "source": e.source,
                    "target": e.target,
                    "w": vector_to_json(e.w),
                    "t": e.t,
                }
                for e in self.edges
            ],
            "metadata": self.metadata,
        }


def factor_directions(P: Polygon) -> list[Vector2]:
    """Height functions that can possibly admit a factor: the negated
    primitive outer normals of the edges (the minimal face must be an edge,
    otherwise a negative-height vertex sits alone in a point slice)."""
    out = []
    for a, b in P.edges():
        d = b - a
        n = Vector2(d.y, -d.x)  # outer normal for CCW order
        out.append(primitivize(-n))
    return sorted(set(out))


def _scan_candidates(P: Polygon, extra_scan: Optional[int]) -> list[Vector2]:
    cands = factor_directions(P)
    if extra_scan:
        box = set(cands)
        for p in range(-extra_scan, extra_scan + 1):
            for q in range(-extra_scan, extra_scan + 1):
                v = Vector2(p, q)
                if not v.is_zero() and is_primitive(v):
                    box.add(v)
        cands = sorted(box)
    return cands


def mutation_graph(P: Polygon, depth: int, extra_scan: Optional[int] = None) -> MutationGraph:
    """Breadth-first graph of mutation classes reachable from P.

    Nodes are origin-preserving (linear) lattice-equivalence classes with
    the first-discovered polygon as canonical representative; edges record
    the (w, t) of each mutation found.  Fano polygons anchor the origin, so
    translations are not quotiented out.
    """
    _require_fano(P)
    if depth < 0:
        raise DomainError("depth must be nonnegative")
    if extra_scan is None:
        env = os.environ.get("POLYMUT_MAX_SCAN")
        extra_scan = int(env) if env else None

    nodes: list[GraphNode] = [_make_node(P)]
    edges: list[GraphEdge] = []
    frontier = [0]
    for _ in range(depth):
        next_frontier: list[int] = []
        for src in frontier:
            Psrc = nodes[src].polygon
            for w in _scan_candidates(Psrc, extra_scan):
                for md in find_factors(Psrc, w):
                    Q = mutate(Psrc, md)
                    tgt = _find_class(nodes, Q)
                    if tgt is None:
                        nodes.append(_make_node(Q))
                        tgt = len(nodes) - 1
                        next_frontier.append(tgt)
                    edge = GraphEdge(src, tgt, md.w, md.t)
                    if edge not in edges:
                        edges.append(edge)
        frontier = next_frontier
        if not frontier:
            break
    meta = {
        "scan": "edge-normals (complete for factors)",
        "extra_scan": extra_scan,
        "depth": depth,
    }
    return MutationGraph(tuple(nodes), tuple(edges), meta)


def _make_node(P: Polygon) -> GraphNode:
    if len(P.vertices) == 3:
        return GraphNode(P, fano.weights(P), fano.multiplicity(P))
    return GraphNode(P, None, None)


def _find_class(nodes: list[GraphNode], Q: Polygon) -> Optional[int]:
    wq = tuple(sorted(fano.weights(Q))) if len(Q.vertices) == 3 else None
    for i, n in enumerate(nodes):
        nw = tuple(sorted(n.weights)) if n.weights else None
        if nw != wq:
            continue
        if n.polygon == Q or linear_equivalent(n.polygon, Q) is not None:
            return i
    return None
