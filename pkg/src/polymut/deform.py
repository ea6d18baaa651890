"""One-parameter deformations of polarized toric surfaces from
combinatorial mutations, via admissible Minkowski decompositions of a
divisorial-polytope coefficient.

The pipeline normalizes the mutation so its height function is (0,-1),
dilates the dual polygon to a lattice polygon, splits the infinity
coefficient into the affine part plus an integral two-piece part, moves
the split-off summand to a fresh point of the projective line, reduces the
three-coefficient divisorial polytope back to a polygon by affine shifts,
and certifies the result against the dilated dual of the mutated polygon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DomainError
from . import fano
from .divpoly import (
    INFINITY,
    ZERO,
    DivPoly,
    DomainMismatch,
    LabelCollision,
    PLFunc,
    PointLabel,
    from_polygon,
    shift_affine,
    to_polygon,
)
from .geom import (
    Mat2,
    Polygon,
    Segment,
    Vector2,
    dilate,
    dual,
    fraction_str,
    lattice_equivalent,
    mat_apply,
    polygon_to_json,
    vector_to_json,
)
from .mutation import MutationData, mutate


class Inadmissible(DomainError):
    pass


class NoLatticeDilation(DomainError):
    pass


class FiberMismatch(DomainError):
    pass


@dataclass(frozen=True)
class Decomposition:
    """An admissible one-parameter Minkowski decomposition of the
    coefficient at `label` into part0 + part1."""

    label: PointLabel
    part0: PLFunc
    part1: PLFunc

    def to_json(self) -> dict:
        return {
            "label": str(self.label),
            "part0": self.part0.to_json(),
            "part1": self.part1.to_json(),
        }


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    violations: tuple[str, ...]


def is_admissible(phi: PLFunc, phi0: PLFunc, phi1: PLFunc) -> AdmissibilityReport:
    """Check the three decomposition conditions: lattice graphs of both
    parts, exact pointwise sum, and at most one part with non-integral
    slope on each maximal affine piece of phi."""
    if phi.domain != phi0.domain or phi.domain != phi1.domain:
        raise DomainMismatch(
            f"decomposition domains differ: {phi.domain}, {phi0.domain}, {phi1.domain}"
        )
    violations = []
    for name, part in (("part0", phi0), ("part1", phi1)):
        if not part.has_lattice_graph():
            violations.append(f"{name}: graph vertices not in the lattice")
    if phi0 + phi1 != phi:
        violations.append("parts do not sum to the decomposed function")
    for a, b, _ in phi.pieces():
        bad = 0
        for part in (phi0, phi1):
            if any(s.denominator != 1 for s in part.slopes_on(a, b)):
                bad += 1
        if bad > 1:
            violations.append(
                f"both parts have non-integral slope on [{fraction_str(a)}, {fraction_str(b)}]"
            )
    return AdmissibilityReport(not violations, tuple(violations))


def general_fiber(dp: DivPoly, d: Decomposition, param_name: str = "s") -> DivPoly:
    """Divisorial polytope of the general fiber: the decomposed coefficient
    is replaced by part0, and part1 moves to a fresh parameter point."""
    phi = dp.coefficient(d.label)
    report = is_admissible(phi, d.part0, d.part1)
    if not report.admissible:
        raise Inadmissible("; ".join(report.violations))
    fresh = PointLabel.param(param_name)
    if fresh in dp.coeffs or fresh == d.label:
        raise LabelCollision(f"parameter label already in use: {param_name!r}")
    cs = dict(dp.coeffs)
    cs[d.label] = d.part0
    cs[fresh] = d.part1
    out = DivPoly(dp.box, cs)
    assert out.degree() == dp.degree()  # degree function unchanged pointwise
    return out


@dataclass(frozen=True)
class ShiftRecord:
    frm: PointLabel
    to: PointLabel
    slope: Fraction
    intercept: Fraction

    def is_integral(self) -> bool:
        """Integral shifts twist by a principal divisor and a character and
        therefore preserve the polarized variety; non-integral ones do not
        and are only sanctioned by the deformation theorem."""
        return self.slope.denominator == 1 and self.intercept.denominator == 1

    def to_json(self) -> dict:
        return {
            "from": str(self.frm),
            "to": str(self.to),
            "slope": fraction_str(self.slope),
            "intercept": fraction_str(self.intercept),
        }


@dataclass(frozen=True)
class ReductionResult:
    """Outcome of reduce_to_polygon; irreducibility is a reported state
    (a non-toric complexity-one fiber), not an exception."""

    reducible: bool
    polygon: Optional[Polygon]
    shifts: tuple[ShiftRecord, ...]
    divpoly: Optional[DivPoly]
    reason: Optional[str] = None


def _lattice_ok(dp: DivPoly) -> bool:
    return all(dp.coeffs[l].has_lattice_graph() for l in dp.nontrivial_labels())


def _shift_candidates(dp: DivPoly) -> list[tuple[int, PointLabel, PointLabel, Fraction, Fraction]]:
    """Count-reducing single shifts by affine pieces of existing
    coefficients.

    Integral shifts come first: they twist by a principal divisor and a
    character, hence are isomorphisms and always safe.  A non-integral
    shift is not an isomorphism; the one the deformation proof sanctions
    absorbs the spectator coefficient into the freshest parameter label,
    so non-integral candidates are ordered by decreasing target label.
    """
    cands = []
    labels = dp.labels()
    for frm in labels:
        cf = dp.coeffs[frm]
        if cf.is_zero():
            continue
        for a, b, slope in cf.pieces():
            intercept = cf(a) - slope * a
            for to in labels:
                if to == frm:
                    continue
                zeroes_from = cf.is_affine()
                zeroes_to = dp.coefficient(to).add_affine(slope, intercept).is_zero()
                if not (zeroes_from or zeroes_to):
                    continue
                rank = 0 if slope.denominator == 1 and intercept.denominator == 1 else 1
                cands.append((rank, frm, to, slope, intercept))
    cands.sort(
        key=lambda c: (
            c[0],
            c[1],
            (-c[2].kind, c[2].name) if c[0] else (c[2].kind, c[2].name),
            c[3],
            c[4],
        )
    )
    return cands


def reduce_to_polygon(dp: DivPoly) -> ReductionResult:
    """Apply affine shifts until at most two nontrivial coefficients remain
    (all with lattice graphs), then reconstruct the polygon.

    The shifts are searched among affine extensions of the pieces of the
    stored coefficients, preferring integral slopes; the shifts used are
    recorded in the result."""
    shifts: list[ShiftRecord] = []
    cur = dp
    for _ in range(max(1, len(dp.coeffs))):
        nt = cur.nontrivial_labels()
        if len(nt) <= 2:
            break
        applied = False
        for _, frm, to, slope, intercept in _shift_candidates(cur):
            nxt = shift_affine(cur, frm, to, slope, intercept)
            if len(nxt.nontrivial_labels()) < len(nt) and _lattice_ok(nxt):
                shifts.append(ShiftRecord(frm, to, slope, intercept))
                cur = nxt
                applied = True
                break
        if not applied:
            return ReductionResult(
                False, None, tuple(shifts), None,
                "no affine shift reduces the nontrivial coefficients",
            )
    if len(cur.nontrivial_labels()) > 2 or not _lattice_ok(cur):
        return ReductionResult(
            False, None, tuple(shifts), None,
            "reduced coefficients fail the lattice-graph condition",
        )
    return ReductionResult(True, to_polygon(cur), tuple(shifts), cur)


@dataclass(frozen=True)
class CorollaryReport:
    """Structural check of the constructed decomposition: part0 affine and
    part1 made of exactly two integral-slope pieces, one of slope zero."""

    passed: bool
    clauses: dict = field(hash=False)
    common_slope: Optional[Fraction] = None
    step_slopes: tuple[Fraction, ...] = ()

    def slope_decomposition(self) -> str:
        cs = fraction_str(self.common_slope) if self.common_slope is not None else "?"
        steps = ", ".join(fraction_str(s) for s in sorted(self.step_slopes))
        return f"{cs} + {{{steps}}}"

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "clauses": dict(self.clauses),
            "slope_decomposition": self.slope_decomposition(),
        }


def corollary_check(d: Decomposition) -> CorollaryReport:
    slopes1 = d.part1.slopes()
    clauses = {
        "part0_affine": d.part0.is_affine(),
        "part1_exactly_two_pieces": len(slopes1) == 2,
        "part1_integral_slopes": all(s.denominator == 1 for s in slopes1),
        "part1_has_zero_slope": any(s == 0 for s in slopes1),
    }
    common = d.part0.slopes()[0] if d.part0.is_affine() else None
    return CorollaryReport(all(clauses.values()), clauses, common, slopes1)


@dataclass(frozen=True)
class DeformationCertificate:
    """Everything needed to re-verify one mutation-to-deformation run."""

    source: Polygon
    normalizer: Mat2
    normalized_source: Polygon
    mutation: MutationData
    mutated: Polygon
    dilation: int
    divpoly: DivPoly
    decomposition: Decomposition
    fiber_divpoly: DivPoly
    reduction: ReductionResult
    fiber_polygon: Polygon
    target: Polygon
    witness: tuple[Mat2, Vector2]
    corollary: CorollaryReport
    extends_over_p1: bool
    in_diophantine_class: Optional[bool]

    def to_json(self) -> dict:
        U, t = self.witness
        return {
            "source": polygon_to_json(self.source),
            "normalizer": [list(r) for r in self.normalizer],
            "normalized_source": polygon_to_json(self.normalized_source),
            "mutation": self.mutation.to_json(),
            "mutated": polygon_to_json(self.mutated),
            "dilation": self.dilation,
            "divpoly": self.divpoly.to_json(),
            "decomposition": self.decomposition.to_json(),
            "fiber_divpoly": self.fiber_divpoly.to_json(),
            "shifts": [s.to_json() for s in self.reduction.shifts],
            "fiber_polygon": polygon_to_json(self.fiber_polygon),
            "target": polygon_to_json(self.target),
            "witness": {"matrix": [list(r) for r in U], "translation": vector_to_json(t)},
            "corollary": self.corollary.to_json(),
            "extends_over_p1": self.extends_over_p1,
            "in_diophantine_class": self.in_diophantine_class,
        }


def _normalizer_for(w: Vector2) -> Mat2:
    """Unimodular U with heights of U*P under (0,-1) matching heights of P
    under w, and with the factor direction mapped to (1, 0)."""
    p, q = w.as_ints()
    g, x, y = _extgcd(p, q)
    # rows: (-y, x) and -w; det = 1, U*(-q, p) = (1, 0)
    return ((-y, x), (-p, -q))


def _extgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_x, xx = 1, 0
    old_y, yy = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_x, xx = xx, old_x - qt * xx
        old_y, yy = yy, old_y - qt * yy
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def _transform_mutation(md: MutationData, U: Mat2) -> MutationData:
    gh = {}
    for h, seg in md.gh.items():
        if seg is None:
            gh[h] = None
        else:
            gh[h] = Segment(mat_apply(U, seg.a), mat_apply(U, seg.b))
    return MutationData(w=Vector2(0, -1), t=md.t, f0=Vector2(1, 0), gh=gh)


def _denominator_lcm(P: Polygon) -> int:
    out = 1
    for v in P.vertices:
        out = math.lcm(out, v.x.denominator, v.y.denominator)
    return out


def standard_decomposition(dp: DivPoly, t: int) -> Decomposition:
    """Split the infinity coefficient as (phi - part1) + part1 with
    part1 = min(t*u, 0); for the maximal factor length this makes part0 the
    affine extension of the right-hand piece, as in the deformation proof."""
    phi = dp.coefficient(INFINITY)
    part1 = PLFunc.min_of_affines(dp.box, [(t, 0), (0, 0)])
    part0 = phi - part1
    return Decomposition(INFINITY, part0, part1)


def mutation_to_deformation(
    P: Polygon, md: MutationData, dilation: Optional[int] = None
) -> DeformationCertificate:
    """Run the full mutation-to-deformation pipeline and certify it.

    Raises FiberMismatch when the reduced general fiber is not equivalent
    to the dilated dual of the mutated polygon; this happens exactly for
    weight-increasing mutations, whose deformation is isotrivial (the
    smooth-side surface is rigid), and the diagnostics say so.
    """
    if len(P.vertices) != 3:
        raise fano.NotATriangle("the deformation pipeline needs a Fano triangle")
    U = _normalizer_for(md.w)
    Pn = Polygon([mat_apply(U, v) for v in P.vertices])
    mdn = _transform_mutation(md, U)
    Q = mutate(Pn, mdn)
    Pstar = dual(Pn)
    Qstar = dual(Q)
    auto = math.lcm(_denominator_lcm(Pstar), _denominator_lcm(Qstar))
    if dilation is None:
        a = auto
    else:
        a = dilation
        if a < 1 or not dilate(Pstar, a).is_lattice():
            raise NoLatticeDilation(
                f"dilation {a} does not make the dual a lattice polygon (minimal valid: {auto})"
            )
    dp = from_polygon(dilate(Pstar, a))
    d = standard_decomposition(dp, mdn.t)
    rep = is_admissible(dp.coefficient(INFINITY), d.part0, d.part1)
    if not rep.admissible:
        raise Inadmissible("; ".join(rep.violations))
    fiber_dp = general_fiber(dp, d, "s")
    red = reduce_to_polygon(fiber_dp)
    if not red.reducible:
        raise FiberMismatch(f"fiber is not reducible to a toric polygon: {red.reason}")
    # A non-integral reduction shift is not an isomorphism of polarized
    # varieties; the deformation theorem sanctions it exactly in the
    # smoothing (weight-decreasing) direction.  In the opposite direction
    # the reduced polygon is formal only, so refuse to certify it.
    decreasing = len(Q.vertices) == 3 and sum(fano.weights(Q)) < sum(fano.weights(Pn))
    if any(not s.is_integral() for s in red.shifts) and not decreasing:
        raise FiberMismatch(
            "reduction needs a non-isomorphism shift but the mutation does "
            "not decrease the weights; the general fiber is not the mutated "
            "plane in this direction"
        )
    target = dilate(Qstar, a)
    if not target.is_lattice():
        raise FiberMismatch(
            f"dilation {a} does not make the mutated dual a lattice polygon"
        )
    witness = lattice_equivalent(red.polygon, target)
    if witness is None:
        diag = "fiber polygon is not equivalent to the dilated mutated dual"
        back = lattice_equivalent(red.polygon, dilate(Pstar, a))
        if back is not None:
            diag += "; the family is isotrivial (fiber matches the source polarization)"
        else:
            rays = fan_rays(red.polygon)
            if len(rays) == 3:
                fw = sorted(fano.weights_of_vertices(*rays))
                diag += f"; the fiber is a fake plane with weights {tuple(fw)}"
            else:
                diag += f"; the fiber fan has {len(rays)} rays"
            diag += " (a non-Q-Gorenstein deformation direction)"
        raise FiberMismatch(diag)
    cor = corollary_check(d)
    phi0_sum = dp.coefficient(ZERO)
    extends = any(
        is_admissible(phi0_sum + part, phi0_sum, part).admissible
        for part in (d.part0, d.part1)
    )
    in_class: Optional[bool] = None
    if len(Q.vertices) == 3:
        in_class = fano.diophantine_class(fano.weights(Pn)) == fano.diophantine_class(
            fano.weights(Q)
        )
    return DeformationCertificate(
        source=P,
        normalizer=U,
        normalized_source=Pn,
        mutation=mdn,
        mutated=Q,
        dilation=a,
        divpoly=dp,
        decomposition=d,
        fiber_divpoly=fiber_dp,
        reduction=red,
        fiber_polygon=red.polygon,
        target=target,
        witness=witness,
        corollary=cor,
        extends_over_p1=extends,
        in_diophantine_class=in_class,
    )


def fan_rays(P: Polygon) -> list[Vector2]:
    """Primitive inner edge normals: the rays of the normal fan of a
    full-dimensional polygon (the fan of its polarized toric variety)."""
    from .geom import primitivize

    rays = []
    for a, b in P.edges():
        d = b - a
        rays.append(primitivize(Vector2(-d.y, d.x)))
    return rays


def is_weight_reducing(P: Polygon, md: MutationData) -> bool:
    """True when the mutation strictly decreases the weight sum, i.e. the
    deformation smooths the source rather than being isotrivial."""
    wp = fano.weights(P)
    Q = mutate(P, md)
    if len(Q.vertices) != 3:
        return False
    return sum(fano.weights(Q)) < sum(wp)
