from fractions import Fraction

import pytest

from polymut import fano
from polymut.deform import (
    Decomposition,
    FiberMismatch,
    Inadmissible,
    corollary_check,
    fan_rays,
    general_fiber,
    is_admissible,
    is_weight_reducing,
    mutation_to_deformation,
    reduce_to_polygon,
    standard_decomposition,
)
from polymut.divpoly import (
    INFINITY,
    ZERO,
    DivPoly,
    LabelCollision,
    PLFunc,
    PointLabel,
    from_polygon,
)
from polymut.geom import (
    Vector2,
    area,
    dilate,
    dual,
    lattice_equivalent,
)
from polymut.mutation import factor_for, find_factors, mutation_graph
from conftest import P

BOX = (-6, 6)


def p114_divpoly():
    return from_polygon(P((-6, 2), (6, 2), (0, -1)))


def paper_decomposition():
    """part0 with slope -1/2, part1 with slopes {0, 1}."""
    return Decomposition(
        INFINITY,
        PLFunc.affine(BOX, Fraction(-1, 2), 0),
        PLFunc.min_of_affines(BOX, [(1, 1), (0, 1)]),
    )


def p1xp1_decomposition():
    """slopes {1/2, 0} and {0, -1/2}."""
    phi = p114_divpoly().coefficient(INFINITY)
    part0 = PLFunc.min_of_affines(BOX, [(Fraction(1, 2), 0), (0, 0)])
    return Decomposition(INFINITY, part0, phi - part0)


class TestIsAdmissible:
    def test_paper_decomposition(self):
        d = paper_decomposition()
        phi = p114_divpoly().coefficient(INFINITY)
        assert is_admissible(phi, d.part0, d.part1).admissible

    def test_half_half_is_inadmissible(self):
        phi = p114_divpoly().coefficient(INFINITY)
        half = PLFunc([-6, 0, 6], [-1, Fraction(1, 2), -1])
        rep = is_admissible(phi, half, half)
        assert not rep.admissible
        assert any("non-integral slope" in v for v in rep.violations)

    def test_half_integer_pair(self):
        d = p1xp1_decomposition()
        phi = p114_divpoly().coefficient(INFINITY)
        assert is_admissible(phi, d.part0, d.part1).admissible

    def test_sum_mismatch_detected(self):
        phi = p114_divpoly().coefficient(INFINITY)
        rep = is_admissible(phi, PLFunc.constant(BOX, 1), PLFunc.constant(BOX, 1))
        assert not rep.admissible


class TestGeneralFiber:
    def test_p114_fiber_coefficients(self):
        dp = p114_divpoly()
        fib = general_fiber(dp, paper_decomposition())
        assert fib.coefficient(ZERO) == PLFunc.constant(BOX, 2)
        assert fib.coefficient(INFINITY) == PLFunc.affine(BOX, Fraction(-1, 2), 0)
        assert fib.coefficient(PointLabel.param("s")) == PLFunc.min_of_affines(
            BOX, [(1, 1), (0, 1)]
        )
        assert fib.degree() == dp.degree()

    def test_trivial_decomposition(self):
        dp = p114_divpoly()
        phi = dp.coefficient(INFINITY)
        d = Decomposition(INFINITY, phi, PLFunc.constant(BOX, 0))
        fib = general_fiber(dp, d)
        red = reduce_to_polygon(fib)
        assert red.polygon == P((-6, 2), (6, 2), (0, -1))

    def test_label_collision(self):
        dp = p114_divpoly().with_coefficient(
            PointLabel.param("s"), PLFunc.constant(BOX, 0)
        )
        with pytest.raises(LabelCollision):
            general_fiber(dp, paper_decomposition(), "s")

    def test_inadmissible_rejected(self):
        dp = p114_divpoly()
        half = PLFunc([-6, 0, 6], [-1, Fraction(1, 2), -1])
        with pytest.raises(Inadmissible):
            general_fiber(dp, Decomposition(INFINITY, half, half))


class TestReduceToPolygon:
    def test_smoothing_fiber_is_p2(self, p2_triangle):
        fib = general_fiber(p114_divpoly(), paper_decomposition())
        red = reduce_to_polygon(fib)
        assert red.reducible
        assert red.polygon == P((-6, 5), (0, -1), (6, -1))
        assert lattice_equivalent(red.polygon, dilate(dual(p2_triangle), 2)) is not None

    def test_p1xp1_fiber(self):
        fib = general_fiber(p114_divpoly(), p1xp1_decomposition())
        red = reduce_to_polygon(fib)
        assert red.reducible
        assert len(red.polygon.vertices) == 4
        assert area(red.polygon) == 18
        rect = P((0, 0), (6, 0), (6, 3), (0, 3))
        assert lattice_equivalent(red.polygon, rect) is not None

    def test_roundtrip_direct(self):
        dp = p114_divpoly()
        red = reduce_to_polygon(dp)
        assert red.reducible and not red.shifts
        assert red.polygon == P((-6, 2), (6, 2), (0, -1))

    def test_irreducible_reported_not_raised(self):
        # three two-piece coefficients: no affine piece shift can zero one
        f = PLFunc.min_of_affines(BOX, [(1, 0), (0, 0)])
        dp = DivPoly(
            BOX,
            {
                ZERO: f,
                INFINITY: f,
                PointLabel.param("s"): PLFunc.min_of_affines(BOX, [(2, 12), (0, 12)]),
            },
        )
        red = reduce_to_polygon(dp)
        assert not red.reducible
        assert red.polygon is None
        assert red.reason


class TestPipeline:
    def test_p114_certificate(self, p114_triangle, p2_triangle):
        md = find_factors(p114_triangle, Vector2(0, -1))[0]
        cert = mutation_to_deformation(p114_triangle, md)
        assert cert.dilation == 2
        assert cert.divpoly.box == (Fraction(-6), Fraction(6))
        assert lattice_equivalent(cert.fiber_polygon, dilate(dual(p2_triangle), 2)) is not None
        assert cert.corollary.passed
        assert cert.corollary.slope_decomposition() == "-1/2 + {0, 1}"
        assert cert.in_diophantine_class
        assert cert.extends_over_p1

    def test_p2_has_no_reducing_mutation(self, p2_triangle):
        for w in [Vector2(-1, -1), Vector2(2, -1), Vector2(-1, 2)]:
            for md in find_factors(p2_triangle, w):
                assert not is_weight_reducing(p2_triangle, md)
                with pytest.raises(FiberMismatch):
                    mutation_to_deformation(p2_triangle, md)

    def test_p1425_to_p114(self, p114_triangle):
        T = P((1, 2), (-1, 2), (-6, -13))
        assert sorted(fano.weights(T)) == [1, 4, 25]
        md = next(
            md
            for w in [Vector2(3, -1)]
            for md in find_factors(T, w)
        )
        cert = mutation_to_deformation(T, md)
        assert cert.dilation == 10
        assert lattice_equivalent(
            cert.fiber_polygon, dilate(dual(cert.mutated), 10)
        ) is not None
        assert cert.corollary.passed

    def test_explicit_dilation_validated(self, p114_triangle):
        from polymut.deform import NoLatticeDilation

        md = find_factors(p114_triangle, Vector2(0, -1))[0]
        with pytest.raises(NoLatticeDilation):
            mutation_to_deformation(p114_triangle, md, 3)
        cert = mutation_to_deformation(p114_triangle, md, 4)
        assert cert.dilation == 4

    def test_degree_preservation_along_pipeline(self, p114_triangle):
        md = find_factors(p114_triangle, Vector2(0, -1))[0]
        cert = mutation_to_deformation(p114_triangle, md)
        a = cert.dilation
        assert area(cert.fiber_polygon) == a * a * area(dual(cert.normalized_source))

    def test_markov_graph_edges_depth3(self, p2_triangle):
        g = mutation_graph(p2_triangle, 3)
        for e in g.edges:
            src = g.nodes[e.source].polygon
            md = factor_for(src, e.w, e.t)
            if is_weight_reducing(src, md):
                cert = mutation_to_deformation(src, md)
                assert cert.corollary.passed
                assert cert.in_diophantine_class
            else:
                with pytest.raises(FiberMismatch):
                    mutation_to_deformation(src, md)


class TestCorollaryCheck:
    def test_p114_pipeline_decomposition(self, p114_triangle):
        md = find_factors(p114_triangle, Vector2(0, -1))[0]
        cert = mutation_to_deformation(p114_triangle, md)
        rep = corollary_check(cert.decomposition)
        assert rep.passed
        assert rep.common_slope == Fraction(-1, 2)
        assert sorted(rep.step_slopes) == [0, 1]

    def test_three_piece_part1_fails(self):
        d = Decomposition(
            INFINITY,
            PLFunc.affine(BOX, 0, 0),
            PLFunc.min_of_affines(BOX, [(2, 4), (1, 1), (0, 0)]),
        )
        rep = corollary_check(d)
        assert not rep.passed
        assert not rep.clauses["part1_exactly_two_pieces"]

    def test_markov_chain_decomposition(self):
        T = P((1, 2), (-1, 2), (-6, -13))
        md = find_factors(T, Vector2(3, -1))[0]
        cert = mutation_to_deformation(T, md)
        assert corollary_check(cert.decomposition).passed


class TestStandardDecomposition:
    def test_matches_affine_extension(self):
        dp = p114_divpoly()
        d = standard_decomposition(dp, 1)
        # part0 is the affine extension of the right-hand piece
        assert d.part0 == PLFunc.affine(BOX, Fraction(-1, 2), 1)
        assert d.part1 == PLFunc.min_of_affines(BOX, [(1, 0), (0, 0)])
        assert d.part0 + d.part1 == dp.coefficient(INFINITY)


def test_fan_rays(p2_triangle):
    rays = fan_rays(dilate(dual(p2_triangle), 2))
    assert sorted(rays) == sorted(
        [Vector2(1, 0), Vector2(0, 1), Vector2(-1, -1)]
    )
