import random
import warnings
from fractions import Fraction

import pytest

from polymut.geom import Polygon, Vector2, minkowski_sum
from polymut.laurent import (
    DivisibilityFails,
    LaurentPoly,
    LaurentSyntaxError,
    MutationSpec,
    ZeroDenominator,
    ZeroPolynomial,
    algebraic_mutate,
    derive_mutation_data,
    div_exact,
    newton_polytope,
    parse,
    period_sequence,
    render,
)
from polymut.mutation import mutate
from conftest import P

F_P114 = "y^-1 + x^-1*(1+x)^2*y^2"


class TestParse:
    def test_basic(self):
        f = parse("x + y + x^-1*y^-1")
        assert f.terms == {(1, 0): 1, (0, 1): 1, (-1, -1): 1}

    def test_parenthesized_power_expansion(self):
        f = parse(F_P114)
        assert f.terms == {(0, -1): 1, (-1, 2): 1, (0, 2): 2, (1, 2): 1}

    def test_syntax_error_position(self):
        with pytest.raises(LaurentSyntaxError) as ei:
            parse("x^^2")
        assert ei.value.position == 2

    def test_zero_denominator(self):
        with pytest.raises(ZeroDenominator):
            parse("1/0")

    def test_aliases_and_fractions(self):
        assert parse("3/2*x1*x2^-1") == parse("3/2*x*y^-1")

    def test_juxtaposition(self):
        assert parse("2x y") == parse("2*x*y")

    def test_unknown_variable(self):
        with pytest.raises(LaurentSyntaxError):
            parse("x + z")

    def test_negative_power_of_monomial_ok(self):
        assert parse("(2*x)^-1") == parse("1/2*x^-1")

    def test_negative_power_of_sum_rejected(self):
        with pytest.raises(LaurentSyntaxError):
            parse("(1+x)^-1")


class TestRender:
    def test_roundtrip_examples(self):
        for s in ("x + y + x^-1*y^-1", F_P114, "0", "-x + 1/2", "3"):
            f = parse(s)
            assert parse(render(f)) == f

    def test_roundtrip_randomized(self):
        rng = random.Random(5)
        for _ in range(300):
            terms = {}
            for _ in range(rng.randint(0, 6)):
                e = (rng.randint(-4, 4), rng.randint(-4, 4))
                c = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
                if c:
                    terms[e] = c
            f = LaurentPoly(terms)
            assert parse(render(f)) == f


class TestArithmetic:
    def test_square(self):
        one_plus_x = parse("1+x")
        assert one_plus_x * one_plus_x == parse("1 + 2*x + x^2")

    def test_div_exact_laurent(self):
        q = div_exact(parse("x^-1 + 2 + x"), parse("1+x"))
        assert q == parse("x^-1 + 1")

    def test_div_exact_fails(self):
        assert div_exact(parse("1 + x + x^3"), parse("1+x")) is None

    def test_div_mul_roundtrip_randomized(self):
        rng = random.Random(17)
        for _ in range(200):
            f = _random_poly(rng, 4)
            g = _random_poly(rng, 4)
            if g.is_zero():
                continue
            assert div_exact(f * g, g) == f


def _random_poly(rng, nterms):
    terms = {}
    for _ in range(rng.randint(1, nterms)):
        e = (rng.randint(-3, 3), rng.randint(-3, 3))
        c = Fraction(rng.randint(-5, 5))
        if c:
            terms[e] = c
    return LaurentPoly(terms)


class TestNewtonPolytope:
    def test_p2_polynomial(self):
        assert newton_polytope(parse("x + y + x^-1*y^-1")) == P((1, 0), (0, 1), (-1, -1))

    def test_p114_polynomial(self):
        assert newton_polytope(parse(F_P114)) == P((0, -1), (-1, 2), (1, 2))

    def test_constant(self):
        assert newton_polytope(parse("5")).vertices == (Vector2(0, 0),)

    def test_zero_rejected(self):
        with pytest.raises(ZeroPolynomial):
            newton_polytope(LaurentPoly.zero())

    def test_sum_is_minkowski_with_positive_coefficients(self):
        rng = random.Random(23)
        for _ in range(100):
            f = _random_positive_poly(rng)
            g = _random_positive_poly(rng)
            assert newton_polytope(f * g) == minkowski_sum(
                newton_polytope(f), newton_polytope(g)
            )


def _random_positive_poly(rng):
    terms = {}
    for _ in range(rng.randint(1, 5)):
        terms[(rng.randint(-3, 3), rng.randint(-3, 3))] = Fraction(rng.randint(1, 5))
    return LaurentPoly(terms)


class TestAlgebraicMutate:
    def test_p114_example(self):
        f = parse(F_P114)
        spec = MutationSpec("y", parse("1+x"))
        g = algebraic_mutate(f, spec)
        assert g == parse("(1+x)*y^-1 + x^-1*y^2")

    def test_no_positive_grades_always_succeeds(self):
        f = parse("x + x^-1 + y^-1")
        spec = MutationSpec("y", parse("1+x"))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            g = algebraic_mutate(f, spec)
        assert g == parse("x + x^-1 + (1+x)*y^-1")

    def test_divisibility_failure_names_grade(self):
        f = parse("y + y^-1")
        spec = MutationSpec("y", parse("1+x"))
        with pytest.raises(DivisibilityFails) as ei:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                algebraic_mutate(f, spec)
        assert ei.value.grade == 1

    def test_warns_without_mixed_grades(self):
        f = parse("y + y^2 + x")
        spec = MutationSpec("y", parse("1"))
        with pytest.warns(UserWarning):
            algebraic_mutate(f, spec)

    def test_strict_mode_raises(self):
        f = parse("y + y^2 + x")
        spec = MutationSpec("y", parse("1"))
        with pytest.raises(Exception):
            algebraic_mutate(f, spec, strict=True)

    def test_newton_compatibility(self):
        f = parse(F_P114)
        spec = MutationSpec("y", parse("1+x"))
        g = algebraic_mutate(f, spec)
        md, shear = derive_mutation_data(f, spec)
        assert shear == Vector2(0, 0)
        assert newton_polytope(g) == mutate(newton_polytope(f), md)

    def test_newton_compatibility_with_shifted_g(self):
        # g without constant term: the correspondence holds up to the
        # recorded shear
        f = parse("y^-1 + x^-3*(x + x^2)^2*y^2")
        spec = MutationSpec("y", parse("x + x^2"))
        g = algebraic_mutate(f, spec)
        assert g == parse("(x + x^2)*y^-1 + x^-3*y^2")
        md, shear = derive_mutation_data(f, spec)
        assert shear == Vector2(1, 0)
        Q = mutate(newton_polytope(f), md)
        sheared = Polygon([v + shear.scale(md.w.dot(v)) for v in Q.vertices])
        assert newton_polytope(g) == sheared


class TestPeriodSequence:
    def test_p2_period(self):
        f = parse("x + y + x^-1*y^-1")
        assert period_sequence(f, 6) == [1, 0, 0, 6, 0, 0, 90]

    def test_constant_one(self):
        assert period_sequence(parse("1"), 3) == [1, 1, 1, 1]

    def test_invariance_under_mutation(self):
        f = parse(F_P114)
        g = algebraic_mutate(f, MutationSpec("y", parse("1+x")))
        assert period_sequence(f, 8) == period_sequence(g, 8)
