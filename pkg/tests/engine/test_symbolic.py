#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Tests for expression parsing, exact polynomials and truncated series."""

import random
from fractions import Fraction

import pytest
from sympy import Symbol

from engine import InputError, LaurentSeries, LinearForm, RationalFunction, laurent_mul_truncate
from engine.symbolic import (
    constant,
    format_polynomial,
    integrate_over_interval,
    parse_expression,
    parse_inequality,
    parse_polynomial,
    parse_rational,
    poly_eval,
    substitute,
    variable,
)


class TestParsing:
    def test_caret_is_power(self, poly) -> None:
        """Test that ^ parses as exponentiation."""
        assert poly("(a+b)^2") == poly("a^2+2*a*b+b^2")

    def test_definitions_are_substituted(self) -> None:
        """Test that named definitions may be referenced by later expressions."""
        f = parse_expression("a+1", ["a"])
        assert parse_expression("2*f", ["a"], {"f": f}) == 2 * Symbol("a") + 2

    @pytest.mark.parametrize("text", ["a+z", "a**2", "a/b", "2^a", "(a+b", ""])
    def test_malformed_expression(self, gens, text) -> None:
        """Test that text outside the grammar is rejected."""
        with pytest.raises(InputError):
            parse_polynomial(text, gens)

    def test_rational_literal(self) -> None:
        """Test signed rational literals."""
        assert parse_rational("-3/2") == Fraction(-3, 2)
        assert parse_rational("7") == Fraction(7)

    def test_rational_literal_rejects_symbols(self) -> None:
        """Test that a literal with a variable is not a rational."""
        with pytest.raises(InputError):
            parse_rational("a")

    def test_inequality(self, gens, poly) -> None:
        """Test that an inequality parses to the form nonnegative on its region."""
        assert parse_inequality("a <= c", gens).to_polynomial(gens) == poly("c-a")
        assert parse_inequality("a >= c", gens).to_polynomial(gens) == poly("a-c")

    def test_inequality_needs_one_operator(self, gens) -> None:
        """Test that chained or missing comparisons are rejected."""
        for text in ("a <= b <= c", "a < b", "a"):
            with pytest.raises(InputError):
                parse_inequality(text, gens)

    def test_linear_form_rejects_u(self, gens) -> None:
        """Test that a chamber wall cannot depend on u."""
        with pytest.raises(InputError):
            LinearForm.parse("a+u", gens)

    def test_format_round_trip(self, gens, poly) -> None:
        """Test that printed polynomials parse back to themselves."""
        p = poly("-1/2*a^2*b+3*c^3-u+7")
        assert parse_polynomial(format_polynomial(p), gens) == p


class TestPolynomials:
    def test_evaluation_is_exact(self, poly) -> None:
        """Test evaluation at a rational point."""
        point = {"a": Fraction(1, 2), "b": 1, "c": Fraction(1, 3)}
        assert poly_eval(poly("a^2-b*c"), point) == Fraction(-1, 12)

    def test_evaluation_needs_every_variable(self, poly) -> None:
        """Test that an unbound variable is an error."""
        with pytest.raises(InputError):
            poly_eval(poly("a+b"), {"a": 1})

    def test_substitution_is_simultaneous(self, gens, poly) -> None:
        """Test that a swap of variables does not chain."""
        images = {"a": variable("b", gens), "b": variable("a", gens)}
        swapped = substitute(poly("a^2+2*b"), images)
        assert swapped == poly("b^2+2*a")

    def test_integral_with_parametric_bounds(self, gens, poly) -> None:
        """Test a definite integral in u between linear forms."""
        lo, hi = LinearForm.parse("a", gens), LinearForm.parse("a+b", gens)
        assert integrate_over_interval(poly("u"), lo, hi) == poly("a*b+1/2*b^2")

    def test_integral_of_u_free_integrand(self, gens, poly) -> None:
        """Test that a constant integrand is multiplied by the length."""
        lo, hi = LinearForm.parse("0", gens), LinearForm.parse("c", gens)
        assert integrate_over_interval(poly("a"), lo, hi) == poly("a*c")

    def test_integral_matches_random_points(self, gens, poly) -> None:
        """Test the integral of a cubic against the closed antiderivative at random points."""
        rng = random.Random(20220919)
        lo, hi = LinearForm.parse("c", gens), LinearForm.parse("b+2*c", gens)
        integral = integrate_over_interval(poly("3*(a+c)*(b+2*c-u)^2"), lo, hi)
        for _ in range(10):
            point = {name: Fraction(rng.randint(1, 9), rng.randint(1, 5)) for name in "abc"}
            a, b, c = point["a"], point["b"], point["c"]
            assert poly_eval(integral, point) == (a + c) * (b + c) ** 3


class TestRationalFunction:
    def test_equality_is_semantic(self, poly) -> None:
        """Test that equal quotients compare equal in any representation."""
        assert RationalFunction(poly("a^2-b^2"), poly("a-b")) == RationalFunction(poly("a+b"))
        half = RationalFunction(poly("a"), poly("2*b"))
        assert RationalFunction(poly("2*a"), poly("4*b")) == half

    def test_reduced_form(self, poly) -> None:
        """Test that common factors cancel and the denominator is monic."""
        value = RationalFunction(poly("6*a*c"), poly("3*c^2"))
        assert value.numerator == poly("2*a")
        assert value.denominator == poly("c")

    def test_arithmetic(self, poly) -> None:
        """Test sums and products of quotients."""
        x = RationalFunction(poly("1"), poly("a"))
        y = RationalFunction(poly("1"), poly("b"))
        assert x + y == RationalFunction(poly("a+b"), poly("a*b"))
        assert (x * y) * poly("a*b") == RationalFunction(poly("1"))

    def test_zero_denominator(self, poly) -> None:
        """Test that a zero denominator is rejected."""
        with pytest.raises(InputError):
            RationalFunction(poly("a"), poly("0"))

    def test_evaluate(self, poly) -> None:
        """Test exact evaluation and a vanishing denominator."""
        value = RationalFunction(poly("-c"), poly("a+b"))
        assert value.evaluate({"a": 1, "b": 2, "c": 1}) == Fraction(-1, 3)
        with pytest.raises(InputError):
            value.evaluate({"a": 1, "b": -1, "c": 1})

    def test_immutable(self, poly) -> None:
        """Test that a rational function cannot be modified in place."""
        value = RationalFunction(poly("a"))
        with pytest.raises(AttributeError):
            value.numerator = poly("b")


class TestLaurentSeries:
    def test_product_truncates(self, gens) -> None:
        """Test (1 + e)(1 - e) = 1 - e^2 through the common truncation."""
        one, e = constant(1, gens), constant(1, gens)
        x = LaurentSeries(0, (one, e, constant(0, gens)), 2)
        y = LaurentSeries(0, (one, -e, constant(0, gens)), 2)
        product = laurent_mul_truncate(x, y)
        assert product.truncation_order == 2
        assert [product.coefficient(k) for k in range(3)] == [one, constant(0, gens), -e]

    def test_pole_orders_add(self, gens) -> None:
        """Test that a pole times a pole lowers the leading order and the truncation."""
        one = constant(1, gens)
        pole = LaurentSeries(-1, (one, one, one), 1)
        product = laurent_mul_truncate(pole, pole)
        assert product.lowest_order == -2
        assert product.truncation_order == 0
        assert product.coefficient(-2) == one
        assert product.coefficient(0) == constant(3, gens)

    def test_coefficient_beyond_truncation(self, gens) -> None:
        """Test that unknown coefficients are not silently zero."""
        series = LaurentSeries(0, (constant(1, gens),), 0)
        with pytest.raises(InputError):
            series.coefficient(1)

    def test_mismatched_length(self, gens) -> None:
        """Test that the coefficient count must match the orders."""
        with pytest.raises(InputError):
            LaurentSeries(0, (constant(1, gens),), 2)
