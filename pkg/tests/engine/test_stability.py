#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Tests for the beta invariant, reductions and the family verdict."""

from fractions import Fraction

import pytest
from sympy import Symbol

from engine import (
    ChamberSchedule,
    InputError,
    RationalFunction,
    SignedRegion,
    Verdict,
    VerificationError,
    beta_general,
    compare,
    negativity_quantity,
    pullback_specialize,
    region_key,
    rescaling_invariant,
    slope_mu,
    verdict,
)
from engine.symbolic import parse_polynomial

F_321 = (
    "12*a^2*b^3+36*a^2*b^2*c+36*a^2*b*c^2+6*a*b^4+48*a*b^3*c+114*a*b^2*c^2+93*a*b*c^3"
    "+12*a*c^4+4*b^3*c^2+15*b^2*c^3+18*b*c^4+5*c^5"
)
H_DP7 = "3*a1^2*a2+3*a1*a2^2+6*a1*a2*b+a1*b^2+a2*b^2"
V_DP7 = "2*a1*a2+2*a1*b+2*a2*b+b^2"


@pytest.fixture
def surface_beta(surface, surface_schedule) -> RationalFunction:
    return beta_general(surface, surface_schedule).value


class TestBeta:
    def test_threefold(self, threefold, threefold_schedule, poly) -> None:
        """Test beta_S = -c·f / V^2 on the blow-up of P1 x P2."""
        result = beta_general(threefold, threefold_schedule)
        volume = threefold.volume()
        assert result.value == RationalFunction(-poly("c") * poly(F_321), volume**2)
        assert result.value.evaluate({"a": 1, "b": 1, "c": 1}) == Fraction(-399, 1444)

    def test_surface(self, surface_beta, surface_gens) -> None:
        """Test beta_E = -2bh / (3V^2) on the degree 7 surface."""
        h = parse_polynomial(H_DP7, surface_gens)
        b = parse_polynomial("b", surface_gens)
        volume = parse_polynomial(V_DP7, surface_gens)
        assert surface_beta == RationalFunction(-b * h * 2, volume**2 * 3)
        assert surface_beta.evaluate({"a1": 1, "a2": 1, "b": 1}) == Fraction(-4, 21)
        assert surface_beta.evaluate({"a1": 0, "a2": 1, "b": 1}) == Fraction(-2, 27)

    def test_no_certificate_is_inconclusive(self, threefold, threefold_schedule) -> None:
        """Test that a bare beta value carries no verdict."""
        assert beta_general(threefold, threefold_schedule).verdict == Verdict.INCONCLUSIVE

    def test_empty_schedule(self, threefold) -> None:
        """Test that a divisor needs at least one chamber."""
        with pytest.raises(InputError):
            beta_general(threefold, ChamberSchedule("S", Fraction(1), ()))


class TestInvariants:
    def test_rescaling(self, threefold, threefold_schedule, surface_beta) -> None:
        """Test that beta is homogeneous of degree 0 and the slope is not."""
        value = beta_general(threefold, threefold_schedule).value
        assert rescaling_invariant(value, ("a", "b", "c"))
        assert rescaling_invariant(surface_beta, ("a1", "a2", "b"))
        assert not rescaling_invariant(slope_mu(threefold), ("a", "b", "c"))

    def test_negativity_quantity(self, surface_beta, surface_gens) -> None:
        """Test that -beta·V^2 clears to a polynomial."""
        volume = parse_polynomial(V_DP7, surface_gens)
        expected = parse_polynomial(f"2/3*b*({H_DP7})", surface_gens)
        assert negativity_quantity(surface_beta, volume) == expected

    def test_negativity_needs_cleared_denominator(self, surface_beta, surface_gens) -> None:
        """Test that a denominator beyond V^2 is a verification failure."""
        volume = parse_polynomial(V_DP7, surface_gens)
        with pytest.raises(VerificationError):
            negativity_quantity(surface_beta / RationalFunction(volume), volume)

    def test_compare(self, surface_beta) -> None:
        """Test matching and mismatching comparisons."""
        assert compare(surface_beta, surface_beta * 1).matches
        mismatch = compare(surface_beta, surface_beta * 2)
        assert not mismatch.matches
        assert mismatch.describe().startswith("difference")


class TestReduction:
    def test_specialize_a1(self, surface_beta) -> None:
        """Test the face a1 = 0 of the degree 7 surface."""
        child = tuple(Symbol(name) for name in ("a2", "b", "u"))
        expected = RationalFunction(
            parse_polynomial("-2*a2*b", child), parse_polynomial("3*(2*a2+b)^2", child)
        )
        images = {"a1": parse_polynomial("0", child)}
        assert pullback_specialize(surface_beta, images, expected).matches

    def test_wrong_reduction(self, surface_beta) -> None:
        """Test that a wrong reduced formula is reported with its difference."""
        child = tuple(Symbol(name) for name in ("a2", "b", "u"))
        expected = RationalFunction(
            parse_polynomial("-a2*b", child), parse_polynomial("3*(2*a2+b)^2", child)
        )
        comparison = pullback_specialize(
            surface_beta, {"a1": parse_polynomial("0", child)}, expected
        )
        assert not comparison.matches
        assert not comparison.difference.is_zero


class TestVerdict:
    def test_region_key(self) -> None:
        """Test that region keys ignore spacing and order."""
        assert region_key(["b <= c", "a<=b"]) == ("a<=b", "b<=c")

    def test_every_region_proved(self) -> None:
        """Test that a full cover gives the unstable verdict with its witnesses."""
        signed = [
            SignedRegion(("b <= c",), True, "E"),
            SignedRegion(("c <= b",), True, "E"),
        ]
        result = verdict("beta", signed, [["b<=c"], ["c<=b"]])
        assert result.verdict == Verdict.K_UNSTABLE
        assert result.witness == "E"

    def test_missing_region(self) -> None:
        """Test that an uncovered region is inconclusive."""
        signed = [SignedRegion(("b <= c",), True, "E"), SignedRegion(("c <= b",), False, "E")]
        assert verdict("beta", signed, [["b <= c"], ["c <= b"]]).verdict == Verdict.INCONCLUSIVE

    def test_empty_cover(self) -> None:
        """Test that nothing to cover never passes silently."""
        signed = [SignedRegion((), True, "S")]
        assert verdict("beta", signed, []).verdict == Verdict.INCONCLUSIVE

    def test_degeneration(self) -> None:
        """Test that degeneration families keep their fixed verdict."""
        assert verdict("degeneration", [], []).verdict == Verdict.DEGENERATION
