#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Tests for the fixed-point expansion and the Donaldson-Futaki invariant."""

import pytest
from sympy import Symbol

from engine import (
    CaseDataError,
    FixedPoint,
    InputError,
    LocalizationData,
    b0_b1_closed,
    character_series_oracle,
    df_invariant,
)
from engine.symbolic import parse_polynomial

GENS = (Symbol("m"),)


def _poly(text: str):
    return parse_polynomial(text, GENS)


def _line(*points: FixedPoint) -> LocalizationData:
    return LocalizationData(1, ("H",), points, {"H": _poly("m")}, GENS)


@pytest.fixture
def projective_line() -> LocalizationData:
    """P1 with O(m) and the standard C* action."""
    return _line(FixedPoint("P0", (1,), {"H": 0}), FixedPoint("Pinf", (-1,), {"H": -1}))


class TestClosedForms:
    def test_projective_line(self, projective_line) -> None:
        """Test b0 = -m^2/2 and b1 = -m/2."""
        b0, b1 = b0_b1_closed(projective_line)
        assert b0 == _poly("-1/2*m^2")
        assert b1 == _poly("-1/2*m")


class TestSeriesOracle:
    def test_projective_line(self, projective_line) -> None:
        """Test that h(k) = mk + 1 and the poles cancel."""
        expansion = character_series_oracle(projective_line)
        gens = GENS + (Symbol("k"),)
        assert expansion.pole_check
        assert expansion.h == parse_polynomial("m*k+1", gens)
        assert expansion.w == parse_polynomial("-1/2*m^2*k^2-1/2*m*k", gens)

    def test_longer_truncation(self, projective_line) -> None:
        """Test that keeping more terms does not change the result."""
        short = character_series_oracle(projective_line)
        long = character_series_oracle(projective_line, 6)
        assert (short.h, short.w) == (long.h, long.w)

    def test_truncation_too_short(self, projective_line) -> None:
        """Test the minimum truncation."""
        with pytest.raises(InputError):
            character_series_oracle(projective_line, 2)

    def test_uncancelled_poles(self) -> None:
        """Test that inconsistent weights leave a pole."""
        data = _line(FixedPoint("P0", (1,), {"H": 0}), FixedPoint("P1", (1,), {"H": -1}))
        expansion = character_series_oracle(data)
        assert not expansion.pole_check
        assert not expansion.poles[0].is_zero


class TestDonaldsonFutaki:
    def test_projective_line(self, projective_line) -> None:
        """Test that the product configuration of P1 has vanishing invariant."""
        result = df_invariant(projective_line, _poly("m"), _poly("1"))
        assert result.oracle_agreement is True
        assert result.df.is_zero()

    def test_single_oracle(self, projective_line) -> None:
        """Test that one oracle leaves the agreement unset."""
        for oracle in ("closed", "series"):
            result = df_invariant(projective_line, _poly("m"), _poly("1"), oracle)
            assert result.oracle_agreement is None
            assert result.b0 == _poly("-1/2*m^2")

    def test_uncancelled_poles(self) -> None:
        """Test that the series oracle refuses inconsistent weights."""
        data = _line(FixedPoint("P0", (1,), {"H": 0}), FixedPoint("P1", (1,), {"H": -1}))
        with pytest.raises(CaseDataError):
            df_invariant(data, _poly("m"), _poly("1"))

    def test_bad_arguments(self, projective_line) -> None:
        """Test an unknown oracle and a vanishing a0."""
        with pytest.raises(InputError):
            df_invariant(projective_line, _poly("m"), _poly("1"), "guess")
        with pytest.raises(InputError):
            df_invariant(projective_line, _poly("0"), _poly("1"))


class TestFixedPointData:
    @pytest.mark.parametrize(
        "point",
        [
            FixedPoint("P", (0,), {"H": 0}),
            FixedPoint("P", (1, 1), {"H": 0}),
            FixedPoint("P", (1,), {}),
        ],
    )
    def test_rejected(self, point) -> None:
        """Test zero weights, wrong arity and missing bundle weights."""
        with pytest.raises(CaseDataError):
            _line(point)

    def test_undeclared_bundle(self) -> None:
        """Test that the polarization may only use declared bundles."""
        with pytest.raises(CaseDataError):
            LocalizationData(
                1, ("H",), (FixedPoint("P", (1,), {"H": 0}),), {"G": _poly("m")}, GENS
            )
