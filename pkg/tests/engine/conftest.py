#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Fixtures for the engine tests: two families built directly from their intersection data."""

from fractions import Fraction
from typing import Callable, Tuple

import pytest
from sympy import Poly, Symbol

from engine import (
    Chamber,
    ChamberSchedule,
    CurveClass,
    DivisorClass,
    IntersectionForm,
    LinearForm,
    Variety,
)
from engine.symbolic import parse_polynomial


def _class(mapping, basis, gens) -> DivisorClass:
    return DivisorClass.from_mapping(
        {name: parse_polynomial(text, gens) for name, text in mapping.items()}, basis, gens
    )


def _chamber(lo: str, hi: str, gens, support=(), curves=()) -> Chamber:
    return Chamber((LinearForm.parse(lo, gens), LinearForm.parse(hi, gens)), support, curves)


@pytest.fixture
def gens() -> Tuple[Symbol, ...]:
    return tuple(Symbol(name) for name in ("a", "b", "c", "u"))


@pytest.fixture
def poly(gens) -> Callable[[str], Poly]:
    return lambda text: parse_polynomial(text, gens)


@pytest.fixture
def threefold(gens) -> Variety:
    """Blow-up of P1 x P2 along a curve of bidegree (2,1)."""
    basis = ("H1", "H2", "E")
    form = IntersectionForm.from_names(
        3, basis, {"H1.H2.H2": 1, "H1.E.E": -2, "H2.E.E": -1, "E.E.E": -5}
    )
    curves = {
        "l1": CurveClass("l1", (Fraction(1), Fraction(0), Fraction(1))),
        "l2": CurveClass("l2", (Fraction(0), Fraction(1), Fraction(2))),
        "l3": CurveClass("l3", (Fraction(0), Fraction(0), Fraction(-1))),
    }
    return Variety(
        form,
        gens,
        ("a", "b", "c"),
        _class({"H1": "-2", "H2": "-3", "E": "1"}, basis, gens),
        _class({"H1": "a+c", "H2": "b+2*c", "E": "-c"}, basis, gens),
        curves,
        {"S": _class({"H2": "1", "E": "-1"}, basis, gens)},
    )


@pytest.fixture
def threefold_schedule(gens) -> ChamberSchedule:
    chambers = (
        _chamber("0", "c", gens),
        _chamber("c", "b+2*c", gens, ("E",), ("l3",)),
    )
    return ChamberSchedule("S", Fraction(1), chambers)


@pytest.fixture
def surface_gens() -> Tuple[Symbol, ...]:
    return tuple(Symbol(name) for name in ("a1", "a2", "b", "u"))


@pytest.fixture
def surface(surface_gens) -> Variety:
    """Del Pezzo surface of degree 7 in the basis of its three (-1)-curves."""
    basis = ("E", "F1", "F2")
    form = IntersectionForm.from_names(
        2, basis, {"E.E": -1, "F1.F1": -1, "F2.F2": -1, "E.F1": 1, "E.F2": 1}
    )
    curves = {
        "f1": CurveClass("f1", (Fraction(1), Fraction(-1), Fraction(0))),
        "f2": CurveClass("f2", (Fraction(1), Fraction(0), Fraction(-1))),
    }
    return Variety(
        form,
        surface_gens,
        ("a1", "a2", "b"),
        _class({"E": "-3", "F1": "-2", "F2": "-2"}, basis, surface_gens),
        _class({"E": "a1+a2+b", "F1": "a1+b", "F2": "a2+b"}, basis, surface_gens),
        curves,
    )


@pytest.fixture
def surface_schedule(surface_gens) -> ChamberSchedule:
    chambers = (
        _chamber("0", "a1", surface_gens),
        _chamber("a1", "a2", surface_gens, ("F2",), ("f2",)),
        _chamber("a2", "a1+a2+b", surface_gens, ("F1", "F2"), ("f1", "f2")),
    )
    return ChamberSchedule("E", Fraction(1), chambers, ("a1 <= a2",))
