#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Donaldson-Futaki invariants of product test configurations from fixed-point data."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from typing import Dict, Mapping, Tuple, Union

from sympy import Poly, Symbol

from .errors import CaseDataError, InputError
from .symbolic import (
    LaurentSeries,
    RationalFunction,
    constant,
    exp_series,
    inverse_series,
    laurent_mul_truncate,
    polynomial,
    to_rational,
    variable,
    zero,
)

logger = logging.getLogger(__name__)

ORACLES = ("closed", "series", "both")


@dataclass(frozen=True)
class FixedPoint:
    """Isolated fixed point with its cotangent weights and per-bundle fibre weights."""

    name: str
    alphas: Tuple[int, ...]
    mu: Mapping[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class LocalizationData:
    """Fixed-point data of a torus action together with the polarization."""

    dim: int
    bundles: Tuple[str, ...]
    fixed_points: Tuple[FixedPoint, ...]
    polarization: Mapping[str, Poly]
    gens: Tuple[Symbol, ...]

    def __post_init__(self) -> None:
        for point in self.fixed_points:
            if len(point.alphas) != self.dim:
                raise CaseDataError(
                    f"Fixed point {point.name} has {len(point.alphas)} weights, "
                    f"expected {self.dim}."
                )
            if any(alpha == 0 for alpha in point.alphas):
                raise CaseDataError(f"Fixed point {point.name} has a zero weight.")
            missing = [b for b in self.bundles if b not in point.mu]
            if missing:
                raise CaseDataError(f"Fixed point {point.name} has no weight for {missing[0]}.")
        unknown = [b for b in self.polarization if b not in self.bundles]
        if unknown:
            raise CaseDataError(f"Polarization uses undeclared bundle {unknown[0]}.")

    def fiber_weight(self, point: FixedPoint) -> Poly:
        """mu_L(P) composed from the per-bundle weights."""
        total = zero(self.gens)
        for bundle, coefficient in self.polarization.items():
            total = total + polynomial(coefficient, self.gens) * point.mu[bundle]
        return total


@dataclass(frozen=True)
class CharacterExpansion:
    """Leading coefficients of the equivariant character near the identity."""

    h: Poly
    w: Poly
    pole_check: bool
    poles: Tuple[Poly, ...] = ()


@dataclass(frozen=True)
class DFResult:
    """Expansion coefficients and the Donaldson-Futaki invariant."""

    a0: Poly
    a1: Poly
    b0: Poly
    b1: Poly
    df: RationalFunction
    oracle_agreement: Union[bool, None] = None


def b0_b1_closed(data: LocalizationData) -> Tuple[Poly, Poly]:
    """Closed forms for the weight expansion coefficients.

    b0 = sum mu^(n+1) / ((n+1)! prod alpha) and
    b1 = sum mu^n (sum alpha) / (2 n! prod alpha); for threefolds these are the
    denominators 24 and 12.

    Args:
        data (LocalizationData): Fixed-point data.

    Returns:
        Tuple[Poly, Poly]: b0 and b1 in the parameters.
    """
    n = data.dim
    b0, b1 = zero(data.gens), zero(data.gens)
    for point in data.fixed_points:
        mu = data.fiber_weight(point)
        weight = prod(point.alphas)
        b0 = b0 + mu ** (n + 1) * to_rational(Fraction(1, factorial(n + 1) * weight))
        b1 = b1 + mu**n * to_rational(Fraction(sum(point.alphas), 2 * factorial(n) * weight))
    return b0, b1


def _pole_factor(alpha: int, order: int, gens: Tuple[Symbol, ...]) -> LaurentSeries:
    """1/(1 - exp(-alpha eps)) through eps^(order - 1)."""
    coefficients = tuple(
        constant(Fraction((-1) ** j * alpha ** (j + 1), factorial(j + 1)), gens)
        for j in range(order + 1)
    )
    inverse = inverse_series(LaurentSeries(0, coefficients, order))
    return LaurentSeries(-1, inverse.coefficients, inverse.truncation_order - 1)


def character_series_oracle(
    data: LocalizationData, truncation: Union[int, None] = None
) -> CharacterExpansion:
    """Expand the localization sum for chi_k(exp eps) in eps.

    Args:
        data (LocalizationData): Fixed-point data.
        truncation (int | None): Series coefficients kept per factor, at least n + 2.

    Returns:
        CharacterExpansion: h(k) and w(k) as polynomials in k and the parameters, and
        whether every negative power cancels identically.

    Raises:
        InputError: Thrown if the truncation is too short to reach eps^1.
    """
    n = data.dim
    truncation = n + 2 if truncation is None else truncation
    if truncation < n + 2:
        raise InputError(f"Truncation {truncation} is below the minimum {n + 2}.")
    gens = tuple(data.gens) + (Symbol("k"),)
    k = variable("k", gens)
    order = truncation - 1
    total = None
    for point in data.fixed_points:
        term = exp_series(k * polynomial(data.fiber_weight(point), gens), order)
        for alpha in point.alphas:
            term = laurent_mul_truncate(term, _pole_factor(alpha, order, gens))
        total = term if total is None else total + term
    poles = tuple(total.coefficient(i) for i in range(-n, 0))
    pole_check = all(p.is_zero for p in poles)
    if not pole_check:
        logger.warning("Character expansion has uncancelled poles.")
    return CharacterExpansion(total.coefficient(0), total.coefficient(1), pole_check, poles)


def coefficient_of(p: Poly, name: str, power: int, gens: Tuple[Symbol, ...]) -> Poly:
    """Coefficient of name^power in p, as a polynomial in `gens`."""
    names = [str(g) for g in p.gens]
    index = names.index(name)
    terms: Dict[Tuple[int, ...], object] = {}
    for monom, coeff in p.terms():
        if monom[index] == power:
            terms[monom[:index] + (0,) + monom[index + 1 :]] = coeff
    if not terms:
        return zero(gens)
    return polynomial(Poly.from_dict(terms, *p.gens), gens)


def df_invariant(
    data: LocalizationData,
    a0: Poly,
    a1: Poly,
    oracle: str = "both",
    expansion: Union[CharacterExpansion, None] = None,
) -> DFResult:
    """Donaldson-Futaki invariant (b0 a1 - b1 a0) / a0.

    Args:
        data (LocalizationData): Fixed-point data.
        a0 (Poly): L^n / n!.
        a1 (Poly): (-K)·L^(n-1) / 4 for threefolds.
        oracle (str): Source of b0 and b1: "closed", "series" or "both".
        expansion (CharacterExpansion | None): Precomputed series expansion.

    Returns:
        DFResult: The invariant; `oracle_agreement` is set when both sources ran.

    Raises:
        InputError: Thrown on an unknown oracle, a vanishing a0, or uncancelled poles.
    """
    if oracle not in ORACLES:
        raise InputError(f"Unknown oracle {oracle!r}; expected one of {', '.join(ORACLES)}.")
    gens = data.gens
    a0, a1 = polynomial(a0, gens), polynomial(a1, gens)
    if a0.is_zero:
        raise InputError("a0 vanishes identically.")
    agreement = None
    if oracle in ("series", "both"):
        expansion = character_series_oracle(data) if expansion is None else expansion
        if not expansion.pole_check:
            raise CaseDataError("Fixed-point weights are inconsistent: poles do not cancel.")
        b0 = coefficient_of(expansion.w, "k", data.dim + 1, gens)
        b1 = coefficient_of(expansion.w, "k", data.dim, gens)
    if oracle in ("closed", "both"):
        closed_b0, closed_b1 = b0_b1_closed(data)
        if oracle == "both":
            agreement = (closed_b0 - b0).is_zero and (closed_b1 - b1).is_zero
            if not agreement:
                logger.warning("Closed forms and series oracle disagree on b0, b1.")
        b0, b1 = closed_b0, closed_b1
    df = RationalFunction(b0 * a1 - b1 * a0, a0)
    logger.debug("DF computed with oracle %s: %s", oracle, df)
    return DFResult(a0, a1, b0, b1, df, agreement)
