#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Positivity certificates by affine substitution and coefficient inspection."""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, Union

from sympy import Poly, Symbol

from .errors import CaseDataError
from .symbolic import (
    LinearForm,
    constant,
    format_polynomial,
    identifiers,
    parse_polynomial,
    polynomial,
    substitute,
    to_fraction,
    variable,
)

logger = logging.getLogger(__name__)


class Status(str, Enum):
    """Outcome of a certificate."""

    POSITIVE = "positive"
    NONNEGATIVE = "nonnegative"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class IntervalMap:
    """Map a parameter in [lower, upper] onto the open quadrant in `into`.

    The parameter becomes (lower*x + upper*y)/(x + y) and the result is cleared by
    (x + y)^degree, which keeps its sign.
    """

    variable: str
    lower: Fraction
    upper: Fraction
    into: Tuple[str, str]


@dataclass(frozen=True)
class Substitution:
    """Triangular affine change of variables, optionally followed by an interval map.

    Each assignment maps an old variable to an expression in retained variables,
    previously assigned variables and fresh variables.
    """

    assignments: Tuple[Tuple[str, str], ...] = ()
    interval: Union[IntervalMap, None] = None

    def target_variables(self, variables: Sequence[str]) -> Tuple[str, ...]:
        """Variables of the substituted polynomial."""
        assigned = {old for old, _ in self.assignments}
        names = [name for name in variables if name not in assigned]
        for _, text in self.assignments:
            names.extend(n for n in identifiers(text) if n not in variables and n not in names)
        if self.interval is not None:
            names = [name for name in names if name != self.interval.variable]
            names.extend(self.interval.into)
        return tuple(names)

    def images(self, variables: Sequence[str]) -> Tuple[Tuple[Symbol, ...], Dict[str, Poly]]:
        """Resolve the assignments into polynomial images over the intermediate variables.

        Returns:
            Tuple[Tuple[Symbol, ...], Dict[str, Poly]]: Generators after the affine step
            and the image of every assigned variable.

        Raises:
            CaseDataError: Thrown if the substitution is not triangular.
        """
        assigned = [old for old, _ in self.assignments]
        fresh = [
            n
            for _, text in self.assignments
            for n in identifiers(text)
            if n not in variables
        ]
        names = list(variables) + [n for i, n in enumerate(fresh) if n not in fresh[:i]]
        gens = tuple(Symbol(name) for name in names)
        resolved: Dict[str, Poly] = {}
        for position, (old, text) in enumerate(self.assignments):
            if old not in variables:
                raise CaseDataError(f"Substitution assigns unknown variable {old!r}.")
            later = set(assigned[position:])
            used = set(identifiers(text))
            if used & later:
                raise CaseDataError(
                    f"Substitution for {old} uses {sorted(used & later)[0]} "
                    "before it is assigned."
                )
            image = parse_polynomial(text, gens)
            resolved[old] = substitute(image, resolved, gens) if resolved else image
        affine_names = [n for n in names if n not in resolved]
        affine_gens = tuple(Symbol(n) for n in affine_names)
        return affine_gens, {k: polynomial(v, affine_gens) for k, v in resolved.items()}

    def apply(self, p: Poly, variables: Sequence[str]) -> Poly:
        """Substitute into a polynomial over `variables` (extra generators must not occur)."""
        affine_gens, images = self.images(variables)
        result = substitute(p, images, affine_gens)
        if self.interval is not None:
            result = homogenize_interval(result, self.interval)
        return polynomial(result, tuple(Symbol(n) for n in self.target_variables(variables)))

    def check_covers(self, variables: Sequence[str], region: Sequence[LinearForm]) -> List[str]:
        """Check that the nonnegative orthant of the new variables covers the region.

        Every fresh variable v with old -> rest + v must satisfy v = old - rest >= 0 on the
        region: either old - rest has nonnegative coefficients or it is a positive multiple
        of a region form. An interval map needs both of its bounds among the region forms.

        Returns:
            List[str]: One message per assignment that fails the check.
        """
        failures = []
        gens = tuple(Symbol(n) for n in variables)
        for old, text in self.assignments:
            fresh = [n for n in identifiers(text) if n not in variables]
            if len(fresh) != 1:
                failures.append(f"{old} -> {text} must introduce exactly one fresh variable")
                continue
            extended = gens + (Symbol(fresh[0]),)
            image = parse_polynomial(text, extended)
            v = variable(fresh[0], extended)
            rest = image - v
            if rest.degree(Symbol(fresh[0])) > 0 or image.total_degree() > 1:
                failures.append(f"{old} -> {text} is not {fresh[0]} plus a linear form")
                continue
            form = LinearForm.from_polynomial(polynomial(variable(old, extended) - rest, gens))
            if not _nonnegative_form(form) and not any(_proportional(form, r) for r in region):
                failures.append(f"{fresh[0]} = {form} is not nonnegative on the region")
        if self.interval is not None:
            name = self.interval.variable
            lower = LinearForm(-self.interval.lower, ((name, Fraction(1)),))
            upper = LinearForm(self.interval.upper, ((name, Fraction(-1)),))
            for bound in (lower, upper):
                if not any(_proportional(bound, r) for r in region):
                    failures.append(f"interval bound {bound} >= 0 is not a region inequality")
        return failures


def _nonnegative_form(form: LinearForm) -> bool:
    return form.constant >= 0 and all(c >= 0 for _, c in form.coefficients)


def _proportional(form: LinearForm, other: LinearForm) -> bool:
    if not other.coefficients:
        return False
    name, value = other.coefficients[0]
    mine = dict(form.coefficients).get(name, Fraction(0))
    if mine == 0 or (mine > 0) != (value > 0):
        return False
    ratio = mine / value
    scaled = LinearForm(
        other.constant * ratio, tuple((n, c * ratio) for n, c in other.coefficients)
    )
    return scaled == form


def homogenize_interval(p: Poly, interval: IntervalMap) -> Poly:
    """Replace t by (lower*x + upper*y)/(x + y) and clear the denominator (x + y)^deg_t."""
    names = [str(g) for g in p.gens]
    x_name, y_name = interval.into
    target_names = [n for n in names if n != interval.variable] + [x_name, y_name]
    gens = tuple(Symbol(n) for n in target_names)
    x, y = variable(x_name, gens), variable(y_name, gens)
    image = x * constant(interval.lower, gens) + y * constant(interval.upper, gens)
    total = x + y
    if interval.variable not in names:
        return polynomial(p, gens)
    index = names.index(interval.variable)
    degree = p.degree(Symbol(interval.variable))
    by_power: Dict[int, Dict[Tuple[int, ...], object]] = {}
    for monom, coeff in p.terms():
        rest = monom[:index] + (0,) + monom[index + 1 :]
        by_power.setdefault(monom[index], {})[rest] = coeff
    result = constant(0, gens)
    for power, terms in by_power.items():
        coefficient = polynomial(Poly.from_dict(terms, *p.gens), gens)
        result = result + coefficient * image**power * total ** (degree - power)
    return result


@dataclass(frozen=True)
class Certificate:
    """Result of inspecting the coefficients of a substituted polynomial."""

    status: Status
    witness: Poly
    strictness: Union[Tuple[int, ...], None] = None

    def strictness_monomial(self) -> str:
        if self.strictness is None:
            return ""
        names = [str(g) for g in self.witness.gens]
        factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, self.strictness) if e]
        return "*".join(factors) or "1"

    def summary(self) -> str:
        text = f"{self.status.value}: {format_polynomial(self.witness)}"
        if self.strictness is not None:
            text += f" (strict by {self.strictness_monomial()})"
        return text


def certify_orthant(p: Poly, strict_vars: Sequence[str]) -> Certificate:
    """Certify a polynomial on the closed orthant by its coefficients.

    Args:
        p (Poly): Polynomial whose variables range over nonnegative reals.
        strict_vars (Sequence[str]): Variables known to be strictly positive.

    Returns:
        Certificate: positive when every coefficient is nonnegative and some positive
        term only involves strict variables; nonnegative without such a term;
        inconclusive when a coefficient is negative.
    """
    terms = p.terms(order="grlex")
    if any(to_fraction(coeff) < 0 for _, coeff in terms):
        logger.debug("Certificate inconclusive: negative coefficient present.")
        return Certificate(Status.INCONCLUSIVE, p)
    strict = {i for i, g in enumerate(p.gens) if str(g) in set(strict_vars)}
    for monom, coeff in terms:
        if to_fraction(coeff) > 0 and all(i in strict for i, e in enumerate(monom) if e):
            return Certificate(Status.POSITIVE, p, tuple(monom))
    return Certificate(Status.NONNEGATIVE, p)


def certify_on_region(
    p: Poly, substitution: Substitution, variables: Sequence[str], strict_vars: Sequence[str]
) -> Certificate:
    """Apply a substitution that maps a region onto an orthant, then certify there."""
    return certify_orthant(substitution.apply(p, variables), strict_vars)


@dataclass(frozen=True)
class LinkedCertificate:
    """Certificate that sum(m_i * N_i) == cofactor * target with everything signed.

    It proves that some N_i is positive on the region.
    """

    target: Certificate
    multipliers: Tuple[Certificate, ...]
    cofactor: Certificate
    difference: Poly

    @property
    def identity_holds(self) -> bool:
        return self.difference.is_zero

    @property
    def proves(self) -> bool:
        return (
            self.identity_holds
            and self.target.status is Status.POSITIVE
            and self.cofactor.status is Status.POSITIVE
            and all(m.status is not Status.INCONCLUSIVE for m in self.multipliers)
        )


def certify_link(
    target: Poly,
    quantities: Sequence[Poly],
    multipliers: Sequence[Poly],
    cofactor: Poly,
    substitution: Substitution,
    variables: Sequence[str],
    strict_vars: Sequence[str],
) -> LinkedCertificate:
    """Tie a certified target to the quantities it is meant to sign.

    Args:
        target (Poly): Polynomial certified positive on the region.
        quantities (Sequence[Poly]): The N_i, e.g. -beta·(L^n)^2 per divisor.
        multipliers (Sequence[Poly]): One nonnegative multiplier per quantity.
        cofactor (Poly): Positive polynomial with sum(m_i N_i) == cofactor * target.
        substitution (Substitution): Map from the region onto the orthant.
        variables (Sequence[str]): Variables of the polynomials before substitution.
        strict_vars (Sequence[str]): Strictly positive variables after substitution.

    Returns:
        LinkedCertificate: Certificates of the target, multipliers and cofactor together
        with the difference of the two sides of the identity.
    """
    combination = cofactor * 0
    for quantity, multiplier in zip(quantities, multipliers):
        combination = combination + multiplier * quantity
    difference = combination - cofactor * target
    return LinkedCertificate(
        certify_on_region(target, substitution, variables, strict_vars),
        tuple(certify_on_region(m, substitution, variables, strict_vars) for m in multipliers),
        certify_on_region(cofactor, substitution, variables, strict_vars),
        difference,
    )
