#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Beta invariants, the adjoint shortcut, pullback identities and family verdicts."""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence, Tuple, Union

from sympy import Poly, Symbol

from .certify import LinkedCertificate
from .errors import InputError, VerificationError
from .geometry import Variety, intersect
from .symbolic import (
    LinearForm,
    RationalFunction,
    constant,
    format_polynomial,
    integrate_over_interval,
    polynomial,
    to_rational,
    variable,
)
from .zariski import ChamberSchedule, volume_piecewise, volume_t_derivative

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    """Fixed verdict strings of the report."""

    K_UNSTABLE = "K-unstable for every ample L"
    DEGENERATION = "not K-polystable for every ample L (degeneration, not computed)"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class BetaResult:
    """Beta invariant of one divisor on one region branch."""

    divisor: str
    value: RationalFunction
    region: Tuple[str, ...] = ()
    branch: int = 0
    sign_certificate: Union[LinkedCertificate, None] = None

    @property
    def verdict(self) -> Verdict:
        if self.sign_certificate is not None and self.sign_certificate.proves:
            return Verdict.K_UNSTABLE
        return Verdict.INCONCLUSIVE


@dataclass(frozen=True)
class Comparison:
    """Semantic comparison of a computed rational function with an expected one."""

    matches: bool
    difference: Poly

    def describe(self) -> str:
        return "match" if self.matches else f"difference {format_polynomial(self.difference)}"


def compare(computed: RationalFunction, expected: RationalFunction) -> Comparison:
    """Compare by cross-multiplication."""
    difference = computed.cross_difference(expected)
    return Comparison(difference.is_zero, difference)


def beta_general(variety: Variety, schedule: ChamberSchedule) -> BetaResult:
    """Beta invariant from the volume integrals of one schedule.

    beta = A + (n mu / L^n) int vol + (1 / L^n) int d/dt vol, both integrals taken
    chamber-wise up to the pseudoeffective threshold.

    Args:
        variety (Variety): Intersection data.
        schedule (ChamberSchedule): Chambers of L - uF on one region.

    Returns:
        BetaResult: The exact value on the schedule's region.

    Raises:
        InputError: Thrown if L^n vanishes or the schedule is empty.
    """
    if not schedule.chambers:
        raise InputError(f"Divisor {schedule.divisor} has an empty schedule.")
    volume = variety.volume()
    if volume.is_zero:
        raise InputError("Degenerate polarization: L^n is identically zero.")
    pieces = volume_piecewise(variety, schedule).pieces
    derivatives = volume_t_derivative(variety, schedule)
    volume_integral = volume * 0
    derivative_integral = volume * 0
    for chamber, piece, derivative in zip(schedule.chambers, pieces, derivatives):
        volume_integral += integrate_over_interval(piece, chamber.lo, chamber.hi)
        derivative_integral += integrate_over_interval(derivative, chamber.lo, chamber.hi)
    n = variety.dim
    numerator = (
        volume**2 * to_rational(schedule.log_discrepancy)
        + variety.slope_numerator() * volume_integral * n
        + volume * derivative_integral
    )
    value = RationalFunction(numerator, volume**2)
    logger.debug("beta(%s) = %s", schedule.label(), value)
    return BetaResult(schedule.divisor, value, schedule.region, schedule.branch)


@dataclass(frozen=True)
class AdjointSchedule:
    """Chambers of -K - uF for a polarization of the form L = -K + bF."""

    shift: str
    schedule: ChamberSchedule


def phi(variety: Variety, adjoint: AdjointSchedule) -> RationalFunction:
    """phi(b) = -(L + n b F)·L^(n-1) / (L^n)^2."""
    n = variety.dim
    polarization = variety.polarization
    shift = variable(adjoint.shift, variety.gens)
    divisor = variety.divisor(adjoint.schedule.divisor)
    volume = variety.volume()
    numerator = intersect(
        variety.form, [polarization + divisor.scale(shift * n)] + [polarization] * (n - 1)
    )
    return RationalFunction(-numerator, volume**2)


def beta_adjoint(variety: Variety, adjoint: AdjointSchedule) -> RationalFunction:
    """Beta invariant of F for L = -K + bF via A + b + phi(b) int_{-b}^tau vol(-K - uF).

    Raises:
        InputError: Thrown if the chambers do not start at u = -b.
    """
    schedule = adjoint.schedule
    start = LinearForm(Fraction(0), ((adjoint.shift, Fraction(-1)),))
    if not schedule.chambers or schedule.chambers[0].lo != start:
        raise InputError(f"Adjoint chambers must start at u = -{adjoint.shift}.")
    pieces = volume_piecewise(variety, schedule, base=-variety.canonical).pieces
    integral = pieces[0] * 0
    for chamber, piece in zip(schedule.chambers, pieces):
        integral += integrate_over_interval(piece, chamber.lo, chamber.hi)
    shift = variable(adjoint.shift, variety.gens)
    base = RationalFunction(shift + constant(schedule.log_discrepancy, variety.gens))
    return base + phi(variety, adjoint) * integral


def beta_crosscheck_adjoint(
    variety: Variety, schedule: ChamberSchedule, adjoint: AdjointSchedule
) -> Comparison:
    """Compare the general pipeline with the adjoint shortcut."""
    comparison = compare(beta_general(variety, schedule).value, beta_adjoint(variety, adjoint))
    if not comparison.matches:
        logger.warning("Adjoint cross-check failed: %s", comparison.describe())
    return comparison


def pullback_specialize(
    parent_beta: RationalFunction,
    specialization: Mapping[str, Poly],
    expected: RationalFunction,
) -> Comparison:
    """Specialize a parent family's beta and compare with the reduced formula."""
    return compare(parent_beta.substitute(specialization, expected.gens), expected)


def rescaling_invariant(value: RationalFunction, parameters: Sequence[str]) -> bool:
    """Whether value(lambda·x) == value(x) for a fresh symbol lambda."""
    gens = tuple(value.gens)
    scale = Symbol("lambda_")
    extended = gens + (scale,)
    images = {
        name: variable(name, extended) * variable("lambda_", extended) for name in parameters
    }
    return value.substitute(images, extended) == RationalFunction(
        polynomial(value.numerator, extended), polynomial(value.denominator, extended)
    )


def negativity_quantity(beta: RationalFunction, volume: Poly) -> Poly:
    """-beta·(L^n)^2, a polynomial that is positive exactly where beta is negative.

    Raises:
        VerificationError: Thrown if (L^n)^2 does not clear the denominator of beta.
    """
    quantity = -(beta * volume**2)
    if quantity.denominator.total_degree() > 0:
        raise VerificationError(
            "(L^n)^2 does not clear the denominator of beta",
            format_polynomial(quantity.denominator),
        )
    return quantity.numerator * (1 / quantity.denominator.LC())


@dataclass(frozen=True)
class SignedRegion:
    """A region on which a linked certificate was attempted."""

    region: Tuple[str, ...]
    proves: bool
    witness: str


@dataclass(frozen=True)
class FamilyVerdict:
    verdict: Verdict
    witness: str


def region_key(region: Sequence[str]) -> Tuple[str, ...]:
    return tuple(sorted("".join(text.split()) for text in region))


def verdict(
    mechanism: str, signed: Sequence[SignedRegion], cover: Sequence[Sequence[str]]
) -> FamilyVerdict:
    """Combine certificates into the family verdict.

    A family is K-unstable for every ample L when every region of its cover has a
    certificate that proves negativity there. Degeneration families carry their fixed
    verdict; anything else is inconclusive, never a silent pass.
    """
    if mechanism == "degeneration":
        return FamilyVerdict(Verdict.DEGENERATION, "degeneration")
    proved = {region_key(s.region): s.witness for s in signed if s.proves}
    witnesses = []
    for region in cover:
        key = region_key(region)
        if key not in proved:
            logger.debug("Region %s is not covered by a certificate.", ", ".join(region))
            return FamilyVerdict(Verdict.INCONCLUSIVE, "")
        if proved[key] not in witnesses:
            witnesses.append(proved[key])
    if not cover:
        return FamilyVerdict(Verdict.INCONCLUSIVE, "")
    return FamilyVerdict(Verdict.K_UNSTABLE, ", ".join(witnesses))
