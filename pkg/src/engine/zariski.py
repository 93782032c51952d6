#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Chamber-wise Zariski decomposition of L - uF and the resulting volume functions."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Mapping, Tuple, Union

from sympy import Matrix, Poly

from .errors import CaseDataError, InputError
from .geometry import DivisorClass, Variety, intersect, pair_curve
from .symbolic import (
    LinearForm,
    Number,
    derivative,
    format_polynomial,
    parse_inequality,
    poly_eval,
    substitute,
    variable,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Chamber:
    """Interval in u on which the negative part has a fixed support."""

    interval: Tuple[LinearForm, LinearForm]
    negative_support: Tuple[str, ...] = ()
    orthogonality: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.negative_support) != len(self.orthogonality):
            raise CaseDataError(
                "Chamber needs one orthogonality curve per negative support divisor."
            )

    @property
    def lo(self) -> LinearForm:
        return self.interval[0]

    @property
    def hi(self) -> LinearForm:
        return self.interval[1]


@dataclass(frozen=True)
class ChamberSchedule:
    """Ordered chambers of one divisor on one parameter region."""

    divisor: str
    log_discrepancy: Fraction
    chambers: Tuple[Chamber, ...]
    region: Tuple[str, ...] = ()
    branch: int = 0

    @property
    def threshold(self) -> LinearForm:
        return self.chambers[-1].hi

    def region_forms(self, variety: Variety) -> List[LinearForm]:
        """Linear forms that are nonnegative exactly on the region."""
        return [parse_inequality(text, variety.gens) for text in self.region]

    def label(self) -> str:
        region = ", ".join(self.region) or "all parameters"
        return f"{self.divisor} [branch {self.branch}: {region}]"


@dataclass(frozen=True)
class Decomposition:
    """Positive and negative part of a divisor inside one chamber."""

    positive: DivisorClass
    negative: DivisorClass
    gammas: Tuple[Poly, ...]


class ChamberProjection:
    """The linear map D -> D - sum gamma_i(D) N_i of one chamber.

    The gammas solve (D - sum gamma_i N_i)·C_j = 0 for every orthogonality curve C_j.
    """

    def __init__(self, variety: Variety, chamber: Chamber) -> None:
        self.variety = variety
        self.chamber = chamber
        self.supports = [variety.divisor(name) for name in chamber.negative_support]
        self.curves = [variety.curve(name) for name in chamber.orthogonality]
        rows = []
        for curve in self.curves:
            row = []
            for support in self.supports:
                pairing = pair_curve(support, curve)
                if pairing.total_degree() > 0:
                    raise CaseDataError(
                        f"Negative support pairs non-constantly with curve {curve.name}."
                    )
                row.append(pairing.LC() if not pairing.is_zero else 0)
            rows.append(row)
        self.solver = None
        if rows:
            system = Matrix(rows)
            if system.det() == 0:
                raise CaseDataError(
                    "Singular pairing matrix for negative support "
                    f"{', '.join(chamber.negative_support)} against "
                    f"{', '.join(chamber.orthogonality)}."
                )
            self.solver = system.inv()

    def gammas(self, divisor: DivisorClass) -> Tuple[Poly, ...]:
        if self.solver is None:
            return ()
        rhs = [pair_curve(divisor, curve) for curve in self.curves]
        gammas = []
        for i in range(len(self.supports)):
            gamma = rhs[0] * 0
            for j, value in enumerate(rhs):
                if self.solver[i, j] != 0:
                    gamma = gamma + value * self.solver[i, j]
            gammas.append(gamma)
        return tuple(gammas)

    def decompose(self, divisor: DivisorClass) -> Decomposition:
        gammas = self.gammas(divisor)
        negative = divisor.scale(0)
        for gamma, support in zip(gammas, self.supports):
            negative = negative + support.scale(gamma)
        return Decomposition(divisor - negative, negative, gammas)

    def apply(self, divisor: DivisorClass) -> DivisorClass:
        return self.decompose(divisor).positive


def shifted_divisor(
    variety: Variety, divisor: str, base: Union[DivisorClass, None] = None
) -> DivisorClass:
    """base - u·F, with the polarization as default base."""
    base = variety.polarization if base is None else base
    u = variable("u", variety.gens)
    return base - variety.divisor(divisor).scale(u)


def decompose_in_chamber(
    variety: Variety, divisor: DivisorClass, chamber: Chamber
) -> Decomposition:
    """Zariski decomposition of a (possibly u-dependent) class inside one chamber.

    Args:
        variety (Variety): Intersection data.
        divisor (DivisorClass): The class D to decompose.
        chamber (Chamber): Chamber giving the negative support and orthogonality curves.

    Returns:
        Decomposition: P, N and the coefficients of N on its support.

    Raises:
        CaseDataError: Thrown if the pairing matrix of the chamber is singular.
    """
    return ChamberProjection(variety, chamber).decompose(divisor)


@dataclass(frozen=True)
class PiecewiseVolume:
    """vol(base - uF) as one polynomial in (u, parameters) per chamber."""

    schedule: ChamberSchedule
    pieces: Tuple[Poly, ...]

    def evaluate(self, u_value: Number, point: Mapping[str, Number]) -> Fraction:
        """Exact volume at a parameter point and a value of u.

        Raises:
            InputError: Thrown if u lies below the first chamber.
        """
        u_value = Fraction(u_value)
        chambers = self.schedule.chambers
        if u_value < _at(chambers[0].lo, point):
            raise InputError(f"u = {u_value} lies below the first chamber.")
        if u_value > _at(self.schedule.threshold, point):
            return Fraction(0)
        for chamber, piece in zip(chambers, self.pieces):
            if u_value <= _at(chamber.hi, point):
                return poly_eval(piece, {**point, "u": u_value})
        return Fraction(0)


def _at(form: LinearForm, point: Mapping[str, Number]) -> Fraction:
    return form.constant + sum(
        (coeff * Fraction(point[name]) for name, coeff in form.coefficients), Fraction(0)
    )


def volume_piecewise(
    variety: Variety, schedule: ChamberSchedule, base: Union[DivisorClass, None] = None
) -> PiecewiseVolume:
    """Volume of base - uF on every chamber of a schedule.

    Raises:
        CaseDataError: Propagated from the chamber decompositions.
    """
    divisor = shifted_divisor(variety, schedule.divisor, base)
    pieces = []
    for chamber in schedule.chambers:
        positive = ChamberProjection(variety, chamber).apply(divisor)
        pieces.append(variety.power(positive))
    logger.debug("Volume pieces computed for %s.", schedule.label())
    return PiecewiseVolume(schedule, tuple(pieces))


def volume_t_derivative(
    variety: Variety, schedule: ChamberSchedule, base: Union[DivisorClass, None] = None
) -> Tuple[Poly, ...]:
    """d/dt vol(base + tK - uF) at t = 0 on every chamber.

    Each chamber contributes n·P^(n-1)·Pi(K), where Pi is the chamber projection.
    """
    divisor = shifted_divisor(variety, schedule.divisor, base)
    pieces = []
    for chamber in schedule.chambers:
        projection = ChamberProjection(variety, chamber)
        positive = projection.apply(divisor)
        projected_canonical = projection.apply(variety.canonical)
        pieces.append(
            intersect(variety.form, [positive] * (variety.dim - 1) + [projected_canonical])
            * variety.dim
        )
    return tuple(pieces)


@dataclass
class ScheduleReport:
    """Outcome of the well-formedness checks of one schedule."""

    schedule: ChamberSchedule
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def validate_schedule(
    variety: Variety,
    schedule: ChamberSchedule,
    base: Union[DivisorClass, None] = None,
    check_c1: bool = True,
) -> ScheduleReport:
    """Check abutment, continuity and boundary values of a schedule.

    Args:
        variety (Variety): Intersection data.
        schedule (ChamberSchedule): Schedule to check.
        base (DivisorClass | None): Class that u·F is subtracted from.
            Defaults to the polarization.
        check_c1 (bool): Whether to require continuity of d/du vol at the walls.

    Returns:
        ScheduleReport: One message per failed check, naming the wall and the difference.
    """
    report = ScheduleReport(schedule)
    chambers = schedule.chambers
    if not chambers:
        report.failures.append("schedule has no chambers")
        return report
    gens = variety.gens
    volume = volume_piecewise(variety, schedule, base)

    def at_wall(p: Poly, wall: LinearForm) -> Poly:
        return substitute(p, {"u": wall.to_polynomial(gens)})

    for index in range(len(chambers) - 1):
        wall, following = chambers[index].hi, chambers[index + 1].lo
        if wall != following:
            report.failures.append(
                f"chambers {index} and {index + 1} do not abut: {wall} != {following}"
            )
            continue
        left, right = volume.pieces[index], volume.pieces[index + 1]
        difference = at_wall(left - right, wall)
        if not difference.is_zero:
            report.failures.append(
                f"volume jumps at u = {wall}: {format_polynomial(difference)}"
            )
        if check_c1:
            difference = at_wall(derivative(left, "u") - derivative(right, "u"), wall)
            if not difference.is_zero:
                report.failures.append(
                    f"d/du volume jumps at u = {wall}: {format_polynomial(difference)}"
                )
    at_threshold = at_wall(volume.pieces[-1], schedule.threshold)
    if not at_threshold.is_zero:
        report.failures.append(
            f"volume at threshold {schedule.threshold} is {format_polynomial(at_threshold)}"
        )
    start = chambers[0].lo
    if start == LinearForm(Fraction(0)):
        base = variety.polarization if base is None else base
        difference = at_wall(volume.pieces[0], start) - variety.power(base)
        if not difference.is_zero:
            report.failures.append(
                f"volume at u = 0 differs from L^n by {format_polynomial(difference)}"
            )
    for failure in report.failures:
        logger.warning("Schedule %s: %s", schedule.label(), failure)
    logger.debug(
        "Schedule %s validated with %d failure(s).", schedule.label(), len(report.failures)
    )
    return report


def sample_grid(
    volume: PiecewiseVolume, point: Mapping[str, Number], samples: int = 20
) -> List[Fraction]:
    """Volume at `samples` equally spaced values of u from the first wall to the threshold.

    Raises:
        InputError: Thrown if fewer than two samples are asked for.
    """
    if samples < 2:
        raise InputError(f"sample_grid needs at least 2 samples, got {samples}.")
    lo = _at(volume.schedule.chambers[0].lo, point)
    hi = _at(volume.schedule.threshold, point)
    step = (hi - lo) / (samples - 1)
    return [volume.evaluate(lo + step * i, point) for i in range(samples)]

