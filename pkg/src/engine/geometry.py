#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Divisor and curve classes, the intersection form, and the slope of a polarization."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Dict, Mapping, Sequence, Tuple, Union

from sympy import Poly, Symbol

from .errors import InputError
from .symbolic import (
    Number,
    RationalFunction,
    constant,
    format_polynomial,
    polynomial,
    to_rational,
    zero,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntersectionForm:
    """Symmetric n-linear form on the divisor basis.

    Keys of `entries` are sorted index tuples; absent keys are zero.
    """

    dim: int
    basis: Tuple[str, ...]
    entries: Mapping[Tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise InputError(f"Unsupported dimension {self.dim}.")
        if len(set(self.basis)) != len(self.basis):
            raise InputError("Basis names must be unique.")

    @classmethod
    def from_names(
        cls, dim: int, basis: Sequence[str], entries: Mapping[str, Number]
    ) -> "IntersectionForm":
        """Build the form from dot-joined keys such as "H1.H2.H2".

        Raises:
            InputError: Thrown if a key has the wrong arity or an unknown name.
        """
        basis = tuple(basis)
        sorted_entries: Dict[Tuple[int, ...], Fraction] = {}
        for key, value in entries.items():
            names = key.split(".")
            if len(names) != dim:
                raise InputError(f"Intersection key {key!r} does not have {dim} factors.")
            unknown = [name for name in names if name not in basis]
            if unknown:
                raise InputError(f"Intersection key {key!r} names unknown divisor {unknown[0]}.")
            index = tuple(sorted(basis.index(name) for name in names))
            if index in sorted_entries:
                raise InputError(f"Intersection key {key!r} is given twice.")
            sorted_entries[index] = Fraction(value)
        return cls(dim, basis, sorted_entries)

    def entry(self, indices: Sequence[int]) -> Fraction:
        return self.entries.get(tuple(sorted(indices)), Fraction(0))

    def key_name(self, indices: Sequence[int]) -> str:
        return ".".join(self.basis[i] for i in sorted(indices))


@dataclass(frozen=True)
class DivisorClass:
    """Divisor as one polynomial coefficient per basis element."""

    basis: Tuple[str, ...]
    coefficients: Tuple[Poly, ...]

    def __post_init__(self) -> None:
        if len(self.coefficients) != len(self.basis):
            raise InputError("Divisor class has the wrong number of coefficients.")

    @classmethod
    def from_mapping(
        cls, mapping: Mapping[str, Poly], basis: Sequence[str], gens: Sequence[Symbol]
    ) -> "DivisorClass":
        """Build a class from basis name to coefficient; missing names get 0.

        Raises:
            InputError: Thrown if the mapping names a divisor outside the basis.
        """
        unknown = sorted(set(mapping) - set(basis))
        if unknown:
            raise InputError(f"Divisor class refers to unknown basis element {unknown[0]}.")
        return cls(
            tuple(basis),
            tuple(polynomial(mapping.get(name, zero(gens)), gens) for name in basis),
        )

    @classmethod
    def basis_element(cls, name: str, basis: Sequence[str], gens: Sequence[Symbol]):
        return cls.from_mapping({name: constant(1, gens)}, basis, gens)

    @property
    def gens(self) -> Tuple[Symbol, ...]:
        return tuple(self.coefficients[0].gens)

    def _check(self, other: "DivisorClass") -> None:
        if self.basis != other.basis:
            raise InputError("Divisor classes over different bases.")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(
            self.basis, tuple(x + y for x, y in zip(self.coefficients, other.coefficients))
        )

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return self + other.scale(-1)

    def __neg__(self) -> "DivisorClass":
        return self.scale(-1)

    def scale(self, factor: Union[Poly, Number]) -> "DivisorClass":
        if not isinstance(factor, Poly):
            factor = to_rational(Fraction(factor))
        return DivisorClass(self.basis, tuple(c * factor for c in self.coefficients))

    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coefficients)

    def to_mapping(self) -> Dict[str, str]:
        """Nonzero coefficients printed in the case-file grammar."""
        return {
            name: format_polynomial(c)
            for name, c in zip(self.basis, self.coefficients)
            if not c.is_zero
        }

    def __str__(self) -> str:
        parts = [f"({c}){name}" for name, c in self.to_mapping().items()]
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class CurveClass:
    """Curve given by its intersection numbers with the basis divisors."""

    name: str
    pairings: Tuple[Fraction, ...]


def intersect(form: IntersectionForm, classes: Sequence[DivisorClass]) -> Poly:
    """Intersection number of n divisor classes.

    Args:
        form (IntersectionForm): The intersection form.
        classes (Sequence[DivisorClass]): Exactly `form.dim` divisor classes.

    Returns:
        Poly: The multilinear expansion against the form entries.

    Raises:
        InputError: Thrown on a wrong class count or a basis mismatch.
    """
    if len(classes) != form.dim:
        raise InputError(f"Intersection needs {form.dim} classes, got {len(classes)}.")
    for divisor in classes:
        if divisor.basis != form.basis:
            raise InputError("Divisor class basis does not match the intersection form.")
    gens = classes[0].gens
    total = zero(gens)
    for key in sorted(form.entries):
        value = form.entries[key]
        if value == 0:
            continue
        for arrangement in sorted(set(permutations(key))):
            term = constant(value, gens)
            for divisor, index in zip(classes, arrangement):
                term = term * divisor.coefficients[index]
                if term.is_zero:
                    break
            total = total + term
    return total


def pair_curve(divisor: DivisorClass, curve: CurveClass) -> Poly:
    """Intersection number of a divisor class with a curve class.

    Raises:
        InputError: Thrown if the curve has a pairing vector of the wrong length.
    """
    if len(curve.pairings) != len(divisor.basis):
        raise InputError(f"Curve {curve.name} does not match the divisor basis.")
    total = zero(divisor.gens)
    for coefficient, pairing in zip(divisor.coefficients, curve.pairings):
        if pairing:
            total = total + coefficient * to_rational(pairing)
    return total


@dataclass(frozen=True)
class Variety:
    """Intersection data of one polarized family, in the family's variables."""

    form: IntersectionForm
    gens: Tuple[Symbol, ...]
    parameters: Tuple[str, ...]
    canonical: DivisorClass
    polarization: DivisorClass
    curves: Mapping[str, CurveClass] = field(default_factory=dict)
    named_divisors: Mapping[str, DivisorClass] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.form.dim

    @property
    def basis(self) -> Tuple[str, ...]:
        return self.form.basis

    def divisor(self, name: str) -> DivisorClass:
        """Class of a basis element or of a named divisor.

        Raises:
            InputError: Thrown if the name is unknown.
        """
        if name in self.named_divisors:
            return self.named_divisors[name]
        if name in self.basis:
            return DivisorClass.basis_element(name, self.basis, self.gens)
        raise InputError(f"Unknown divisor {name!r}.")

    def curve(self, name: str) -> CurveClass:
        if name not in self.curves:
            raise InputError(f"Unknown curve {name!r}.")
        return self.curves[name]

    def power(self, divisor: DivisorClass) -> Poly:
        """Top self-intersection of a class."""
        return intersect(self.form, [divisor] * self.dim)

    def volume(self) -> Poly:
        """L^n of the polarization."""
        return self.power(self.polarization)

    def slope_numerator(self) -> Poly:
        """(-K)·L^(n-1)."""
        return intersect(self.form, [-self.canonical] + [self.polarization] * (self.dim - 1))


def slope_mu(variety: Variety) -> RationalFunction:
    """Slope (-K)·L^(n-1) / L^n of the polarization.

    Raises:
        InputError: Thrown if L^n vanishes identically.
    """
    volume = variety.volume()
    if volume.is_zero:
        raise InputError("Degenerate polarization: L^n is identically zero.")
    mu = RationalFunction(variety.slope_numerator(), volume)
    logger.debug("Slope computed: %s", mu)
    return mu
