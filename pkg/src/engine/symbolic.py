#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Exact polynomial, rational function and truncated Laurent series arithmetic."""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union

from sympy import QQ, Expr, Poly, Rational, Symbol
from sympy.parsing.sympy_parser import parse_expr
from sympy.polys.polyerrors import BasePolynomialError

from .errors import InputError

logger = logging.getLogger(__name__)

Polynomial = Poly
Number = Union[int, Fraction]

_TOKEN = re.compile(r"\s*(?:(?P<integer>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str) -> List[Tuple[str, str]]:
    """Split an expression string into (kind, value) tokens.

    Args:
        text (str): Expression in the case-file grammar.

    Returns:
        List[Tuple[str, str]]: Tokens of kind `integer`, `name` or `op`.

    Raises:
        InputError: Thrown if a character outside the grammar is found.
    """
    tokens = []
    text = text.strip()
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise InputError(f"Unexpected character at offset {position} in {text!r}.")
        kind = match.lastgroup
        tokens.append((kind, match.group(kind)))
        position = match.end()
    return tokens


class _GrammarCheck:
    """Recursive descent recognizer for the expression grammar.

    A leading sign is accepted on every `expr`, so "-c" and "(-1/2)" are valid.
    """

    def __init__(self, tokens: List[Tuple[str, str]], names: Sequence[str], text: str) -> None:
        self.tokens = tokens
        self.names = set(names)
        self.text = text
        self.index = 0

    def check(self) -> None:
        if not self.tokens:
            self._fail("empty expression")
        self._expr()
        if self.index != len(self.tokens):
            self._fail(f"unexpected {self.tokens[self.index][1]!r}")

    def _peek(self) -> Tuple[str, str]:
        return self.tokens[self.index] if self.index < len(self.tokens) else ("end", "")

    def _advance(self) -> Tuple[str, str]:
        token = self._peek()
        self.index += 1
        return token

    def _fail(self, reason: str) -> None:
        raise InputError(f"Malformed expression {self.text!r}: {reason}.")

    def _expr(self) -> None:
        if self._peek() in (("op", "-"), ("op", "+")):
            self._advance()
        self._term()
        while self._peek() in (("op", "-"), ("op", "+")):
            self._advance()
            self._term()

    def _term(self) -> None:
        self._factor()
        while self._peek() == ("op", "*"):
            self._advance()
            self._factor()

    def _factor(self) -> None:
        self._base()
        if self._peek() == ("op", "^"):
            self._advance()
            if self._advance()[0] != "integer":
                self._fail("exponent must be a nonnegative integer")

    def _base(self) -> None:
        kind, value = self._advance()
        if kind == "integer":
            if self._peek() == ("op", "/"):
                self._advance()
                kind, value = self._advance()
                if kind != "integer" or int(value) == 0:
                    self._fail("denominator must be a positive integer")
        elif kind == "name":
            if value not in self.names:
                self._fail(f"unknown identifier {value!r}")
        elif (kind, value) == ("op", "("):
            self._expr()
            if self._advance() != ("op", ")"):
                self._fail("unbalanced parenthesis")
        else:
            self._fail(f"unexpected {value!r}" if value else "unexpected end")


def parse_expression(
    text: str, variables: Sequence[str], definitions: Union[Mapping[str, Expr], None] = None
) -> Expr:
    """Parse an expression string into a sympy expression.

    Args:
        text (str): Expression in the case-file grammar.
        variables (Sequence[str]): Names that parse to free symbols.
        definitions (Mapping[str, Expr] | None): Named sub-expressions that may be
            referenced by identifier.

    Returns:
        Expr: The parsed expression.

    Raises:
        InputError: Thrown if the text does not match the grammar or uses an unknown name.
    """
    definitions = {} if definitions is None else dict(definitions)
    local_dict: Dict[str, Any] = {name: Symbol(name) for name in variables}
    local_dict.update(definitions)
    tokens = _tokenize(str(text))
    _GrammarCheck(tokens, list(local_dict), str(text)).check()
    source = " ".join("**" if value == "^" else value for _, value in tokens)
    return parse_expr(source, local_dict=local_dict)


def polynomial(expr: Any, gens: Sequence[Symbol]) -> Poly:
    """Build a polynomial over the rationals in the given generators.

    Raises:
        InputError: Thrown if the expression is not polynomial in `gens`.
    """
    if isinstance(expr, Poly):
        if tuple(expr.gens) == tuple(gens):
            return expr.set_domain(QQ)
        expr = expr.as_expr()
    if isinstance(expr, Fraction):
        expr = to_rational(expr)
    try:
        return Poly(expr, *gens, domain=QQ)
    except (BasePolynomialError, ValueError, TypeError) as error:
        raise InputError(f"{expr} is not a polynomial in {', '.join(map(str, gens))}: {error}")


def parse_polynomial(
    text: str, gens: Sequence[Symbol], definitions: Union[Mapping[str, Expr], None] = None
) -> Poly:
    """Parse an expression string straight into a polynomial in `gens`."""
    return polynomial(parse_expression(text, [str(g) for g in gens], definitions), gens)


def parse_rational(text: str) -> Fraction:
    """Parse a signed rational literal such as "-3/2"."""
    value = parse_expression(str(text), [])
    if not value.is_Rational:
        raise InputError(f"{text!r} is not a rational number.")
    return to_fraction(value)


def to_fraction(value: Any) -> Fraction:
    """Convert a sympy or domain rational to a Fraction."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    value = Rational(value)
    return Fraction(int(value.p), int(value.q))


def to_rational(value: Number) -> Rational:
    """Convert a Fraction to a sympy Rational."""
    value = Fraction(value)
    return Rational(value.numerator, value.denominator)


def format_rational(value: Number) -> str:
    """Print a rational in the case-file grammar."""
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else str(value)


def format_polynomial(p: Poly) -> str:
    """Print a polynomial in the case-file grammar, terms in graded lexicographic order."""
    if p.is_zero:
        return "0"
    names = [str(g) for g in p.gens]
    pieces = []
    for monom, coeff in p.terms(order="grlex"):
        value = to_fraction(coeff)
        factors = [name if e == 1 else f"{name}^{e}" for name, e in zip(names, monom) if e]
        magnitude = abs(value)
        if factors and magnitude == 1:
            body = "*".join(factors)
        else:
            body = "*".join([format_rational(magnitude)] + factors)
        pieces.append(("-" if value < 0 else "+", body))
    sign, body = pieces[0]
    text = body if sign == "+" else f"-{body}"
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


def zero(gens: Sequence[Symbol]) -> Poly:
    """Zero polynomial in `gens`."""
    return Poly(0, *gens, domain=QQ)


def constant(value: Number, gens: Sequence[Symbol]) -> Poly:
    """Constant polynomial in `gens`."""
    return Poly(to_rational(value), *gens, domain=QQ)


def variable(name: str, gens: Sequence[Symbol]) -> Poly:
    """The polynomial consisting of a single generator."""
    return polynomial(Symbol(name), gens)


def poly_eval(p: Poly, point: Mapping[str, Number]) -> Fraction:
    """Evaluate a polynomial exactly at a rational point.

    Args:
        p (Poly): Polynomial to evaluate.
        point (Mapping[str, Number]): Value for every variable occurring in `p`.

    Returns:
        Fraction: Exact value.

    Raises:
        InputError: Thrown if a variable occurring in `p` is not bound.
    """
    names = [str(g) for g in p.gens]
    occurring = {names[i] for monom, _ in p.terms() for i, e in enumerate(monom) if e}
    missing = sorted(occurring - set(point))
    if missing:
        raise InputError(f"Unbound variable(s) {', '.join(missing)}.")
    total = Fraction(0)
    for monom, coeff in p.terms():
        term = to_fraction(coeff)
        for name, exponent in zip(names, monom):
            if exponent:
                term *= Fraction(point[name]) ** exponent
        total += term
    return total


def substitute(
    p: Poly, assignments: Mapping[str, Poly], gens: Union[Sequence[Symbol], None] = None
) -> Poly:
    """Simultaneously replace variables by polynomials.

    Args:
        p (Poly): Polynomial to rewrite.
        assignments (Mapping[str, Poly]): Image of each replaced variable.
        gens (Sequence[Symbol] | None): Generators of the result.
            Defaults to the generators of `p`.

    Returns:
        Poly: The composed polynomial.

    Raises:
        InputError: Thrown if a retained variable is not among the result generators.
    """
    gens = tuple(p.gens) if gens is None else tuple(gens)
    images = []
    for gen in p.gens:
        name = str(gen)
        if name in assignments:
            images.append(polynomial(assignments[name], gens))
        elif gen in gens:
            images.append(polynomial(gen, gens))
        else:
            images.append(None)
    powers: List[Dict[int, Poly]] = [{} for _ in images]
    result = zero(gens)
    for monom, coeff in p.terms():
        term = constant(to_fraction(coeff), gens)
        for index, exponent in enumerate(monom):
            if not exponent:
                continue
            if images[index] is None:
                raise InputError(f"Variable {p.gens[index]} has no image under substitution.")
            cache = powers[index]
            if exponent not in cache:
                cache[exponent] = images[index] ** exponent
            term = term * cache[exponent]
        result = result + term
    return result


def derivative(p: Poly, name: str) -> Poly:
    """Partial derivative with respect to the named variable."""
    gen = Symbol(name)
    if gen not in p.gens:
        return zero(p.gens)
    return p.diff(gen)


@dataclass(frozen=True)
class LinearForm:
    """Affine form in the parameters, used for chamber walls."""

    constant: Fraction
    coefficients: Tuple[Tuple[str, Fraction], ...] = ()

    @classmethod
    def from_polynomial(cls, p: Poly, forbidden: Sequence[str] = ("u", "t")) -> "LinearForm":
        """Read a linear form off a polynomial of total degree at most one.

        Raises:
            InputError: Thrown if `p` is not affine or involves a forbidden variable.
        """
        if not p.is_zero and p.total_degree() > 1:
            raise InputError(f"{format_polynomial(p)} is not a linear form.")
        names = [str(g) for g in p.gens]
        constant_term = Fraction(0)
        coefficients = {}
        for monom, coeff in p.terms():
            if not any(monom):
                constant_term = to_fraction(coeff)
                continue
            name = names[monom.index(1)]
            if name in forbidden:
                raise InputError(f"Linear form {format_polynomial(p)} must not contain {name}.")
            coefficients[name] = to_fraction(coeff)
        return cls(constant_term, tuple(sorted(coefficients.items())))

    @classmethod
    def parse(
        cls, text: str, gens: Sequence[Symbol], definitions: Union[Mapping[str, Expr], None] = None
    ) -> "LinearForm":
        """Parse a wall expression such as "b + 2*c"."""
        return cls.from_polynomial(parse_polynomial(str(text), gens, definitions))

    def to_polynomial(self, gens: Sequence[Symbol]) -> Poly:
        """The form as a polynomial in `gens`."""
        result = constant(self.constant, gens)
        for name, coeff in self.coefficients:
            result = result + variable(name, gens) * to_rational(coeff)
        return result

    def variables(self) -> Tuple[str, ...]:
        """Names with nonzero coefficient."""
        return tuple(name for name, _ in self.coefficients)

    def __str__(self) -> str:
        gens = [Symbol(name) for name in self.variables()] or [Symbol("u")]
        return format_polynomial(self.to_polynomial(gens))


def integrate_over_interval(p: Poly, lo: LinearForm, hi: LinearForm, name: str = "u") -> Poly:
    """Definite integral in one variable between parametric linear bounds.

    Args:
        p (Poly): Integrand; polynomial in `name` with parameter-polynomial coefficients.
        lo (LinearForm): Lower bound.
        hi (LinearForm): Upper bound.
        name (str): Integration variable.

    Returns:
        Poly: Polynomial free of the integration variable, in the generators of `p`.
    """
    gens = tuple(p.gens)
    gen = Symbol(name)
    lower, upper = lo.to_polynomial(gens), hi.to_polynomial(gens)
    if gen not in gens:
        return p * (upper - lower)
    antiderivative = p.integrate(gen)
    return substitute(antiderivative, {name: upper}) - substitute(antiderivative, {name: lower})


class RationalFunction:
    """Quotient of polynomials kept in reduced form.

    The denominator is normalized to leading coefficient 1 in graded lexicographic order.
    Equality is semantic (cross-multiplication), so instances are not hashable.
    """

    __slots__ = ("numerator", "denominator")
    __hash__ = None

    def __init__(self, numerator: Poly, denominator: Union[Poly, None] = None) -> None:
        gens = tuple(numerator.gens)
        numerator = polynomial(numerator, gens)
        denominator = constant(1, gens) if denominator is None else polynomial(denominator, gens)
        if denominator.is_zero:
            raise InputError("Rational function with zero denominator.")
        if numerator.is_zero:
            denominator = constant(1, gens)
        else:
            numerator, denominator = numerator.cancel(denominator, include=True)
            numerator, denominator = polynomial(numerator, gens), polynomial(denominator, gens)
        lead = denominator.LC(order="grlex")
        object.__setattr__(self, "numerator", polynomial(numerator * (1 / lead), gens))
        object.__setattr__(self, "denominator", polynomial(denominator * (1 / lead), gens))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("RationalFunction is immutable.")

    @property
    def gens(self) -> Tuple[Symbol, ...]:
        return tuple(self.numerator.gens)

    def _coerce(self, other: Any) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Poly):
            return RationalFunction(polynomial(other, self.gens))
        return RationalFunction(constant(Fraction(other), self.gens))

    def __add__(self, other: Any) -> "RationalFunction":
        other = self._coerce(other)
        return RationalFunction(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other: Any) -> "RationalFunction":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "RationalFunction":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "RationalFunction":
        other = self._coerce(other)
        return RationalFunction(
            self.numerator * other.numerator, self.denominator * other.denominator
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "RationalFunction":
        other = self._coerce(other)
        if other.numerator.is_zero:
            raise InputError("Division by the zero rational function.")
        return RationalFunction(
            self.numerator * other.denominator, self.denominator * other.numerator
        )

    def cross_difference(self, other: Any) -> Poly:
        """Numerator of self - other before reduction; zero iff the two are equal."""
        other = self._coerce(other)
        return self.numerator * other.denominator - other.numerator * self.denominator

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, (RationalFunction, Poly, int, Fraction)):
            return NotImplemented
        return self.cross_difference(other).is_zero

    def is_zero(self) -> bool:
        return self.numerator.is_zero

    def evaluate(self, point: Mapping[str, Number]) -> Fraction:
        """Exact value at a rational point.

        Raises:
            InputError: Thrown if the denominator vanishes at the point.
        """
        denominator = poly_eval(self.denominator, point)
        if denominator == 0:
            raise InputError("Denominator vanishes at the evaluation point.")
        return poly_eval(self.numerator, point) / denominator

    def substitute(
        self, assignments: Mapping[str, Poly], gens: Union[Sequence[Symbol], None] = None
    ) -> "RationalFunction":
        """Compose with a polynomial substitution."""
        return RationalFunction(
            substitute(self.numerator, assignments, gens),
            substitute(self.denominator, assignments, gens),
        )

    def __str__(self) -> str:
        numerator = format_polynomial(self.numerator)
        if self.denominator == constant(1, self.gens):
            return numerator
        return f"({numerator})/({format_polynomial(self.denominator)})"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"


@dataclass(frozen=True)
class LaurentSeries:
    """Truncated Laurent series in a formal variable with polynomial coefficients.

    `coefficients[i]` is the coefficient of the power `lowest_order + i`; the series is
    known exactly through the power `truncation_order`.
    """

    lowest_order: int
    coefficients: Tuple[Poly, ...]
    truncation_order: int

    def __post_init__(self) -> None:
        if len(self.coefficients) != self.truncation_order - self.lowest_order + 1:
            raise InputError("Laurent series coefficient count does not match its orders.")

    @property
    def gens(self) -> Tuple[Symbol, ...]:
        return tuple(self.coefficients[0].gens)

    def coefficient(self, order: int) -> Poly:
        """Coefficient of the given power.

        Raises:
            InputError: Thrown if the power lies beyond the truncation order.
        """
        if order > self.truncation_order:
            raise InputError(f"Coefficient of order {order} is beyond the truncation.")
        if order < self.lowest_order:
            return zero(self.gens)
        return self.coefficients[order - self.lowest_order]

    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coefficients)

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        if self.gens != other.gens:
            raise InputError("Laurent series over different variables.")
        lowest = min(self.lowest_order, other.lowest_order)
        highest = min(self.truncation_order, other.truncation_order)
        coefficients = tuple(
            self.coefficient(k) + other.coefficient(k) for k in range(lowest, highest + 1)
        )
        return LaurentSeries(lowest, coefficients, highest)


def laurent_mul_truncate(x: LaurentSeries, y: LaurentSeries) -> LaurentSeries:
    """Product of two truncated Laurent series, kept to the highest power it determines.

    Raises:
        InputError: Thrown if the series are over different variables.
    """
    if x.gens != y.gens:
        raise InputError("Laurent series over different variables.")
    lowest = x.lowest_order + y.lowest_order
    highest = min(x.truncation_order + y.lowest_order, y.truncation_order + x.lowest_order)
    coefficients = []
    for order in range(lowest, highest + 1):
        total = zero(x.gens)
        for i in range(x.lowest_order, order - y.lowest_order + 1):
            total = total + x.coefficient(i) * y.coefficient(order - i)
        coefficients.append(total)
    return LaurentSeries(lowest, tuple(coefficients), highest)


def exp_series(p: Poly, truncation_order: int) -> LaurentSeries:
    """Series of exp(p * eps) through eps^truncation_order."""
    coefficients = tuple(
        (p**j) * Rational(1, factorial(j)) if j else constant(1, p.gens)
        for j in range(truncation_order + 1)
    )
    return LaurentSeries(0, coefficients, truncation_order)


def inverse_series(x: LaurentSeries) -> LaurentSeries:
    """Multiplicative inverse of a series whose lowest coefficient is a nonzero constant.

    Raises:
        InputError: Thrown if the lowest coefficient is not an invertible constant.
    """
    lead = x.coefficient(x.lowest_order)
    if lead.is_zero or lead.total_degree() > 0:
        raise InputError("Series inverse needs a nonzero constant leading coefficient.")
    lead_inverse = 1 / to_rational(to_fraction(lead.LC()))
    length = x.truncation_order - x.lowest_order
    inverse = [constant(to_fraction(lead_inverse), x.gens)]
    for m in range(1, length + 1):
        total = zero(x.gens)
        for j in range(1, m + 1):
            total = total + x.coefficient(x.lowest_order + j) * inverse[m - j]
        inverse.append(-total * lead_inverse)
    return LaurentSeries(-x.lowest_order, tuple(inverse), length - x.lowest_order)


def parse_inequality(
    text: str, gens: Sequence[Symbol], definitions: Union[Mapping[str, Expr], None] = None
) -> LinearForm:
    """Parse "lhs <= rhs" or "lhs >= rhs" into the form that is nonnegative on its region.

    Raises:
        InputError: Thrown if the text is not a single linear inequality.
    """
    for operator, flip in (("<=", False), (">=", True)):
        if text.count(operator) == 1 and text.count("<=") + text.count(">=") == 1:
            lhs, rhs = text.split(operator)
            lower = parse_polynomial(lhs, gens, definitions)
            upper = parse_polynomial(rhs, gens, definitions)
            return LinearForm.from_polynomial(lower - upper if flip else upper - lower)
    raise InputError(f"Malformed inequality {text!r}.")


def identifiers(text: str) -> List[str]:
    """Identifiers of an expression string in order of first appearance."""
    names: List[str] = []
    for kind, value in _tokenize(str(text)):
        if kind == "name" and value not in names:
            names.append(value)
    return names
