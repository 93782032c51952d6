#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Load case documents into validated case specifications."""

import copy
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union

from sympy import Expr, Poly, Symbol

from engine import (
    AdjointSchedule,
    CaseDataError,
    Chamber,
    ChamberSchedule,
    CurveClass,
    DivisorClass,
    FixedPoint,
    InputError,
    IntersectionForm,
    LinearForm,
    LocalizationData,
    RationalFunction,
    Variety,
    slope_mu,
)
from engine.symbolic import (
    format_polynomial,
    format_rational,
    parse_expression,
    parse_inequality,
    parse_polynomial,
    parse_rational,
)

logger = logging.getLogger(__name__)

MECHANISMS = ("beta", "beta-pullback", "localization", "degeneration")
GEOMETRY_FIELDS = ("dim", "basis", "intersections", "canonical", "polarization")
REQUIRED_FIELDS = {
    "beta": GEOMETRY_FIELDS + ("variables", "curves", "divisors", "expected"),
    "beta-pullback": ("variables", "parent", "specialization", "divisor", "expected"),
    "localization": GEOMETRY_FIELDS + ("variables", "localization", "expected"),
    "degeneration": (),
}
WEIGHT_CONVENTIONS = {"cotangent": 1, "tangent": -1}


@dataclass(frozen=True)
class CaseSpec:
    """One family's input data together with its expectations."""

    id: str
    mechanism: str
    description: str
    section: str
    variables: Tuple[str, ...]
    document: Mapping[str, Any]
    variety: Union[Variety, None] = None
    schedules: Tuple[ChamberSchedule, ...] = ()
    adjoint: Union[AdjointSchedule, None] = None
    localization: Union[LocalizationData, None] = None
    definitions: Mapping[str, Expr] = field(default_factory=dict)

    @property
    def gens(self) -> Tuple[Symbol, ...]:
        return tuple(Symbol(name) for name in self.variables) + (Symbol("u"),)

    @property
    def expected(self) -> Mapping[str, Any]:
        return self.document.get("expected", {})

    @property
    def parent(self) -> Union[str, None]:
        return self.document.get("parent")

    @property
    def specialization(self) -> Mapping[str, str]:
        return self.document.get("specialization", {})

    @property
    def symmetry(self) -> Mapping[str, str]:
        return self.document.get("symmetry", {})

    @property
    def tensor_provenance(self) -> str:
        return self.document.get("tensor_provenance", "printed")

    def polynomial(self, text: str, gens: Union[Sequence[Symbol], None] = None) -> Poly:
        """Parse an expression of this case, named definitions included."""
        return parse_polynomial(str(text), self.gens if gens is None else gens, self.definitions)

    def golden(
        self, entry: Mapping[str, str], gens: Union[Sequence[Symbol], None] = None
    ) -> RationalFunction:
        """Rational function from a {"numerator", "denominator"} entry."""
        return RationalFunction(
            self.polynomial(entry["numerator"], gens),
            self.polynomial(entry.get("denominator", "1"), gens),
        )

    def divisors(self) -> List[str]:
        names: List[str] = []
        for schedule in self.schedules:
            if schedule.divisor not in names:
                names.append(schedule.divisor)
        return names

    def schedule(self, divisor: str, branch: int = 0) -> ChamberSchedule:
        """Schedule of a divisor on one branch.

        Raises:
            InputError: Thrown if the case has no such schedule.
        """
        for schedule in self.schedules:
            if schedule.divisor == divisor and schedule.branch == branch:
                return schedule
        raise InputError(f"Case {self.id} has no schedule for {divisor} branch {branch}.")

    def to_document(self) -> Dict[str, Any]:
        """Serialize the parsed data back into a case document."""
        document = copy.deepcopy(dict(self.document))
        if self.variety is not None:
            variety = self.variety
            document["intersections"] = {
                variety.form.key_name(key): format_rational(value)
                for key, value in sorted(variety.form.entries.items())
                if value != 0
            }
            document["canonical"] = variety.canonical.to_mapping()
            document["polarization"] = variety.polarization.to_mapping()
            if variety.curves:
                document["curves"] = {
                    name: [format_rational(x) for x in curve.pairings]
                    for name, curve in variety.curves.items()
                }
        if self.schedules:
            divisors: Dict[str, Any] = {}
            for schedule in self.schedules:
                entry = divisors.setdefault(
                    schedule.divisor,
                    {
                        "class": self.variety.divisor(schedule.divisor).to_mapping(),
                        "log_discrepancy": format_rational(schedule.log_discrepancy),
                        "schedules": [],
                    },
                )
                entry["schedules"].append(
                    {"region": list(schedule.region), "chambers": _chambers_out(schedule)}
                )
            document["divisors"] = divisors
        return json.loads(json.dumps(document))


def _chambers_out(schedule: ChamberSchedule) -> List[Dict[str, Any]]:
    return [
        {
            "interval": [str(chamber.lo), str(chamber.hi)],
            "negative_support": list(chamber.negative_support),
            "orthogonality": list(chamber.orthogonality),
        }
        for chamber in schedule.chambers
    ]


def _rational_class(
    mapping: Mapping[str, str], basis: Sequence[str], gens: Sequence[Symbol], where: str
) -> DivisorClass:
    try:
        return DivisorClass.from_mapping(
            {name: parse_polynomial(str(text), gens) for name, text in mapping.items()},
            basis,
            gens,
        )
    except InputError as error:
        raise CaseDataError(f"{where}: {error.message}")


def _chambers(
    entries: Sequence[Mapping[str, Any]], gens: Sequence[Symbol], where: str
) -> Tuple[Chamber, ...]:
    chambers = []
    for index, entry in enumerate(entries):
        try:
            lo, hi = entry["interval"]
            chambers.append(
                Chamber(
                    (LinearForm.parse(lo, gens), LinearForm.parse(hi, gens)),
                    tuple(entry.get("negative_support", [])),
                    tuple(entry.get("orthogonality", [])),
                )
            )
        except (KeyError, ValueError) as error:
            raise CaseDataError(f"{where}.chambers[{index}]: malformed chamber ({error}).")
        except InputError as error:
            raise CaseDataError(f"{where}.chambers[{index}]: {error.message}")
    return tuple(chambers)


def _check_names(variety: Variety, chambers: Sequence[Chamber], where: str) -> None:
    for index, chamber in enumerate(chambers):
        try:
            for name in chamber.negative_support:
                variety.divisor(name)
            for name in chamber.orthogonality:
                variety.curve(name)
        except InputError as error:
            raise CaseDataError(f"{where}.chambers[{index}]: {error.message}")


def _load_variety(document: Mapping[str, Any], gens: Tuple[Symbol, ...]) -> Variety:
    case_id = document["id"]
    dim = int(document["dim"])
    basis = tuple(document["basis"])
    try:
        form = IntersectionForm.from_names(
            dim,
            basis,
            {key: parse_rational(value) for key, value in document["intersections"].items()},
        )
    except InputError as error:
        raise CaseDataError(f"{case_id}: intersections: {error.message}")
    canonical = _rational_class(document["canonical"], basis, gens, f"{case_id}: canonical")
    polarization = _rational_class(
        document["polarization"], basis, gens, f"{case_id}: polarization"
    )
    curves = {}
    for name, row in document.get("curves", {}).items():
        if len(row) != len(basis):
            raise CaseDataError(f"{case_id}: curve {name} needs {len(basis)} pairings.")
        curves[name] = CurveClass(name, tuple(parse_rational(x) for x in row))
    named = {
        name: _rational_class(mapping, basis, gens, f"{case_id}: named_divisors.{name}")
        for name, mapping in document.get("named_divisors", {}).items()
    }
    for name, entry in document.get("divisors", {}).items():
        divisor = _rational_class(entry["class"], basis, gens, f"{case_id}: divisors.{name}")
        if name in basis:
            if divisor != DivisorClass.basis_element(name, basis, gens):
                raise CaseDataError(f"{case_id}: divisor {name} is not its basis element.")
        elif name in named and named[name] != divisor:
            raise CaseDataError(f"{case_id}: divisor {name} has two different classes.")
        else:
            named[name] = divisor
    variables = tuple(document["variables"])
    return Variety(form, gens, variables, canonical, polarization, curves, named)


def _check_reconstruction(case: CaseSpec) -> None:
    """The tensor must reproduce the expected L^n and slope numerator exactly."""
    expected = case.expected
    variety = case.variety
    checks = [("volume", variety.volume()), ("slope_numerator", variety.slope_numerator())]
    for key, computed in checks:
        if key not in expected:
            raise CaseDataError(f"{case.id}: expected.{key} is required.")
        difference = computed - case.polynomial(expected[key])
        if not difference.is_zero:
            raise CaseDataError(
                f"{case.id}: intersection tensor does not reproduce expected.{key}; "
                f"difference {format_polynomial(difference)}"
            )
    if "mu" in expected and slope_mu(variety) != case.golden(expected["mu"]):
        raise CaseDataError(f"{case.id}: slope does not reproduce expected.mu.")


def _load_localization(
    document: Mapping[str, Any], gens: Tuple[Symbol, ...]
) -> LocalizationData:
    case_id = document["id"]
    entry = document["localization"]
    convention = entry.get("weight_convention", "cotangent")
    if convention not in WEIGHT_CONVENTIONS:
        raise CaseDataError(f"{case_id}: unknown weight convention {convention!r}.")
    sign = WEIGHT_CONVENTIONS[convention]
    points = tuple(
        FixedPoint(
            point["name"],
            tuple(sign * int(alpha) for alpha in point["alphas"]),
            {bundle: int(weight) for bundle, weight in point["mu"].items()},
        )
        for point in entry["fixed_points"]
    )
    polarization = {
        bundle: parse_polynomial(str(text), gens)
        for bundle, text in entry["polarization_weights"].items()
    }
    return LocalizationData(
        int(document["dim"]), tuple(entry["bundles"]), points, polarization, gens
    )


def load_case(document: Mapping[str, Any]) -> CaseSpec:
    """Validate a case document and build its specification.

    Args:
        document (Mapping[str, Any]): Parsed JSON case document.

    Returns:
        CaseSpec: Specification whose tensor passed the reconstruction gate.

    Raises:
        CaseDataError: Thrown on a schema violation, an unresolved name or a tensor that
            does not reproduce the expected L^n and slope.
    """
    case_id = document.get("id")
    if not isinstance(case_id, str):
        raise CaseDataError("Case document has no string id.")
    mechanism = document.get("mechanism")
    if mechanism not in MECHANISMS:
        raise CaseDataError(f"{case_id}: unknown mechanism {mechanism!r}.")
    missing = [key for key in REQUIRED_FIELDS[mechanism] if key not in document]
    if missing:
        raise CaseDataError(f"{case_id}: missing field {missing[0]!r}.")
    variables = tuple(document.get("variables", []))
    definitions: Dict[str, Expr] = {}
    try:
        for name, text in document.get("expected", {}).get("definitions", {}).items():
            definitions[name] = parse_expression(str(text), variables, definitions)
    except InputError as error:
        raise CaseDataError(f"{case_id}: expected.definitions: {error.message}")
    gens = tuple(Symbol(name) for name in variables) + (Symbol("u"),)
    fields: Dict[str, Any] = {}
    if mechanism in ("beta", "localization"):
        variety = _load_variety(document, gens)
        fields["variety"] = variety
        schedules = []
        for name, entry in document.get("divisors", {}).items():
            log_discrepancy = parse_rational(entry.get("log_discrepancy", "1"))
            for branch, schedule in enumerate(entry.get("schedules", [])):
                where = f"{case_id}: divisors.{name}.schedules[{branch}]"
                region = tuple(schedule.get("region", []))
                try:
                    for text in region:
                        parse_inequality(text, gens)
                except InputError as error:
                    raise CaseDataError(f"{where}: {error.message}")
                chambers = _chambers(schedule.get("chambers", []), gens, where)
                _check_names(variety, chambers, where)
                schedules.append(
                    ChamberSchedule(name, log_discrepancy, chambers, region, branch)
                )
        fields["schedules"] = tuple(schedules)
        if "adjoint" in document:
            entry = document["adjoint"]
            where = f"{case_id}: adjoint"
            chambers = _chambers(entry["chambers"], gens, where)
            _check_names(variety, chambers, where)
            log_discrepancy = parse_rational(
                document["divisors"].get(entry["divisor"], {}).get("log_discrepancy", "1")
            )
            fields["adjoint"] = AdjointSchedule(
                entry["shift"], ChamberSchedule(entry["divisor"], log_discrepancy, chambers)
            )
    if mechanism == "localization":
        fields["localization"] = _load_localization(document, gens)
    case = CaseSpec(
        id=case_id,
        mechanism=mechanism,
        description=document.get("description", ""),
        section=document.get("section", case_id),
        variables=variables,
        document=copy.deepcopy(dict(document)),
        definitions=definitions,
        **fields,
    )
    if case.variety is not None:
        _check_reconstruction(case)
    logger.debug("Case %s loaded (%s).", case_id, mechanism)
    return case


def read_document(path: str) -> Dict[str, Any]:
    """Read one JSON case document.

    Raises:
        CaseDataError: Thrown if the file is not valid JSON.
    """
    try:
        with open(path, "r") as handle:
            return json.load(handle)
    except json.JSONDecodeError as error:
        raise CaseDataError(f"{path}: invalid JSON ({error}).")
