#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Per-case verification pipelines and their reports."""

import logging
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import factorial
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Type, Union

from sympy import Poly, Symbol

from engine import (
    BetaResult,
    CaseDataError,
    DFResult,
    InputError,
    IntervalMap,
    LinkedCertificate,
    RationalFunction,
    Substitution,
    Verdict,
    VerificationError,
    beta_crosscheck_adjoint,
    beta_general,
    certify_link,
    character_series_oracle,
    df_invariant,
    pullback_specialize,
    region_key,
    slope_mu,
    validate_schedule,
    verdict,
    volume_piecewise,
    volume_t_derivative,
)
from engine.localization import coefficient_of
from engine.stability import (
    Comparison,
    SignedRegion,
    compare,
    negativity_quantity,
    phi,
    rescaling_invariant,
)
from engine.symbolic import (
    format_polynomial,
    parse_inequality,
    parse_rational,
    polynomial,
    substitute,
    to_rational,
    variable,
)

from .loader import CaseSpec
from .manifest import Casebook

logger = logging.getLogger(__name__)

Source = Union[Tuple[str, int], str]


@dataclass(frozen=True)
class Check:
    """Outcome of one golden comparison, identity or certificate."""

    name: str
    passed: bool
    detail: str = ""


@dataclass
class CaseReport:
    """Everything verified for one case."""

    id: str
    description: str
    mechanism: str
    witness: str = ""
    formula: str = ""
    verdict: str = Verdict.INCONCLUSIVE.value
    checks: List[Check] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def status(self) -> str:
        return "pass" if all(check.passed for check in self.checks) else "fail"

    @property
    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def row(self) -> Dict[str, str]:
        """Table row with the stable report field names."""
        return {
            "id": self.id,
            "description": self.description,
            "mechanism": self.mechanism,
            "witness": self.witness,
            "formula": self.formula,
            "verdict": self.verdict,
            "status": self.status,
        }

    def to_dict(self) -> Dict[str, Any]:
        document: Dict[str, Any] = dict(self.row())
        document["checks"] = [
            {"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks
        ]
        return document


def parse_point(assignments: Mapping[str, str]) -> Dict[str, Fraction]:
    """Rational point from {"a": "1", "b": "1/2"}."""
    return {name: parse_rational(str(value)) for name, value in assignments.items()}


def parse_point_text(text: str) -> Dict[str, Fraction]:
    """Rational point from "a=1,b=1/2".

    Raises:
        InputError: Thrown if an assignment is malformed.
    """
    point = {}
    for item in filter(None, (piece.strip() for piece in text.split(","))):
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise InputError(f"Malformed assignment {item!r}; expected name=value.")
        point[name.strip()] = parse_rational(value.strip())
    return point


def _polynomial_part(value: RationalFunction, what: str) -> Poly:
    if value.denominator.total_degree() > 0:
        raise VerificationError(
            f"{what} is not a polynomial", format_polynomial(value.denominator)
        )
    return value.numerator * (1 / value.denominator.LC())


class Pipeline:
    """Base pipeline: collects checks into a report instead of raising on failures."""

    mechanism = ""

    def __init__(
        self, casebook: Casebook, case: CaseSpec, divisor: Union[str, None] = None
    ) -> None:
        self.casebook = casebook
        self.case = case
        self.divisor = divisor
        self.report = CaseReport(case.id, case.description, case.mechanism)
        self.variable_gens = tuple(Symbol(name) for name in case.variables)
        self._certificates: Dict[str, Tuple[LinkedCertificate, List[str]]] = {}

    def check(self, name: str, passed: bool, detail: str = "") -> Check:
        check = Check(name, bool(passed), detail)
        self.report.checks.append(check)
        if not check.passed:
            logger.warning("%s: check %r failed: %s", self.case.id, name, detail)
        return check

    def check_comparison(self, name: str, comparison: Comparison) -> Check:
        return self.check(name, comparison.matches, comparison.describe())

    def check_polynomial(self, name: str, computed: Poly, text: str) -> Check:
        difference = computed - self.case.polynomial(text, computed.gens)
        detail = "match" if difference.is_zero else format_polynomial(difference)
        return self.check(name, difference.is_zero, detail)

    def check_erratum(self, name: str, erratum: Mapping[str, Any], holds: bool) -> Check:
        """A displayed formula recorded as an erratum must not reproduce."""
        note = erratum.get("note", "")
        detail = note if not holds else f"displayed formula reproduces; {note}".strip()
        return self.check(f"{name} erratum", not holds, detail)

    def run(self) -> CaseReport:
        raise NotImplementedError

    def quantities(self) -> Dict[Source, Poly]:
        """Negativity quantities available to certificate links, keyed by source."""
        return {}

    def wanted(self, name: str) -> bool:
        return self.divisor is None or name == self.divisor

    def evaluate(self, source: Source, point: Mapping[str, Fraction]) -> Fraction:
        raise InputError(f"Case {self.case.id} has nothing to evaluate for {source}.")

    def check_evaluations(self) -> None:
        for entry in self.case.expected.get("evaluations", []):
            source = _source(entry)
            if isinstance(source, tuple) and not self.wanted(source[0]):
                continue
            point = parse_point(entry["at"])
            value = self.evaluate(source, point)
            expected = parse_rational(entry["value"])
            at = ", ".join(f"{k}={v}" for k, v in entry["at"].items())
            self.check(
                f"value of {_source_name(source)} at {at}",
                value == expected,
                f"computed {value}, expected {expected}",
            )

    def substitution(self, entry: Mapping[str, Any]) -> Substitution:
        """Substitution block of a certificate entry."""
        block = entry.get("substitution", {})
        interval = None
        if "interval" in block:
            bounds = block["interval"]
            interval = IntervalMap(
                bounds["variable"],
                parse_rational(bounds["lower"]),
                parse_rational(bounds["upper"]),
                tuple(bounds["into"]),
            )
        assignments = tuple((old, new) for old, new in block.get("assignments", []))
        return Substitution(assignments, interval)

    def certificate(self, entry: Mapping[str, Any]) -> Tuple[LinkedCertificate, List[str]]:
        """Run one named certificate with its link to the negativity quantities.

        Returns:
            Tuple[LinkedCertificate, List[str]]: The linked certificate and the failures
            of the region cover check.

        Raises:
            CaseDataError: Thrown if the link references an unknown source.
        """
        if entry["name"] in self._certificates:
            return self._certificates[entry["name"]]
        variables = self.case.variables
        gens = self.variable_gens
        region = [parse_inequality(text, gens) for text in entry.get("region", [])]
        substitution = self.substitution(entry)
        covers = substitution.check_covers(variables, region)
        quantities = self.quantities()
        link = entry["link"]
        sources, multipliers = [], []
        for term in link["combination"]:
            source = _source(term)
            if source not in quantities:
                raise CaseDataError(
                    f"{self.case.id}: certificate {entry['name']} links unknown source "
                    f"{_source_name(source)}."
                )
            sources.append(polynomial(quantities[source], gens))
            multipliers.append(self.case.polynomial(term.get("multiplier", "1"), gens))
        linked = certify_link(
            self.case.polynomial(entry["target"], gens),
            sources,
            multipliers,
            self.case.polynomial(link.get("cofactor", "1"), gens),
            substitution,
            variables,
            entry.get("strict", []),
        )
        logger.debug(
            "%s: certificate %s is %s.", self.case.id, entry["name"], linked.target.status.value
        )
        self._certificates[entry["name"]] = (linked, covers)
        return linked, covers

    def certificate_entry(self, name: str) -> Mapping[str, Any]:
        for entry in self.case.expected.get("certificates", []):
            if entry["name"] == name:
                return entry
        raise InputError(f"Case {self.case.id} has no certificate {name!r}.")

    def check_certificates(self) -> List[SignedRegion]:
        signed = []
        for entry in self.case.expected.get("certificates", []):
            names = [_source(term) for term in entry["link"]["combination"]]
            if any(isinstance(s, tuple) and not self.wanted(s[0]) for s in names):
                continue
            name = entry["name"]
            linked, covers = self.certificate(entry)
            self.check(f"certificate {name} covers its region", not covers, "; ".join(covers))
            if "expansion" in entry:
                witness = linked.target.witness
                expected = self.case.polynomial(entry["expansion"], witness.gens)
                difference = witness - expected
                self.check(
                    f"certificate {name} expansion",
                    difference.is_zero,
                    "match" if difference.is_zero else format_polynomial(difference),
                )
            self.check(
                f"certificate {name} link",
                linked.identity_holds,
                "identity holds"
                if linked.identity_holds
                else format_polynomial(linked.difference),
            )
            self.check(f"certificate {name}", linked.proves, linked.target.summary())
            proves = linked.proves and not covers
            witness = ", ".join(_source_name(s) for s in _unique(names))
            signed.append(SignedRegion(tuple(entry.get("region", [])), proves, witness))
        return signed

    def conclude(self, signed: Sequence[SignedRegion]) -> None:
        family = verdict(self.case.mechanism, signed, self.case.expected.get("cover", []))
        self.report.verdict = family.verdict.value
        self.report.witness = family.witness
        expected = self.case.expected.get("verdict")
        if expected is not None and self.divisor is None:
            self.check("verdict", family.verdict.value == expected, family.verdict.value)


def _source(entry: Mapping[str, Any]) -> Source:
    if entry.get("quantity") == "df":
        return "df"
    return (entry["divisor"], int(entry.get("branch", 0)))


def _source_name(source: Source) -> str:
    return "DF" if source == "df" else source[0]


def _unique(items: Sequence[Any]) -> List[Any]:
    seen: List[Any] = []
    for item in items:
        if item not in seen:
            seen.append(item)
    return seen


class BetaPipeline(Pipeline):
    """Schedules, beta invariants, identities and certificates of a beta case."""

    mechanism = "beta"

    def __init__(
        self, casebook: Casebook, case: CaseSpec, divisor: Union[str, None] = None
    ) -> None:
        super().__init__(casebook, case, divisor)
        if divisor is not None and divisor not in case.divisors():
            raise InputError(f"Case {case.id} has no schedule for divisor {divisor!r}.")
        self._betas: Dict[Tuple[str, int], BetaResult] = {}

    def beta(self, divisor: str, branch: int = 0) -> BetaResult:
        key = (divisor, branch)
        if key not in self._betas:
            self._betas[key] = beta_general(self.case.variety, self.case.schedule(*key))
        return self._betas[key]

    def betas(self) -> List[BetaResult]:
        return [
            self.beta(s.divisor, s.branch) for s in self.case.schedules if self.wanted(s.divisor)
        ]

    def signed(self, result: BetaResult) -> BetaResult:
        """Attach the certificate whose link signs `result` alone on its own region.

        A proving certificate is preferred; a linked one that fails to prove is still
        attached so the result reports why it stays inconclusive.
        """
        attached = None
        for entry in self.case.expected.get("certificates", []):
            sources = _unique([_source(term) for term in entry["link"]["combination"]])
            if sources != [(result.divisor, result.branch)]:
                continue
            if region_key(entry.get("region", [])) != region_key(result.region):
                continue
            linked, covers = self.certificate(entry)
            if covers:
                continue
            attached = linked
            if linked.proves:
                break
        return replace(result, sign_certificate=attached)

    def signed_betas(self) -> List[BetaResult]:
        return [self.signed(result) for result in self.betas()]

    def check_signs(self) -> None:
        for result in self.signed_betas():
            if result.sign_certificate is None:
                continue
            self.check(
                f"beta {result.divisor} branch {result.branch} is negative on its region",
                result.verdict == Verdict.K_UNSTABLE,
                result.sign_certificate.target.summary(),
            )

    def quantities(self) -> Dict[Source, Poly]:
        volume = self.case.variety.volume()
        return {
            (r.divisor, r.branch): negativity_quantity(r.value, volume) for r in self.betas()
        }

    def evaluate(self, source: Source, point: Mapping[str, Fraction]) -> Fraction:
        if source == "df":
            return super().evaluate(source, point)
        return self.beta(*source).value.evaluate(point)

    def check_symmetry(self) -> None:
        permutation = self.case.symmetry
        if not permutation:
            return
        gens = self.case.gens
        images = {old: variable(new, gens) for old, new in permutation.items()}
        volume = self.case.variety.volume()
        difference = substitute(volume, images, gens) - volume
        self.check(
            "symmetry fixes L^n",
            difference.is_zero,
            ", ".join(f"{k}->{v}" for k, v in permutation.items()),
        )

    def check_schedules(self) -> None:
        for schedule in self.case.schedules:
            if not self.wanted(schedule.divisor):
                continue
            result = validate_schedule(self.case.variety, schedule)
            self.check(
                f"schedule {schedule.label()}", result.ok, "; ".join(result.failures) or "ok"
            )

    def scale_free(self) -> bool:
        """Whether every polarization coefficient is a linear form in the parameters."""
        return all(
            c.is_zero or (c.is_homogeneous and c.total_degree() == 1)
            for c in self.case.variety.polarization.coefficients
        )

    def check_betas(self) -> None:
        for result in self.betas() if self.scale_free() else []:
            self.check(
                f"beta {result.divisor} branch {result.branch} is invariant under rescaling",
                rescaling_invariant(result.value, self.case.variables),
            )
        for entry in self.case.expected.get("beta", []):
            divisor, branch = entry["divisor"], int(entry.get("branch", 0))
            if not self.wanted(divisor):
                continue
            computed = self.beta(divisor, branch).value
            name = f"beta {divisor} branch {branch}"
            self.check_comparison(name, compare(computed, self.case.golden(entry)))
            if "erratum" in entry:
                erratum = entry["erratum"]
                holds = compare(computed, self.case.golden(erratum)).matches
                self.check_erratum(name, erratum, holds)

    def check_pieces(self) -> None:
        variety = self.case.variety
        for entry in self.case.expected.get("pieces", []):
            divisor, branch = entry["divisor"], int(entry.get("branch", 0))
            if not self.wanted(divisor):
                continue
            index = int(entry["chamber"])
            if entry.get("adjoint"):
                schedule, base = self.case.adjoint.schedule, -variety.canonical
                name = f"anticanonical {divisor} chamber {index}"
            else:
                schedule, base = self.case.schedule(divisor, branch), None
                name = f"{divisor} branch {branch} chamber {index}"
            if "volume" in entry:
                piece = volume_piecewise(variety, schedule, base).pieces[index]
                self.check_polynomial(f"volume on {name}", piece, entry["volume"])
            if "t_derivative" in entry:
                piece = volume_t_derivative(variety, schedule, base)[index]
                self.check_polynomial(f"t-derivative on {name}", piece, entry["t_derivative"])

    def check_identities(self) -> None:
        for entry in self.case.expected.get("identities", []):
            name = f"identity {entry['name']}"
            self.check_comparison(name, self.identity(entry))
            if "erratum" in entry:
                erratum = entry["erratum"]
                self.check_erratum(name, erratum, self.identity(erratum).matches)

    def identity(self, entry: Mapping[str, Any]) -> Comparison:
        gens = self.case.gens
        lhs = RationalFunction(self.case.polynomial(entry["lhs"]))
        rhs = RationalFunction(self.case.polynomial(entry["rhs"]))
        if "substitution" in entry:
            images = {k: self.case.polynomial(v) for k, v in entry["substitution"].items()}
            lhs, rhs = lhs.substitute(images, gens), rhs.substitute(images, gens)
        return compare(lhs, rhs)

    def check_walls(self) -> None:
        gens = self.case.gens
        for entry in self.case.expected.get("wall_agreement", []):
            divisor = entry["divisor"]
            if not self.wanted(divisor):
                continue
            first, second = (int(b) for b in entry["branches"])
            images = {k: self.case.polynomial(v) for k, v in entry["wall"].items()}
            wall = ", ".join(f"{k}={v}" for k, v in entry["wall"].items())
            comparison = compare(
                self.beta(divisor, first).value.substitute(images, gens),
                self.beta(divisor, second).value.substitute(images, gens),
            )
            self.check_comparison(f"beta {divisor} branches agree on {wall}", comparison)

    def check_reductions(self) -> None:
        gens = self.case.gens
        for entry in self.case.expected.get("reductions", []):
            divisor, branch = entry["divisor"], int(entry.get("branch", 0))
            if not self.wanted(divisor):
                continue
            images = {k: self.case.polynomial(v) for k, v in entry["specialization"].items()}
            point = ", ".join(f"{k}={v}" for k, v in entry["specialization"].items())
            comparison = pullback_specialize(
                self.beta(divisor, branch).value,
                {k: polynomial(v, gens) for k, v in images.items()},
                self.case.golden(entry),
            )
            self.check_comparison(f"beta {divisor} reduces at {point}", comparison)

    def check_adjoint(self) -> None:
        adjoint = self.case.adjoint
        if adjoint is None or not self.wanted(adjoint.schedule.divisor):
            return
        variety = self.case.variety
        result = validate_schedule(variety, adjoint.schedule, base=-variety.canonical)
        self.check(
            f"anticanonical schedule of {adjoint.schedule.divisor}",
            result.ok,
            "; ".join(result.failures) or "ok",
        )
        if "phi" in self.case.expected:
            self.check_comparison(
                "phi", compare(phi(variety, adjoint), self.case.golden(self.case.expected["phi"]))
            )
        comparison = beta_crosscheck_adjoint(
            variety, self.case.schedule(adjoint.schedule.divisor), adjoint
        )
        self.check_comparison("adjoint and general beta agree", comparison)

    def check_reconstruction(self) -> None:
        """L^n, the slope numerator and mu recomputed from the intersection tensor."""
        variety = self.case.variety
        expected = self.case.expected
        provenance = self.case.tensor_provenance
        for name, computed in (
            ("volume", variety.volume()),
            ("slope_numerator", variety.slope_numerator()),
        ):
            if name in expected:
                self.check_polynomial(f"{provenance} tensor {name}", computed, expected[name])
        if "mu" in expected:
            self.check_comparison(
                f"{provenance} tensor mu",
                compare(slope_mu(variety), self.case.golden(expected["mu"])),
            )

    def run(self) -> CaseReport:
        self.check_reconstruction()
        self.check_symmetry()
        self.check_schedules()
        self.check_betas()
        self.check_pieces()
        self.check_evaluations()
        self.check_identities()
        self.check_walls()
        self.check_reductions()
        self.check_adjoint()
        signed = self.check_certificates()
        self.check_signs()
        self.conclude(signed)
        self.report.formula = self.formula()
        return self.report

    def formula(self) -> str:
        results = self.betas()
        witnesses = [name.strip() for name in self.report.witness.split(",")]
        for result in results:
            if result.divisor in witnesses:
                return str(result.value)
        return str(results[0].value) if results else ""


class PullbackPipeline(Pipeline):
    """Specialize a parent family's beta and certify the reduced formula."""

    mechanism = "beta-pullback"

    def __init__(
        self, casebook: Casebook, case: CaseSpec, divisor: Union[str, None] = None
    ) -> None:
        super().__init__(casebook, case, divisor)
        self.target = case.document["divisor"]
        if divisor is not None and divisor != self.target:
            raise InputError(f"Case {case.id} only pulls back divisor {self.target!r}.")
        self.branch = int(case.document.get("branch", 0))
        self.parent = casebook.load(case.parent)
        self.images = {
            name: self.case.polynomial(text) for name, text in case.specialization.items()
        }
        self._reduced: Union[RationalFunction, None] = None

    def parent_beta(self) -> RationalFunction:
        return beta_general(
            self.parent.variety, self.parent.schedule(self.target, self.branch)
        ).value

    def reduced(self) -> RationalFunction:
        """The parent's beta after the specialization."""
        if self._reduced is None:
            self._reduced = self.parent_beta().substitute(self.images, self.case.gens)
        return self._reduced

    def reduced_volume(self) -> Poly:
        return substitute(self.parent.variety.volume(), self.images, self.case.gens)

    def quantities(self) -> Dict[Source, Poly]:
        return {
            (self.target, self.branch): negativity_quantity(self.reduced(), self.reduced_volume())
        }

    def evaluate(self, source: Source, point: Mapping[str, Fraction]) -> Fraction:
        if source != (self.target, self.branch):
            return super().evaluate(source, point)
        return self.reduced().evaluate(point)

    def run(self) -> CaseReport:
        expected = self.case.expected
        point = ", ".join(f"{k}={v}" for k, v in self.case.specialization.items())
        name = f"beta {self.target} of {self.parent.id} at {point}"
        comparison = pullback_specialize(
            self.parent_beta(), self.images, self.case.golden(expected)
        )
        self.check_comparison(name, comparison)
        if "erratum" in expected:
            erratum = expected["erratum"]
            self.check_erratum(
                name, erratum, compare(self.reduced(), self.case.golden(erratum)).matches
            )
        self.check_evaluations()
        self.conclude(self.check_certificates())
        self.report.formula = str(self.reduced())
        return self.report


class LocalizationPipeline(Pipeline):
    """Donaldson-Futaki invariant of a product test configuration by localization."""

    mechanism = "localization"

    def __init__(
        self, casebook: Casebook, case: CaseSpec, divisor: Union[str, None] = None
    ) -> None:
        super().__init__(casebook, case, divisor)
        if divisor is not None:
            raise InputError(f"Case {case.id} has no divisors; it is a localization case.")
        self._df: Union[DFResult, None] = None

    def a0_a1(self) -> Tuple[Poly, Poly]:
        """L^n / n! and (-K)·L^(n-1) / (2 (n-1)!) from the intersection data."""
        variety = self.case.variety
        n = variety.dim
        a0 = variety.volume() * to_rational(Fraction(1, factorial(n)))
        a1 = variety.slope_numerator() * to_rational(Fraction(1, 2 * factorial(n - 1)))
        return a0, a1

    def df(self, oracle: str = "both") -> DFResult:
        if oracle != "both":
            a0, a1 = self.a0_a1()
            return df_invariant(self.case.localization, a0, a1, oracle)
        if self._df is None:
            a0, a1 = self.a0_a1()
            self._df = df_invariant(self.case.localization, a0, a1, "both")
        return self._df

    def quantities(self) -> Dict[Source, Poly]:
        result = self.df()
        return {"df": _polynomial_part(-(result.df * result.a0), "-DF·a0")}

    def evaluate(self, source: Source, point: Mapping[str, Fraction]) -> Fraction:
        if source != "df":
            return super().evaluate(source, point)
        return self.df().df.evaluate(point)

    def check_expansion(self) -> None:
        data = self.case.localization
        expansion = character_series_oracle(data)
        self.check(
            "negative powers cancel",
            expansion.pole_check,
            "; ".join(format_polynomial(p) for p in expansion.poles if not p.is_zero) or "ok",
        )
        a0, a1 = self.a0_a1()
        n = data.dim
        for name, power, expected in (("a0", n, a0), ("a1", n - 1, a1)):
            difference = coefficient_of(expansion.h, "k", power, data.gens) - expected
            self.check(
                f"series {name} matches intersection numbers",
                difference.is_zero,
                "match" if difference.is_zero else format_polynomial(difference),
            )

    def run(self) -> CaseReport:
        expected = self.case.expected
        self.check_expansion()
        result = self.df()
        self.check("closed forms agree with the series oracle", bool(result.oracle_agreement))
        for name, computed in (("b0", result.b0), ("b1", result.b1)):
            if name in expected:
                self.check_polynomial(name, computed, expected[name])
        if "df" in expected:
            self.check_comparison("DF", compare(result.df, self.case.golden(expected["df"])))
            if "erratum" in expected["df"]:
                erratum = expected["df"]["erratum"]
                holds = compare(result.df, self.case.golden(erratum)).matches
                self.check_erratum("DF", erratum, holds)
        self.check_evaluations()
        self.conclude(self.check_certificates())
        self.report.formula = str(result.df)
        return self.report


class DegenerationPipeline(Pipeline):
    """Families settled by a degeneration argument that is not recomputed here."""

    mechanism = "degeneration"

    def run(self) -> CaseReport:
        self.report.verdict = Verdict.DEGENERATION.value
        self.report.witness = self.case.document.get("witness", "degeneration")
        return self.report


class PipelineRegistry:
    """Pipeline classes keyed by case mechanism."""

    def __init__(self) -> None:
        self._classes: Dict[str, Type[Pipeline]] = {}

    def register(self, mechanism: str, pipeline_class: Type[Pipeline]) -> None:
        self._classes[mechanism] = pipeline_class

    def load(
        self, casebook: Casebook, case: CaseSpec, divisor: Union[str, None] = None
    ) -> Pipeline:
        """Instantiate the pipeline for a case.

        Raises:
            CaseDataError: Thrown if no pipeline handles the case's mechanism.
        """
        if case.mechanism not in self._classes:
            raise CaseDataError(f"{case.id}: no pipeline for mechanism {case.mechanism!r}.")
        return self._classes[case.mechanism](casebook, case, divisor)


pipeline_registry = PipelineRegistry()
pipeline_registry.register("beta", BetaPipeline)
pipeline_registry.register("beta-pullback", PullbackPipeline)
pipeline_registry.register("localization", LocalizationPipeline)
pipeline_registry.register("degeneration", DegenerationPipeline)


def verify_case(
    casebook: Casebook, case_id: str, divisor: Union[str, None] = None
) -> CaseReport:
    """Run the full pipeline of one case.

    Args:
        casebook (Casebook): Where the case and its parent live.
        case_id (str): Case to verify.
        divisor (str | None): Restrict the beta checks to one divisor.

    Returns:
        CaseReport: Checks, verdict and the row of the summary table.

    Raises:
        InputError: Thrown if the case or the divisor is unknown.
        CaseDataError: Thrown if the case document is inconsistent.
    """
    start = time.perf_counter()
    case = casebook.load(case_id)
    report = pipeline_registry.load(casebook, case, divisor).run()
    report.elapsed = time.perf_counter() - start
    logger.info(
        "%s: %s with %d check(s) in %.2fs.",
        case_id,
        report.status,
        len(report.checks),
        report.elapsed,
    )
    return report


def compute_beta(casebook: Casebook, case_id: str, divisor: str) -> List[BetaResult]:
    """Beta invariant of one divisor on every region branch.

    Raises:
        InputError: Thrown if the case has no beta invariant for the divisor.
    """
    case = casebook.load(case_id)
    pipeline = pipeline_registry.load(casebook, case, divisor)
    if isinstance(pipeline, BetaPipeline):
        return pipeline.signed_betas()
    if isinstance(pipeline, PullbackPipeline):
        return [BetaResult(divisor, pipeline.reduced(), (), pipeline.branch)]
    raise InputError(f"Case {case_id} is a {case.mechanism} case; it has no beta invariant.")


def compute_df(casebook: Casebook, case_id: str, oracle: str = "both") -> DFResult:
    """Donaldson-Futaki invariant of a localization case.

    Raises:
        InputError: Thrown if the case is not a localization case or the oracle is unknown.
    """
    case = casebook.load(case_id)
    if case.mechanism != "localization":
        raise InputError(f"Case {case_id} is a {case.mechanism} case; it has no DF invariant.")
    return LocalizationPipeline(casebook, case).df(oracle)


def run_certificate(casebook: Casebook, case_id: str, name: str) -> LinkedCertificate:
    """Run one named certificate of a case.

    Raises:
        InputError: Thrown if the case has no certificate of that name.
    """
    case = casebook.load(case_id)
    pipeline = pipeline_registry.load(casebook, case)
    linked, covers = pipeline.certificate(pipeline.certificate_entry(name))
    for failure in covers:
        logger.warning("%s: certificate %s: %s", case_id, name, failure)
    return linked
