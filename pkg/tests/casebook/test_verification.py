#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Tests for the per-case pipelines against the shipped casebook."""

import os
from fractions import Fraction

import pytest

from casebook import (
    DEFAULT_CASES_DIR,
    Casebook,
    CaseSpec,
    compute_beta,
    compute_df,
    load_case,
    parse_point_text,
    pipeline_registry,
    read_document,
    run_certificate,
    verify_case,
)
from engine import CaseDataError, InputError, Verdict

ALL_CASES = sorted(
    name[:-5] for name in os.listdir(DEFAULT_CASES_DIR) if name.endswith(".json")
)


def _names(checks):
    return [check.name for check in checks]


class TestEveryCase:
    @pytest.mark.parametrize("case_id", ALL_CASES)
    def test_case_passes(self, casebook, case_id) -> None:
        """Test that every shipped case verifies with its recorded verdict."""
        report = verify_case(casebook, case_id)
        assert report.status == "pass", [(c.name, c.detail) for c in report.failures]
        expected = read_document(casebook.path(case_id)).get("expected", {}).get("verdict")
        if report.mechanism == "degeneration":
            assert report.verdict == Verdict.DEGENERATION.value
        else:
            assert report.verdict == expected == Verdict.K_UNSTABLE.value
            assert report.witness
            assert report.formula


class TestBetaPipeline:
    def test_errata(self, casebook) -> None:
        """Test that displayed formulas recorded as errata do not reproduce."""
        report = verify_case(casebook, "3.18")
        checks = {check.name: check for check in report.checks}
        assert checks["beta Pi branch 0 erratum"].passed
        assert checks["beta E branch 0 erratum"].passed
        assert checks["beta Pi branch 0"].detail == "match"

    def test_tensor_reconstruction(self, casebook) -> None:
        """Test that L^n and the slope numerator are recomputed from the tensor."""
        report = verify_case(casebook, "3.21")
        checks = {check.name: check for check in report.checks}
        assert checks["printed tensor volume"].detail == "match"
        assert checks["printed tensor slope_numerator"].passed

    def test_tensor_mismatch_fails(self, casebook, document) -> None:
        """Test that a volume the tensor does not give fails the reconstruction check."""
        case = load_case(document("3.21"))
        case.document["expected"]["volume"] = "a^3"
        report = pipeline_registry.load(casebook, case).run()
        assert "printed tensor volume" in _names(report.failures)

    def test_identity(self, casebook) -> None:
        """Test a named polynomial identity between the beta numerators."""
        report = verify_case(casebook, "4.9")
        checks = {check.name: check for check in report.checks}
        assert checks["identity 3*a*f1 = f2 + f3"].passed

    def test_divisor_filter(self, casebook) -> None:
        """Test that a divisor filter drops the other divisor and the verdict."""
        report = verify_case(casebook, "3.18", "E")
        names = _names(report.checks)
        assert "beta E branch 0" in names
        assert "beta Pi branch 0" not in names
        assert "verdict" not in names
        assert report.status == "pass"

    def test_unknown_divisor(self, casebook) -> None:
        """Test that an unknown divisor is an input error."""
        with pytest.raises(InputError):
            verify_case(casebook, "3.21", "G")

    def test_failing_golden(self, document, cases_dir) -> None:
        """Test that a wrong golden value fails its check but keeps the others."""
        entry = document("3.21")
        entry["expected"]["evaluations"][0]["value"] = "-1/2"
        report = verify_case(Casebook(cases_dir(entry)), "3.21")
        assert report.status == "fail"
        assert [c.name for c in report.failures] == ["value of S at a=1, b=1, c=1"]
        assert report.verdict == Verdict.K_UNSTABLE.value

    def test_uncovered_region(self, document, cases_dir) -> None:
        """Test that a cover the certificates do not reach is inconclusive."""
        entry = document("3.21")
        entry["expected"]["cover"] = [["a <= b"], ["b <= a"]]
        report = verify_case(Casebook(cases_dir(entry)), "3.21")
        assert report.verdict == Verdict.INCONCLUSIVE.value
        assert "verdict" in [c.name for c in report.failures]

    def test_broken_link(self, document, cases_dir) -> None:
        """Test that a wrong cofactor breaks the link and the proof."""
        entry = document("3.21")
        entry["expected"]["certificates"][0]["link"]["cofactor"] = "2*c"
        report = verify_case(Casebook(cases_dir(entry)), "3.21")
        failed = [c.name for c in report.failures]
        assert "certificate f link" in failed
        assert "certificate f" in failed
        assert "beta S branch 0 is negative on its region" in failed


class TestLocalizationPipeline:
    def test_recomputed_numerator(self, casebook) -> None:
        """Test that the recomputed DF reproduces and the displayed one is an erratum."""
        report = verify_case(casebook, "3.16")
        checks = {check.name: check for check in report.checks}
        assert checks["DF"].passed
        assert checks["DF erratum"].passed
        assert checks["certificate DF link"].passed
        assert checks["b0"].passed and checks["b1"].passed
        assert report.verdict == Verdict.K_UNSTABLE.value

    def test_df_values(self, casebook) -> None:
        """Test DF of the three-parameter family away from c = 0."""
        result = compute_df(casebook, "3.16")
        assert result.oracle_agreement is True
        assert result.df.evaluate({"a": 1, "b": 1, "c": 0}) == Fraction(-1, 4)
        assert result.df.evaluate({"a": 1, "b": 1, "c": 1}) == Fraction(-3, 4)
        assert result.df.evaluate({"a": 2, "b": 1, "c": 1}) < 0

    def test_displayed_numerator_differs(self, casebook) -> None:
        """Test that the displayed numerator only agrees on c = 0."""
        case = casebook.load("3.16")
        erratum = case.golden(case.expected["df"]["erratum"])
        assert erratum.evaluate({"a": 1, "b": 1, "c": 0}) == Fraction(-1, 4)
        assert erratum.evaluate({"a": 1, "b": 1, "c": 1}) == Fraction(-345, 34)


class TestComputations:
    def test_compute_beta(self, casebook) -> None:
        """Test beta of a beta case at a point."""
        (result,) = compute_beta(casebook, "3.21", "S")
        assert result.value.evaluate({"a": 1, "b": 1, "c": 1}) == Fraction(-399, 1444)
        assert result.sign_certificate.proves
        assert result.verdict == Verdict.K_UNSTABLE

    def test_compute_beta_pullback(self, casebook) -> None:
        """Test the reduced beta of a pullback case."""
        (result,) = compute_beta(casebook, "2.30", "PiC")
        assert result.value.evaluate({"a": 1, "c": 1}) == Fraction(-7, 30)

    def test_compute_beta_needs_beta_case(self, casebook) -> None:
        """Test that localization cases have no beta invariant."""
        with pytest.raises(InputError):
            compute_beta(casebook, "2.26", "E")

    def test_compute_df(self, casebook) -> None:
        """Test that both oracles agree on a localization case."""
        result = compute_df(casebook, "2.26")
        assert result.oracle_agreement is True
        assert result.df.evaluate({"a": 1, "b": 1}) == Fraction(-13, 8)

    def test_compute_df_needs_localization(self, casebook) -> None:
        """Test that beta cases have no DF invariant."""
        with pytest.raises(InputError):
            compute_df(casebook, "3.21")

    def test_run_certificate(self, casebook) -> None:
        """Test one named certificate."""
        assert run_certificate(casebook, "dP7", "E").proves
        with pytest.raises(InputError):
            run_certificate(casebook, "dP7", "F1")


class TestHelpers:
    def test_point_text(self) -> None:
        """Test rational points given on the command line."""
        assert parse_point_text("a=1, b=1/2") == {"a": Fraction(1), "b": Fraction(1, 2)}
        with pytest.raises(InputError):
            parse_point_text("a")

    def test_unknown_pipeline(self, casebook) -> None:
        """Test that a mechanism without a pipeline is rejected."""
        case = CaseSpec("x", "other", "", "", (), {})
        with pytest.raises(CaseDataError):
            pipeline_registry.load(casebook, case)
