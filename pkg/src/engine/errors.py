#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Exceptions raised by the verification engine."""


class KStabilityException(Exception):
    """Base exception for the engine and the casebook."""

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message


class InputError(KStabilityException):
    """Malformed expression, unbound variable or unknown name."""


class CaseDataError(InputError):
    """Case document is inconsistent with itself or with the geometry it encodes."""


class VerificationError(KStabilityException):
    """An exact identity that was required to hold does not hold.

    Args:
        message (str): What failed.
        difference (str | None): Printed difference polynomial, if any.
    """

    def __init__(self, message: str, difference: str = None) -> None:
        super().__init__(message if difference is None else f"{message}: {difference}")
        self.difference = difference
