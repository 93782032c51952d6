#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Fixtures for the casebook tests."""

import copy
import json
import os
from typing import Any, Callable, Dict

import pytest

from casebook import DEFAULT_CASES_DIR, Casebook, read_document


@pytest.fixture(scope="session")
def casebook() -> Casebook:
    """Casebook over the repository's cases; shared so parents load once."""
    return Casebook()


@pytest.fixture
def document() -> Callable[[str], Dict[str, Any]]:
    """Fresh deep copy of a shipped case document."""

    def _document(case_id: str) -> Dict[str, Any]:
        return copy.deepcopy(read_document(os.path.join(DEFAULT_CASES_DIR, f"{case_id}.json")))

    return _document


@pytest.fixture
def cases_dir(tmp_path) -> Callable[..., str]:
    """Write documents into a temporary case directory and return its path."""

    def _cases_dir(*documents: Dict[str, Any]) -> str:
        for entry in documents:
            with open(tmp_path / f"{entry['id']}.json", "w") as handle:
                json.dump(entry, handle)
        return str(tmp_path)

    return _cases_dir
