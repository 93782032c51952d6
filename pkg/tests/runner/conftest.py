#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Fixtures for the command-line tests."""

import copy
import json
import os

import pytest

from casebook import DEFAULT_CASES_DIR, read_document


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch) -> None:
    """Run every command without the runner's environment overrides."""
    for name in ("KSTAB_CASES_DIR", "KSTAB_JOBS", "KSTAB_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def failing_cases_dir(tmp_path) -> str:
    """A directory with one passing case and one with a wrong golden value."""
    passing = read_document(os.path.join(DEFAULT_CASES_DIR, "3.21.json"))
    failing = copy.deepcopy(read_document(os.path.join(DEFAULT_CASES_DIR, "dP7.json")))
    failing["expected"]["evaluations"][0]["value"] = "1"
    for entry in (passing, failing):
        with open(tmp_path / f"{entry['id']}.json", "w") as handle:
            json.dump(entry, handle)
    return str(tmp_path)
