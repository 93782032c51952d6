#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

"""Directory of case documents and the ordered manifest of families."""

import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Tuple, Union

from engine import CaseDataError, InputError

from .loader import MECHANISMS, CaseSpec, load_case, read_document

logger = logging.getLogger(__name__)

DEFAULT_CASES_DIR = os.path.join(os.path.dirname(__file__), "..", "..", "cases")


@dataclass(frozen=True)
class ManifestEntry:
    """One family of the table."""

    id: str
    mechanism: str
    section: str
    description: str
    parent: Union[str, None] = None
    specialization: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Manifest:
    """Families in table order."""

    entries: Tuple[ManifestEntry, ...]

    @property
    def ids(self) -> List[str]:
        return [entry.id for entry in self.entries]

    def get(self, case_id: str) -> ManifestEntry:
        for entry in self.entries:
            if entry.id == case_id:
                return entry
        raise InputError(f"Unknown case {case_id!r}.")

    def by_mechanism(self, mechanism: str) -> List[str]:
        return [entry.id for entry in self.entries if entry.mechanism == mechanism]


def table_order(case_id: str) -> Tuple[int, int, int, str]:
    """Sort key: numbered families by rank and number, then named examples."""
    rank, _, number = case_id.partition(".")
    if rank.isdigit() and number.isdigit():
        return (0, int(rank), int(number), "")
    return (1, 0, 0, case_id)


class Casebook:
    """Case documents under one directory, loaded on demand."""

    def __init__(self, cases_dir: Union[str, None] = None) -> None:
        self.cases_dir = os.path.abspath(DEFAULT_CASES_DIR if cases_dir is None else cases_dir)
        self._cases: Dict[str, CaseSpec] = {}
        self._documents: Dict[str, Dict[str, Any]] = {}

    def path(self, case_id: str) -> str:
        return os.path.join(self.cases_dir, f"{case_id}.json")

    def document(self, case_id: str) -> Dict[str, Any]:
        """Raw document of a case.

        Raises:
            InputError: Thrown if no document exists for the id.
        """
        if case_id not in self._documents:
            path = self.path(case_id)
            if not os.path.isfile(path):
                raise InputError(f"Unknown case {case_id!r}.")
            self._documents[case_id] = read_document(path)
        return self._documents[case_id]

    def load(self, case_id: str) -> CaseSpec:
        """Validated specification of a case."""
        if case_id not in self._cases:
            case = load_case(self.document(case_id))
            if case.id != case_id:
                raise CaseDataError(f"{self.path(case_id)} declares id {case.id!r}.")
            self._cases[case_id] = case
        return self._cases[case_id]

    def case_ids(self) -> List[str]:
        if not os.path.isdir(self.cases_dir):
            raise InputError(f"Case directory {self.cases_dir} does not exist.")
        names = [n[:-5] for n in os.listdir(self.cases_dir) if n.endswith(".json")]
        return sorted(names, key=table_order)

    def manifest(self) -> Manifest:
        """Ordered manifest of every case document.

        Raises:
            CaseDataError: Thrown if a pullback parent is missing or is not a beta case.
        """
        entries = []
        for case_id in self.case_ids():
            document = self.document(case_id)
            mechanism = document.get("mechanism")
            if mechanism not in MECHANISMS:
                raise CaseDataError(f"{case_id}: unknown mechanism {mechanism!r}.")
            entries.append(
                ManifestEntry(
                    id=case_id,
                    mechanism=mechanism,
                    section=document.get("section", case_id),
                    description=document.get("description", ""),
                    parent=document.get("parent"),
                    specialization=dict(document.get("specialization", {})),
                )
            )
        ids = {entry.id for entry in entries}
        for entry in entries:
            if entry.mechanism != "beta-pullback":
                continue
            if entry.parent not in ids:
                raise CaseDataError(f"{entry.id}: parent {entry.parent!r} is not in the casebook.")
            if self.document(entry.parent).get("mechanism") != "beta":
                raise CaseDataError(f"{entry.id}: parent {entry.parent} is not a beta case.")
        logger.debug("Manifest built with %d entries.", len(entries))
        return Manifest(tuple(entries))
