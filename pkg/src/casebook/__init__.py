#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

from .loader import MECHANISMS, CaseSpec, load_case, read_document
from .manifest import DEFAULT_CASES_DIR, Casebook, Manifest, ManifestEntry, table_order
from .verification import (
    CaseReport,
    Check,
    compute_beta,
    compute_df,
    parse_point_text,
    pipeline_registry,
    run_certificate,
    verify_case,
)
