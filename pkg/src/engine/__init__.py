#!/usr/bin/env python3
# Copyright 2022 Canonical Ltd.
# See LICENSE file for licensing details.

from .certify import (
    Certificate,
    IntervalMap,
    LinkedCertificate,
    Status,
    Substitution,
    certify_link,
    certify_on_region,
    certify_orthant,
)
from .errors import CaseDataError, InputError, KStabilityException, VerificationError
from .geometry import (
    CurveClass,
    DivisorClass,
    IntersectionForm,
    Variety,
    intersect,
    pair_curve,
    slope_mu,
)
from .localization import (
    DFResult,
    FixedPoint,
    LocalizationData,
    b0_b1_closed,
    character_series_oracle,
    df_invariant,
)
from .stability import (
    AdjointSchedule,
    BetaResult,
    Comparison,
    FamilyVerdict,
    SignedRegion,
    Verdict,
    beta_adjoint,
    beta_crosscheck_adjoint,
    beta_general,
    compare,
    negativity_quantity,
    phi,
    pullback_specialize,
    region_key,
    rescaling_invariant,
    verdict,
)
from .symbolic import (
    LaurentSeries,
    LinearForm,
    RationalFunction,
    integrate_over_interval,
    laurent_mul_truncate,
    poly_eval,
)
from .zariski import (
    Chamber,
    ChamberSchedule,
    PiecewiseVolume,
    decompose_in_chamber,
    validate_schedule,
    volume_piecewise,
    volume_t_derivative,
)
