"""Exact-rank checks of good postulation for unions of lines, fat linear spaces and sundials."""

from __future__ import annotations

__version__ = "0.1.0"

from .combinatorics import (
    ExpectedCounts,
    ProofSchedule,
    classify_exception,
    expected_counts,
    fat_space_conditions,
    hh_admissible,
    residual_parameters,
    th2_parameters,
    trace_parameters_p4,
    trace_parameters_pn,
    verify_schedule,
)
from .config import ComponentSpec, Constraint, Hypersurface, Kind, QuadricConfig, SchemeConfig
from .engine import (
    PostulationVerdict,
    castelnuovo_audit,
    conjecture_audit,
    hh_cross_check,
    projection_audit_d2,
    sundial_audit,
    verify_postulation,
)
from .horace import HoraceSplit, horace_split, quadric_rows
from .linalg import PrimeField, field_inverse, random_invertible, rank
from .monomials import MonomialBasis, enumerate_basis
from .schemes import assemble_matrix, sample_config

__all__ = [
    "ComponentSpec", "Constraint", "ExpectedCounts", "HoraceSplit", "Hypersurface", "Kind",
    "MonomialBasis", "PostulationVerdict", "PrimeField", "ProofSchedule", "QuadricConfig",
    "SchemeConfig", "assemble_matrix", "castelnuovo_audit", "classify_exception",
    "conjecture_audit", "enumerate_basis", "expected_counts", "fat_space_conditions",
    "field_inverse", "hh_admissible", "hh_cross_check", "horace_split", "projection_audit_d2",
    "quadric_rows", "random_invertible", "rank", "residual_parameters", "sample_config",
    "sundial_audit", "th2_parameters", "trace_parameters_p4", "trace_parameters_pn",
    "verify_postulation", "verify_schedule",
]
