"""Wasserstein distances between life-table age-at-death distributions."""

from .distances import (
    CompareOptions,
    Dominance,
    OverlapVariant,
    PairReport,
    compare,
    crossing_diagnostics,
    e0_gap,
    e0_gap_integral,
    kl_divergence,
    non_overlap_index,
    w1_distance,
    wp_distance,
)
from .errors import (
    CapacityError,
    CompletenessError,
    DomainError,
    FormatError,
    LifeTableOTError,
    NotFoundError,
    SetupError,
)
from .hmd import HmdFile, Sex, TableKind, extract_table, load_hmd, parse_hmd, serialize_hmd
from .lifetable import (
    AgeAtDeathDistribution,
    LifeTable,
    StepCdf,
    build_from_mx,
    e0_mean,
    e0_survival_area,
    from_survivors,
    step_cdf,
    to_distribution,
    validate,
)
from .oracle import TransportPlan, northwest_corner_plan, solve_exact

__version__ = "0.1.0"

__all__ = [
    "AgeAtDeathDistribution", "CapacityError", "CompareOptions", "CompletenessError",
    "DomainError", "Dominance", "FormatError", "HmdFile", "LifeTable", "LifeTableOTError",
    "NotFoundError", "OverlapVariant", "PairReport", "SetupError", "Sex", "StepCdf",
    "TableKind", "TransportPlan", "build_from_mx", "compare", "crossing_diagnostics",
    "e0_gap", "e0_gap_integral", "e0_mean", "e0_survival_area", "extract_table",
    "from_survivors", "kl_divergence", "load_hmd", "non_overlap_index",
    "northwest_corner_plan", "parse_hmd", "serialize_hmd", "solve_exact", "step_cdf",
    "to_distribution", "validate", "w1_distance", "wp_distance",
]
