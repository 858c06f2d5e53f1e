"""Spectral truncations, induced discrete symmetries and reduced models."""

from .truncation import (
    ModeIndex,
    SpectralModel,
    SpectralState,
    Truncation,
    TruncationError,
    interaction_term,
    spectral_rhs,
)
from .symmetries import (
    IDENTITY,
    LORENZ_SUBGROUP_WORDS,
    CoefficientMap,
    Subgroup,
    SymmetryError,
    element_word,
    enumerate_subgroups,
    generated_subgroup,
    induced_symmetry,
    lorenz_subgroup,
    parse_word,
    subgroup_from_words,
)
from .reduction import (
    FixedSubspace,
    InvarianceError,
    ReducedModel,
    ReducedTerm,
    check_invariance,
    fixed_subspace,
    lorenz1960,
    lorenz1960_coefficients,
    reduce_model,
    subgroup_table,
)

__all__ = [
    "ModeIndex",
    "SpectralModel",
    "SpectralState",
    "Truncation",
    "TruncationError",
    "interaction_term",
    "spectral_rhs",
    "IDENTITY",
    "LORENZ_SUBGROUP_WORDS",
    "CoefficientMap",
    "Subgroup",
    "SymmetryError",
    "element_word",
    "enumerate_subgroups",
    "generated_subgroup",
    "induced_symmetry",
    "lorenz_subgroup",
    "parse_word",
    "subgroup_from_words",
    "FixedSubspace",
    "InvarianceError",
    "ReducedModel",
    "ReducedTerm",
    "check_invariance",
    "fixed_subspace",
    "lorenz1960",
    "lorenz1960_coefficients",
    "reduce_model",
    "subgroup_table",
]
