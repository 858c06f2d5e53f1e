"""Exact and partially invariant solution families."""

from .exact import (
    KGSolutionSpec,
    PartialInvariantSpec,
    SolutionSpecError,
    derive_rossby_frequency,
    klein_gordon_lift,
    klein_gordon_residual,
    partially_invariant,
    q_tilde_function,
    rossby_frequency,
    rossby_wave,
    spherical_harmonic_wave,
    steady_plane_waves,
    zonal_flow,
)
