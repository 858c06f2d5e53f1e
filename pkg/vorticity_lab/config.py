"""Configuration settings for the vorticity laboratory."""

import math
from dataclasses import dataclass
from typing import Dict, Tuple


@dataclass
class GridConfig:
    """Sample layout of a default residual grid."""
    variables: Tuple[str, ...]
    bounds: Dict[str, Tuple[float, float]]
    points: Dict[str, int]
    # variables sampled on a half-open interval (periodic coordinates)
    periodic: Tuple[str, ...] = ()


@dataclass
class LabConfig:
    """Main configuration for the vorticity laboratory."""

    # Residual / verification tolerances (absolute)
    residual_tolerance: float = 1e-11
    symmetry_tolerance: float = 1e-10
    equivalence_tolerance: float = 1e-10
    subalgebra_tolerance: float = 1e-10
    invariance_tolerance: float = 1e-12
    constraint_tolerance: float = 1e-14
    harmonic_tolerance: float = 1e-10

    # Default residual grids
    cartesian_grid: GridConfig = None
    spherical_grid: GridConfig = None

    # Time integration
    dt: float = 1e-3
    sample_stride: int = 1

    # Gauss-Legendre nodes per unit interval for the q~ antiderivative
    quadrature_nodes: int = 32

    # Sampling for numerical verification
    subalgebra_samples: int = 8
    subalgebra_resamples: int = 3
    invariance_samples: int = 5
    random_seed: int = 2009

    # Enumeration cost guard: |m1|, |m2| <= max_mode
    max_mode: int = 3

    def __post_init__(self):
        if self.cartesian_grid is None:
            self.cartesian_grid = GridConfig(
                variables=("t", "x", "y"),
                bounds={"t": (-1.0, 1.0), "x": (-1.0, 1.0), "y": (-1.0, 1.0)},
                points={"t": 11, "x": 11, "y": 11},
            )

        if self.spherical_grid is None:
            self.spherical_grid = GridConfig(
                variables=("t", "lam", "mu"),
                bounds={"t": (0.0, 1.0), "lam": (0.0, 2 * math.pi), "mu": (-0.9, 0.9)},
                points={"t": 5, "lam": 16, "mu": 13},
                periodic=("lam",),
            )


# Global configuration instance
CONFIG = LabConfig()
