"""Random sample points for numerical verification of generators and maps."""

from typing import Dict, Sequence

import numpy as np

# t bounded away from 0 for |t|**a parameter functions
SAMPLE_RANGES = {"t": (0.5, 1.5), "lam": (0.0, 2 * np.pi), "mu": (-0.9, 0.9)}


def sample_coordinates(coordinates: Sequence[str], n: int, rng: np.random.Generator) -> Dict[str, np.ndarray]:
    """Uniform random points; coordinates without a listed range use (-1, 1)."""
    return {c: rng.uniform(*SAMPLE_RANGES.get(c, (-1.0, 1.0)), size=n) for c in coordinates}
