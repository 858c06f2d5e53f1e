"""Fourier-Galerkin truncation of the beta = 0 vorticity equation.

The vorticity on the doubly periodic domain is expanded as

    zeta = sum_m C_m exp(i m^.x),   m^ = (m1 k, m2 l),   C_{-m} = conj(C_m),

and the Galerkin-projected dynamics read

    dC_m/dt = sum_{m'} T(m', m) C_{m'} C_{m - m'}

with T(m', m) = -(m1' k * m2 l - m2' l * m1 k) / |m^'|^2, the sum running
over all m' in the truncation with m - m' also in the truncation.

Real coordinates are (A_m, B_m) with C_m = (A_m - i B_m)/2 over one
representative per conjugate pair (m1 > 0, or m1 = 0 and m2 > 0), ordered
lexicographically.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Tuple

import numpy as np

from ..config import CONFIG

logger = logging.getLogger(__name__)


class TruncationError(ValueError):
    """Invalid mode set, wavenumbers or state for a truncation."""


class ModeIndex(NamedTuple):
    m1: int
    m2: int

    def __neg__(self) -> "ModeIndex":
        return ModeIndex(-self.m1, -self.m2)

    def minus(self, other: "ModeIndex") -> "ModeIndex":
        return ModeIndex(self.m1 - other.m1, self.m2 - other.m2)

    @property
    def is_representative(self) -> bool:
        return self.m1 > 0 or (self.m1 == 0 and self.m2 > 0)

    def label(self, part: str = "") -> str:
        return f"{part}{self.m1}{self.m2}"


def interaction_term(mprime: ModeIndex, m: ModeIndex, k: float, l: float) -> float:
    """Coefficient of C_{m'} C_{m-m'} in dC_m/dt."""
    denominator = (mprime[0] * k) ** 2 + (mprime[1] * l) ** 2
    if denominator == 0:
        raise TruncationError("Interaction term undefined for m' = (0, 0)")
    cross = mprime[0] * k * m[1] * l - mprime[1] * l * m[0] * k
    return -cross / denominator


# ── Truncation ────────────────────────────────────────────────────────
@dataclass(frozen=True)
class Truncation:
    """Finite mode set closed under negation, with base wavenumbers k and l."""
    modes: Tuple[ModeIndex, ...]
    k: float = 1.0
    l: float = 1.0

    def __post_init__(self):
        modes = tuple(sorted({ModeIndex(int(a), int(b)) for a, b in self.modes}))
        object.__setattr__(self, "modes", modes)
        if not modes:
            raise TruncationError("Truncation needs at least one mode pair")
        if not (self.k > 0 and self.l > 0):
            raise TruncationError(f"Base wavenumbers must be positive, got k={self.k}, l={self.l}")
        if ModeIndex(0, 0) in modes:
            raise TruncationError("Mode (0, 0) is excluded: its coefficient vanishes")
        missing = [m for m in modes if -m not in modes]
        if missing:
            raise TruncationError(f"Mode set not closed under negation, missing partners of {missing}")
        largest = max(max(abs(a), abs(b)) for a, b in modes)
        if largest > CONFIG.max_mode:
            raise TruncationError(f"Mode index {largest} exceeds the supported |m1|, |m2| <= {CONFIG.max_mode}")

    @classmethod
    def square(cls, n: int = 1, k: float = 1.0, l: float = 1.0) -> "Truncation":
        """All modes with |m1|, |m2| <= n except (0, 0); n = 1 gives the 8-mode truncation."""
        modes = [ModeIndex(a, b) for a in range(-n, n + 1) for b in range(-n, n + 1) if (a, b) != (0, 0)]
        return cls(tuple(modes), k, l)

    def with_wavenumbers(self, k: Optional[float] = None, l: Optional[float] = None) -> "Truncation":
        return Truncation(self.modes, self.k if k is None else k, self.l if l is None else l)

    @cached_property
    def representatives(self) -> Tuple[ModeIndex, ...]:
        return tuple(m for m in self.modes if m.is_representative)

    @cached_property
    def labels(self) -> Tuple[str, ...]:
        """Real coordinate names A<m1><m2>, B<m1><m2> per representative."""
        return tuple(m.label(part) for m in self.representatives for part in ("A", "B"))

    @property
    def n_real(self) -> int:
        return 2 * len(self.representatives)

    @cached_property
    def position(self) -> Dict[ModeIndex, int]:
        return {m: i for i, m in enumerate(self.modes)}

    def wavenumber_squared(self, m: ModeIndex) -> float:
        return (m.m1 * self.k) ** 2 + (m.m2 * self.l) ** 2

    def to_dict(self) -> Dict[str, object]:
        return {"modes": [list(m) for m in self.modes], "k": self.k, "l": self.l}


# ── Spectral state ────────────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class SpectralState:
    """Complex coefficients aligned with `truncation.modes`, reality enforced."""
    truncation: Truncation
    coefficients: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.coefficients, dtype=complex)
        if values.shape != (len(self.truncation.modes),):
            raise TruncationError(
                f"Expected {len(self.truncation.modes)} coefficients, got shape {values.shape}"
            )
        object.__setattr__(self, "coefficients", values)
        defect = self.conjugacy_defect()
        if defect > CONFIG.constraint_tolerance:
            raise TruncationError(f"Reality constraint C(-m) = conj C(m) violated by {defect:.3e}")

    @classmethod
    def from_mapping(cls, truncation: Truncation, values: Mapping[Tuple[int, int], complex]) -> "SpectralState":
        """Coefficients by mode; missing conjugate partners are filled in."""
        coefficients = np.zeros(len(truncation.modes), dtype=complex)
        given = {ModeIndex(*m): complex(c) for m, c in values.items()}
        for m, c in given.items():
            if m not in truncation.position:
                raise TruncationError(f"Mode {tuple(m)} is not in the truncation")
            coefficients[truncation.position[m]] = c
            if -m not in given:
                coefficients[truncation.position[-m]] = np.conj(c)
        return cls(truncation, coefficients)

    @classmethod
    def from_real(cls, truncation: Truncation, vector: Iterable[float]) -> "SpectralState":
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (truncation.n_real,):
            raise TruncationError(f"Expected {truncation.n_real} real coordinates, got shape {vector.shape}")
        coefficients = np.zeros(len(truncation.modes), dtype=complex)
        for i, m in enumerate(truncation.representatives):
            c = 0.5 * complex(vector[2 * i], -vector[2 * i + 1])
            coefficients[truncation.position[m]] = c
            coefficients[truncation.position[-m]] = c.conjugate()
        return cls(truncation, coefficients)

    @classmethod
    def zeros(cls, truncation: Truncation) -> "SpectralState":
        return cls(truncation, np.zeros(len(truncation.modes), dtype=complex))

    @classmethod
    def random(cls, truncation: Truncation, rng: Optional[np.random.Generator] = None,
               scale: float = 1.0) -> "SpectralState":
        rng = rng or np.random.default_rng(CONFIG.random_seed)
        return cls.from_real(truncation, scale * rng.standard_normal(truncation.n_real))

    def to_real(self) -> np.ndarray:
        out = np.empty(self.truncation.n_real)
        for i, m in enumerate(self.truncation.representatives):
            c = self.coefficients[self.truncation.position[m]]
            out[2 * i] = 2.0 * c.real
            out[2 * i + 1] = -2.0 * c.imag
        return out

    def __getitem__(self, mode: Tuple[int, int]) -> complex:
        return complex(self.coefficients[self.truncation.position[ModeIndex(*mode)]])

    def conjugacy_defect(self) -> float:
        position = self.truncation.position
        partners = np.array([position[-m] for m in self.truncation.modes])
        return float(np.max(np.abs(self.coefficients[partners] - np.conj(self.coefficients))))


def _galerkin_sum(truncation: Truncation, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """sum_{m'} T(m', m) u_{m'} v_{m-m'} for every m.

    Targets -m run over -m' in the order used for m, so conjugate inputs
    give exactly conjugate outputs.
    """
    position = truncation.position
    out = np.zeros(len(truncation.modes), dtype=complex)
    for m in truncation.modes:
        sign = 1 if m.is_representative else -1
        total = 0j
        for base in truncation.modes:
            mprime = base if sign == 1 else -base
            partner = m.minus(mprime)
            if partner not in position:
                continue
            coeff = interaction_term(mprime, m, truncation.k, truncation.l)
            total += coeff * (u[position[mprime]] * v[position[partner]])
        out[position[m]] = total
    return out


def spectral_rhs(state: SpectralState) -> SpectralState:
    """Time derivative of every coefficient of the truncated system."""
    coefficients = state.coefficients
    derivative = _galerkin_sum(state.truncation, coefficients, coefficients)
    return SpectralState(state.truncation, derivative)


# ── Compiled model ────────────────────────────────────────────────────
class SpectralModel:
    """The full truncation as a quadratic vector field on real coordinates.

    rhs(y)_i = sum_jk Q[i, j, k] y_j y_k, with Q[:, j, k] the real coordinates
    of the Galerkin sum of the j-th and k-th basis states.
    """

    name = "truncation"

    def __init__(self, truncation: Truncation):
        self.truncation = truncation
        self.labels: Tuple[str, ...] = truncation.labels
        self.tensor = self._quadratic_tensor()
        weights = np.array([truncation.wavenumber_squared(m) for m in truncation.representatives])
        # |C_m|^2 = (A^2 + B^2)/4, counted for m and -m
        self._enstrophy_weights = np.repeat(np.full(len(weights), 0.5), 2)
        self._energy_weights = np.repeat(0.5 / weights, 2)
        logger.debug("Compiled %d-mode truncation (k=%g, l=%g)", len(truncation.modes), truncation.k, truncation.l)

    def _quadratic_tensor(self) -> np.ndarray:
        n = self.truncation.n_real
        basis = [SpectralState.from_real(self.truncation, e).coefficients for e in np.eye(n)]
        Q = np.zeros((n, n, n))
        for j in range(n):
            for k in range(n):
                pair = _galerkin_sum(self.truncation, basis[j], basis[k])
                Q[:, j, k] = SpectralState(self.truncation, pair).to_real()
        return Q

    @property
    def dimension(self) -> int:
        return self.truncation.n_real

    def rhs(self, y: np.ndarray) -> np.ndarray:
        return np.einsum("ijk,j,k->i", self.tensor, y, y)

    def energy(self, states: np.ndarray) -> np.ndarray:
        """E = sum_m |C_m|^2 / |m^|^2 over all modes (rows of `states`)."""
        return (np.asarray(states) ** 2) @ self._energy_weights

    def enstrophy(self, states: np.ndarray) -> np.ndarray:
        """Z = sum_m |C_m|^2 over all modes."""
        return (np.asarray(states) ** 2) @ self._enstrophy_weights

    @property
    def provenance(self) -> Dict[str, object]:
        return {"model": self.name, "truncation": self.truncation.to_dict()}

    def __repr__(self) -> str:
        return f"SpectralModel({len(self.truncation.modes)} modes, k={self.truncation.k:g}, l={self.truncation.l:g})"

