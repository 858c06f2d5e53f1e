"""Fixed-step RK4 integration of truncated spectral systems and reduced models.

A model is anything with ``rhs(y)``, ``labels``, ``energy(states)``,
``enstrophy(states)`` and ``provenance``: `SpectralModel` (the full
truncation) and `ReducedModel` both qualify. States are real coordinate
vectors; a `SpectralState` is converted with ``to_real``.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .config import CONFIG
from .spectral.reduction import FixedSubspace, ReducedModel, fixed_subspace
from .spectral.symmetries import Subgroup, induced_symmetry
from .spectral.truncation import SpectralModel, SpectralState

logger = logging.getLogger(__name__)

Model = Union[SpectralModel, ReducedModel]


class IntegrationError(RuntimeError):
    """Non-finite state encountered during integration."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class ConstraintError(ValueError):
    """Initial state does not lie in the fixed subspace."""


class IntegratorConfigError(ValueError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    """Classical RK4 with a fixed step; every `sample_stride`-th state is kept."""
    t_end: float
    dt: float = CONFIG.dt
    sample_stride: int = CONFIG.sample_stride
    scheme: str = "rk4"

    def __post_init__(self):
        if self.scheme != "rk4":
            raise IntegratorConfigError(f"Only the fixed-step 'rk4' scheme is available, got {self.scheme!r}")
        if not (self.dt > 0 and self.t_end > 0):
            raise IntegratorConfigError(f"dt and t_end must be positive (dt={self.dt}, t_end={self.t_end})")
        if self.dt > self.t_end:
            raise IntegratorConfigError(f"dt={self.dt} exceeds t_end={self.t_end}")
        if self.sample_stride < 1:
            raise IntegratorConfigError("sample_stride must be >= 1")
        steps = self.t_end / self.dt
        if abs(steps - round(steps)) > 1e-9 * steps:
            raise IntegratorConfigError(f"t_end={self.t_end} is not a whole number of steps dt={self.dt}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def with_dt(self, dt: float) -> "IntegratorConfig":
        return IntegratorConfig(self.t_end, dt, self.sample_stride, self.scheme)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray       # (n_samples, dimension)
    labels: Tuple[str, ...]
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError(f"{len(self.times)} times but {len(self.states)} states")

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.states, columns=list(self.labels))
        frame.insert(0, "t", self.times)
        return frame


def _as_vector(initial: Union[SpectralState, np.ndarray]) -> np.ndarray:
    if isinstance(initial, SpectralState):
        return initial.to_real()
    return np.array(initial, dtype=float)


def rk4_step(model: Model, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = model.rhs(y)
    k2 = model.rhs(y + 0.5 * dt * k1)
    k3 = model.rhs(y + 0.5 * dt * k2)
    k4 = model.rhs(y + dt * k3)
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(model: Model, initial: Union[SpectralState, np.ndarray], cfg: IntegratorConfig) -> Trajectory:
    y = _as_vector(initial)
    if y.shape != (len(model.labels),):
        raise ValueError(f"Initial state has shape {y.shape}, model has {len(model.labels)} coordinates")
    if not np.all(np.isfinite(y)):
        raise IntegrationError("Initial state is not finite", 0.0)

    n_steps, stride = cfg.n_steps, cfg.sample_stride
    times, states = [0.0], [y.copy()]
    for step in range(1, n_steps + 1):
        y = rk4_step(model, y, cfg.dt)
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"Non-finite state at t={step * cfg.dt:g}", step * cfg.dt)
        if step % stride == 0:
            times.append(step * cfg.dt)
            states.append(y.copy())
    logger.debug("Integrated %s for %d steps of dt=%g", model.name, n_steps, cfg.dt)

    provenance = dict(model.provenance)
    provenance["integrator"] = {"scheme": cfg.scheme, "dt": cfg.dt, "t_end": cfg.t_end,
                                "sample_stride": stride}
    return Trajectory(np.array(times), np.array(states), tuple(model.labels), provenance)


# ── Invariants ────────────────────────────────────────────────────────
@dataclass(frozen=True)
class DriftReport:
    energy_initial: float
    enstrophy_initial: float
    energy_drift: float
    enstrophy_drift: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "E_initial": self.energy_initial,
            "Z_initial": self.enstrophy_initial,
            "E_drift": self.energy_drift,
            "Z_drift": self.enstrophy_drift,
        }


def _relative_drift(values: np.ndarray) -> float:
    """max |v - v0| / |v0| (absolute when v0 = 0)."""
    reference = values[0]
    deviation = float(np.max(np.abs(values - reference)))
    return deviation / abs(reference) if reference != 0 else deviation


def invariant_drift(traj: Trajectory, model: Model) -> DriftReport:
    energy = np.asarray(model.energy(traj.states), dtype=float)
    enstrophy = np.asarray(model.enstrophy(traj.states), dtype=float)
    report = DriftReport(
        energy_initial=float(energy[0]),
        enstrophy_initial=float(enstrophy[0]),
        energy_drift=_relative_drift(energy),
        enstrophy_drift=_relative_drift(enstrophy),
    )
    logger.info("Invariant drift: E %.3e, Z %.3e", report.energy_drift, report.enstrophy_drift)
    return report


# ── Symmetry checks along trajectories ────────────────────────────────
def subspace_preservation(model: SpectralModel,
                          S: Subgroup,
                          initial: Union[SpectralState, np.ndarray],
                          cfg: IntegratorConfig,
                          check_initial: bool = True) -> float:
    """Max distance to the fixed subspace of S along the full truncated dynamics."""
    subspace: FixedSubspace = fixed_subspace(S, model.truncation)
    y0 = _as_vector(initial)
    start = subspace.deviation(y0)
    if check_initial and start > CONFIG.constraint_tolerance:
        raise ConstraintError(
            f"Initial state is {start:.3e} away from the fixed subspace of <{S.name}> "
            f"({'; '.join(subspace.constraints)})"
        )
    traj = integrate(model, y0, cfg)
    deviation = subspace.deviation(traj.states)
    logger.info("Fixed subspace of <%s>: max deviation %.3e over t <= %g", S.name, deviation, cfg.t_end)
    return deviation


def apply_time_reversal(model: Model, y: np.ndarray) -> np.ndarray:
    """Image of a state under e3 (C -> -C); trajectories map as C(t) -> -C(-t)."""
    if isinstance(model, SpectralModel):
        state = SpectralState.from_real(model.truncation, y)
        return induced_symmetry("e3").apply(state).to_real()
    return -np.asarray(y, dtype=float)


def time_reversal_roundtrip(model: Model, initial: Union[SpectralState, np.ndarray],
                            cfg: IntegratorConfig) -> float:
    """Integrate v -> u, map u to its e3 image, integrate again; distance to e3(v)."""
    v = _as_vector(initial)
    u = integrate(model, v, cfg).final
    w = integrate(model, apply_time_reversal(model, u), cfg).final
    return float(np.max(np.abs(w - apply_time_reversal(model, v))))


def richardson_order(model: Model, initial: Union[SpectralState, np.ndarray],
                     t_end: float, dt: float) -> float:
    """Endpoint error ratio of steps dt and dt/2 against a dt/8 reference (16 for RK4)."""
    base = IntegratorConfig(t_end=t_end, dt=dt)
    reference = integrate(model, initial, base.with_dt(dt / 8)).final
    coarse = integrate(model, initial, base).final
    fine = integrate(model, initial, base.with_dt(dt / 2)).final
    error_coarse = float(np.max(np.abs(coarse - reference)))
    error_fine = float(np.max(np.abs(fine - reference)))
    if error_fine == 0.0:
        return math.inf
    ratio = error_coarse / error_fine
    logger.info("Richardson ratio at dt=%g: %.3f", dt, ratio)
    return ratio
