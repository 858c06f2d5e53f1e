"""Vorticity operators and pointwise residuals of the three vorticity equations.

- cartesian:  zeta_t + psi_x zeta_y - psi_y zeta_x + beta psi_x = 0
- spherical:  zeta_t + (psi_lam zeta_mu - psi_mu zeta_lam)/a^2 + 2 Omega psi_lam/a^2 = 0
- potential:  zeta_t - F psi_t + psi_x zeta_y - psi_y zeta_x + beta psi_x = 0

Residuals are assembled symbolically from exact derivatives and evaluated
on a sample `Grid`; an exact solution leaves only rounding.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config import CONFIG, GridConfig
from .expressions import AnalyticField, VariableSetError
from .variables import CARTESIAN, symbol, variables_for_kind

logger = logging.getLogger(__name__)

EQUATION_KINDS = ("cartesian", "spherical", "potential")


class GridError(ValueError):
    """Malformed sample grid."""


class PoleProximityError(GridError):
    """Spherical grid touches a pole (|mu| >= 1)."""


class EquationParamsError(ValueError):
    """Parameters do not match the equation kind."""


# ── Grid ──────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class Grid:
    """Tensor-product sample grid over named variables."""
    variables: Tuple[str, ...]
    samples: Tuple[Tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "samples", tuple(tuple(float(v) for v in s) for s in self.samples))
        if not self.variables or len(self.variables) != len(self.samples):
            raise GridError("Grid needs one nonempty sample list per variable")
        for name, values in zip(self.variables, self.samples):
            if not values:
                raise GridError(f"Empty sample list for {name!r}")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise GridError(f"Samples for {name!r} must be strictly increasing")
            if name == "mu" and any(abs(v) >= 1.0 for v in values):
                raise PoleProximityError("Spherical grids must keep |mu| < 1 (pole singularity)")

    @classmethod
    def from_mapping(cls, samples: Mapping[str, Sequence[float]]) -> "Grid":
        return cls(tuple(samples.keys()), tuple(tuple(v) for v in samples.values()))

    @classmethod
    def from_config(cls, grid_config: GridConfig) -> "Grid":
        samples = []
        for name in grid_config.variables:
            lo, hi = grid_config.bounds[name]
            n = grid_config.points[name]
            endpoint = name not in grid_config.periodic
            samples.append(tuple(np.linspace(lo, hi, n, endpoint=endpoint)))
        return cls(grid_config.variables, tuple(samples))

    @classmethod
    def cartesian_default(cls) -> "Grid":
        return cls.from_config(CONFIG.cartesian_grid)

    @classmethod
    def spherical_default(cls) -> "Grid":
        return cls.from_config(CONFIG.spherical_grid)

    @classmethod
    def default_for(cls, kind: str) -> "Grid":
        return cls.spherical_default() if kind == "spherical" else cls.cartesian_default()

    @property
    def n_points(self) -> int:
        return int(np.prod([len(s) for s in self.samples]))

    def mesh(self) -> Dict[str, np.ndarray]:
        arrays = np.meshgrid(*(np.asarray(s) for s in self.samples), indexing="ij")
        return dict(zip(self.variables, arrays))

    def point(self, flat_index: int) -> Dict[str, float]:
        index = np.unravel_index(flat_index, tuple(len(s) for s in self.samples))
        return {name: s[i] for name, s, i in zip(self.variables, self.samples, index)}


# ── Equation parameters ───────────────────────────────────────────────
@dataclass(frozen=True)
class EquationParams:
    """Selects the Cartesian, spherical or potential equation and carries its parameters."""
    kind: str
    beta: Optional[float] = None
    omega: Optional[float] = None
    a: Optional[float] = None
    F: Optional[float] = None

    def __post_init__(self):
        if self.kind not in EQUATION_KINDS:
            raise EquationParamsError(f"Unknown equation kind: {self.kind!r}")
        required = {
            "cartesian": {"beta"},
            "spherical": {"omega", "a"},
            "potential": {"beta", "F"},
        }[self.kind]
        present = {name for name in ("beta", "omega", "a", "F") if getattr(self, name) is not None}
        if present != required:
            raise EquationParamsError(
                f"{self.kind} equation takes exactly {sorted(required)}, got {sorted(present)}"
            )
        if self.kind == "spherical" and not self.a > 0:
            raise EquationParamsError("Earth radius a must be positive")
        if self.kind == "potential" and not self.F > 0:
            raise EquationParamsError("F must be positive")

    @classmethod
    def cartesian(cls, beta: float) -> "EquationParams":
        return cls("cartesian", beta=beta)

    @classmethod
    def spherical(cls, omega: float, a: float = 1.0) -> "EquationParams":
        return cls("spherical", omega=omega, a=a)

    @classmethod
    def potential(cls, beta: float, F: float) -> "EquationParams":
        return cls("potential", beta=beta, F=F)

    @property
    def variables(self) -> Tuple[str, ...]:
        return variables_for_kind(self.kind)

    def to_dict(self) -> Dict[str, object]:
        out = {"kind": self.kind}
        for name in ("beta", "omega", "a", "F"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


# ── Residual report ───────────────────────────────────────────────────
@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    rms: float
    worst_point: Dict[str, float] = field(default_factory=dict)
    n_points: int = 0

    def passed(self, tolerance: Optional[float] = None) -> bool:
        tol = CONFIG.residual_tolerance if tolerance is None else tolerance
        return self.max_abs <= tol

    def to_dict(self) -> Dict[str, object]:
        return {
            "max_abs": self.max_abs,
            "rms": self.rms,
            "worst_point": dict(self.worst_point),
            "n_points": self.n_points,
        }


# ── Operators ─────────────────────────────────────────────────────────
def _check_variables(psi: AnalyticField, kind: str) -> None:
    expected = variables_for_kind(kind)
    if psi.variables != expected:
        raise VariableSetError(f"{kind} equation needs variables {expected}, field has {psi.variables}")


def eval_derivatives(f: AnalyticField, point: Mapping[str, float], multi_index: Mapping[str, int]) -> float:
    """Exact value of a partial derivative (total order <= 3) at a point."""
    total = sum(multi_index.values())
    if total > 3:
        raise ValueError(f"Total derivative order {total} exceeds 3")
    return f.derivative(multi_index)(**point)


def vorticity_of(psi: AnalyticField, kind: str, a: float = 1.0) -> AnalyticField:
    """zeta = Laplacian of psi (Cartesian, potential) or the spherical operator."""
    _check_variables(psi, kind)
    if kind == "spherical":
        if not a > 0:
            raise EquationParamsError("Earth radius a must be positive")
        mu = symbol("mu")
        lam_part = psi.diff("lam", 2).expression / (1 - mu**2)
        mu_part = ((1 - mu**2) * psi.diff("mu").expression).diff(mu)
        return AnalyticField((lam_part + mu_part) / a**2, psi.variables)
    return psi.diff("x", 2) + psi.diff("y", 2)


def absolute_vorticity(psi: AnalyticField, beta: float) -> AnalyticField:
    """eta = zeta + beta*y."""
    return vorticity_of(psi, "cartesian") + beta * symbol("y")


def potential_vorticity(psi: AnalyticField, beta: float, F: float) -> AnalyticField:
    """q = zeta + beta*y - F*psi."""
    return vorticity_of(psi, "potential") + beta * symbol("y") - F * psi


def residual_field(psi: AnalyticField, params: EquationParams) -> AnalyticField:
    """Left-hand side of the selected equation as a field."""
    _check_variables(psi, params.kind)
    if params.kind == "spherical":
        a2 = params.a ** 2
        zeta = vorticity_of(psi, "spherical", params.a)
        jacobian = psi.diff("lam") * zeta.diff("mu") - psi.diff("mu") * zeta.diff("lam")
        return zeta.diff("t") + jacobian / a2 + (2 * params.omega / a2) * psi.diff("lam")

    zeta = vorticity_of(psi, params.kind)
    jacobian = psi.diff("x") * zeta.diff("y") - psi.diff("y") * zeta.diff("x")
    lhs = zeta.diff("t") + jacobian + params.beta * psi.diff("x")
    if params.kind == "potential":
        lhs = lhs - params.F * psi.diff("t")
    return lhs


def _report(values: np.ndarray, grid: Grid) -> ResidualReport:
    flat = np.abs(values).ravel()
    worst = int(np.argmax(flat))
    return ResidualReport(
        max_abs=float(flat[worst]),
        rms=float(math.sqrt(np.mean(flat**2))),
        worst_point=grid.point(worst),
        n_points=grid.n_points,
    )


def residual(psi: AnalyticField, params: EquationParams, grid: Optional[Grid] = None) -> ResidualReport:
    """Pointwise residual of the selected equation on a grid."""
    grid = grid or Grid.default_for(params.kind)
    if tuple(grid.variables) != psi.variables:
        raise VariableSetError(f"Grid variables {grid.variables} do not match field {psi.variables}")
    values = residual_field(psi, params).evaluate(grid.mesh())
    report = _report(values, grid)
    logger.debug("Residual of %s equation: max %.3e rms %.3e", params.kind, report.max_abs, report.rms)
    return report


def laplace_residual(field_: AnalyticField, grid: Optional[Grid] = None) -> ResidualReport:
    """Residual of Psi_xx + Psi_yy = 0 on a Cartesian grid."""
    grid = grid or Grid.cartesian_default()
    if field_.variables != CARTESIAN:
        raise VariableSetError(f"Laplace check needs variables {CARTESIAN}")
    values = (field_.diff("x", 2) + field_.diff("y", 2)).evaluate(grid.mesh())
    return _report(values, grid)

