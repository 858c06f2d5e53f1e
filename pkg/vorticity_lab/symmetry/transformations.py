"""Invertible point transformations of (independent variables, psi).

A `PointTransformation` holds closed-form forward and inverse maps as sympy
expressions in the coordinates ``variables + ("psi",)``. Transformations
whose base part does not depend on psi map fields to fields
(`push_forward`); every transformation built in this package is of that
kind.

Two rotation-cancelling maps are provided by `build_map`:

- ``spherical_derotation``: t~ = t, lam~ = lam + Omega t, mu~ = mu,
  psi~ = psi - Omega mu
- ``potential_translation``: t~ = t, x~ = x + (beta/F) t, y~ = y,
  psi~ = psi - (beta/F) y

"forward" maps rotating-frame coordinates to the non-rotating (tilde) ones.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy

from ..config import CONFIG
from ..fields.equations import EquationParams, Grid, ResidualReport, residual
from ..fields.expressions import AnalyticField, VariableSetError
from ..fields.variables import CARTESIAN, DEPENDENT, SPHERICAL, symbol, symbols
from .sampling import sample_coordinates

logger = logging.getLogger(__name__)

MAP_KINDS = ("spherical_derotation", "potential_translation", "flow", "composition", "identity")


class TransformationError(ValueError):
    """Transformation undefined for the given parameters or fields."""


class NonInvertibleTransformationError(TransformationError):
    """No closed-form inverse is available."""


@dataclass(frozen=True)
class PointTransformation:
    """(z, psi) -> (z~, psi~) with closed-form inverse."""
    variables: Tuple[str, ...]
    forward: Tuple[sympy.Expr, ...]
    inverse: Optional[Tuple[sympy.Expr, ...]]
    kind: str = "identity"
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MAP_KINDS:
            raise TransformationError(f"Unknown transformation kind: {self.kind!r}")
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "forward", tuple(sympy.sympify(e) for e in self.forward))
        if self.inverse is not None:
            object.__setattr__(self, "inverse", tuple(sympy.sympify(e) for e in self.inverse))
        n = len(self.coordinates)
        if len(self.forward) != n or (self.inverse is not None and len(self.inverse) != n):
            raise TransformationError(f"Expected {n} component maps for coordinates {self.coordinates}")

    @classmethod
    def from_maps(cls, variables: Sequence[str], forward: Mapping[str, Any],
                  inverse: Optional[Mapping[str, Any]], kind: str,
                  params: Optional[Dict[str, Any]] = None) -> "PointTransformation":
        """Components default to the identity for coordinates not mentioned."""
        coords = tuple(variables) + (DEPENDENT,)
        fwd = tuple(forward.get(c, symbol(c)) for c in coords)
        inv = None if inverse is None else tuple(inverse.get(c, symbol(c)) for c in coords)
        return cls(tuple(variables), fwd, inv, kind, dict(params or {}))

    @property
    def coordinates(self) -> Tuple[str, ...]:
        return self.variables + (DEPENDENT,)

    @property
    def is_fiber_preserving(self) -> bool:
        """True when the base maps ignore psi (fields map to fields)."""
        psi = symbol(DEPENDENT)
        maps = self.forward[:-1] + (self.inverse[:-1] if self.inverse is not None else ())
        return not any(e.has(psi) for e in maps)

    def inverted(self) -> "PointTransformation":
        self._require_inverse()
        return PointTransformation(self.variables, self.inverse, self.forward, self.kind, dict(self.params))

    def _require_inverse(self) -> None:
        if self.inverse is None:
            raise NonInvertibleTransformationError(f"{self.kind} transformation has no closed-form inverse")

    # ── Numeric action ────────────────────────────────────────────────
    @cached_property
    def _compiled_forward(self):
        return sympy.lambdify(symbols(self.coordinates), list(self.forward), "numpy")

    @cached_property
    def _compiled_inverse(self):
        self._require_inverse()
        return sympy.lambdify(symbols(self.coordinates), list(self.inverse), "numpy")

    def _apply(self, compiled, point: Mapping[str, Any]) -> Dict[str, np.ndarray]:
        arrays = np.broadcast_arrays(*(np.asarray(point[c], dtype=float) for c in self.coordinates))
        values = compiled(*arrays)
        return {c: np.asarray(v, dtype=float) + np.zeros(arrays[0].shape)
                for c, v in zip(self.coordinates, values)}

    def apply(self, point: Mapping[str, Any]) -> Dict[str, np.ndarray]:
        """Image of a point (or arrays of points) keyed by coordinate name."""
        return self._apply(self._compiled_forward, point)

    def apply_inverse(self, point: Mapping[str, Any]) -> Dict[str, np.ndarray]:
        return self._apply(self._compiled_inverse, point)

    def roundtrip_error(self, n_samples: int = 100, rng: Optional[np.random.Generator] = None) -> float:
        """Max |forward(inverse(z)) - z| and |inverse(forward(z)) - z| at random points."""
        rng = rng or np.random.default_rng(CONFIG.random_seed)
        point = sample_coordinates(self.coordinates, n_samples, rng)
        there_and_back = self.apply_inverse(self.apply(point))
        back_and_there = self.apply(self.apply_inverse(point))
        errors = []
        for image in (there_and_back, back_and_there):
            for c in self.coordinates:
                diff = image[c] - point[c]
                if c == "lam":
                    # longitude is recovered modulo 2*pi
                    diff = np.angle(np.exp(1j * diff))
                errors.append(np.max(np.abs(diff)))
        return float(max(errors))

    # ── Field action ──────────────────────────────────────────────────
    def push_forward(self, psi: AnalyticField) -> AnalyticField:
        """psi~ with psi~(T(z)) = T_psi(z, psi(z))."""
        if psi.variables != self.variables:
            raise VariableSetError(f"Transformation acts on {self.variables}, field has {psi.variables}")
        self._require_inverse()
        if not self.is_fiber_preserving:
            raise TransformationError("Base maps depend on psi; the image of a field is not a field")
        base_inverse = dict(zip(symbols(self.variables), self.inverse[:-1]))
        psi_at_preimage = psi.expression.subs(base_inverse, simultaneous=True)
        mapping = dict(base_inverse)
        mapping[symbol(DEPENDENT)] = psi_at_preimage
        image = self.forward[-1].subs(mapping, simultaneous=True)
        return AnalyticField(image, self.variables)

    def __str__(self) -> str:
        parts = ", ".join(f"{c}~ = {e}" for c, e in zip(self.coordinates, self.forward))
        return f"{self.kind}: {parts}"


# ── Constructors ──────────────────────────────────────────────────────
def identity(variables: Sequence[str] = CARTESIAN) -> PointTransformation:
    return PointTransformation.from_maps(variables, {}, {}, "identity")


def compose(second: PointTransformation, first: PointTransformation) -> PointTransformation:
    """second o first: apply `first`, then `second`."""
    if second.variables != first.variables:
        raise TransformationError(f"Cannot compose maps on {second.variables} and {first.variables}")
    coords = symbols(first.coordinates)
    forward = tuple(e.subs(dict(zip(coords, first.forward)), simultaneous=True) for e in second.forward)
    inverse = None
    if first.inverse is not None and second.inverse is not None:
        inverse = tuple(e.subs(dict(zip(coords, second.inverse)), simultaneous=True) for e in first.inverse)
    return PointTransformation(
        first.variables, forward, inverse, "composition",
        {"first": first.kind, "second": second.kind},
    )


def _params_dict(params) -> Dict[str, float]:
    if isinstance(params, EquationParams):
        return params.to_dict()
    return dict(params)


def build_map(kind: str, params) -> PointTransformation:
    """The de-rotation (spherical) or beta-cancelling (potential) map."""
    params = _params_dict(params)
    if kind == "spherical_derotation":
        omega = float(params.get("omega", 0.0))
        t, lam, mu, psi = symbols(("t", "lam", "mu", DEPENDENT))
        return PointTransformation.from_maps(
            SPHERICAL,
            {"lam": lam + omega * t, DEPENDENT: psi - omega * mu},
            {"lam": lam - omega * t, DEPENDENT: psi + omega * mu},
            kind, {"omega": omega},
        )
    if kind == "potential_translation":
        beta = float(params.get("beta", 0.0))
        F = params.get("F")
        if F is None or float(F) == 0.0:
            raise TransformationError("potential_translation needs F != 0 (map undefined)")
        shift = beta / float(F)
        t, x, y, psi = symbols(("t", "x", "y", DEPENDENT))
        return PointTransformation.from_maps(
            CARTESIAN,
            {"x": x + shift * t, DEPENDENT: psi - shift * y},
            {"x": x - shift * t, DEPENDENT: psi + shift * y},
            kind, {"beta": beta, "F": float(F)},
        )
    raise TransformationError(f"Unknown map kind: {kind!r}")


# ── Transport and verification ────────────────────────────────────────
def transport_solution(T: PointTransformation, psi: AnalyticField, direction: str = "forward") -> AnalyticField:
    """Carry a field through T ("forward") or through its inverse ("inverse")."""
    if direction == "forward":
        return T.push_forward(psi)
    if direction == "inverse":
        return T.inverted().push_forward(psi)
    raise TransformationError(f"direction must be 'forward' or 'inverse', got {direction!r}")


@dataclass(frozen=True)
class EquivalenceReport:
    nonrotating: ResidualReport
    rotating: ResidualReport
    tolerance: float
    map_kind: str

    @property
    def passed(self) -> bool:
        return self.nonrotating.max_abs <= self.tolerance and self.rotating.max_abs <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "map": self.map_kind,
            "nonrotating": self.nonrotating.to_dict(),
            "rotating": self.rotating.to_dict(),
            "tolerance": self.tolerance,
            "status": "PASS" if self.passed else "FAIL",
        }


def verify_equivalence(T: PointTransformation,
                       psi: AnalyticField,
                       params_rotating: EquationParams,
                       params_nonrotating: EquationParams,
                       grid: Optional[Grid] = None,
                       tolerance: Optional[float] = None) -> EquivalenceReport:
    """Residual of psi (non-rotating) and of its inverse transport (rotating)."""
    if params_rotating.kind != params_nonrotating.kind:
        raise TransformationError(
            f"Equation kinds differ: {params_rotating.kind} vs {params_nonrotating.kind}"
        )
    if params_rotating.variables != T.variables:
        raise TransformationError(f"{T.kind} acts on {T.variables}, equation is {params_rotating.kind}")
    tol = CONFIG.equivalence_tolerance if tolerance is None else tolerance
    transported = transport_solution(T, psi, "inverse")
    report = EquivalenceReport(
        nonrotating=residual(psi, params_nonrotating, grid),
        rotating=residual(transported, params_rotating, grid),
        tolerance=tol,
        map_kind=T.kind,
    )
    if not report.passed:
        logger.warning(
            "Equivalence check FAIL for %s: non-rotating %.3e, rotating %.3e",
            T.kind, report.nonrotating.max_abs, report.rotating.max_abs,
        )
    return report
