"""Subalgebra closure checks and the optimal systems of the Cartesian algebra.

Closure is verified numerically: every bracket of two members is fitted as a
constant-coefficient combination of the members by least squares over the
coefficient values at random sample points. A valid subalgebra leaves only
rounding in the fit.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy

from ..config import CONFIG
from ..fields.time_functions import TimeFunction, constant, exponential, polynomial, power, sinusoidal
from ..fields.variables import T
from .generators import (
    GeneratorField,
    lie_bracket,
    psi_shift,
    scaling,
    time_translation,
    x_shift,
    y_translation,
)
from .sampling import sample_coordinates

logger = logging.getLogger(__name__)


class DegenerateSampleError(ValueError):
    """Sample points do not separate the generators."""


class SubalgebraSpecError(ValueError):
    """Side conditions of an optimal-system family are violated."""


@dataclass(frozen=True)
class SubalgebraSpec:
    """Instantiated subalgebra from an optimal-system family."""
    name: str
    generators: Tuple[GeneratorField, ...]
    constants: Dict[str, float] = field(default_factory=dict)
    requires_abc_zero: bool = False
    catalog_basis: Tuple[GeneratorField, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "catalog_basis", tuple(self.catalog_basis))
        if not self.generators:
            raise SubalgebraSpecError(f"{self.name}: no generators")
        if self.requires_abc_zero:
            a, b, c = (self.constants.get(k, 0.0) for k in ("a", "b", "c"))
            if a * b * c != 0:
                raise SubalgebraSpecError(f"{self.name}: condition abc = 0 violated (a={a}, b={b}, c={c})")
        rank = _pointwise_rank(self.generators)
        if rank < len(self.generators):
            raise SubalgebraSpecError(f"{self.name}: generators are linearly dependent at a generic point")

    @property
    def dimension(self) -> int:
        return len(self.generators)


def _pointwise_rank(generators: Sequence[GeneratorField]) -> int:
    rng = np.random.default_rng(CONFIG.random_seed)
    point = sample_coordinates(generators[0].coordinates, 1, rng)
    matrix = np.hstack([g.values(point) for g in generators])
    return int(np.linalg.matrix_rank(matrix))


# ── Least-squares fit ─────────────────────────────────────────────────
@dataclass(frozen=True)
class CombinationFit:
    coefficients: Dict[str, float]
    residual: float


def fit_combination(target: GeneratorField, basis: Sequence[GeneratorField],
                    n_samples: Optional[int] = None,
                    rng: Optional[np.random.Generator] = None,
                    resamples: Optional[int] = None) -> CombinationFit:
    """Constant coefficients c with target ~ sum c_i basis_i at random points."""
    n_samples = n_samples or CONFIG.subalgebra_samples
    resamples = CONFIG.subalgebra_resamples if resamples is None else resamples
    rng = rng or np.random.default_rng(CONFIG.random_seed)
    for attempt in range(resamples + 1):
        points = sample_coordinates(target.coordinates, n_samples, rng)
        M = np.column_stack([g.values(points).ravel() for g in basis])
        rhs = target.values(points).ravel()
        if not (np.all(np.isfinite(M)) and np.all(np.isfinite(rhs))):
            logger.debug("Non-finite coefficient values on attempt %d, resampling", attempt + 1)
            continue
        if np.linalg.matrix_rank(M) < len(basis):
            logger.debug("Rank-deficient sample on attempt %d, resampling", attempt + 1)
            continue
        coeffs, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        fit_residual = float(np.max(np.abs(M @ coeffs - rhs))) if rhs.size else 0.0
        return CombinationFit({g.name: float(c) for g, c in zip(basis, coeffs)}, fit_residual)
    raise DegenerateSampleError(
        f"Could not separate {[g.name for g in basis]} after {resamples + 1} sample sets"
    )


# ── Verification ──────────────────────────────────────────────────────
@dataclass(frozen=True)
class BracketEntry:
    left: str
    right: str
    bracket: GeneratorField
    fit: CombinationFit

    def to_dict(self) -> Dict[str, Any]:
        return {
            "left": self.left,
            "right": self.right,
            "bracket": self.bracket.to_dict(),
            "coefficients": dict(self.fit.coefficients),
            "residual": self.fit.residual,
        }


@dataclass(frozen=True)
class SubalgebraReport:
    name: str
    entries: Tuple[BracketEntry, ...]
    membership_residual: Optional[float]
    tolerance: float

    @property
    def max_residual(self) -> float:
        return max((e.fit.residual for e in self.entries), default=0.0)

    @property
    def passed(self) -> bool:
        membership_ok = self.membership_residual is None or self.membership_residual <= self.tolerance
        return self.max_residual <= self.tolerance and membership_ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "brackets": [e.to_dict() for e in self.entries],
            "max_residual": self.max_residual,
            "membership_residual": self.membership_residual,
            "tolerance": self.tolerance,
            "status": "PASS" if self.passed else "FAIL",
        }


def verify_subalgebra(S: SubalgebraSpec,
                      catalog_basis: Optional[Sequence[GeneratorField]] = None,
                      rng: Optional[np.random.Generator] = None,
                      tolerance: Optional[float] = None) -> SubalgebraReport:
    """Closure of S under the bracket; optionally membership of S in the catalog span."""
    tol = CONFIG.subalgebra_tolerance if tolerance is None else tolerance
    rng = rng or np.random.default_rng(CONFIG.random_seed)
    entries = []
    for V, W in itertools.combinations(S.generators, 2):
        bracket = lie_bracket(V, W)
        entries.append(BracketEntry(V.name, W.name, bracket, fit_combination(bracket, S.generators, rng=rng)))

    basis = tuple(catalog_basis) if catalog_basis is not None else S.catalog_basis
    membership = None
    if basis:
        membership = max(fit_combination(g, basis, rng=rng).residual for g in S.generators)

    report = SubalgebraReport(S.name, tuple(entries), membership, tol)
    if report.passed:
        logger.debug("Subalgebra %s closed (max fit residual %.3e)", S.name, report.max_residual)
    else:
        logger.warning("Subalgebra %s FAIL: fit residual %.3e, membership %s",
                       S.name, report.max_residual, membership)
    return report


def bracket_table(basis: Sequence[GeneratorField],
                  rng: Optional[np.random.Generator] = None) -> List[BracketEntry]:
    """Commutator table of a basis, each bracket fitted over the basis."""
    rng = rng or np.random.default_rng(CONFIG.random_seed)
    table = []
    for V, W in itertools.combinations(basis, 2):
        bracket = lie_bracket(V, W)
        table.append(BracketEntry(V.name, W.name, bracket, fit_combination(bracket, basis, rng=rng)))
    return table


# ── Optimal systems of the Cartesian algebra ──────────────────────────
def _basis_with(*extra: GeneratorField) -> Tuple[GeneratorField, ...]:
    return (scaling("cartesian"), time_translation("cartesian"), y_translation()) + tuple(extra)


def _shifted(V: GeneratorField, W: GeneratorField, name: str) -> GeneratorField:
    return (V + W).renamed(name)


def optimal_system_1d(f: Optional[TimeFunction] = None,
                      g: Optional[TimeFunction] = None) -> List[SubalgebraSpec]:
    """<D>, <d_t + c d_y> for c in {0, 1, -1}, <d_y + X(f)>, <X(f) + Z(g)>."""
    f = f or polynomial([0, 1], name="f")
    g = g or sinusoidal(name="g")
    X, Z = x_shift(f), psi_shift(g)
    dt, dy = time_translation("cartesian"), y_translation()
    specs = [SubalgebraSpec("<D>", (scaling("cartesian"),), catalog_basis=_basis_with())]
    for c in (0.0, 1.0, -1.0):
        V = dt if c == 0 else _shifted(dt, c * dy, f"dt + {c:g}*dy")
        specs.append(SubalgebraSpec(f"<dt + {c:g} dy>", (V,), {"c": c}, catalog_basis=_basis_with()))
    specs.append(SubalgebraSpec(
        f"<dy + X({f.name})>", (_shifted(dy, X, f"dy + X({f.name})"),), catalog_basis=_basis_with(X),
    ))
    specs.append(SubalgebraSpec(
        f"<X({f.name}) + Z({g.name})>", (_shifted(X, Z, f"X({f.name}) + Z({g.name})"),),
        catalog_basis=_basis_with(X, Z),
    ))
    return specs


def _ebt_function(a: float, b: float, c: float, name: str) -> TimeFunction:
    """(a b t + c) e^{a t}"""
    return TimeFunction.from_expression(name, (a * b * T + c) * sympy.exp(a * T))


def optimal_system_2d(a: float = 3.0, b: float = 1.0, c: float = 0.5,
                      f1: Optional[TimeFunction] = None, g1: Optional[TimeFunction] = None,
                      f2: Optional[TimeFunction] = None, g2: Optional[TimeFunction] = None,
                      ebt_constants: Optional[Mapping[str, float]] = None) -> List[SubalgebraSpec]:
    """The nine two-dimensional families with concrete constants and functions.

    `a`, `b`, `c` instantiate the first four families. The fifth and sixth
    families carry the side condition abc = 0 and are instantiated with
    `ebt_constants` (default a=1, b=0, c=1). In the sixth family the bracket
    [d_t + b d_y, Z((abt + c) e^{at})] only closes when ab = 0.
    """
    f1 = f1 or polynomial([0, 1], name="f1")
    g1 = g1 or sinusoidal(name="g1")
    f2 = f2 or constant(1.0, name="f2")
    g2 = g2 or polynomial([0, 0, 1], name="g2")
    ebt = dict(ebt_constants or {"a": 1.0, "b": 0.0, "c": 1.0})

    D = scaling("cartesian")
    dt, dy = time_translation("cartesian"), y_translation()
    one = constant(1.0, name="one")
    X1 = x_shift(one)
    Xa = x_shift(power(a, name="ta"))
    Za = psi_shift(power(a - 2, name="ta2"))
    specs = [
        SubalgebraSpec("<D, dt>", (D, dt), catalog_basis=_basis_with()),
        SubalgebraSpec(
            "<D, dy + a X(1)>", (D, _shifted(dy, a * X1, f"dy + {a:g}*X(1)")), {"a": a},
            catalog_basis=_basis_with(X1),
        ),
        SubalgebraSpec(
            "<D, X(t^a) + c Z(t^(a-2))>", (D, _shifted(Xa, c * Za, f"X(t^{a:g}) + {c:g}*Z(t^{a - 2:g})")),
            {"a": a, "c": c}, catalog_basis=_basis_with(Xa, Za),
        ),
        SubalgebraSpec("<D, Z(t^(a-2))>", (D, Za), {"a": a}, catalog_basis=_basis_with(Za)),
    ]

    ea, eb, ec = ebt["a"], ebt["b"], ebt["c"]
    translation = dt if eb == 0 else _shifted(dt, eb * dy, f"dt + {eb:g}*dy")
    Xe = x_shift(exponential(ea, name="ea"))
    Ze = psi_shift(_ebt_function(ea, eb, ec, "eabc"))
    specs.append(SubalgebraSpec(
        "<dt + b dy, X(e^at) + Z((abt+c)e^at)>", (translation, _shifted(Xe, Ze, f"{Xe.name} + {Ze.name}")),
        dict(ebt), requires_abc_zero=True, catalog_basis=_basis_with(Xe, Ze),
    ))
    specs.append(SubalgebraSpec(
        "<dt + b dy, Z((abt+c)e^at)>", (translation, Ze),
        dict(ebt), requires_abc_zero=True, catalog_basis=_basis_with(Ze),
    ))

    Xf1, Zg1, Xf2, Zg2 = x_shift(f1), psi_shift(g1), x_shift(f2), psi_shift(g2)
    lead = _shifted(dy, Xf1, f"dy + X({f1.name})")
    specs.extend([
        SubalgebraSpec(
            "<dy + X(f1), X(1) + Z(g2)>", (lead, _shifted(X1, Zg2, f"X(1) + Z({g2.name})")),
            catalog_basis=_basis_with(Xf1, X1, Zg2),
        ),
        SubalgebraSpec("<dy + X(f1), Z(g2)>", (lead, Zg2), catalog_basis=_basis_with(Xf1, Zg2)),
        SubalgebraSpec(
            "<X(f1) + Z(g1), X(f2) + Z(g2)>",
            (_shifted(Xf1, Zg1, f"X({f1.name}) + Z({g1.name})"), _shifted(Xf2, Zg2, f"X({f2.name}) + Z({g2.name})")),
            catalog_basis=_basis_with(Xf1, Zg1, Xf2, Zg2),
        ),
    ])
    return specs
