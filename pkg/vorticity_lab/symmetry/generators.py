"""Lie point symmetry generators of the vorticity equations.

A `GeneratorField` is the vector field

    V = xi^t d_t + xi^1 d_1 + xi^2 d_2 + eta d_psi

over (t, x, y, psi) or (t, lam, mu, psi), stored as sympy expressions in
which the arbitrary functions f(t), g(t) appear as `TimeFunction` leaves.

Representable class:

- xi^t is affine in t with constant coefficients (both kinds);
- cartesian: every other coefficient is c0(t) + c1(t) x + c2(t) y + c3(t) psi;
- spherical: every coefficient is affine in psi, with closed-form
  (t, lam, mu) dependence allowed for the rotations J2, J3.

Both classes are closed under `lie_bracket`.

Cartesian catalog (any beta): D, d_t, d_y, X(f) = f d_x - f' y d_psi,
Z(g) = g d_psi. Spherical catalog (rotation rate Omega): D, d_t, Z(g), J1,
J2, J3, where J2 and J3 are the rotations of the non-rotating sphere carried
to the rotating frame, with Lam = lam + Omega t:

    J2 = mu sin(Lam)/sqrt(1-mu^2) d_lam + cos(Lam) sqrt(1-mu^2) (d_mu + Omega d_psi)
    J3 = mu cos(Lam)/sqrt(1-mu^2) d_lam - sin(Lam) sqrt(1-mu^2) (d_mu + Omega d_psi)
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from ..config import CONFIG
from ..fields.equations import EquationParams
from ..fields.expressions import expr_to_sexpr, sexpr_to_expr
from ..fields.time_functions import TimeFunction, time_function_from_spec
from ..fields.variables import CARTESIAN, DEPENDENT, SPHERICAL, symbol, symbols
from .sampling import sample_coordinates

logger = logging.getLogger(__name__)

GENERATOR_KINDS = ("cartesian", "spherical")


class RepresentationError(ValueError):
    """Vector field lies outside the representable coefficient class."""


class MissingParameterFunctionError(ValueError):
    """A catalog generator needs a parameter function that was not supplied."""


def coordinates_for(kind: str) -> Tuple[str, ...]:
    if kind == "cartesian":
        return CARTESIAN + (DEPENDENT,)
    if kind == "spherical":
        return SPHERICAL + (DEPENDENT,)
    raise ValueError(f"Unknown generator kind: {kind!r}")


def _is_zero(expr: sympy.Expr) -> bool:
    return sympy.expand(expr) == 0


def _depends_only_on_t(expr: sympy.Expr) -> bool:
    return expr.free_symbols <= {symbol("t")}


def _check_representable(kind: str, components: Sequence[sympy.Expr]) -> None:
    coords = symbols(coordinates_for(kind))
    t, psi = coords[0], coords[-1]
    xi_t = components[0]
    slope = sympy.diff(xi_t, t)
    if not (slope.is_number and xi_t.subs(t, 0).is_number):
        raise RepresentationError(f"d_t coefficient must be a + b*t with constant a, b; got {xi_t}")

    for name, expr in zip(coordinates_for(kind)[1:], components[1:]):
        if not _is_zero(sympy.diff(expr, psi, 2)):
            raise RepresentationError(f"d_{name} coefficient is not affine in psi: {expr}")
        if kind == "spherical":
            continue
        affine = coords[1:]
        for i, a in enumerate(affine):
            for b in affine[i:]:
                if not _is_zero(sympy.diff(expr, a, b)):
                    raise RepresentationError(f"d_{name} coefficient is not affine in (x, y, psi): {expr}")
            if not _depends_only_on_t(sympy.diff(expr, a)):
                raise RepresentationError(f"d_{name} coefficient has non time-only slope in {a}: {expr}")
        if not _depends_only_on_t(expr.subs({a: 0 for a in affine})):
            raise RepresentationError(f"d_{name} coefficient has a non time-only offset: {expr}")


@dataclass(frozen=True)
class GeneratorField:
    """Lie point symmetry generator with time-function coefficients."""
    kind: str
    name: str
    components: Tuple[sympy.Expr, ...]

    def __post_init__(self):
        coords = coordinates_for(self.kind)
        comps = tuple(sympy.sympify(c) for c in self.components)
        if len(comps) != len(coords):
            raise ValueError(f"{self.kind} generator needs {len(coords)} components, got {len(comps)}")
        stray = set().union(*(c.free_symbols for c in comps)) - set(symbols(coords))
        if stray:
            raise RepresentationError(f"Coefficients depend on {sorted(map(str, stray))}")
        _check_representable(self.kind, comps)
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_components(cls, kind: str, name: str, **components: Any) -> "GeneratorField":
        """Keyword per coordinate (``t``, ``x``, ``psi``, ...); missing ones are zero."""
        coords = coordinates_for(kind)
        unknown = set(components) - set(coords)
        if unknown:
            raise ValueError(f"Unknown coordinates for a {kind} generator: {sorted(unknown)}")
        return cls(kind, name, tuple(components.get(c, 0) for c in coords))

    @property
    def coordinates(self) -> Tuple[str, ...]:
        return coordinates_for(self.kind)

    def coefficient(self, coordinate: str) -> sympy.Expr:
        return self.components[self.coordinates.index(coordinate)]

    @property
    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.components)

    # ── Action on functions ───────────────────────────────────────────
    def apply(self, expr) -> sympy.Expr:
        """V(F) = sum_i xi^i dF/dz^i for F a function of the coordinates."""
        expr = sympy.sympify(expr)
        return sympy.Add(*(c * sympy.diff(expr, z) for c, z in zip(self.components, symbols(self.coordinates))))

    # ── Numeric evaluation ────────────────────────────────────────────
    @cached_property
    def _compiled(self):
        return sympy.lambdify(symbols(self.coordinates), list(self.components), "numpy")

    def values(self, points: Mapping[str, np.ndarray]) -> np.ndarray:
        """Coefficient values, shape (n_coordinates, n_points)."""
        arrays = np.broadcast_arrays(*(np.atleast_1d(np.asarray(points[c], dtype=float)) for c in self.coordinates))
        with np.errstate(all="ignore"):
            raw = self._compiled(*arrays)
        return np.array([np.asarray(v, dtype=float) + np.zeros(arrays[0].shape) for v in raw])

    # ── Linear structure ──────────────────────────────────────────────
    def _same_kind(self, other: "GeneratorField") -> None:
        if not isinstance(other, GeneratorField) or other.kind != self.kind:
            raise ValueError(f"Generators of different kinds: {self.kind} vs {getattr(other, 'kind', other)}")

    def __add__(self, other: "GeneratorField") -> "GeneratorField":
        self._same_kind(other)
        comps = tuple(a + b for a, b in zip(self.components, other.components))
        return GeneratorField(self.kind, f"{self.name} + {other.name}", comps)

    def __sub__(self, other: "GeneratorField") -> "GeneratorField":
        self._same_kind(other)
        comps = tuple(a - b for a, b in zip(self.components, other.components))
        return GeneratorField(self.kind, f"{self.name} - {other.name}", comps)

    def __mul__(self, scalar: float) -> "GeneratorField":
        comps = tuple(sympy.sympify(scalar) * c for c in self.components)
        return GeneratorField(self.kind, f"{scalar}*{self.name}", comps)

    __rmul__ = __mul__

    def __neg__(self) -> "GeneratorField":
        return GeneratorField(self.kind, f"-{self.name}", tuple(-c for c in self.components))

    def renamed(self, name: str) -> "GeneratorField":
        return GeneratorField(self.kind, name, self.components)

    # ── Serialization ─────────────────────────────────────────────────
    def to_dict(self) -> Dict[str, Any]:
        t = symbol("t")
        xi_t = self.components[0]
        doc: Dict[str, Any] = {
            "kind": self.kind,
            "name": self.name,
            "dt": [float(xi_t.subs(t, 0)), float(sympy.diff(xi_t, t))],
        }
        affine = symbols(self.coordinates[1:])
        for coord, expr in zip(self.coordinates[1:], self.components[1:]):
            if _is_zero(expr):
                continue
            if self.kind == "cartesian":
                parts = {"c0": expr.subs({a: 0 for a in affine})}
                parts.update({f"c{i}": sympy.diff(expr, a) for i, a in enumerate(affine, start=1)})
                doc[f"d{coord}"] = {k: expr_to_sexpr(v) for k, v in parts.items() if not _is_zero(v)}
            else:
                doc[f"d{coord}"] = {"expr": expr_to_sexpr(expr)}
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any],
                  time_functions: Optional[Mapping[str, TimeFunction]] = None) -> "GeneratorField":
        kind = doc["kind"]
        coords = coordinates_for(kind)
        t = symbol("t")
        c0, c1 = doc.get("dt", [0, 0])
        comps: List[sympy.Expr] = [sympy.sympify(c0) + sympy.sympify(c1) * t]
        affine = symbols(coords[1:])
        for coord in coords[1:]:
            entry = doc.get(f"d{coord}", {})
            if "expr" in entry:
                comps.append(sexpr_to_expr(entry["expr"], time_functions))
                continue
            expr = sexpr_to_expr(entry.get("c0", 0), time_functions)
            for i, a in enumerate(affine, start=1):
                expr += sexpr_to_expr(entry.get(f"c{i}", 0), time_functions) * a
            comps.append(expr)
        return cls(kind, doc.get("name", "V"), tuple(comps))

    def __str__(self) -> str:
        return self.name


# ── Bracket ───────────────────────────────────────────────────────────
def lie_bracket(V: GeneratorField, W: GeneratorField) -> GeneratorField:
    """[V, W]^i = V(W^i) - W(V^i)."""
    if V.kind != W.kind:
        raise ValueError(f"Cannot bracket {V.kind} and {W.kind} generators")
    comps = tuple(V.apply(w) - W.apply(v) for v, w in zip(V.components, W.components))
    try:
        return GeneratorField(V.kind, f"[{V.name}, {W.name}]", comps)
    except RepresentationError as exc:
        raise RepresentationError(f"[{V.name}, {W.name}] leaves the representable class: {exc}") from exc


def annihilates(V: GeneratorField, functions: Sequence[Any], n_samples: int = 10,
                rng: Optional[np.random.Generator] = None) -> float:
    """Max |V(F)| over random points for each F; zero for invariants of V."""
    rng = rng or np.random.default_rng(CONFIG.random_seed)
    points = sample_coordinates(V.coordinates, n_samples, rng)
    worst = 0.0
    for F in functions:
        image = V.apply(F)
        compiled = sympy.lambdify(symbols(V.coordinates), image, "numpy")
        values = np.asarray(compiled(*(points[c] for c in V.coordinates)), dtype=float)
        worst = max(worst, float(np.max(np.abs(values))))
    return worst


def is_invariant(V: GeneratorField, functions: Sequence[Any], tolerance: Optional[float] = None,
                 rng: Optional[np.random.Generator] = None) -> bool:
    tol = CONFIG.symmetry_tolerance if tolerance is None else tolerance
    return annihilates(V, functions, rng=rng) <= tol


# ── Catalog members ───────────────────────────────────────────────────
def scaling(kind: str = "cartesian", omega: float = 0.0) -> GeneratorField:
    """D = t d_t - x d_x - y d_y - 3 psi d_psi, or t d_t - Omega t d_lam - (psi - Omega mu) d_psi."""
    if kind == "cartesian":
        t, x, y, psi = symbols(coordinates_for(kind))
        return GeneratorField.from_components(kind, "D", t=t, x=-x, y=-y, psi=-3 * psi)
    t, lam, mu, psi = symbols(coordinates_for(kind))
    return GeneratorField.from_components(kind, "D", t=t, lam=-omega * t, psi=-(psi - omega * mu))


def time_translation(kind: str = "cartesian") -> GeneratorField:
    return GeneratorField.from_components(kind, "dt", t=1)


def y_translation() -> GeneratorField:
    return GeneratorField.from_components("cartesian", "dy", y=1)


def x_shift(f: TimeFunction) -> GeneratorField:
    """X(f) = f(t) d_x - f'(t) y d_psi"""
    y = symbol("y")
    return GeneratorField.from_components(
        "cartesian", f"X({f.name})", x=f.leaf(), psi=-f.derivative_function(1).leaf() * y,
    )


def psi_shift(g: TimeFunction, kind: str = "cartesian") -> GeneratorField:
    """Z(g) = g(t) d_psi"""
    return GeneratorField.from_components(kind, f"Z({g.name})", psi=g.leaf())


def rotation_j1() -> GeneratorField:
    return GeneratorField.from_components("spherical", "J1", lam=1)


def _rotation_shapes(omega: float):
    t, lam, mu, _ = symbols(coordinates_for("spherical"))
    phase = lam + omega * t
    root = sympy.sqrt(1 - mu**2)
    return phase, root, mu


def rotation_j2(omega: float = 0.0) -> GeneratorField:
    phase, root, mu = _rotation_shapes(omega)
    tangential = sympy.cos(phase) * root
    return GeneratorField.from_components(
        "spherical", "J2", lam=mu * sympy.sin(phase) / root, mu=tangential, psi=omega * tangential,
    )


def rotation_j3(omega: float = 0.0) -> GeneratorField:
    phase, root, mu = _rotation_shapes(omega)
    tangential = -sympy.sin(phase) * root
    return GeneratorField.from_components(
        "spherical", "J3", lam=mu * sympy.cos(phase) / root, mu=tangential, psi=omega * tangential,
    )


def _resolve_function(functions: Mapping[str, Any], key: str) -> TimeFunction:
    if key not in functions:
        raise MissingParameterFunctionError(f"Catalog needs parameter function {key!r}")
    value = functions[key]
    return value if isinstance(value, TimeFunction) else time_function_from_spec(key, value)


def _parameter(params: Union[None, float, EquationParams, Mapping[str, float]], name: str) -> float:
    if params is None:
        return 0.0
    if isinstance(params, EquationParams):
        value = getattr(params, name)
        return 0.0 if value is None else float(value)
    if isinstance(params, Mapping):
        return float(params.get(name, 0.0))
    return float(params)


def catalog(kind: str,
            params: Union[None, float, EquationParams, Mapping[str, float]] = None,
            parameter_functions: Optional[Mapping[str, Any]] = None) -> List[GeneratorField]:
    """Instantiated basis of the symmetry algebra.

    cartesian: [D, d_t, d_y, X(f), Z(g)] (independent of beta);
    spherical: [D, d_t, Z(g), J1, J2, J3] for rotation rate Omega.
    Parameter functions may be TimeFunctions or config specs (number,
    expression string, preset mapping).
    """
    functions = dict(parameter_functions or {})
    if kind == "cartesian":
        beta = _parameter(params, "beta")
        f = _resolve_function(functions, "f")
        g = _resolve_function(functions, "g")
        logger.debug("Cartesian catalog for beta=%g with f=%s, g=%s", beta, f.name, g.name)
        return [scaling("cartesian"), time_translation("cartesian"), y_translation(), x_shift(f), psi_shift(g)]
    if kind == "spherical":
        omega = _parameter(params, "omega")
        g = _resolve_function(functions, "g")
        return [
            scaling("spherical", omega),
            time_translation("spherical"),
            psi_shift(g, "spherical"),
            rotation_j1(),
            rotation_j2(omega),
            rotation_j3(omega),
        ]
    raise ValueError(f"Unknown catalog kind: {kind!r}")
