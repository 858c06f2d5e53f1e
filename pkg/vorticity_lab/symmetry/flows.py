"""Closed-form flows exp(eps V) of symmetry generators.

Three classes of generators have closed-form flows:

- constant-coefficient affine fields, dz/ds = A z + b with numeric A, b
  (D of both catalogs, d_t, d_y, J1, d_t + c d_y, Z(const), ...): solved with
  the matrix exponential of the augmented system;
- t-frozen fields with xi^t = 0, base coefficients a(t), b(t) and
  eta = c(t) + d(t) z1 + e(t) z2 (X(f), Z(g), d_y + X(f), X(f) + Z(g)):

      z1 -> z1 + s a,  z2 -> z2 + s b,  psi -> psi + s (c + d z1 + e z2) + s^2/2 (d a + e b)

- multiples of the spherical rotations J2, J3: rotations of the unit sphere
  in the co-rotating longitude, psi -> psi + Omega (mu~ - mu).
"""

import logging
from typing import Optional, Tuple

import numpy as np
import sympy
from scipy.linalg import expm

from ..fields.expressions import AnalyticField
from ..fields.variables import symbol, symbols
from .generators import GeneratorField, rotation_j2, rotation_j3
from .transformations import PointTransformation

logger = logging.getLogger(__name__)


class NoClosedFormFlowError(ValueError):
    """No closed-form flow is known for the generator."""


def flow(V: GeneratorField, eps: float) -> PointTransformation:
    """Time-eps flow of V with its closed-form inverse (the time -eps flow)."""
    for builder in (_affine_flow, _frozen_flow, _rotation_flow):
        maps = builder(V, eps)
        if maps is not None:
            forward, inverse = maps
            logger.debug("Flow of %s at eps=%g via %s", V.name, eps, builder.__name__)
            variables = V.coordinates[:-1]
            return PointTransformation(variables, forward, inverse, "flow", {"generator": V.name, "eps": eps})
    raise NoClosedFormFlowError(f"No closed-form flow for {V.name}")


def map_solution(T: PointTransformation, psi: AnalyticField) -> AnalyticField:
    """psi~ with psi~(T(z)) = T_psi(z, psi(z))."""
    return T.push_forward(psi)


# ── Constant-coefficient affine fields ────────────────────────────────
def _affine_system(V: GeneratorField) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    coords = symbols(V.coordinates)
    n = len(coords)
    A = np.zeros((n, n))
    b = np.zeros(n)
    for i, expr in enumerate(V.components):
        offset = expr.subs({z: 0 for z in coords})
        if not offset.is_number:
            return None
        b[i] = float(offset)
        for j, z in enumerate(coords):
            slope = sympy.diff(expr, z)
            if not slope.is_number:
                return None
            A[i, j] = float(slope)
    return A, b


def _affine_maps(A: np.ndarray, b: np.ndarray, s: float, coords) -> Tuple[sympy.Expr, ...]:
    n = len(coords)
    augmented = np.zeros((n + 1, n + 1))
    augmented[:n, :n] = A
    augmented[:n, n] = b
    E = expm(s * augmented)
    maps = []
    for i in range(n):
        terms = [sympy.Float(E[i, j]) * coords[j] for j in range(n) if E[i, j] != 0.0]
        if E[i, n] != 0.0:
            terms.append(sympy.Float(E[i, n]))
        maps.append(sympy.Add(*terms))
    return tuple(maps)


def _affine_flow(V: GeneratorField, eps: float):
    system = _affine_system(V)
    if system is None:
        return None
    coords = symbols(V.coordinates)
    A, b = system
    return _affine_maps(A, b, eps, coords), _affine_maps(A, b, -eps, coords)


# ── t-frozen fields ───────────────────────────────────────────────────
def _only_t(expr: sympy.Expr) -> bool:
    return expr.free_symbols <= {symbol("t")}


def _frozen_flow(V: GeneratorField, eps: float):
    coords = symbols(V.coordinates)
    t, z1, z2, psi = coords
    xi_t, a, b, eta = V.components
    if xi_t != 0 or not (_only_t(a) and _only_t(b)) or sympy.diff(eta, psi) != 0:
        return None
    d, e = sympy.diff(eta, z1), sympy.diff(eta, z2)
    c = eta.subs({z1: 0, z2: 0})
    if not (_only_t(c) and _only_t(d) and _only_t(e)):
        return None

    def maps(s: float):
        return (
            t,
            z1 + s * a,
            z2 + s * b,
            psi + s * (c + d * z1 + e * z2) + s**2 / 2 * (d * a + e * b),
        )

    return maps(eps), maps(-eps)


# ── Spherical rotations ───────────────────────────────────────────────
def _scalar_ratio(numerator: sympy.Expr, denominator: sympy.Expr) -> Optional[float]:
    ratio = sympy.simplify(numerator / denominator)
    return float(ratio) if ratio.is_number else None


def _rotation_flow(V: GeneratorField, eps: float):
    if V.kind != "spherical":
        return None
    xi_mu, eta = V.coefficient("mu"), V.coefficient("psi")
    if xi_mu == 0 or sympy.diff(eta, symbol("psi")) != 0:
        return None
    omega = _scalar_ratio(eta, xi_mu)
    if omega is None:
        return None
    for axis, reference in (("J2", rotation_j2(omega)), ("J3", rotation_j3(omega))):
        scale = _scalar_ratio(xi_mu, reference.coefficient("mu"))
        if scale is None:
            continue
        if all(sympy.simplify(v - scale * r) == 0 for v, r in zip(V.components, reference.components)):
            return _rotation_maps(axis, scale * eps, omega), _rotation_maps(axis, -scale * eps, omega)
    return None


def _rotation_maps(axis: str, s: float, omega: float) -> Tuple[sympy.Expr, ...]:
    t, lam, mu, psi = symbols(("t", "lam", "mu", "psi"))
    root = sympy.sqrt(1 - mu**2)
    X = root * sympy.cos(lam + omega * t)
    Y = root * sympy.sin(lam + omega * t)
    Z = mu
    cs, sn = sympy.cos(s), sympy.sin(s)
    if axis == "J2":
        X, Z = X * cs - Z * sn, Z * cs + X * sn
    else:
        Y, Z = Y * cs + Z * sn, Z * cs - Y * sn
    return (t, sympy.atan2(Y, X) - omega * t, Z, psi + omega * (Z - mu))
