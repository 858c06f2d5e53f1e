"""Exact and partially invariant solutions of the vorticity equations.

Cartesian families of zeta_t + psi_x zeta_y - psi_y zeta_x + beta psi_x = 0:

- Rossby wave  psi = A sin(k x + l y - sigma t),  sigma = -beta k / (k^2 + l^2)
- Klein-Gordon lift of a solution v~(p~, q~) of v~_pq + beta v~ = 0 with
  p~ = x - f y and q~ = int dt / (1 + f^2):

      psi = v~(p~, q~)/(1 + f^2) + (f''/beta) p - h/beta - ((1 + f^2) f'')'/beta^2 - f' y^2/2

- partially invariant families with eta = zeta + beta y:
  eta_y = 0:   psi = Psi - beta y^3/6 + eta0 y^2/2,  Psi harmonic, eta0 constant
  eta_y != 0:  psi = F(w)/g1^2 - beta y^3/6 - ((g1' y + g0')/g1) x + f1 y + f0,  w = g1 y + g0

Spherical and beta = 0 seeds for the equivalence maps: zonal flows,
single-degree spherical harmonics, and plane waves on one wavenumber circle.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np
import sympy

from ..config import CONFIG
from ..fields.equations import EquationParams, Grid, laplace_residual, residual
from ..fields.expressions import AnalyticField, VariableSetError
from ..fields.time_functions import TimeFunction
from ..fields.variables import CARTESIAN, KLEIN_GORDON, PROFILE, SPHERICAL, T, symbol

logger = logging.getLogger(__name__)

QUADRATURE_CACHE_SIZE = 4096


class SolutionSpecError(ValueError):
    """Parameters outside the domain of a solution family."""


# ── Rossby wave ───────────────────────────────────────────────────────
def rossby_frequency(k: float, l: float, beta: float) -> float:
    """sigma = -beta k / (k^2 + l^2) for psi = A sin(k x + l y - sigma t)."""
    denominator = k**2 + l**2
    if denominator == 0:
        raise SolutionSpecError("Rossby wave needs k^2 + l^2 > 0")
    return -beta * k / denominator


def derive_rossby_frequency() -> sympy.Expr:
    """Solve the residual of the harmonic ansatz for sigma (symbolic k, l, beta)."""
    A, k, l, beta, sigma = sympy.symbols("A k l beta sigma", real=True)
    t, x, y = (symbol(v) for v in CARTESIAN)
    psi = A * sympy.sin(k * x + l * y - sigma * t)
    zeta = sympy.diff(psi, x, 2) + sympy.diff(psi, y, 2)
    lhs = (sympy.diff(zeta, t) + sympy.diff(psi, x) * sympy.diff(zeta, y)
           - sympy.diff(psi, y) * sympy.diff(zeta, x) + beta * sympy.diff(psi, x))
    reduced = sympy.simplify(lhs / (A * sympy.cos(k * x + l * y - sigma * t)))
    (solution,) = sympy.solve(sympy.Eq(reduced, 0), sigma)
    return sympy.simplify(solution)


def rossby_wave(A: float, k: float, l: float, beta: float) -> AnalyticField:
    sigma = rossby_frequency(k, l, beta)
    t, x, y = (symbol(v) for v in CARTESIAN)
    return AnalyticField(A * sympy.sin(k * x + l * y - sigma * t), CARTESIAN)


# ── Klein-Gordon lift ─────────────────────────────────────────────────
@dataclass(frozen=True)
class KGSolutionSpec:
    """Solution v~(p~, q~) of v~_pq + beta v~ = 0.

    Harmonic branch: v~ = A sin(alpha p~ + gamma q~) with gamma = beta/alpha.
    User branch: any AnalyticField over (p, q).
    """
    amplitude: float = 1.0
    alpha: Optional[float] = None
    field: Optional[AnalyticField] = None

    def __post_init__(self):
        if (self.alpha is None) == (self.field is None):
            raise SolutionSpecError("Give either a harmonic wavenumber alpha or a field v~(p, q)")
        if self.alpha is not None and self.alpha == 0:
            raise SolutionSpecError("Harmonic branch needs alpha != 0")
        if self.field is not None and self.field.variables != KLEIN_GORDON:
            raise VariableSetError(f"v~ must be a field over {KLEIN_GORDON}")

    @classmethod
    def harmonic(cls, alpha: float, amplitude: float = 1.0) -> "KGSolutionSpec":
        return cls(amplitude=amplitude, alpha=alpha)

    @classmethod
    def user(cls, field: AnalyticField) -> "KGSolutionSpec":
        return cls(field=field)

    def gamma(self, beta: float) -> float:
        return beta / self.alpha

    def reduced_field(self, beta: float) -> AnalyticField:
        if self.field is not None:
            return self.field
        p, q = (symbol(v) for v in KLEIN_GORDON)
        return AnalyticField(self.amplitude * sympy.sin(self.alpha * p + self.gamma(beta) * q), KLEIN_GORDON)


def klein_gordon_residual(spec: KGSolutionSpec, beta: float, grid: Optional[Grid] = None):
    """Residual of v~_pq + beta v~ on a (p, q) grid."""
    v = spec.reduced_field(beta)
    grid = grid or Grid.from_mapping({"p": np.linspace(-1, 1, 11), "q": np.linspace(-1, 1, 11)})
    values = (v.derivative({"p": 1, "q": 1}) + beta * v).evaluate(grid.mesh())
    return float(np.max(np.abs(values)))


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


class _QuadratureAntiderivative:
    """t -> int_0^t w(s) ds by Gauss-Legendre, `nodes` per unit interval, cached per t (LRU)."""

    def __init__(self, weight, nodes: int):
        self.weight = weight
        self.nodes = nodes
        self._integral = lru_cache(maxsize=QUADRATURE_CACHE_SIZE)(self._integrate)

    def _integrate(self, t: float) -> float:
        n_intervals = max(1, math.ceil(abs(t)))
        x, w = _gauss_legendre(self.nodes)
        edges = np.linspace(0.0, t, n_intervals + 1)
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            half = 0.5 * (b - a)
            total += half * float(np.dot(w, self.weight(half * x + 0.5 * (a + b))))
        return total

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.vectorize(self._integral, otypes=[float])(t)


def _closed_form_antiderivative(f: TimeFunction) -> Optional[sympy.Expr]:
    """int_0^t ds/(1 + f^2) for constant or linear f."""
    expr = f.expression
    if expr is None:
        return None
    poly = sympy.Poly(expr, T) if expr.is_polynomial(T) else None
    if poly is None or poly.degree() > 1:
        return None
    coeffs = poly.all_coeffs()
    if poly.degree() <= 0:
        c = coeffs[-1] if coeffs else 0
        return T / (1 + c**2)
    a, b = coeffs
    return (sympy.atan(a * T + b) - sympy.atan(b)) / a


def q_tilde_function(f: TimeFunction, name: str = "qt") -> TimeFunction:
    """q~(t) = int_0^t ds/(1 + f(s)^2) with closed-form derivatives up to order 3."""
    f0, f1, f2 = (f.derivative(n) for n in range(3))

    def d1(t):
        return 1.0 / (1.0 + f0(t) ** 2)

    def d2(t):
        return -2.0 * f0(t) * f1(t) / (1.0 + f0(t) ** 2) ** 2

    def d3(t):
        s = 1.0 + f0(t) ** 2
        return -2.0 * (f1(t) ** 2 + f0(t) * f2(t)) / s**2 + 8.0 * f0(t) ** 2 * f1(t) ** 2 / s**3

    closed = _closed_form_antiderivative(f)
    if closed is not None:
        logger.debug("q~ for %s in closed form: %s", f.name, closed)
        value = sympy.lambdify(T, closed, "numpy")
    else:
        logger.debug("q~ for %s by Gauss-Legendre quadrature (%d nodes)", f.name, CONFIG.quadrature_nodes)
        value = _QuadratureAntiderivative(d1, CONFIG.quadrature_nodes)
    return TimeFunction.from_closures(name, [value, d1, d2, d3])


def klein_gordon_lift(f: TimeFunction, h: TimeFunction, beta: float, spec: KGSolutionSpec) -> AnalyticField:
    """Lift a Klein-Gordon solution to a solution of the Cartesian equation.

    The reduced field enters as v~(x - f y, q~(t)) / (1 + f^2); without that
    factor the residual does not vanish for non-constant f. For constant f
    it rescales the amplitude: f = 1 with v = sin(p + q) gives
    0.5 sin(x - y + t/2), not sin(x - y + t/2).
    """
    if beta == 0:
        raise SolutionSpecError("Klein-Gordon lift is undefined for beta = 0")
    if f.max_order is not None and f.max_order < 3:
        raise SolutionSpecError(f"f must supply derivatives up to order 3, has {f.max_order}")
    t, x, y = (symbol(v) for v in CARTESIAN)
    p_sym, q_sym = (symbol(v) for v in KLEIN_GORDON)

    f_, f_1, f_2, f_3 = (f.derivative_function(n).leaf() for n in range(4))
    q_tilde = q_tilde_function(f).leaf()
    p = x - f_ * y
    v = spec.reduced_field(beta).expression.subs({p_sym: p, q_sym: q_tilde}, simultaneous=True)

    metric = 1 + f_**2
    correction = (2 * f_ * f_1 * f_2 + metric * f_3) / beta**2
    psi = v / metric + (f_2 / beta) * p - h.leaf() / beta - correction - f_1 * y**2 / 2
    return AnalyticField(psi, CARTESIAN)


# ── Partially invariant families ──────────────────────────────────────
@dataclass(frozen=True)
class PartialInvariantSpec:
    """eta_constant: harmonic Psi and eta; eta_general: profile F(w) and g1, g0, f1, f0."""
    case: str
    harmonic: Optional[AnalyticField] = None
    eta: Union[float, TimeFunction, None] = None
    profile: Optional[AnalyticField] = None
    g1: Optional[TimeFunction] = None
    g0: Optional[TimeFunction] = None
    f1: Optional[TimeFunction] = None
    f0: Optional[TimeFunction] = None

    def __post_init__(self):
        if self.case == "eta_constant":
            if self.harmonic is None or self.eta is None:
                raise SolutionSpecError("eta_constant needs a harmonic field Psi and eta")
            if self.harmonic.variables != CARTESIAN:
                raise VariableSetError(f"Psi must be a field over {CARTESIAN}")
        elif self.case == "eta_general":
            missing = [k for k in ("profile", "g1", "g0", "f1", "f0") if getattr(self, k) is None]
            if missing:
                raise SolutionSpecError(f"eta_general needs {missing}")
            if self.profile.variables != PROFILE:
                raise VariableSetError(f"F must be a field over {PROFILE}")
        else:
            raise SolutionSpecError(f"Unknown partially invariant case: {self.case!r}")

    @classmethod
    def eta_constant(cls, harmonic: AnalyticField, eta: Union[float, TimeFunction]) -> "PartialInvariantSpec":
        return cls("eta_constant", harmonic=harmonic, eta=eta)

    @classmethod
    def eta_general(cls, profile: AnalyticField, g1: TimeFunction, g0: TimeFunction,
                    f1: TimeFunction, f0: TimeFunction) -> "PartialInvariantSpec":
        return cls("eta_general", profile=profile, g1=g1, g0=g0, f1=f1, f0=f0)


def partially_invariant(spec: PartialInvariantSpec, beta: float, grid: Optional[Grid] = None) -> AnalyticField:
    grid = grid or Grid.cartesian_default()
    t, x, y = (symbol(v) for v in CARTESIAN)
    cubic = -beta * y**3 / 6

    if spec.case == "eta_constant":
        harmonic_check = laplace_residual(spec.harmonic, grid)
        if not harmonic_check.passed(CONFIG.harmonic_tolerance):
            raise SolutionSpecError(f"Psi is not harmonic (Laplace residual {harmonic_check.max_abs:.3e})")
        eta = spec.eta.leaf() if isinstance(spec.eta, TimeFunction) else sympy.sympify(spec.eta)
        psi = AnalyticField(spec.harmonic.expression + cubic + eta * y**2 / 2, CARTESIAN)
        if isinstance(spec.eta, TimeFunction):
            report = residual(psi, EquationParams.cartesian(beta), grid)
            logger.warning(
                "eta_constant family with time-dependent eta %s: residual max %.3e (not a verified solution)",
                spec.eta.name, report.max_abs,
            )
        return psi

    window = np.asarray(grid.samples[grid.variables.index("t")])
    if np.min(np.abs(spec.g1(window))) <= CONFIG.constraint_tolerance:
        raise SolutionSpecError(f"g1 = {spec.g1.name} vanishes on the window [{window[0]}, {window[-1]}]")
    g1, g0 = spec.g1.leaf(), spec.g0.leaf()
    g1_t, g0_t = spec.g1.derivative_function(1).leaf(), spec.g0.derivative_function(1).leaf()
    profile = spec.profile.expression.subs(symbol("omega"), g1 * y + g0)
    psi = (profile / g1**2 + cubic - ((g1_t * y + g0_t) / g1) * x
           + spec.f1.leaf() * y + spec.f0.leaf())
    return AnalyticField(psi, CARTESIAN)


# ── Seeds for the equivalence maps ────────────────────────────────────
def zonal_flow(profile) -> AnalyticField:
    """psi = P(mu), a steady solution of the spherical equation with Omega = 0."""
    mu = symbol("mu")
    expr = sympy.sympify(profile, locals={"mu": mu}) if isinstance(profile, str) else sympy.sympify(profile)
    if not expr.free_symbols <= {mu}:
        raise SolutionSpecError(f"Zonal profile may only depend on mu: {expr}")
    return AnalyticField(expr, SPHERICAL)


def spherical_harmonic_wave(n: int, m: int, amplitude: float = 1.0, phase: float = 0.0) -> AnalyticField:
    """A P_n^m(mu) cos(m lam + phase); zeta = -n(n+1) psi, steady for Omega = 0."""
    if n < 1 or not 0 <= m <= n:
        raise SolutionSpecError(f"Need n >= 1 and 0 <= m <= n, got n={n}, m={m}")
    lam, mu = symbol("lam"), symbol("mu")
    legendre = sympy.expand_func(sympy.assoc_legendre(n, m, mu))
    return AnalyticField(amplitude * legendre * sympy.cos(m * lam + phase), SPHERICAL)


def steady_plane_waves(amplitudes: Sequence[float], wavevectors: Sequence[Sequence[float]],
                       phases: Optional[Sequence[float]] = None) -> AnalyticField:
    """sum_j A_j sin(k_j x + l_j y + phi_j) with all |(k_j, l_j)| equal.

    Steady solution of the beta = 0 Cartesian and potential equations.
    """
    if len(amplitudes) != len(wavevectors) or not amplitudes:
        raise SolutionSpecError("Need one wavevector per amplitude")
    phases = list(phases) if phases is not None else [0.0] * len(amplitudes)
    radii = [k**2 + l**2 for k, l in wavevectors]
    if radii[0] == 0 or not np.allclose(radii, radii[0], rtol=1e-14, atol=0.0):
        raise SolutionSpecError(f"Wavevectors must share one nonzero wavenumber, got |k|^2 = {radii}")
    t, x, y = (symbol(v) for v in CARTESIAN)
    expr = sum(
        (A * sympy.sin(k * x + l * y + phi) for A, (k, l), phi in zip(amplitudes, wavevectors, phases)),
        sympy.Integer(0),
    )
    return AnalyticField(expr, CARTESIAN)
