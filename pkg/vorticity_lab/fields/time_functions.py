"""Named functions of time used as leaves of expression trees.

A `TimeFunction` stands for one of the arbitrary functions f(t), g(t), ...
that parametrize the symmetry algebras and the solution families. Inside a
sympy expression it appears as an undefined function applied to ``t``;
differentiating it yields the leaf of the next derivative, and `lambdify`
evaluates every leaf through the numeric closure attached to it.

Two sources of derivatives are supported:

- closures supplied by the caller (value and derivatives up to order 3);
- a sympy expression in ``t`` (the presets), differentiable to any order.
"""

import logging
from typing import Callable, Dict, Optional, Sequence

import numpy as np
import sympy
from sympy.core.function import UndefinedFunction

from .variables import T

logger = logging.getLogger(__name__)

MAX_CLOSURE_ORDER = 3


class DerivativeOrderError(ValueError):
    """Requested derivative exceeds what the function supplies."""


def _as_array_function(func: Callable) -> Callable:
    """Wrap a closure so that it always returns a float array shaped like t."""
    def wrapped(t):
        t_arr = np.asarray(t, dtype=float)
        return np.asarray(func(t_arr), dtype=float) + np.zeros(t_arr.shape)
    return wrapped


class TimeFunction:
    """A named real function of time with derivative closures.

    Instances compare by identity. `derivative_function(n)` returns a view
    on the n-th derivative that shares sympy leaves with its parent, so
    expressions built from f and from f' stay mutually consistent.
    """

    def __init__(self,
                 name: str,
                 closures: Sequence[Callable] = (),
                 expression: Optional[sympy.Expr] = None):
        if not name.isidentifier():
            raise ValueError(f"Time function name must be an identifier: {name!r}")
        if expression is None and not closures:
            raise ValueError(f"Time function {name!r} needs closures or an expression")
        if len(closures) > MAX_CLOSURE_ORDER + 1:
            raise ValueError(
                f"Time function {name!r}: at most {MAX_CLOSURE_ORDER + 1} closures "
                "(value and derivatives up to order 3)"
            )
        self.name = name
        self._closures = tuple(_as_array_function(c) for c in closures)
        self._expression = sympy.sympify(expression) if expression is not None else None
        if self._expression is not None and not self._expression.free_symbols <= {T}:
            raise ValueError(f"Time function {name!r} may only depend on t")
        self._base = self
        self._offset = 0
        self._numeric_cache: Dict[int, Callable] = {}
        self._leaf_cache: Dict[int, UndefinedFunction] = {}

    # ── Construction ──────────────────────────────────────────────────
    @classmethod
    def from_closures(cls, name: str, closures: Sequence[Callable]) -> "TimeFunction":
        """User-supplied value and derivative closures, orders 0..len-1."""
        return cls(name, closures=closures)

    @classmethod
    def from_expression(cls, name: str, expression) -> "TimeFunction":
        """Closed-form function of t given as sympy expression or string."""
        if isinstance(expression, str):
            expression = sympy.sympify(expression, locals={"t": T})
        return cls(name, expression=expression)

    def derivative_function(self, order: int = 1) -> "TimeFunction":
        """The order-th derivative as a TimeFunction (f -> f', f'', ...)."""
        if order < 0:
            raise ValueError("Derivative order must be non-negative")
        if order == 0:
            return self
        view = object.__new__(TimeFunction)
        view.name = f"{self._base.name}_d{self._offset + order}"
        view._base = self._base
        view._offset = self._offset + order
        return view

    # ── Numeric access ────────────────────────────────────────────────
    @property
    def max_order(self) -> Optional[int]:
        """Highest derivative available, None when unlimited."""
        base = self._base
        if base._expression is not None:
            return None
        return len(base._closures) - 1 - self._offset

    @property
    def expression(self) -> Optional[sympy.Expr]:
        """Closed form in t, when the function has one."""
        base = self._base
        if base._expression is None:
            return None
        return sympy.diff(base._expression, T, self._offset)

    def derivative(self, order: int = 0) -> Callable:
        """Numeric closure of the order-th derivative."""
        return self._base._numeric(self._offset + order)

    def __call__(self, t):
        return self.derivative(0)(t)

    def _numeric(self, order: int) -> Callable:
        if order in self._numeric_cache:
            return self._numeric_cache[order]
        if self._expression is not None:
            expr = sympy.diff(self._expression, T, order)
            func = _as_array_function(sympy.lambdify(T, expr, "numpy"))
        elif order < len(self._closures):
            func = self._closures[order]
        else:
            raise DerivativeOrderError(
                f"Time function {self.name!r} supplies derivatives up to order "
                f"{len(self._closures) - 1}, order {order} requested"
            )
        self._numeric_cache[order] = func
        return func

    # ── Symbolic access ───────────────────────────────────────────────
    def leaf(self, argument=T) -> sympy.Expr:
        """The sympy leaf f(t) (or the derivative leaf for derivative views)."""
        return self._base._leaf_class(self._offset)(argument)

    def _leaf_class(self, order: int) -> UndefinedFunction:
        if order in self._leaf_cache:
            return self._leaf_cache[order]
        implementation = self._numeric(order)
        base = self

        def fdiff(leaf, argindex=1):
            return base._leaf_class(order + 1)(leaf.args[0])

        name = self.name if order == 0 else f"{self.name}_d{order}"
        leaf_class = UndefinedFunction(
            name,
            _imp_=staticmethod(implementation),
            fdiff=fdiff,
            tf_name=self.name,
            tf_order=order,
        )
        self._leaf_cache[order] = leaf_class
        return leaf_class

    def check_consistency(self, times: Sequence[float], step: float = 1e-5,
                          max_order: int = MAX_CLOSURE_ORDER) -> float:
        """Max relative mismatch between derivative closures and central differences."""
        times = np.asarray(times, dtype=float)
        top = max_order if self.max_order is None else min(max_order, self.max_order)
        worst = 0.0
        for order in range(1, top + 1):
            lower = self.derivative(order - 1)
            fd = (lower(times + step) - lower(times - step)) / (2 * step)
            exact = self.derivative(order)(times)
            scale = np.maximum(np.abs(exact), 1.0)
            worst = max(worst, float(np.max(np.abs(fd - exact) / scale)))
        logger.debug("Time function %s: max finite-difference mismatch %.3e", self.name, worst)
        return worst

    def __repr__(self) -> str:
        return f"TimeFunction({self.name!r})"


# ── Presets ───────────────────────────────────────────────────────────
def constant(value: float, name: str = "c") -> TimeFunction:
    return TimeFunction.from_expression(name, sympy.sympify(value))


def polynomial(coefficients: Sequence[float], name: str = "poly") -> TimeFunction:
    """sum_i coefficients[i] * t**i"""
    expr = sum((sympy.sympify(c) * T**i for i, c in enumerate(coefficients)), sympy.Integer(0))
    return TimeFunction.from_expression(name, expr)


def power(exponent: float, name: str = "pw") -> TimeFunction:
    """|t|**a on the branch t > 0."""
    return TimeFunction.from_expression(name, T ** sympy.sympify(exponent))


def exponential(rate: float, scale: float = 1.0, name: str = "ex") -> TimeFunction:
    return TimeFunction.from_expression(name, sympy.sympify(scale) * sympy.exp(sympy.sympify(rate) * T))


def sinusoidal(frequency: float = 1.0, amplitude: float = 1.0, phase: float = 0.0,
               name: str = "sn") -> TimeFunction:
    return TimeFunction.from_expression(
        name,
        sympy.sympify(amplitude) * sympy.sin(sympy.sympify(frequency) * T + sympy.sympify(phase)),
    )


PRESETS = {
    "constant": constant,
    "polynomial": polynomial,
    "power": power,
    "exponential": exponential,
    "sinusoidal": sinusoidal,
}


def time_function_from_spec(name: str, spec) -> TimeFunction:
    """Build a TimeFunction from a config entry.

    Accepted forms: a number (constant), an expression string in t, or a
    mapping ``{"preset": <name>, **kwargs}``.
    """
    if isinstance(spec, bool):
        raise ValueError(f"Invalid time function spec for {name!r}: {spec!r}")
    if isinstance(spec, (int, float)):
        return constant(spec, name=name)
    if isinstance(spec, str):
        return TimeFunction.from_expression(name, spec)
    if isinstance(spec, dict) and "preset" in spec:
        kwargs = {k: v for k, v in spec.items() if k != "preset"}
        preset = spec["preset"]
        if preset not in PRESETS:
            raise ValueError(f"Unknown time function preset: {preset!r}")
        return PRESETS[preset](name=name, **kwargs)
    raise ValueError(f"Invalid time function spec for {name!r}: {spec!r}")
