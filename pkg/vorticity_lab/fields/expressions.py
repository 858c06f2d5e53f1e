"""Closed-form scalar fields with exact derivatives.

An `AnalyticField` wraps a sympy expression over a fixed tuple of
independent variables. Derivatives are symbolic; numeric evaluation goes
through a cached `lambdify` compilation to numpy, so a whole grid is
evaluated in one vectorized call.

Fields serialize to a JSON s-expression format, e.g.::

    ["*", ["var", "x"], ["sin", ["var", "y"]]]

with time-function leaves written ``["tf", "f"]`` (or ``["tf", "f", n]`` for
the n-th derivative) and bound to `TimeFunction` objects when loading.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy.core.function import AppliedUndef

from .time_functions import TimeFunction
from .variables import symbol, symbols

logger = logging.getLogger(__name__)

Number = Union[int, float]


class FieldDomainError(ValueError):
    """Evaluation produced a non-finite value."""

    def __init__(self, message: str, point: Optional[Dict[str, float]] = None):
        super().__init__(message)
        self.point = point


class VariableSetError(ValueError):
    """Field and operation disagree on the independent variables."""


@dataclass(frozen=True)
class AnalyticField:
    """Closed-form scalar field psi(t, ., .) with exact derivatives."""
    expression: sympy.Expr
    variables: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "expression", sympy.sympify(self.expression))
        object.__setattr__(self, "variables", tuple(self.variables))
        allowed = set(symbols(self.variables))
        stray = self.expression.free_symbols - allowed
        if stray:
            raise VariableSetError(
                f"Expression depends on {sorted(str(s) for s in stray)} "
                f"outside the variables {self.variables}"
            )

    # ── Construction ──────────────────────────────────────────────────
    @classmethod
    def parse(cls, text: str, variables: Sequence[str],
              time_functions: Optional[Mapping[str, TimeFunction]] = None) -> "AnalyticField":
        """Parse a sympy-syntax string, e.g. ``"A*sin(k*x - t)"``."""
        local = {name: symbol(name) for name in variables}
        for name, tf in (time_functions or {}).items():
            local[name] = lambda arg, _tf=tf: _tf.leaf(arg)
        return cls(sympy.sympify(text, locals=local), tuple(variables))

    @classmethod
    def constant(cls, value: Number, variables: Sequence[str]) -> "AnalyticField":
        return cls(sympy.sympify(value), tuple(variables))

    # ── Derivatives ───────────────────────────────────────────────────
    def diff(self, variable: str, order: int = 1) -> "AnalyticField":
        self._require(variable)
        if order == 0:
            return self
        return AnalyticField(sympy.diff(self.expression, symbol(variable), order), self.variables)

    def derivative(self, multi_index: Mapping[str, int]) -> "AnalyticField":
        """Mixed partial derivative, e.g. ``{"x": 2, "y": 1}``."""
        expr = self.expression
        for variable, order in multi_index.items():
            self._require(variable)
            if order < 0:
                raise ValueError(f"Negative derivative order for {variable!r}")
            if order:
                expr = sympy.diff(expr, symbol(variable), order)
        return AnalyticField(expr, self.variables)

    # ── Evaluation ────────────────────────────────────────────────────
    @cached_property
    def _compiled(self):
        return sympy.lambdify(symbols(self.variables), self.expression, "numpy")

    def evaluate(self, points: Mapping[str, Any]) -> np.ndarray:
        """Evaluate on broadcastable coordinate arrays keyed by variable name."""
        missing = [v for v in self.variables if v not in points]
        if missing:
            raise VariableSetError(f"Missing coordinates for {missing}")
        arrays = np.broadcast_arrays(*(np.asarray(points[v], dtype=float) for v in self.variables))
        shape = arrays[0].shape
        try:
            with np.errstate(all="ignore"):
                values = self._compiled(*(np.atleast_1d(a) for a in arrays))
        except (ZeroDivisionError, OverflowError, ValueError) as exc:
            raise FieldDomainError(f"Evaluation failed: {exc}") from exc
        values = np.asarray(values, dtype=float) + np.zeros(np.atleast_1d(arrays[0]).shape)
        bad = ~np.isfinite(values)
        if bad.any():
            index = np.unravel_index(int(np.argmax(bad)), values.shape)
            point = {v: float(np.atleast_1d(a)[index]) for v, a in zip(self.variables, arrays)}
            raise FieldDomainError(
                f"Non-finite value of {self.expression} at {point}", point=point
            )
        return values.reshape(shape)

    def __call__(self, **coordinates: float) -> float:
        return float(self.evaluate(coordinates))

    # ── Algebra ───────────────────────────────────────────────────────
    def substitute(self, mapping: Mapping[str, Any], variables: Optional[Sequence[str]] = None) -> "AnalyticField":
        """Simultaneous substitution of variables by expressions."""
        subs = {symbol(name): _as_expr(value) for name, value in mapping.items()}
        expr = self.expression.subs(subs, simultaneous=True)
        return AnalyticField(expr, tuple(variables) if variables is not None else self.variables)

    def _coerce(self, other) -> sympy.Expr:
        if isinstance(other, AnalyticField):
            if other.variables != self.variables:
                raise VariableSetError(f"Variable sets differ: {self.variables} vs {other.variables}")
            return other.expression
        return sympy.sympify(other)

    def __add__(self, other):
        return AnalyticField(self.expression + self._coerce(other), self.variables)

    __radd__ = __add__

    def __sub__(self, other):
        return AnalyticField(self.expression - self._coerce(other), self.variables)

    def __rsub__(self, other):
        return AnalyticField(self._coerce(other) - self.expression, self.variables)

    def __mul__(self, other):
        return AnalyticField(self.expression * self._coerce(other), self.variables)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return AnalyticField(self.expression / self._coerce(other), self.variables)

    def __neg__(self):
        return AnalyticField(-self.expression, self.variables)

    def _require(self, variable: str) -> None:
        if variable not in self.variables:
            raise VariableSetError(f"{variable!r} is not a variable of this field {self.variables}")

    def to_sexpr(self):
        return expr_to_sexpr(self.expression)

    def __str__(self) -> str:
        return str(self.expression)


def _as_expr(value) -> sympy.Expr:
    if isinstance(value, AnalyticField):
        return value.expression
    return sympy.sympify(value)


# ── S-expression codec ────────────────────────────────────────────────
_UNARY = {"sin": sympy.sin, "cos": sympy.cos, "exp": sympy.exp, "ln": sympy.log, "sqrt": sympy.sqrt}
_UNARY_NAMES = {sympy.sin: "sin", sympy.cos: "cos", sympy.exp: "exp", sympy.log: "ln"}


def expr_to_sexpr(expr: sympy.Expr):
    """Serialize a sympy expression into the JSON s-expression format."""
    if expr.is_Integer:
        return int(expr)
    if expr.is_Rational:
        return ["/", int(expr.p), int(expr.q)]
    if expr.is_Number or expr.is_NumberSymbol:
        return float(expr)
    if expr.is_Symbol:
        return ["var", expr.name]
    if isinstance(expr, AppliedUndef):
        name = getattr(expr.func, "tf_name", None)
        if name is None:
            raise ValueError(f"Undefined function {expr.func} is not a time-function leaf")
        order = expr.func.tf_order
        return ["tf", name] if order == 0 else ["tf", name, order]
    if expr.is_Add:
        return ["+"] + [expr_to_sexpr(a) for a in expr.args]
    if expr.is_Mul:
        return ["*"] + [expr_to_sexpr(a) for a in expr.args]
    if expr.is_Pow:
        base, exponent = expr.args
        if exponent == sympy.Rational(1, 2):
            return ["sqrt", expr_to_sexpr(base)]
        return ["^", expr_to_sexpr(base), expr_to_sexpr(exponent)]
    if expr.func in _UNARY_NAMES:
        return [_UNARY_NAMES[expr.func], expr_to_sexpr(expr.args[0])]
    if expr.func == sympy.atan2:
        return ["atan2", expr_to_sexpr(expr.args[0]), expr_to_sexpr(expr.args[1])]
    raise ValueError(f"Cannot serialize node {expr.func.__name__}: {expr}")


def sexpr_to_expr(doc, time_functions: Optional[Mapping[str, TimeFunction]] = None) -> sympy.Expr:
    """Parse a JSON s-expression; ``["tf", name]`` leaves bind to time_functions."""
    time_functions = time_functions or {}
    if isinstance(doc, bool):
        raise ValueError(f"Boolean is not a valid expression: {doc!r}")
    if isinstance(doc, int):
        return sympy.Integer(doc)
    if isinstance(doc, float):
        return sympy.Float(doc)
    if isinstance(doc, str):
        return _bind_time_function(doc, 0, time_functions)
    if not isinstance(doc, list) or not doc:
        raise ValueError(f"Malformed s-expression: {doc!r}")

    op, args = doc[0], doc[1:]
    if op == "var":
        return symbol(args[0])
    if op == "tf":
        order = args[1] if len(args) > 1 else 0
        return _bind_time_function(args[0], order, time_functions)

    parsed = [sexpr_to_expr(a, time_functions) for a in args]
    if op == "+":
        return sympy.Add(*parsed)
    if op == "*":
        return sympy.Mul(*parsed)
    if op == "-":
        if len(parsed) == 1:
            return -parsed[0]
        if len(parsed) == 2:
            return parsed[0] - parsed[1]
    if op == "/" and len(parsed) == 2:
        return parsed[0] / parsed[1]
    if op in ("^", "pow") and len(parsed) == 2:
        return parsed[0] ** parsed[1]
    if op in _UNARY and len(parsed) == 1:
        return _UNARY[op](parsed[0])
    if op == "atan2" and len(parsed) == 2:
        return sympy.atan2(parsed[0], parsed[1])
    raise ValueError(f"Unknown operator or arity: {op!r} with {len(parsed)} arguments")


def _bind_time_function(name: str, order: int, time_functions: Mapping[str, TimeFunction]) -> sympy.Expr:
    if name not in time_functions:
        raise ValueError(f"Unbound time function {name!r}")
    return time_functions[name].derivative_function(int(order)).leaf()


def field_to_sexpr(field: AnalyticField) -> Dict[str, Any]:
    return {"variables": list(field.variables), "expr": expr_to_sexpr(field.expression)}


def field_from_sexpr(doc: Mapping[str, Any],
                     time_functions: Optional[Mapping[str, TimeFunction]] = None) -> AnalyticField:
    return AnalyticField(sexpr_to_expr(doc["expr"], time_functions), tuple(doc["variables"]))
