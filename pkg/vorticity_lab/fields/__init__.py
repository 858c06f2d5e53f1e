"""Closed-form fields, exact derivatives and vorticity-equation residuals."""

from .equations import (
    EQUATION_KINDS,
    EquationParams,
    EquationParamsError,
    Grid,
    GridError,
    PoleProximityError,
    ResidualReport,
    absolute_vorticity,
    eval_derivatives,
    laplace_residual,
    potential_vorticity,
    residual,
    residual_field,
    vorticity_of,
)
from .expressions import (
    AnalyticField,
    FieldDomainError,
    VariableSetError,
    expr_to_sexpr,
    field_from_sexpr,
    field_to_sexpr,
    sexpr_to_expr,
)
from .time_functions import DerivativeOrderError, TimeFunction, time_function_from_spec
from .variables import CARTESIAN, KLEIN_GORDON, PROFILE, SPHERICAL, symbol

__all__ = [
    'EQUATION_KINDS',
    'EquationParams',
    'EquationParamsError',
    'Grid',
    'GridError',
    'PoleProximityError',
    'ResidualReport',
    'absolute_vorticity',
    'eval_derivatives',
    'laplace_residual',
    'potential_vorticity',
    'residual',
    'residual_field',
    'vorticity_of',
    'AnalyticField',
    'FieldDomainError',
    'VariableSetError',
    'expr_to_sexpr',
    'field_from_sexpr',
    'field_to_sexpr',
    'sexpr_to_expr',
    'DerivativeOrderError',
    'TimeFunction',
    'time_function_from_spec',
    'CARTESIAN',
    'KLEIN_GORDON',
    'PROFILE',
    'SPHERICAL',
    'symbol',
]
