"""Symmetry generators, flows, subalgebras and point transformations."""

from .flows import NoClosedFormFlowError, flow, map_solution
from .generators import (
    GeneratorField,
    MissingParameterFunctionError,
    RepresentationError,
    annihilates,
    is_invariant,
    catalog,
    lie_bracket,
)
from .subalgebras import (
    DegenerateSampleError,
    SubalgebraSpec,
    SubalgebraSpecError,
    bracket_table,
    optimal_system_1d,
    optimal_system_2d,
    verify_subalgebra,
)
from .transformations import (
    NonInvertibleTransformationError,
    PointTransformation,
    TransformationError,
    build_map,
    compose,
    identity,
    transport_solution,
    verify_equivalence,
)

__all__ = [
    'NoClosedFormFlowError',
    'flow',
    'map_solution',
    'GeneratorField',
    'MissingParameterFunctionError',
    'RepresentationError',
    'annihilates',
    'is_invariant',
    'catalog',
    'lie_bracket',
    'DegenerateSampleError',
    'SubalgebraSpec',
    'SubalgebraSpecError',
    'bracket_table',
    'optimal_system_1d',
    'optimal_system_2d',
    'verify_subalgebra',
    'NonInvertibleTransformationError',
    'PointTransformation',
    'TransformationError',
    'build_map',
    'compose',
    'identity',
    'transport_solution',
    'verify_equivalence',
]
