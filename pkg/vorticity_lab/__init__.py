"""
Vorticity Lab - barotropic vorticity equation laboratory

Exact solutions with residual verification, Lie point symmetries of the
Cartesian and spherical vorticity equations, rotation-cancelling point
transformations, and symmetry reduction of Galerkin truncations down to
the Lorenz (1960) three-component model.
"""

__version__ = "1.0.0"
__author__ = "Vorticity Lab"
