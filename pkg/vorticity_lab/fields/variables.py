"""Shared sympy symbols and the variable sets of the three equations."""

from typing import Dict, Iterable, Tuple

import sympy

# Independent variables of the Cartesian and spherical equations, the
# dependent variable, and the auxiliary coordinates of the reductions.
_NAMES = ("t", "x", "y", "lam", "mu", "psi", "p", "q", "omega")

_SYMBOLS: Dict[str, sympy.Symbol] = {name: sympy.Symbol(name, real=True) for name in _NAMES}

CARTESIAN: Tuple[str, ...] = ("t", "x", "y")
SPHERICAL: Tuple[str, ...] = ("t", "lam", "mu")
KLEIN_GORDON: Tuple[str, ...] = ("p", "q")
PROFILE: Tuple[str, ...] = ("omega",)

DEPENDENT = "psi"


def symbol(name: str) -> sympy.Symbol:
    """Return the registered real symbol for a variable name."""
    try:
        return _SYMBOLS[name]
    except KeyError:
        raise ValueError(f"Unknown variable: {name!r} (known: {', '.join(_NAMES)})") from None


def symbols(names: Iterable[str]) -> Tuple[sympy.Symbol, ...]:
    return tuple(symbol(name) for name in names)


def variables_for_kind(kind: str) -> Tuple[str, ...]:
    """Independent variables of an equation kind."""
    if kind in ("cartesian", "potential"):
        return CARTESIAN
    if kind == "spherical":
        return SPHERICAL
    raise ValueError(f"Unknown equation kind: {kind!r}")


T = symbol("t")
