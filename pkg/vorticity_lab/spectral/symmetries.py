"""Discrete symmetries induced on the Fourier coefficients.

Every element acts as

    C_m -> s (-1)^(a m1 + b m2) C_(f1 m1, f2 m2)

with a global sign s, parities a, b in {0, 1} and index flips f1, f2 in
{+1, -1}. The mirror symmetries e1, e2 and the half-period shifts p, q
generate a group isomorphic to Z2^4; e3 (C -> -C with t -> -t) reverses
time and is kept out of the reduction subgroups.

Element words list the generators present with p, q first: "1", "p",
"pqe1", "e1e2", ...; subgroups are addressed by comma-joined generator
words such as "pqe1,pqe2".
"""

import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

from .truncation import ModeIndex, SpectralState, Truncation

logger = logging.getLogger(__name__)


class SymmetryError(ValueError):
    """Unknown symmetry, or a symmetry incompatible with the truncation."""


@dataclass(frozen=True)
class CoefficientMap:
    """Signed index permutation of the coefficients, optionally reversing time."""
    sign: int = 1
    parity: Tuple[int, int] = (0, 0)
    flip: Tuple[int, int] = (1, 1)
    time_reversal: bool = False
    name: str = field(default="", compare=False)

    def source(self, m: ModeIndex) -> Tuple[ModeIndex, int]:
        """(m', s') with new C_m = s' * old C_m'."""
        a, b = self.parity
        sign = self.sign * (-1) ** ((a * m[0] + b * m[1]) % 2)
        return ModeIndex(self.flip[0] * m[0], self.flip[1] * m[1]), sign

    def apply(self, state: SpectralState) -> SpectralState:
        truncation = state.truncation
        out = np.empty_like(state.coefficients)
        for m in truncation.modes:
            origin, sign = self.source(m)
            if origin not in truncation.position:
                raise SymmetryError(f"{self.label} maps mode {tuple(origin)} outside the truncation")
            out[truncation.position[m]] = sign * state.coefficients[truncation.position[origin]]
        return SpectralState(truncation, out)

    def matrix(self, truncation: Truncation) -> np.ndarray:
        """Action on the real coordinates (A_m, B_m)."""
        columns = [
            self.apply(SpectralState.from_real(truncation, e)).to_real()
            for e in np.eye(truncation.n_real)
        ]
        return np.column_stack(columns)

    def compose(self, other: "CoefficientMap") -> "CoefficientMap":
        """self after other."""
        return CoefficientMap(
            sign=self.sign * other.sign,
            parity=(self.parity[0] ^ other.parity[0], self.parity[1] ^ other.parity[1]),
            flip=(self.flip[0] * other.flip[0], self.flip[1] * other.flip[1]),
            time_reversal=self.time_reversal ^ other.time_reversal,
        )

    def __mul__(self, other: "CoefficientMap") -> "CoefficientMap":
        return self.compose(other)

    @property
    def is_identity(self) -> bool:
        return self == IDENTITY

    @property
    def label(self) -> str:
        return self.name or element_word(self)


IDENTITY = CoefficientMap(name="1")

_GENERATORS: Dict[str, CoefficientMap] = {
    "e1": CoefficientMap(sign=-1, flip=(1, -1), name="e1"),
    "e2": CoefficientMap(sign=-1, flip=(-1, 1), name="e2"),
    "p": CoefficientMap(parity=(1, 0), name="p"),
    "q": CoefficientMap(parity=(0, 1), name="q"),
    "e3": CoefficientMap(sign=-1, time_reversal=True, name="e3"),
}

# word order: p, q, then e1, e2
_WORD_ORDER = ("p", "q", "e1", "e2")
_TOKEN = re.compile(r"e1|e2|e3|p|q|1")


def induced_symmetry(name: str) -> CoefficientMap:
    try:
        return _GENERATORS[name]
    except KeyError:
        raise SymmetryError(f"Unknown symmetry {name!r} (known: {', '.join(_GENERATORS)})") from None


@lru_cache(maxsize=None)
def _group_elements() -> Dict[CoefficientMap, str]:
    """The 16 elements generated by e1, e2, p, q, keyed to their words."""
    elements: Dict[CoefficientMap, str] = {}
    for mask in range(16):
        element = IDENTITY
        letters = []
        for bit, letter in enumerate(_WORD_ORDER):
            if mask >> bit & 1:
                element = element * _GENERATORS[letter]
                letters.append(letter)
        elements[element] = "".join(letters) or "1"
    return elements


def element_word(element: CoefficientMap) -> str:
    elements = _group_elements()
    if element.time_reversal:
        base = element * _GENERATORS["e3"]
        return ("" if base.is_identity else element_word(base)) + "e3"
    if element not in elements:
        raise SymmetryError(f"{element} is not in the group generated by e1, e2, p, q")
    return elements[element]


def parse_word(word: str) -> CoefficientMap:
    """'pqe1' -> p*q*e1; '1' -> identity."""
    word = word.strip()
    tokens = _TOKEN.findall(word)
    if not word or "".join(tokens) != word:
        raise SymmetryError(f"Cannot parse symmetry word {word!r}")
    element = IDENTITY
    for token in tokens:
        if token != "1":
            element = element * induced_symmetry(token)
    return element


def _sort_key(element: CoefficientMap) -> Tuple[int, str]:
    word = element_word(element)
    return (0 if word == "1" else len(_TOKEN.findall(word)), word)


# ── Subgroups ─────────────────────────────────────────────────────────
@dataclass(frozen=True)
class Subgroup:
    """Finite subgroup of the reduction group, closed under composition."""
    elements: FrozenSet[CoefficientMap]

    def __post_init__(self):
        elements = frozenset(self.elements)
        object.__setattr__(self, "elements", elements)
        if IDENTITY not in elements:
            raise SymmetryError("Subgroup must contain the identity")
        for g in elements:
            if g.time_reversal:
                raise SymmetryError("e3 acts on time and is excluded from reduction subgroups")
            for h in elements:
                if g * h not in elements:
                    raise SymmetryError(f"Not closed: {element_word(g)}*{element_word(h)} missing")

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def sorted_elements(self) -> List[CoefficientMap]:
        return sorted(self.elements, key=_sort_key)

    @property
    def element_words(self) -> List[str]:
        return [element_word(g) for g in self.sorted_elements]

    @property
    def generator_words(self) -> List[str]:
        """A minimal generating set, picked greedily from the longest words."""
        chosen: List[CoefficientMap] = []
        span = {IDENTITY}
        for g in sorted(self.elements, key=_sort_key, reverse=True):
            if g in span:
                continue
            chosen.append(g)
            span |= {g * h for h in span}
        return [element_word(g) for g in sorted(chosen, key=_sort_key)]

    @property
    def name(self) -> str:
        return ",".join(self.generator_words) or "1"

    def __contains__(self, element: CoefficientMap) -> bool:
        return element in self.elements


def generated_subgroup(generators: Iterable[CoefficientMap]) -> Subgroup:
    elements = {IDENTITY}
    frontier = list(generators)
    while frontier:
        g = frontier.pop()
        if g in elements:
            continue
        new = {g * h for h in elements} | {g}
        frontier.extend(new - elements)
        elements |= new
    return Subgroup(frozenset(elements))


def subgroup_from_words(words: Sequence[str]) -> Subgroup:
    """Subgroup generated by words, e.g. ["pqe1", "pqe2"] or ["pqe1,pqe2"]."""
    flat = [w for word in words for w in word.split(",") if w.strip()]
    return generated_subgroup(parse_word(w) for w in flat)


def enumerate_subgroups() -> List[Subgroup]:
    """All subgroups of the group generated by e1, e2, p, q, by closure."""
    group = list(_group_elements())
    found = {frozenset({IDENTITY})}
    queue = [frozenset({IDENTITY})]
    while queue:
        current = queue.pop()
        for g in group:
            if g in current:
                continue
            extended = generated_subgroup(list(current) + [g]).elements
            if extended not in found:
                found.add(extended)
                queue.append(extended)
    subgroups = [Subgroup(elements) for elements in found]
    subgroups.sort(key=lambda s: (s.order, [_sort_key(g) for g in s.sorted_elements]))
    logger.debug("Enumerated %d subgroups of a group of order %d", len(subgroups), len(group))
    return subgroups


LORENZ_SUBGROUP_WORDS = ("pqe1", "pqe2")


def lorenz_subgroup() -> Subgroup:
    """{1, pqe1, pqe2, e1e2}."""
    return subgroup_from_words(LORENZ_SUBGROUP_WORDS)
