"""Reduced finite-mode models on fixed-point subspaces of symmetry subgroups.

The fixed subspace of a subgroup S is {y : R_g y = y for all g in S} in the
real coordinates of a truncation. It is parametrized by a subset of the
coordinates (the pivots, chosen greedily in coordinate order) through an
embedding matrix M with M[pivots] = I, so that y = M z. Restricting the
quadratic tensor of the truncation to y = M z gives the reduced model

    dz_i/dt = sum_{j <= k} c_ijk z_j z_k.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.linalg import null_space

from ..config import CONFIG
from .symmetries import Subgroup, enumerate_subgroups, lorenz_subgroup
from .truncation import SpectralModel, Truncation

logger = logging.getLogger(__name__)

# relative threshold below which reduced coefficients count as zero
COEFFICIENT_CUTOFF = 1e-13
# entries of the embedding this close to an integer are snapped to it
SNAP_TOLERANCE = 1e-12


class InvarianceError(ValueError):
    """A subspace is not invariant under the truncated dynamics."""

    def __init__(self, message: str, direction: Optional[np.ndarray] = None):
        super().__init__(message)
        self.direction = direction


# ── Fixed subspaces ───────────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class FixedSubspace:
    truncation: Truncation
    subgroup: Subgroup
    basis: np.ndarray        # orthonormal columns
    pivots: Tuple[int, ...]
    embedding: np.ndarray    # y = embedding @ y[pivots]

    @property
    def dimension(self) -> int:
        return len(self.pivots)

    @property
    def coordinates(self) -> Tuple[str, ...]:
        labels = self.truncation.labels
        return tuple(labels[i] for i in self.pivots)

    @property
    def constraints(self) -> List[str]:
        """Dependent coordinates in terms of the free ones, e.g. 'A11 = -A1-1'."""
        labels = self.truncation.labels
        free = self.coordinates
        out = []
        for i, row in enumerate(self.embedding):
            if i in self.pivots:
                continue
            out.append(f"{labels[i]} = {_linear_combination(row, free)}")
        return out

    def embed(self, z: Sequence[float]) -> np.ndarray:
        return self.embedding @ np.asarray(z, dtype=float)

    def deviation(self, states: np.ndarray) -> float:
        """Max |y - M y[pivots]| over the given states (rows)."""
        states = np.atleast_2d(states)
        residual = states - states[:, list(self.pivots)] @ self.embedding.T
        return float(np.max(np.abs(residual))) if residual.size else 0.0


def _linear_combination(row: np.ndarray, names: Sequence[str]) -> str:
    parts = []
    for c, name in zip(row, names):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        magnitude = "" if abs(c) == 1 else f"{abs(c):g}*"
        parts.append(f"{sign} {magnitude}{name}")
    if not parts:
        return "0"
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def _greedy_pivots(basis: np.ndarray) -> Tuple[int, ...]:
    pivots: List[int] = []
    if basis.shape[1] == 0:
        return ()
    for i in range(basis.shape[0]):
        candidate = pivots + [i]
        if np.linalg.matrix_rank(basis[candidate]) == len(candidate):
            pivots = candidate
        if len(pivots) == basis.shape[1]:
            break
    return tuple(pivots)


def fixed_subspace(S: Subgroup, truncation: Truncation) -> FixedSubspace:
    n = truncation.n_real
    stacked = np.vstack([g.matrix(truncation) - np.eye(n) for g in S.sorted_elements])
    basis = null_space(stacked)
    pivots = _greedy_pivots(basis)
    embedding = np.zeros((n, 0))
    if pivots:
        embedding = basis @ np.linalg.inv(basis[list(pivots)])
        nearest = np.round(embedding) + 0.0
        embedding = np.where(np.abs(embedding - nearest) <= SNAP_TOLERANCE, nearest, embedding)
    logger.debug("Fixed subspace of <%s>: dimension %d", S.name, len(pivots))
    return FixedSubspace(truncation, S, basis, pivots, embedding)


def check_invariance(model: SpectralModel, embedding: np.ndarray,
                     rng: Optional[np.random.Generator] = None,
                     n_samples: Optional[int] = None,
                     tolerance: Optional[float] = None) -> float:
    """Max orthogonal component of rhs(M z) at random z; raises if above tolerance."""
    rng = rng or np.random.default_rng(CONFIG.random_seed)
    n_samples = n_samples or CONFIG.invariance_samples
    tol = CONFIG.invariance_tolerance if tolerance is None else tolerance
    if embedding.shape[1] == 0:
        return 0.0
    projector_basis, _ = np.linalg.qr(embedding)
    worst, direction = 0.0, None
    for _ in range(n_samples):
        f = model.rhs(embedding @ rng.standard_normal(embedding.shape[1]))
        orthogonal = f - projector_basis @ (projector_basis.T @ f)
        size = float(np.max(np.abs(orthogonal))) / max(1.0, float(np.max(np.abs(f))))
        if size > worst:
            worst, direction = size, orthogonal
    if worst > tol:
        labels = model.labels
        leading = ", ".join(f"{labels[i]}: {direction[i]:.3e}" for i in np.argsort(-np.abs(direction))[:3])
        raise InvarianceError(f"Subspace not invariant (relative leak {worst:.3e}; {leading})", direction)
    return worst


# ── Reduced model ─────────────────────────────────────────────────────
@dataclass(frozen=True)
class ReducedTerm:
    target: str
    coeff: float
    factors: Tuple[str, str]

    def to_dict(self) -> Dict[str, Any]:
        return {"target": self.target, "coeff": self.coeff, "factors": list(self.factors)}


@dataclass(frozen=True, eq=False)
class ReducedModel:
    """Autonomous quadratic ODE system over named real amplitudes."""
    name = "reduced"

    amplitudes: Tuple[str, ...]
    terms: Tuple[ReducedTerm, ...]
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(self.amplitudes))
        object.__setattr__(self, "terms", tuple(self.terms))
        known = set(self.amplitudes)
        for term in self.terms:
            if term.target not in known or not set(term.factors) <= known:
                raise ValueError(f"Term {term} refers to unknown amplitudes (known: {self.amplitudes})")

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.amplitudes

    @property
    def dimension(self) -> int:
        return len(self.amplitudes)

    @property
    def tensor(self) -> np.ndarray:
        index = {a: i for i, a in enumerate(self.amplitudes)}
        n = len(self.amplitudes)
        Q = np.zeros((n, n, n))
        for term in self.terms:
            j, k = (index[f] for f in term.factors)
            Q[index[term.target], j, k] += term.coeff
        return Q

    def rhs(self, z: np.ndarray) -> np.ndarray:
        return np.einsum("ijk,j,k->i", self._compiled, z, z)

    @property
    def _compiled(self) -> np.ndarray:
        cached = self.__dict__.get("_tensor_cache")
        if cached is None:
            cached = self.tensor
            object.__setattr__(self, "_tensor_cache", cached)
        return cached

    def coefficient(self, target: str, factors: Sequence[str]) -> float:
        wanted = sorted(factors)
        return sum(t.coeff for t in self.terms if t.target == target and sorted(t.factors) == wanted)

    # ── Embedding and invariants ──────────────────────────────────────
    @property
    def embedding(self) -> Optional[np.ndarray]:
        rows = self.provenance.get("embedding")
        return None if rows is None else np.asarray(rows, dtype=float)

    @property
    def truncation(self) -> Optional[Truncation]:
        doc = self.provenance.get("truncation")
        if doc is None:
            return None
        return Truncation(tuple(tuple(m) for m in doc["modes"]), doc["k"], doc["l"])

    def embed(self, z: Sequence[float]) -> np.ndarray:
        if self.embedding is None:
            raise ValueError("Model carries no embedding into a truncation")
        return np.asarray(z, dtype=float) @ self.embedding.T

    def _full_model(self) -> SpectralModel:
        cached = self.__dict__.get("_full_cache")
        if cached is None:
            if self.truncation is None:
                raise ValueError("Model carries no truncation; invariants are undefined")
            cached = SpectralModel(self.truncation)
            object.__setattr__(self, "_full_cache", cached)
        return cached

    def energy(self, states: np.ndarray) -> np.ndarray:
        """Twice the truncation energy of the embedded state(s)."""
        return 2.0 * self._full_model().energy(self.embed(states))

    def enstrophy(self, states: np.ndarray) -> np.ndarray:
        return 2.0 * self._full_model().enstrophy(self.embed(states))

    # ── Renaming and serialization ────────────────────────────────────
    def renamed(self, mapping: Mapping[str, str], order: Optional[Sequence[str]] = None) -> "ReducedModel":
        """Rename amplitudes; `order` (new names) fixes the new amplitude order."""
        new_names = [mapping.get(a, a) for a in self.amplitudes]
        order = list(order) if order is not None else new_names
        if sorted(order) != sorted(new_names):
            raise ValueError(f"Order {order} is not a permutation of {new_names}")
        rank = {name: i for i, name in enumerate(order)}
        terms = []
        for term in self.terms:
            factors = tuple(sorted((mapping.get(f, f) for f in term.factors), key=rank.__getitem__))
            terms.append(ReducedTerm(mapping.get(term.target, term.target), term.coeff, factors))
        terms.sort(key=lambda t: (rank[t.target], rank[t.factors[0]], rank[t.factors[1]]))
        provenance = dict(self.provenance)
        if self.embedding is not None:
            permutation = [new_names.index(name) for name in order]
            provenance["embedding"] = self.embedding[:, permutation].tolist()
        provenance["coordinates"] = {mapping.get(a, a): self.provenance.get("coordinates", {}).get(a, a)
                                     for a in self.amplitudes}
        return ReducedModel(tuple(order), tuple(terms), provenance)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "amplitudes": list(self.amplitudes),
            "terms": [t.to_dict() for t in self.terms],
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ReducedModel":
        terms = tuple(ReducedTerm(t["target"], float(t["coeff"]), tuple(t["factors"])) for t in doc["terms"])
        return cls(tuple(doc["amplitudes"]), terms, dict(doc.get("provenance", {})))


def reduce_model(S: Subgroup, truncation: Truncation,
                 k: Optional[float] = None, l: Optional[float] = None,
                 rng: Optional[np.random.Generator] = None) -> ReducedModel:
    """Restrict the truncated dynamics to the fixed subspace of S."""
    truncation = truncation.with_wavenumbers(k, l)
    subspace = fixed_subspace(S, truncation)
    model = SpectralModel(truncation)
    check_invariance(model, subspace.embedding, rng)

    M = subspace.embedding
    pivots = list(subspace.pivots)
    restricted = np.einsum("iab,aj,bk->ijk", model.tensor[pivots], M, M)
    names = subspace.coordinates

    d = len(names)
    raw = []
    for i in range(d):
        for j in range(d):
            for kk in range(j, d):
                c = restricted[i, j, kk] + restricted[i, kk, j] if j != kk else restricted[i, j, j]
                raw.append((i, j, kk, float(c)))
    scale = max((abs(c) for *_, c in raw), default=0.0)
    terms, dropped = [], 0
    for i, j, kk, c in raw:
        if abs(c) <= COEFFICIENT_CUTOFF * scale:
            dropped += c != 0.0
            continue
        terms.append(ReducedTerm(names[i], c, (names[j], names[kk])))
    if dropped:
        logger.debug("Dropped %d rounding-level coefficients from the <%s> model", dropped, S.name)

    provenance = {
        "subgroup": {"generators": S.generator_words, "elements": S.element_words},
        "truncation": truncation.to_dict(),
        "k": truncation.k,
        "l": truncation.l,
        "constraints": subspace.constraints,
        "coordinates": {name: name for name in names},
        "embedding": M.tolist(),
    }
    logger.info("Reduced model for <%s>: %d amplitudes, %d terms", S.name, d, len(terms))
    return ReducedModel(names, tuple(terms), provenance)


LORENZ_NAMES = {"A01": "A", "A10": "F", "A1-1": "G"}


def lorenz1960(k: float, l: float) -> ReducedModel:
    """Three-component model of the subgroup {1, pqe1, pqe2, e1e2}, amplitudes A, F, G."""
    model = reduce_model(lorenz_subgroup(), Truncation.square(1), k, l)
    return model.renamed(LORENZ_NAMES, order=("A", "F", "G"))


def lorenz1960_coefficients(k: float, l: float) -> Dict[str, float]:
    """Closed-form coefficients of FG in dA, AG in dF and AF in dG."""
    kl, k2, l2 = k * l, k**2, l**2
    return {
        "A": -(1 / k2 - 1 / (k2 + l2)) * kl,
        "F": (1 / l2 - 1 / (k2 + l2)) * kl,
        "G": -0.5 * (1 / l2 - 1 / k2) * kl,
    }


def subgroup_table(truncation: Optional[Truncation] = None,
                   subgroups: Optional[Sequence[Subgroup]] = None) -> pd.DataFrame:
    truncation = truncation or Truncation.square(1)
    rows = []
    for S in subgroups if subgroups is not None else enumerate_subgroups():
        subspace = fixed_subspace(S, truncation)
        rows.append({
            "generators": S.name,
            "elements": ",".join(S.element_words),
            "order": S.order,
            "dimension": subspace.dimension,
            "coordinates": ",".join(subspace.coordinates),
            "constraints": "; ".join(subspace.constraints),
        })
    return pd.DataFrame(rows, columns=["generators", "elements", "order", "dimension", "coordinates", "constraints"])

