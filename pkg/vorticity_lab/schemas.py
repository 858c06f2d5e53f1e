"""Pydantic v2 schemas for run configs and the JSON documents the CLI writes."""

from __future__ import annotations

from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

from .config import CONFIG

# number, expression string in t, or {"preset": name, **kwargs}
TimeFunctionSpec = Union[float, str, Dict[str, Any]]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ───────────────────────── Solution families ─────────────────────────
class RossbySpec(StrictModel):
    family: Literal["rossby"] = "rossby"
    A: float = 1.0
    k: float = 1.0
    l: float = 1.0
    beta: float = 1.0


class KleinGordonSpec(StrictModel):
    family: Literal["klein_gordon"] = "klein_gordon"
    beta: float = Field(1.0, description="must be nonzero")
    alpha: Optional[float] = 1.0
    amplitude: float = 1.0
    v: Optional[str] = Field(None, description="user solution v~(p, q) of v_pq + beta v = 0")
    f: TimeFunctionSpec = 0.0
    h: TimeFunctionSpec = 0.0


class EtaConstantSpec(StrictModel):
    family: Literal["eta_constant"] = "eta_constant"
    beta: float = 1.0
    harmonic: str = "x**2 - y**2"
    eta: TimeFunctionSpec = 0.0


class EtaGeneralSpec(StrictModel):
    family: Literal["eta_general"] = "eta_general"
    beta: float = 1.0
    profile: str = "sin(omega)"
    g1: TimeFunctionSpec = 1.0
    g0: TimeFunctionSpec = "t"
    f1: TimeFunctionSpec = 0.0
    f0: TimeFunctionSpec = 0.0


class ZonalSpec(StrictModel):
    family: Literal["zonal"] = "zonal"
    profile: str = "mu**2"
    omega: float = 0.0
    a: float = Field(1.0, gt=0)


class SphericalHarmonicSpec(StrictModel):
    family: Literal["spherical_harmonic"] = "spherical_harmonic"
    n: int = Field(2, ge=1)
    m: int = Field(1, ge=0)
    amplitude: float = 1.0
    phase: float = 0.0
    omega: float = 0.0
    a: float = Field(1.0, gt=0)


class PlaneWavesSpec(StrictModel):
    family: Literal["plane_waves"] = "plane_waves"
    amplitudes: List[float] = Field(default_factory=lambda: [1.0, 0.5])
    wavevectors: List[Tuple[float, float]] = Field(default_factory=lambda: [(1.0, 0.0), (0.0, 1.0)])
    phases: Optional[List[float]] = None
    F: Optional[float] = Field(None, gt=0, description="check against the potential equation when set")


SolutionSpec = Annotated[
    Union[RossbySpec, KleinGordonSpec, EtaConstantSpec, EtaGeneralSpec,
          ZonalSpec, SphericalHarmonicSpec, PlaneWavesSpec],
    Field(discriminator="family"),
]


# ───────────────────────── Run configs ─────────────────────────
class ListSubgroupsConfig(StrictModel):
    command: Literal["list-subgroups"] = "list-subgroups"
    truncation: int = Field(1, ge=1, le=CONFIG.max_mode)
    output: Optional[str] = None


class ReduceConfig(StrictModel):
    command: Literal["reduce"] = "reduce"
    subgroup: List[str] = Field(..., min_length=1, description="generator words, e.g. ['pqe1', 'pqe2']")
    truncation: int = Field(1, ge=1, le=CONFIG.max_mode)
    k: float = Field(1.0, gt=0)
    l: float = Field(1.0, gt=0)
    output: Optional[str] = None


class Lorenz1960Config(StrictModel):
    command: Literal["lorenz1960"] = "lorenz1960"
    k: float = Field(1.0, gt=0)
    l: float = Field(2.0, gt=0)
    output: Optional[str] = None


class IntegrateConfig(StrictModel):
    command: Literal["integrate"] = "integrate"
    model: Literal["lorenz1960", "truncation", "reduced"] = "lorenz1960"
    subgroup: Optional[List[str]] = None
    truncation: int = Field(1, ge=1, le=CONFIG.max_mode)
    wavenumbers: List[Tuple[float, float]] = Field(default_factory=lambda: [(1.0, 2.0)], min_length=1)
    initial: Optional[List[float]] = None
    dt: float = Field(CONFIG.dt, gt=0)
    t_end: float = Field(10.0, gt=0)
    sample_stride: int = Field(CONFIG.sample_stride, ge=1)
    output_dir: str = "."
    prefix: str = "trajectory"

    @field_validator("wavenumbers")
    @classmethod
    def _positive_wavenumbers(cls, value):
        if any(k <= 0 or l <= 0 for k, l in value):
            raise ValueError("wavenumbers must be positive")
        return value

    @model_validator(mode="after")
    def _subgroup_for_reduced(self):
        if self.model == "reduced" and not self.subgroup:
            raise ValueError("model 'reduced' needs a subgroup")
        return self


class VerifySolutionConfig(StrictModel):
    command: Literal["verify-solution"] = "verify-solution"
    solution: SolutionSpec
    tolerance: Optional[float] = Field(None, gt=0)
    output: Optional[str] = None


class TransformConfig(StrictModel):
    command: Literal["transform"] = "transform"
    map: Literal["spherical_derotation", "potential_translation"]
    omega: float = 1.0
    a: float = Field(1.0, gt=0)
    beta: float = 1.0
    F: float = Field(1.0, gt=0)
    solution: SolutionSpec
    tolerance: Optional[float] = Field(None, gt=0)
    output: Optional[str] = None


class BracketTableConfig(StrictModel):
    command: Literal["bracket-table"] = "bracket-table"
    kind: Literal["cartesian", "spherical"] = "cartesian"
    beta: float = 1.0
    omega: float = 0.0
    f: TimeFunctionSpec = "t"
    g: TimeFunctionSpec = {"preset": "sinusoidal"}
    output: Optional[str] = None


RunConfig = Annotated[
    Union[ListSubgroupsConfig, ReduceConfig, Lorenz1960Config, IntegrateConfig,
          VerifySolutionConfig, TransformConfig, BracketTableConfig],
    Field(discriminator="command"),
]

RUN_CONFIG_ADAPTER = TypeAdapter(RunConfig)


# ───────────────────────── Output documents ─────────────────────────
class TermDoc(BaseModel):
    target: str
    coeff: float
    factors: Tuple[str, str]


class ReducedModelDoc(BaseModel):
    amplitudes: List[str]
    terms: List[TermDoc]
    provenance: Dict[str, Any]


class ResidualDoc(BaseModel):
    family: str
    equation: Dict[str, Any]
    field: Any
    max_abs: float
    rms: float
    worst_point: Dict[str, float]
    n_points: int
    tolerance: float
    status: Literal["PASS", "FAIL"]


class DriftDoc(BaseModel):
    model: str
    k: float
    l: float
    E_initial: float
    Z_initial: float
    E_drift: float
    Z_drift: float
    trajectory: str


class SubgroupRowDoc(BaseModel):
    generators: str
    elements: str
    order: int
    dimension: int
    coordinates: str
    constraints: str


class SubgroupTableDoc(BaseModel):
    truncation: Dict[str, Any]
    count: int
    subgroups: List[SubgroupRowDoc]


class BracketEntryDoc(BaseModel):
    left: str
    right: str
    bracket: Dict[str, Any]
    coefficients: Dict[str, float]
    residual: float


class BracketTableDoc(BaseModel):
    kind: str
    basis: List[str]
    entries: List[BracketEntryDoc]


class ResidualSummaryDoc(BaseModel):
    max_abs: float
    rms: float
    worst_point: Dict[str, float]
    n_points: int


class TransformDoc(BaseModel):
    map: str
    params: Dict[str, float]
    forward: List[str]
    nonrotating: ResidualSummaryDoc
    rotating: ResidualSummaryDoc
    transported: Any
    tolerance: float
    status: Literal["PASS", "FAIL"]
