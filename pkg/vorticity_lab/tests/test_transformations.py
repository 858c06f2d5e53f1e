"""Tests for the rotation-cancelling point transformations."""

import math

import numpy as np
import pytest

from ..fields import CARTESIAN, SPHERICAL, AnalyticField, EquationParams, residual
from ..solutions import spherical_harmonic_wave, steady_plane_waves, zonal_flow
from ..symmetry import (
    NonInvertibleTransformationError,
    PointTransformation,
    TransformationError,
    build_map,
    compose,
    identity,
    transport_solution,
    verify_equivalence,
)


# ── Test Fixtures ─────────────────────────────────────────────────────
ROTATION_RATES = (-2.0, 1.0, 7.292e-5)


def _random_zonal_profile(rng: np.random.Generator) -> str:
    degree = int(rng.integers(1, 6))
    coefficients = np.round(rng.uniform(-1, 1, size=degree + 1), 4)
    return " + ".join(f"({c})*mu**{i}" for i, c in enumerate(coefficients))


def _max_difference(a: AnalyticField, b: AnalyticField, grid_points: dict) -> float:
    return float(np.max(np.abs(a.evaluate(grid_points) - b.evaluate(grid_points))))


CARTESIAN_POINTS = {
    "t": np.linspace(-1, 1, 5)[:, None, None],
    "x": np.linspace(-2, 2, 7)[None, :, None],
    "y": np.linspace(-1, 1, 6)[None, None, :],
}


# ═══════════════════════════════════════════════════════════════════════
# MAPS
# ═══════════════════════════════════════════════════════════════════════

def test_derotation_map_example():
    T = build_map("spherical_derotation", {"omega": 1.0})
    image = T.apply({"t": math.pi, "lam": 0.0, "mu": 0.5, "psi": 3.0})
    assert float(image["t"]) == pytest.approx(math.pi)
    assert float(image["lam"]) == pytest.approx(math.pi)
    assert float(image["mu"]) == pytest.approx(0.5)
    assert float(image["psi"]) == pytest.approx(2.5)


def test_potential_translation_example():
    T = build_map("potential_translation", EquationParams.potential(beta=2.0, F=1.0))
    image = T.apply({"t": 1.0, "x": 0.0, "y": 0.0, "psi": 0.0})
    assert float(image["x"]) == pytest.approx(2.0)
    assert float(image["psi"]) == pytest.approx(0.0)
    image = T.apply({"t": 0.0, "x": 0.0, "y": 1.5, "psi": 1.0})
    assert float(image["psi"]) == pytest.approx(1.0 - 2.0 * 1.5)


def test_derotation_without_rotation_is_identity():
    T = build_map("spherical_derotation", {"omega": 0.0})
    point = {"t": 0.4, "lam": 1.2, "mu": -0.3, "psi": 2.0}
    image = T.apply(point)
    for c, v in point.items():
        assert float(image[c]) == v


def test_maps_roundtrip():
    rng = np.random.default_rng(2009)
    for omega in (0.3, -1.7, 7.292e-5):
        assert build_map("spherical_derotation", {"omega": omega}).roundtrip_error(rng=rng) <= 1e-13
    for beta, F in ((1.0, 1.0), (-3.0, 0.25), (0.5, 4.0)):
        T = build_map("potential_translation", {"beta": beta, "F": F})
        assert T.roundtrip_error(rng=rng) <= 1e-13


def test_potential_translation_needs_nonzero_F():
    with pytest.raises(TransformationError):
        build_map("potential_translation", {"beta": 1.0, "F": 0.0})
    with pytest.raises(TransformationError):
        build_map("potential_translation", {"beta": 1.0})
    with pytest.raises(TransformationError):
        build_map("mercator", {"omega": 1.0})


def test_composition_with_opposite_beta_is_identity():
    F = 2.0
    there = build_map("potential_translation", {"beta": 1.5, "F": F})
    back = build_map("potential_translation", {"beta": -1.5, "F": F})
    both = compose(back, there)
    rng = np.random.default_rng(4)
    point = {c: rng.uniform(-1, 1, size=20) for c in both.coordinates}
    image = both.apply(point)
    reference = identity(CARTESIAN).apply(point)
    for c in both.coordinates:
        assert np.max(np.abs(image[c] - reference[c])) <= 1e-14


def test_transport_is_functorial():
    psi = AnalyticField.parse("sin(x)*cos(y) + t*y", CARTESIAN)
    T1 = build_map("potential_translation", {"beta": 0.7, "F": 1.0})
    T2 = build_map("potential_translation", {"beta": -0.2, "F": 1.0})
    stepwise = transport_solution(T2, transport_solution(T1, psi))
    combined = transport_solution(compose(T2, T1), psi)
    assert _max_difference(stepwise, combined, CARTESIAN_POINTS) <= 1e-12


def test_transformation_without_inverse():
    squash = PointTransformation.from_maps(("t", "x", "y"), {"x": "x**3 + x"}, None, "flow")
    with pytest.raises(NonInvertibleTransformationError):
        squash.inverted()
    with pytest.raises(NonInvertibleTransformationError):
        squash.apply_inverse({"t": 0.0, "x": 1.0, "y": 0.0, "psi": 0.0})


def test_transport_direction():
    psi = AnalyticField.parse("x*y", CARTESIAN)
    T = build_map("potential_translation", {"beta": 1.0, "F": 1.0})
    there = transport_solution(T, psi, "forward")
    back = transport_solution(T, there, "inverse")
    assert _max_difference(back, psi, CARTESIAN_POINTS) <= 1e-12
    with pytest.raises(TransformationError):
        transport_solution(T, psi, "sideways")


# ═══════════════════════════════════════════════════════════════════════
# SOLUTIONS OF THE ROTATING EQUATIONS
# ═══════════════════════════════════════════════════════════════════════

def test_transport_of_zonal_flow_adds_solid_body_rotation():
    T = build_map("spherical_derotation", {"omega": 1.0})
    rotating = transport_solution(T, zonal_flow("mu**2"), "inverse")
    for mu in (-0.5, 0.1, 0.8):
        assert rotating(t=0.3, lam=2.0, mu=mu) == pytest.approx(mu**2 + mu, abs=1e-15)
    assert residual(rotating, EquationParams.spherical(1.0)).max_abs <= 1e-10


def test_random_zonal_flows_on_rotating_sphere():
    rng = np.random.default_rng(2009)
    for _ in range(20):
        seed = zonal_flow(_random_zonal_profile(rng))
        for omega in ROTATION_RATES:
            T = build_map("spherical_derotation", {"omega": omega})
            report = verify_equivalence(T, seed, EquationParams.spherical(omega), EquationParams.spherical(0.0))
            assert report.passed, f"Omega={omega}: {report.rotating.max_abs:.3e}"


def test_travelling_spherical_harmonic():
    omega = 0.8
    T = build_map("spherical_derotation", {"omega": omega})
    seed = spherical_harmonic_wave(3, 2, amplitude=0.5, phase=0.3)
    report = verify_equivalence(T, seed, EquationParams.spherical(omega), EquationParams.spherical(0.0))
    assert report.passed
    assert report.to_dict()["status"] == "PASS"


def test_random_plane_waves_on_potential_equation():
    rng = np.random.default_rng(11)
    for _ in range(5):
        beta = float(rng.uniform(-2, 2))
        F = float(rng.uniform(0.2, 3))
        kappa = float(rng.uniform(0.5, 2))
        angles = rng.uniform(0, 2 * math.pi, size=3)
        wavevectors = [(kappa * math.cos(a), kappa * math.sin(a)) for a in angles]
        seed = steady_plane_waves(list(rng.uniform(-1, 1, size=3)), wavevectors, list(rng.uniform(0, 1, size=3)))
        T = build_map("potential_translation", {"beta": beta, "F": F})
        report = verify_equivalence(T, seed, EquationParams.potential(beta, F), EquationParams.potential(0.0, F))
        assert report.passed, f"beta={beta}, F={F}: {report.rotating.max_abs:.3e}"


def test_non_solutions_fail_on_both_sides():
    T = build_map("potential_translation", {"beta": 1.0, "F": 1.0})
    psi = AnalyticField.parse("t*sin(x)", CARTESIAN)
    report = verify_equivalence(T, psi, EquationParams.potential(1.0, 1.0), EquationParams.potential(0.0, 1.0))
    assert not report.passed
    assert report.nonrotating.max_abs > 1e-2
    assert report.rotating.max_abs > 1e-2

    T = build_map("spherical_derotation", {"omega": 1.0})
    psi = AnalyticField.parse("t*mu", SPHERICAL)
    report = verify_equivalence(T, psi, EquationParams.spherical(1.0), EquationParams.spherical(0.0))
    assert not report.passed
    assert report.nonrotating.max_abs > 1e-2
    assert report.rotating.max_abs > 1e-2


def test_equation_kind_mismatch():
    T = build_map("spherical_derotation", {"omega": 1.0})
    with pytest.raises(TransformationError):
        verify_equivalence(T, zonal_flow("mu"), EquationParams.spherical(1.0), EquationParams.cartesian(0.0))
    P = build_map("potential_translation", {"beta": 1.0, "F": 1.0})
    with pytest.raises(TransformationError):
        verify_equivalence(P, zonal_flow("mu"), EquationParams.spherical(1.0), EquationParams.spherical(0.0))
