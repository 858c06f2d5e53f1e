"""Tests for closed-form flows and the images of solutions under them."""

import math

import numpy as np
import pytest

from ..fields import EquationParams, residual
from ..fields.time_functions import polynomial, sinusoidal
from ..solutions import rossby_wave, spherical_harmonic_wave, zonal_flow
from ..symmetry import NoClosedFormFlowError, build_map, catalog, flow, map_solution, transport_solution
from ..symmetry.generators import psi_shift, scaling, x_shift
from ..symmetry.sampling import sample_coordinates


# ── Test Fixtures ─────────────────────────────────────────────────────
BETA = 1.0
EPSILONS = (0.1, -0.1, 1.0, -1.0)
ROTATION_EPSILONS = (0.3, -0.3)


def _cartesian_basis():
    return catalog("cartesian", EquationParams.cartesian(BETA),
                   {"f": polynomial([0.0, 0.0, 1.0], name="f"), "g": sinusoidal(name="g")})


# ═══════════════════════════════════════════════════════════════════════
# POINT MAPS
# ═══════════════════════════════════════════════════════════════════════

def test_scaling_flow_at_log_two():
    T = flow(scaling("cartesian"), math.log(2.0))
    image = T.apply({"t": 1.0, "x": 1.0, "y": 1.0, "psi": 1.0})
    assert float(image["t"]) == pytest.approx(2.0, rel=1e-14)
    assert float(image["x"]) == pytest.approx(0.5, rel=1e-14)
    assert float(image["y"]) == pytest.approx(0.5, rel=1e-14)
    assert float(image["psi"]) == pytest.approx(0.125, rel=1e-14)


def test_x_shift_flow():
    f = sinusoidal(name="f")
    T = flow(x_shift(f), 1.0)
    t, x, y, psi = 0.7, 0.2, -1.3, 0.4
    image = T.apply({"t": t, "x": x, "y": y, "psi": psi})
    assert float(image["t"]) == t
    assert float(image["x"]) == pytest.approx(x + math.sin(t), abs=1e-15)
    assert float(image["y"]) == y
    assert float(image["psi"]) == pytest.approx(psi - math.cos(t) * y, abs=1e-15)


def test_psi_shift_flow():
    g = polynomial([1.0, 2.0], name="g")
    T = flow(psi_shift(g), 0.25)
    image = T.apply({"t": 2.0, "x": 0.0, "y": 0.0, "psi": 1.0})
    assert float(image["psi"]) == pytest.approx(1.0 + 0.25 * 5.0)


def test_flows_invert_with_negative_time():
    rng = np.random.default_rng(17)
    for V in _cartesian_basis():
        for eps in EPSILONS:
            there = flow(V, eps)
            back = flow(V, -eps)
            point = sample_coordinates(there.coordinates, 30, rng)
            again = back.apply(there.apply(point))
            for c in there.coordinates:
                assert np.max(np.abs(again[c] - point[c])) <= 1e-12
            assert there.roundtrip_error(rng=rng) <= 1e-12


def test_generator_without_closed_form_flow():
    V = scaling("cartesian") + x_shift(sinusoidal(name="f"))
    with pytest.raises(NoClosedFormFlowError):
        flow(V, 0.5)


# ═══════════════════════════════════════════════════════════════════════
# SOLUTIONS MAP TO SOLUTIONS
# ═══════════════════════════════════════════════════════════════════════

def test_cartesian_flows_preserve_rossby_solutions():
    psi = rossby_wave(1.0, 1.0, 1.0, BETA)
    params = EquationParams.cartesian(BETA)
    assert residual(psi, params).max_abs <= 1e-12
    for V in _cartesian_basis():
        for eps in EPSILONS:
            image = map_solution(flow(V, eps), psi)
            report = residual(image, params)
            assert report.max_abs <= 1e-10, f"{V.name} at eps={eps}: {report.max_abs:.3e}"


def test_x_shift_flow_is_a_symmetry_for_any_beta():
    f = polynomial([0.0, 1.0, 1.0], name="f")
    for beta in (0.0, 2.5, -4.0):
        psi = rossby_wave(0.7, 1.0, 2.0, beta)
        image = map_solution(flow(x_shift(f), 0.8), psi)
        assert residual(image, EquationParams.cartesian(beta)).max_abs <= 1e-10


def test_spherical_flows_preserve_solutions():
    seed = spherical_harmonic_wave(2, 1)
    for omega in (0.0, 0.5):
        params = EquationParams.spherical(omega)
        psi = transport_solution(build_map("spherical_derotation", {"omega": omega}), seed, "inverse")
        assert residual(psi, params).max_abs <= 1e-10
        basis = catalog("spherical", params, {"g": sinusoidal(name="g")})
        for V in basis:
            epsilons = ROTATION_EPSILONS if V.name in ("J2", "J3") else EPSILONS
            for eps in epsilons:
                image = map_solution(flow(V, eps), psi)
                report = residual(image, params)
                assert report.max_abs <= 1e-10, f"{V.name} at Omega={omega}, eps={eps}: {report.max_abs:.3e}"


def test_rotations_move_zonal_flow_off_the_axis():
    omega = 0.5
    params = EquationParams.spherical(omega)
    psi = zonal_flow("mu**2 + 0.5*mu")
    assert residual(psi, params).max_abs <= 1e-12
    J2 = catalog("spherical", params, {"g": 1.0})[4]
    image = map_solution(flow(J2, 0.3), psi)
    assert residual(image, params).max_abs <= 1e-10
    # the image depends on longitude
    a = image(t=0.0, lam=0.0, mu=0.2)
    b = image(t=0.0, lam=1.5, mu=0.2)
    assert abs(a - b) > 1e-3
