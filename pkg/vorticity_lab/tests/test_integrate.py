"""Tests for RK4 integration, invariant drift and symmetry checks along trajectories."""

import numpy as np
import pandas as pd
import pytest

from ..integrate import (
    ConstraintError,
    IntegrationError,
    IntegratorConfig,
    IntegratorConfigError,
    apply_time_reversal,
    integrate,
    invariant_drift,
    richardson_order,
    subspace_preservation,
    time_reversal_roundtrip,
)
from ..io import save_trajectory_csv
from ..spectral import (
    ReducedModel,
    ReducedTerm,
    SpectralModel,
    SpectralState,
    Truncation,
    fixed_subspace,
    lorenz1960,
    lorenz_subgroup,
    subgroup_from_words,
)


# ── Test Fixtures ─────────────────────────────────────────────────────
ONES = np.array([1.0, 1.0, 1.0])
EIGHT_MODES = Truncation.square(1, k=1.0, l=2.0)


# ═══════════════════════════════════════════════════════════════════════
# CONFIGURATION AND STEPPING
# ═══════════════════════════════════════════════════════════════════════

def test_integrator_config_validation():
    assert IntegratorConfig(t_end=1.0, dt=0.1).n_steps == 10
    with pytest.raises(IntegratorConfigError):
        IntegratorConfig(t_end=1.0, dt=0.1, scheme="euler")
    with pytest.raises(IntegratorConfigError):
        IntegratorConfig(t_end=1.0, dt=0.0)
    with pytest.raises(IntegratorConfigError):
        IntegratorConfig(t_end=1.0, dt=2.0)
    with pytest.raises(IntegratorConfigError):
        IntegratorConfig(t_end=1.0, dt=0.1, sample_stride=0)
    with pytest.raises(IntegratorConfigError):
        IntegratorConfig(t_end=1.0, dt=0.3)


def test_single_step_of_lorenz_model():
    model = lorenz1960(1.0, 2.0)
    traj = integrate(model, ONES, IntegratorConfig(t_end=1e-3, dt=1e-3))
    assert len(traj.times) == 2
    # dA/dt = -1.6 F G at the start
    assert traj.final[0] == pytest.approx(1.0 - 1.6e-3, abs=1e-6)
    assert traj.final[1] == pytest.approx(1.0 + 0.1e-3, abs=1e-6)
    assert traj.final[2] == pytest.approx(1.0 + 0.75e-3, abs=1e-6)


def test_zero_state_is_steady():
    model = SpectralModel(EIGHT_MODES)
    traj = integrate(model, SpectralState.zeros(EIGHT_MODES), IntegratorConfig(t_end=1.0, dt=0.1))
    assert np.all(traj.states == 0.0)


def test_sampling_and_frame():
    model = lorenz1960(1.0, 2.0)
    traj = integrate(model, ONES, IntegratorConfig(t_end=1.0, dt=0.01, sample_stride=10))
    assert len(traj.times) == 11
    assert traj.times[-1] == pytest.approx(1.0)
    frame = traj.to_frame()
    assert list(frame.columns) == ["t", "A", "F", "G"]
    assert traj.provenance["integrator"]["dt"] == 0.01


def test_shape_mismatch():
    with pytest.raises(ValueError):
        integrate(lorenz1960(1.0, 2.0), np.ones(4), IntegratorConfig(t_end=1.0, dt=0.1))


def test_blow_up_raises_integration_error():
    model = ReducedModel(("x",), (ReducedTerm("x", 1.0, ("x", "x")),))
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(IntegrationError) as info:
            integrate(model, np.array([10.0]), IntegratorConfig(t_end=1.0, dt=1e-3))
    # x' = x^2 from 10 blows up at t = 0.1
    assert 0.05 < info.value.time <= 1.0


def test_trajectory_csv(tmp_path):
    model = lorenz1960(1.0, 2.0)
    traj = integrate(model, ONES, IntegratorConfig(t_end=0.1, dt=0.01))
    path = tmp_path / "traj.csv"
    save_trajectory_csv(traj, str(path))
    raw = path.read_bytes()
    assert raw.startswith(b"t,A,F,G\r\n")
    frame = pd.read_csv(path, float_precision="round_trip")
    assert len(frame) == 11
    assert np.array_equal(frame[["A", "F", "G"]].to_numpy(), traj.states)


# ═══════════════════════════════════════════════════════════════════════
# INVARIANTS AND ACCURACY
# ═══════════════════════════════════════════════════════════════════════

def test_lorenz_invariants_are_conserved():
    model = lorenz1960(1.0, 2.0)
    traj = integrate(model, ONES, IntegratorConfig(t_end=100.0, dt=1e-3, sample_stride=100))
    drift = invariant_drift(traj, model)
    assert drift.energy_initial == pytest.approx(1.65)
    assert drift.enstrophy_initial == pytest.approx(4.0)
    assert drift.energy_drift <= 1e-8
    assert drift.enstrophy_drift <= 1e-8
    assert set(drift.to_dict()) == {"E_initial", "Z_initial", "E_drift", "Z_drift"}


def test_full_truncation_conserves_invariants():
    model = SpectralModel(EIGHT_MODES)
    initial = SpectralState.random(EIGHT_MODES, np.random.default_rng(2009), scale=0.5)
    traj = integrate(model, initial, IntegratorConfig(t_end=10.0, dt=1e-3, sample_stride=100))
    drift = invariant_drift(traj, model)
    assert drift.energy_drift <= 1e-8
    assert drift.enstrophy_drift <= 1e-8


def test_equal_wavenumbers_keep_g_constant():
    model = lorenz1960(1.0, 1.0)
    traj = integrate(model, np.array([0.3, -0.8, 1.2]), IntegratorConfig(t_end=5.0, dt=1e-2))
    assert np.all(traj.states[:, 2] == 1.2)


def test_rk4_is_fourth_order():
    ratio = richardson_order(lorenz1960(1.0, 2.0), ONES, t_end=1.0, dt=0.02)
    assert 14.0 <= ratio <= 18.0


# ═══════════════════════════════════════════════════════════════════════
# SYMMETRY ALONG TRAJECTORIES
# ═══════════════════════════════════════════════════════════════════════

def test_real_coefficients_stay_real():
    model = SpectralModel(EIGHT_MODES)
    y0 = np.zeros(8)
    y0[0::2] = [0.4, -1.0, 0.7, 0.2]
    traj = integrate(model, y0, IntegratorConfig(t_end=5.0, dt=1e-2))
    assert np.all(traj.states[:, 1::2] == 0.0)
    assert subspace_preservation(model, subgroup_from_words(["e1e2"]), y0,
                                 IntegratorConfig(t_end=5.0, dt=1e-2)) == 0.0


def test_lorenz_subspace_is_preserved():
    model = SpectralModel(EIGHT_MODES)
    y0 = lorenz1960(1.0, 2.0).embed(ONES)
    deviation = subspace_preservation(model, lorenz_subgroup(), y0, IntegratorConfig(t_end=10.0, dt=1e-3))
    assert deviation <= 1e-11


def test_perturbed_state_leaves_subspace():
    model = SpectralModel(EIGHT_MODES)
    y0 = lorenz1960(1.0, 2.0).embed([1.0, 0.5, -0.8])
    y0[1] += 1e-3   # B01
    cfg = IntegratorConfig(t_end=10.0, dt=1e-2)
    with pytest.raises(ConstraintError):
        subspace_preservation(model, lorenz_subgroup(), y0, cfg)
    assert subspace_preservation(model, lorenz_subgroup(), y0, cfg, check_initial=False) >= 1e-3


def test_reduced_model_matches_embedded_dynamics():
    reduced = lorenz1960(1.0, 2.0)
    full = SpectralModel(EIGHT_MODES)
    z0 = ONES
    cfg = IntegratorConfig(t_end=10.0, dt=1e-3)
    z_final = integrate(reduced, z0, cfg).final
    y_final = integrate(full, reduced.embed(z0), cfg).final
    assert np.max(np.abs(reduced.embed(z_final) - y_final)) <= 1e-9
    subspace = fixed_subspace(lorenz_subgroup(), EIGHT_MODES)
    assert subspace.deviation(y_final) <= 1e-11


def test_time_reversal_roundtrip():
    cfg = IntegratorConfig(t_end=1.0, dt=1e-3)
    assert time_reversal_roundtrip(lorenz1960(1.0, 2.0), ONES, cfg) <= 1e-8
    full = SpectralModel(EIGHT_MODES)
    initial = SpectralState.random(EIGHT_MODES, np.random.default_rng(7), scale=0.5)
    assert time_reversal_roundtrip(full, initial, cfg) <= 1e-8


def test_apply_time_reversal_negates_state():
    y = np.arange(1.0, 9.0)
    assert np.array_equal(apply_time_reversal(SpectralModel(EIGHT_MODES), y), -y)
    assert np.array_equal(apply_time_reversal(lorenz1960(1.0, 2.0), ONES), -ONES)


def test_trivial_subgroup_has_no_deviation():
    model = SpectralModel(EIGHT_MODES)
    initial = SpectralState.random(EIGHT_MODES, np.random.default_rng(3))
    cfg = IntegratorConfig(t_end=1.0, dt=1e-2)
    assert subspace_preservation(model, subgroup_from_words(["1"]), initial, cfg) == 0.0


def test_zero_trajectory_has_zero_drift():
    model = lorenz1960(1.0, 2.0)
    traj = integrate(model, np.zeros(3), IntegratorConfig(t_end=1.0, dt=0.1))
    drift = invariant_drift(traj, model)
    assert drift.energy_drift == 0.0
    assert drift.enstrophy_drift == 0.0
