"""Tests for the spectral truncation, induced symmetries and reduced models."""

import numpy as np
import pytest

from ..spectral import (
    IDENTITY,
    InvarianceError,
    ModeIndex,
    ReducedModel,
    ReducedTerm,
    SpectralModel,
    SpectralState,
    Subgroup,
    SymmetryError,
    Truncation,
    TruncationError,
    check_invariance,
    element_word,
    enumerate_subgroups,
    fixed_subspace,
    generated_subgroup,
    induced_symmetry,
    interaction_term,
    lorenz1960,
    lorenz1960_coefficients,
    lorenz_subgroup,
    parse_word,
    reduce_model,
    spectral_rhs,
    subgroup_from_words,
    subgroup_table,
)
from ..schemas import ReducedModelDoc


# ── Test Fixtures ─────────────────────────────────────────────────────
EIGHT_MODES = Truncation.square(1, k=1.0, l=2.0)
REDUCTION_GENERATORS = ("e1", "e2", "p", "q")


# ═══════════════════════════════════════════════════════════════════════
# TRUNCATION
# ═══════════════════════════════════════════════════════════════════════

def test_interaction_term_examples():
    assert interaction_term(ModeIndex(0, 1), ModeIndex(1, 1), 1.0, 1.0) == pytest.approx(1.0)
    assert interaction_term(ModeIndex(1, 1), ModeIndex(2, 2), 1.0, 1.0) == 0.0
    assert interaction_term(ModeIndex(1, 0), ModeIndex(1, 1), 1.0, 2.0) == pytest.approx(-2.0)
    with pytest.raises(TruncationError):
        interaction_term(ModeIndex(0, 0), ModeIndex(1, 1), 1.0, 1.0)


def test_eight_mode_layout():
    assert len(EIGHT_MODES.modes) == 8
    assert EIGHT_MODES.representatives == ((0, 1), (1, -1), (1, 0), (1, 1))
    assert EIGHT_MODES.labels == ("A01", "B01", "A1-1", "B1-1", "A10", "B10", "A11", "B11")
    assert EIGHT_MODES.n_real == 8
    assert EIGHT_MODES.wavenumber_squared(ModeIndex(1, 1)) == pytest.approx(5.0)


def test_truncation_validation():
    with pytest.raises(TruncationError):
        Truncation(((1, 0),))
    with pytest.raises(TruncationError):
        Truncation(((0, 0), (1, 0), (-1, 0)))
    with pytest.raises(TruncationError):
        Truncation.square(4)
    with pytest.raises(TruncationError):
        Truncation.square(1, k=0.0)


def test_reality_constraint_enforced():
    coefficients = np.zeros(8, dtype=complex)
    coefficients[EIGHT_MODES.position[ModeIndex(1, 0)]] = 1.0
    coefficients[EIGHT_MODES.position[ModeIndex(-1, 0)]] = 2.0
    with pytest.raises(TruncationError):
        SpectralState(EIGHT_MODES, coefficients)
    with pytest.raises(TruncationError):
        SpectralState.from_mapping(EIGHT_MODES, {(2, 0): 1.0})


def test_real_coordinates():
    state = SpectralState.from_real(EIGHT_MODES, np.arange(1.0, 9.0))
    # C_m = (A_m - i B_m)/2
    assert state[(0, 1)] == pytest.approx(0.5 - 1.0j)
    assert state[(0, -1)] == pytest.approx(0.5 + 1.0j)
    assert np.array_equal(state.to_real(), np.arange(1.0, 9.0))


def test_two_mode_interaction():
    state = SpectralState.from_mapping(EIGHT_MODES, {(0, 1): 1.0, (1, 0): 1.0})
    rhs = spectral_rhs(state)
    expected = (interaction_term(ModeIndex(0, 1), ModeIndex(1, 1), 1.0, 2.0)
                + interaction_term(ModeIndex(1, 0), ModeIndex(1, 1), 1.0, 2.0))
    assert rhs[(1, 1)] == pytest.approx(expected)
    assert expected == pytest.approx(-1.5)
    assert rhs[(1, -1)] != 0
    assert rhs[(0, 1)] == 0
    assert rhs[(1, 0)] == 0


def test_single_mode_pair_is_steady():
    state = SpectralState.from_mapping(EIGHT_MODES, {(1, 0): 0.7 + 0.2j})
    assert np.all(spectral_rhs(state).coefficients == 0)


def test_tendency_respects_reality_exactly():
    rng = np.random.default_rng(2009)
    for _ in range(20):
        state = SpectralState.random(EIGHT_MODES, rng)
        assert spectral_rhs(state).conjugacy_defect() == 0.0


def test_energy_and_enstrophy_are_conserved_by_the_tendency():
    model = SpectralModel(Truncation.square(2, k=1.0, l=1.5))
    weights = np.array([model.truncation.wavenumber_squared(m) for m in model.truncation.representatives])
    rng = np.random.default_rng(3)
    for _ in range(10):
        y = rng.standard_normal(model.dimension)
        f = model.rhs(y)
        energy_rate = np.sum(y * f * np.repeat(1.0 / weights, 2))
        enstrophy_rate = np.sum(y * f)
        assert abs(energy_rate) <= 1e-11 * max(1.0, np.max(np.abs(f)))
        assert abs(enstrophy_rate) <= 1e-11 * max(1.0, np.max(np.abs(f)))


def test_compiled_model_matches_spectral_sum():
    model = SpectralModel(EIGHT_MODES)
    rng = np.random.default_rng(5)
    for _ in range(5):
        state = SpectralState.random(EIGHT_MODES, rng)
        direct = spectral_rhs(state).to_real()
        assert np.max(np.abs(model.rhs(state.to_real()) - direct)) <= 1e-12


# ═══════════════════════════════════════════════════════════════════════
# INDUCED SYMMETRIES
# ═══════════════════════════════════════════════════════════════════════

def test_induced_action_examples():
    state = SpectralState.from_mapping(EIGHT_MODES, {(1, 0): 0.3 + 0.4j, (1, -1): 2.0 - 1.0j, (1, 1): 0.5j})
    assert induced_symmetry("p").apply(state)[(1, 0)] == pytest.approx(-(0.3 + 0.4j))
    assert induced_symmetry("q").apply(state)[(1, 0)] == pytest.approx(0.3 + 0.4j)
    assert induced_symmetry("e1").apply(state)[(1, 1)] == pytest.approx(-(2.0 - 1.0j))
    assert induced_symmetry("e3").apply(state)[(1, 1)] == pytest.approx(-0.5j)


def test_tendency_is_equivariant():
    rng = np.random.default_rng(2009)
    for _ in range(50):
        state = SpectralState.random(EIGHT_MODES, rng)
        rhs = spectral_rhs(state)
        for name in REDUCTION_GENERATORS:
            g = induced_symmetry(name)
            difference = g.apply(rhs).coefficients - spectral_rhs(g.apply(state)).coefficients
            assert np.max(np.abs(difference)) <= 1e-12, name
        # time reversal flips the sign of the tendency
        e3 = induced_symmetry("e3")
        difference = e3.apply(rhs).coefficients + spectral_rhs(e3.apply(state)).coefficients
        assert np.max(np.abs(difference)) <= 1e-12


def test_generators_are_involutions():
    for name in REDUCTION_GENERATORS + ("e3",):
        g = induced_symmetry(name)
        assert (g * g).is_identity
        assert not g.is_identity


def test_words():
    p, q, e1 = (induced_symmetry(n) for n in ("p", "q", "e1"))
    assert parse_word("pqe1") == p * q * e1
    assert element_word(parse_word("e2e1p")) == "pe1e2"
    assert element_word(IDENTITY) == "1"
    assert element_word(p * induced_symmetry("e3")) == "pe3"
    with pytest.raises(SymmetryError):
        parse_word("pxq")
    with pytest.raises(SymmetryError):
        induced_symmetry("e4")


def test_symmetry_outside_truncation():
    lopsided = Truncation(((1, 1), (-1, -1)))
    state = SpectralState.from_mapping(lopsided, {(1, 1): 1.0})
    with pytest.raises(SymmetryError):
        induced_symmetry("e1").apply(state)


def test_subgroup_validation():
    with pytest.raises(SymmetryError):
        generated_subgroup([induced_symmetry("e3")])
    p, q = induced_symmetry("p"), induced_symmetry("q")
    with pytest.raises(SymmetryError):
        Subgroup(frozenset({IDENTITY, p, q}))
    assert generated_subgroup([p, q]).order == 4


def test_subgroup_lattice():
    subgroups = enumerate_subgroups()
    assert len(subgroups) == 67
    assert subgroups[0].order == 1
    assert subgroups[-1].order == 16
    dimensions = [fixed_subspace(S, EIGHT_MODES).dimension for S in subgroups]
    assert {0, 3, 4, 5, 8} <= set(dimensions)
    assert max(dimensions) == 8
    assert dimensions.count(0) == 11


def test_lorenz_subgroup():
    S = lorenz_subgroup()
    assert S.order == 4
    assert S.name == "pqe1,pqe2"
    assert S.element_words == ["1", "e1e2", "pqe1", "pqe2"]
    assert subgroup_from_words(["pqe1,pqe2"]).elements == S.elements


# ═══════════════════════════════════════════════════════════════════════
# FIXED SUBSPACES AND REDUCED MODELS
# ═══════════════════════════════════════════════════════════════════════

def test_lorenz_fixed_subspace():
    subspace = fixed_subspace(lorenz_subgroup(), EIGHT_MODES)
    assert subspace.dimension == 3
    assert subspace.coordinates == ("A01", "A1-1", "A10")
    assert "A11 = -A1-1" in subspace.constraints
    assert "B01 = 0" in subspace.constraints
    y = subspace.embed([0.3, -1.2, 0.8])
    assert subspace.deviation(y) == 0.0


def test_real_coefficient_subspace():
    subspace = fixed_subspace(subgroup_from_words(["e1e2"]), EIGHT_MODES)
    assert subspace.dimension == 4
    assert subspace.coordinates == ("A01", "A1-1", "A10", "A11")
    assert fixed_subspace(subgroup_from_words(["1"]), EIGHT_MODES).dimension == 8


def test_invariance_check():
    model = SpectralModel(EIGHT_MODES)
    subspace = fixed_subspace(lorenz_subgroup(), EIGHT_MODES)
    assert check_invariance(model, subspace.embedding) <= 1e-12

    embedding = np.zeros((8, 2))
    embedding[0, 0] = 1.0   # A01
    embedding[4, 1] = 1.0   # A10
    with pytest.raises(InvarianceError) as info:
        check_invariance(model, embedding)
    assert info.value.direction is not None


def test_lorenz_model_at_reference_wavenumbers():
    model = lorenz1960(1.0, 2.0)
    assert model.amplitudes == ("A", "F", "G")
    assert len(model.terms) == 3
    assert model.coefficient("A", ("F", "G")) == pytest.approx(-1.6, abs=1e-14)
    assert model.coefficient("F", ("A", "G")) == pytest.approx(0.1, abs=1e-14)
    assert model.coefficient("G", ("A", "F")) == pytest.approx(0.75, abs=1e-14)
    assert model.provenance["constraints"]
    assert float(model.energy(np.array([1.0, 1.0, 1.0]))) == pytest.approx(1.65)
    assert float(model.enstrophy(np.array([1.0, 1.0, 1.0]))) == pytest.approx(4.0)


def test_lorenz_coefficients_match_closed_form():
    rng = np.random.default_rng(2009)
    for _ in range(10):
        k, l = rng.uniform(0.5, 3.0, size=2)
        model = lorenz1960(k, l)
        closed = lorenz1960_coefficients(k, l)
        assert model.coefficient("A", ("F", "G")) == pytest.approx(closed["A"], rel=1e-14, abs=1e-13)
        assert model.coefficient("F", ("A", "G")) == pytest.approx(closed["F"], rel=1e-14, abs=1e-13)
        assert model.coefficient("G", ("A", "F")) == pytest.approx(closed["G"], rel=1e-14, abs=1e-13)


def test_lorenz_model_with_equal_wavenumbers():
    model = lorenz1960(1.0, 1.0)
    assert model.coefficient("G", ("A", "F")) == pytest.approx(0.0, abs=1e-14)
    assert lorenz1960_coefficients(1.0, 1.0)["G"] == 0.0


def test_trivial_subgroup_reproduces_full_model():
    reduced = reduce_model(subgroup_from_words(["1"]), EIGHT_MODES)
    full = SpectralModel(EIGHT_MODES)
    assert reduced.amplitudes == EIGHT_MODES.labels
    rng = np.random.default_rng(8)
    for _ in range(5):
        y = rng.standard_normal(8)
        assert np.max(np.abs(reduced.rhs(y) - full.rhs(y))) <= 1e-12


def test_reduced_model_dict_roundtrip():
    model = lorenz1960(1.3, 0.7)
    again = ReducedModel.from_dict(model.to_dict())
    z = np.array([0.4, -1.1, 0.9])
    assert np.array_equal(again.rhs(z), model.rhs(z))
    assert np.allclose(again.embed(z), model.embed(z), atol=0.0)
    with pytest.raises(ValueError):
        ReducedModel(("A",), (ReducedTerm("A", 1.0, ("A", "B")),))


def test_subgroup_fixing_only_zero():
    S = subgroup_from_words(["q,qe1"])
    subspace = fixed_subspace(S, EIGHT_MODES)
    assert subspace.dimension == 0
    assert subspace.coordinates == ()
    assert subspace.constraints == [f"{label} = 0" for label in EIGHT_MODES.labels]
    assert subspace.embedding.shape == (8, 0)
    assert subspace.deviation(np.zeros(8)) == 0.0
    assert subspace.deviation(np.ones(8)) == 1.0

    reduced = reduce_model(S, EIGHT_MODES)
    assert reduced.amplitudes == ()
    assert reduced.terms == ()
    assert reduced.rhs(np.zeros(0)).shape == (0,)
    doc = ReducedModelDoc(**reduced.to_dict())
    again = ReducedModel.from_dict(doc.model_dump())
    assert again.amplitudes == ()
    assert again.embedding.shape == (8, 0)
    assert len(again.provenance["constraints"]) == 8


def test_subgroup_table():
    table = subgroup_table()
    assert len(table) == 67
    assert list(table.columns) == ["generators", "elements", "order", "dimension", "coordinates", "constraints"]
    lorenz_row = table[table["generators"] == "pqe1,pqe2"].iloc[0]
    assert lorenz_row["dimension"] == 3
    assert lorenz_row["coordinates"] == "A01,A1-1,A10"
    empty_row = table[table["generators"] == "q,qe1"].iloc[0]
    assert empty_row["dimension"] == 0
    assert empty_row["coordinates"] == ""
