"""Tests for subalgebra closure and the optimal systems."""

import numpy as np
import pytest

from ..fields import EquationParams
from ..fields.time_functions import polynomial, sinusoidal
from ..symmetry import (
    SubalgebraSpec,
    SubalgebraSpecError,
    bracket_table,
    catalog,
    optimal_system_1d,
    optimal_system_2d,
    verify_subalgebra,
)
from ..symmetry.generators import scaling, time_translation, y_translation
from ..symmetry.subalgebras import DegenerateSampleError, fit_combination


# ═══════════════════════════════════════════════════════════════════════
# OPTIMAL SYSTEMS
# ═══════════════════════════════════════════════════════════════════════

def test_one_dimensional_families():
    specs = optimal_system_1d()
    assert len(specs) == 6
    for S in specs:
        assert S.dimension == 1
        report = verify_subalgebra(S)
        assert report.passed, S.name
        # every generator lies in the span of the catalog basis
        assert report.membership_residual <= 1e-10


def test_one_dimensional_families_with_other_functions():
    specs = optimal_system_1d(f=polynomial([1.0, 0.0, 2.0], name="f"), g=sinusoidal(2.0, name="g"))
    assert all(verify_subalgebra(S).passed for S in specs)


def test_two_dimensional_families():
    specs = optimal_system_2d()
    assert len(specs) == 9
    for S in specs:
        assert S.dimension == 2
        report = verify_subalgebra(S)
        assert report.passed, f"{S.name}: fit residual {report.max_residual:.3e}"


def test_two_dimensional_families_with_c_zero():
    specs = optimal_system_2d(a=2.0, b=1.0, c=0.0, ebt_constants={"a": 0.0, "b": 2.0, "c": 1.0})
    assert all(verify_subalgebra(S).passed for S in specs)


def test_exponential_family_needs_ab_zero_without_x_part():
    specs = optimal_system_2d(ebt_constants={"a": 1.0, "b": 1.0, "c": 0.0})
    with_x, without_x = specs[4], specs[5]
    assert verify_subalgebra(with_x).passed
    report = verify_subalgebra(without_x)
    assert not report.passed
    assert report.max_residual > 1e-6


def test_abc_side_condition():
    with pytest.raises(SubalgebraSpecError):
        optimal_system_2d(ebt_constants={"a": 1.0, "b": 1.0, "c": 1.0})


def test_dependent_generators_rejected():
    dt = time_translation("cartesian")
    with pytest.raises(SubalgebraSpecError):
        SubalgebraSpec("<dt, 2 dt>", (dt, dt * 2.0))
    with pytest.raises(SubalgebraSpecError):
        SubalgebraSpec("<>", ())


def test_non_closed_pair_fails():
    D, dy = scaling("cartesian"), y_translation()
    f = sinusoidal(name="f")
    X = catalog("cartesian", 1.0, {"f": f, "g": 1.0})[3]
    # [dy, X(sin)] = Z(-cos) is not in span{dy, X(sin)}
    report = verify_subalgebra(SubalgebraSpec("<dy, X(f)>", (dy, X)))
    assert not report.passed
    closed = verify_subalgebra(SubalgebraSpec("<D, dy>", (D, dy)))
    assert closed.passed
    assert closed.membership_residual is None


# ═══════════════════════════════════════════════════════════════════════
# BRACKET TABLE
# ═══════════════════════════════════════════════════════════════════════

def test_bracket_table_of_cartesian_catalog():
    basis = catalog("cartesian", EquationParams.cartesian(1.0), {"f": "t", "g": "t"})
    table = bracket_table(basis)
    assert len(table) == 10
    entries = {(e.left, e.right): e for e in table}
    d_dt = entries[("D", "dt")]
    assert d_dt.fit.coefficients["dt"] == pytest.approx(-1.0, abs=1e-12)
    assert d_dt.fit.residual <= 1e-12
    # [D, X(t)] = X(2t) = 2 X(t)
    d_x = entries[("D", "X(f)")]
    assert d_x.fit.coefficients["X(f)"] == pytest.approx(2.0, abs=1e-10)
    doc = d_x.to_dict()
    assert set(doc) == {"left", "right", "bracket", "coefficients", "residual"}


def test_fit_combination_recovers_coefficients():
    D, dt, dy = scaling("cartesian"), time_translation("cartesian"), y_translation()
    target = D * 0.5 + dt * -2.0 + dy * 3.0
    fit = fit_combination(target, (D, dt, dy), rng=np.random.default_rng(1))
    assert fit.coefficients["D"] == pytest.approx(0.5, abs=1e-12)
    assert fit.coefficients["dt"] == pytest.approx(-2.0, abs=1e-12)
    assert fit.coefficients["dy"] == pytest.approx(3.0, abs=1e-12)
    assert fit.residual <= 1e-12


def test_fit_combination_with_dependent_basis():
    D, dt = scaling("cartesian"), time_translation("cartesian")
    with pytest.raises(DegenerateSampleError):
        fit_combination(D, (dt, dt * 2.0), rng=np.random.default_rng(1))
