import numpy as np
import pytest

from ringwalk.errors import LatticeError, NumericalError
from ringwalk.finite import distribution_snapshot
from ringwalk.lattice import INFINITE, LatticeSpec, build_laplacian
from ringwalk.oracle import (
    DENSE_LIMIT,
    ODE_LIMIT,
    STEP_BOUND,
    dense_eigensystem,
    explicit_laplacian,
    ode_step_size,
    oracle_ode,
    oracle_probabilities,
    oracle_series,
    three_way_agreement,
)


@pytest.mark.parametrize("n, m", [(4, 1), (9, 4), (20, 3)])
def test_explicit_laplacian_matches_builder(n, m):
    np.testing.assert_array_equal(explicit_laplacian(LatticeSpec(n, m)), build_laplacian(LatticeSpec(n, m)))


def test_dense_eigensystem_invariants():
    lat = LatticeSpec(24, 5)
    sys = dense_eigensystem(lat)
    assert sys.reconstruction_error(explicit_laplacian(lat)) <= 1e-12
    assert sys.orthonormality_error() <= 1e-12


def test_complete_graph_classical_limit():
    p = oracle_series(LatticeSpec(5, 2), 0, 3, "classical", [10.0]).values[0]
    assert p == pytest.approx(0.2, abs=1e-12)


@pytest.mark.parametrize("kind", ["classical", "quantum"])
def test_ode_against_dense(kind):
    lat = LatticeSpec(16, 3)
    t = np.linspace(0, 20, 41)
    rows, norms = oracle_ode(lat, 2, kind, t, return_norm=True)
    np.testing.assert_allclose(rows, oracle_probabilities(lat, 2, kind, t), atol=1e-9)
    np.testing.assert_allclose(norms, 1.0, atol=1e-10)


def test_step_size_bound():
    lat = LatticeSpec(10, 2)
    assert ode_step_size(lat, 20.0) <= STEP_BOUND / 8
    with pytest.raises(NumericalError):
        oracle_ode(lat, 0, "quantum", [1.0], step=0.1)


def test_size_guards():
    with pytest.raises(LatticeError):
        dense_eigensystem(LatticeSpec(DENSE_LIMIT + 2, 1))
    with pytest.raises(LatticeError):
        oracle_ode(LatticeSpec(ODE_LIMIT + 2, 1), 0, "quantum", [1.0])
    with pytest.raises(LatticeError):
        dense_eigensystem(LatticeSpec(INFINITE, 1))
    with pytest.raises(ValueError):
        oracle_probabilities(LatticeSpec(6, 1), 0, "other", [1.0])


def test_three_way_report():
    rep = three_way_agreement(LatticeSpec(12, 2), "quantum", np.linspace(0, 20, 81))
    assert rep.worst <= 1e-8
    assert rep.worst == max(rep.bloch_vs_dense, rep.bloch_vs_ode, rep.dense_vs_ode)


def test_dense_matches_bloch_beyond_ode_range():
    lat = LatticeSpec(300, 7)
    t = np.linspace(0, 30, 13)
    np.testing.assert_allclose(oracle_probabilities(lat, 5, "quantum", t),
                               distribution_snapshot(lat, 5, "quantum", t), atol=1e-10)
