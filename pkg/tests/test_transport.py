import numpy as np
import pytest
from scipy import optimize
from scipy import special as sp

from ringwalk.errors import NoMaximumError
from ringwalk.finite import return_probability
from ringwalk.infinite import infinite_quantum
from ringwalk.lattice import LatticeSpec
from ringwalk.transport import (
    TransportSample,
    character_time,
    cluster_points,
    delta_scaling,
    equipartition_time,
    fit_linear_velocity,
    fit_quadratic,
    scaling_exponent,
    transport_samples,
)


def test_classical_character_time_m1():
    # d/dt [e^{-2t} I_10(2t)] = 0  <=>  I_9(2t) + I_11(2t) = 2 I_10(2t)
    g = lambda t: sp.ive(9, 2 * t) + sp.ive(11, 2 * t) - 2 * sp.ive(10, 2 * t)  # noqa: E731
    expected = optimize.brentq(g, 10, 100, xtol=1e-13)
    assert character_time("classical", 1, 10) == pytest.approx(expected, abs=1e-6)


def test_quantum_character_time_m1():
    # the first maximum of J_10(2t)^2 sits at the first zero of J_10'
    expected = sp.jnp_zeros(10, 1)[0] / 2
    assert character_time("quantum", 1, 10) == pytest.approx(expected, abs=1e-6)


def test_zero_distance():
    assert character_time("classical", 3, 0) == 0.0
    assert character_time("quantum", 2, 0) == 0.0


def test_finite_lattice_character_time_matches_infinite():
    for m in (1, 2):
        inf = character_time("quantum", m, 20)
        fin = character_time("quantum", m, 20, lattice=LatticeSpec(80, m))
        assert fin == pytest.approx(inf, abs=1e-6)


def test_no_maximum_raises_with_trace():
    with pytest.raises(NoMaximumError) as info:
        character_time("quantum", 1, 40, t_max=2.0)
    t, v = info.value.trace
    assert len(t) == len(v) > 0
    with pytest.raises(ValueError):
        character_time("other", 1, 4)


def test_synthetic_fits():
    q = fit_quadratic([(2, 2.0), (4, 8.0), (8, 32.0)])
    assert q.params["beta"] == pytest.approx(0.5, abs=1e-14) and q.r_squared == pytest.approx(1.0)
    lin = fit_linear_velocity([(L, L / 2) for L in (3, 5, 9, 12)])
    assert lin.params["v"] == pytest.approx(2.0, abs=1e-12) and lin.r_squared == pytest.approx(1.0)
    assert lin.params["intercept"] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        fit_quadratic([(3, 1.0)])
    with pytest.raises(ValueError):
        fit_linear_velocity([(3, 1.0), (3, 1.2), (4, 2.0)])


def test_synthetic_power_law():
    t = np.geomspace(1, 100, 50)
    fit = scaling_exponent(t, 7 * t**-2.0)
    assert fit.params["exponent"] == pytest.approx(-2.0, abs=1e-10)
    fit = scaling_exponent(t, 7 * t**-2.0, window=(10, 50))
    assert min(fit.x) >= 10 and max(fit.x) <= 50
    with pytest.raises(ValueError):
        scaling_exponent(t, -t)


def test_samples_use_path_length():
    s = transport_samples("quantum", 2, [5, 6, 7])
    assert [x.distance for x in s] == [10, 12, 14]
    assert all(isinstance(x, TransportSample) and x.velocity > 0 for x in s)


def test_classical_speed_decreases():
    s = transport_samples("classical", 1, range(5, 16))
    v = [x.velocity for x in s]
    assert all(a > b for a, b in zip(v, v[1:]))
    assert fit_quadratic(s).r_squared >= 0.999


def test_delta_scaling_synthetic():
    n = np.arange(20, 202, 2)
    fit = delta_scaling(2, n, deltas=3.0 / n)
    assert fit.params["exponent"] == pytest.approx(-1.0, abs=1e-10)
    assert fit.params["prefactor"] == pytest.approx(3.0, rel=1e-10)


def test_delta_scaling_m1_has_nothing_to_fit():
    with pytest.raises(ValueError):
        delta_scaling(1, range(20, 202, 2))


@pytest.mark.parametrize("step", [2, 4])
def test_delta_scaling_m2(step):
    fit = delta_scaling(2, range(20, 201, step))
    assert fit.params["exponent"] == pytest.approx(-1.0, abs=0.15)


def test_cluster_points_separates_branches():
    n = np.array([10.0, 20, 40, 10, 20, 40, 30])
    d = np.array([1 / 10, 1 / 20, 1 / 40, 10 / 10, 10 / 20, 10 / 40, -1 / 30])
    groups = cluster_points(n, d)
    assert [sorted(g.tolist()) for g in groups[:2]] == [[0, 1, 2], [3, 4, 5]]
    assert groups[2].tolist() == [6]


def test_equipartition_time():
    lat = LatticeSpec(100, 2)
    t = equipartition_time(lat)
    p = lambda s: return_probability(lat, "classical", [s]).values[0]  # noqa: E731
    assert abs(p(t) - 0.01) == pytest.approx(1e-4, rel=1e-6)
    assert abs(p(0.99 * t) - 0.01) > 1e-4
    assert equipartition_time(LatticeSpec(4, 1), rel_tol=1e9) == 0.0
    with pytest.raises(NoMaximumError):
        equipartition_time(lat, t_max=1.0)


def test_character_time_is_a_local_max():
    t = character_time("quantum", 3, 12)
    h = 1e-3
    vals = infinite_quantum(3, 12, np.array([t - h, t, t + h]))
    assert vals[1] >= vals[0] and vals[1] >= vals[2]
