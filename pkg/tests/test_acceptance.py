"""Acceptance suite: one test per criterion, each at its stated tolerance and time budget.

Run with ``pytest -m acceptance``; the terminal summary lists one PASS/FAIL line per criterion.
"""
import time

import numpy as np
import pytest
from scipy import special as sp
from scipy.integrate import trapezoid

from ringwalk.finite import (
    TimeGrid,
    classical_probability,
    distribution_snapshot,
    quantum_probability,
)
from ringwalk.infinite import infinite_classical, infinite_quantum
from ringwalk.lattice import LatticeSpec
from ringwalk.limiting import (
    asymmetry_delta,
    asymmetry_scan,
    closed_form_cycle,
    complete_graph_limit,
    limiting_distribution,
)
from ringwalk.oracle import three_way_agreement
from ringwalk.transport import (
    character_time,
    delta_scaling,
    equipartition_time,
    fit_linear_velocity,
    fit_quadratic,
    scaling_exponent,
    transport_samples,
)

pytestmark = pytest.mark.acceptance

LENGTHS = range(5, 31)


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f}s, budget {self.seconds}s"


@pytest.mark.criterion(1, "closed-form limiting distributions of the m=1 ring, N in [3, 101]")
def test_criterion_01_cycle_closed_forms():
    with Budget(10):
        for n in range(3, 102):
            got = limiting_distribution(LatticeSpec(n, 1)).values
            assert np.max(np.abs(got - closed_form_cycle(n).values)) <= 1e-12, n


@pytest.mark.criterion(2, "complete-graph limiting law, N = 2m+1 in {3, 5, ..., 101}")
def test_criterion_02_complete_graph():
    with Budget(10):
        for n in range(3, 102, 2):
            got = limiting_distribution(LatticeSpec(n, (n - 1) // 2)).values
            expected = np.full(n, 2.0 / n**2)
            expected[0] = (n * n - 2 * n + 2) / n**2
            assert np.max(np.abs(got - expected)) <= 1e-12, n
            assert np.max(np.abs(got - complete_graph_limit(n).values)) <= 1e-12, n


@pytest.mark.criterion(3, "m=1 infinite chain equals the Bessel closed forms")
def test_criterion_03_bessel_special_case():
    t = np.array([0.1, 1.0, 5.0, 20.0])
    with Budget(30):
        for d in range(-30, 31):
            q = infinite_quantum(1, d, t)
            c = infinite_classical(1, d, t)
            assert np.max(np.abs(q - sp.jv(d, 2 * t) ** 2)) <= 1e-8, d
            assert np.max(np.abs(c - sp.ive(d, 2 * t))) <= 1e-8, d


@pytest.mark.criterion(4, "Bloch, dense-eigen and ODE paths agree for every N <= 32")
def test_criterion_04_oracle_equivalence():
    grid = TimeGrid.linear(0.0, 20.0, 201)
    worst = 0.0
    with Budget(300):
        for n in range(3, 33):
            for m in range(1, (n - 1) // 2 + 1):
                for kind in ("classical", "quantum"):
                    worst = max(worst, three_way_agreement(LatticeSpec(n, m), kind, grid).worst)
    assert worst <= 1e-8


@pytest.mark.criterion(5, "quantum transport velocities for m = 1, 2, 3")
def test_criterion_05_quantum_velocities():
    expected = {1: (1.92, 0.05), 2: (2.62, 0.07), 3: (3.41, 0.07)}
    with Budget(300):
        for m, (v, tol) in expected.items():
            fit = fit_linear_velocity(transport_samples("quantum", m, LENGTHS))
            assert fit.params["v"] == pytest.approx(v, abs=tol), m


@pytest.mark.criterion(6, "classical character times follow t_c = beta L^2 with falling speed")
def test_criterion_06_classical_quadratic_law():
    for m in (1, 2, 3):
        samples = transport_samples("classical", m, LENGTHS)
        assert fit_quadratic(samples).r_squared >= 0.999, m
        speeds = [s.velocity for s in samples]
        assert all(a > b for a, b in zip(speeds, speeds[1:])), m


@pytest.mark.criterion(7, "return-probability scaling exponents on the infinite chain")
def test_criterion_07_scaling_exponents():
    t = np.linspace(20, 80, 121)
    fit = scaling_exponent(t, infinite_classical(1, 0, t))
    assert fit.params["exponent"] == pytest.approx(-0.5, abs=0.02)

    grid = TimeGrid.resolved(1, 100.0, t_min=10.0)
    fit = scaling_exponent(grid.points, infinite_quantum(1, 0, grid.points), (10, 100), use_envelope=True)
    assert fit.params["exponent"] == pytest.approx(-1.0, abs=0.1)


@pytest.mark.criterion(8, "asymmetry census at N=100")
def test_criterion_08_asymmetry_census():
    with Budget(60):
        nonzero = set(asymmetry_scan(100, range(1, 50)).nonzero)
    assert len(nonzero) == 29
    assert {3, 4, 5, 7, 8, 11, 12, 14, 15, 16, 19, 20} <= nonzero
    assert not nonzero & {1, 2, 6}


@pytest.mark.criterion(9, "degeneracy-pattern equivalences at N=100")
def test_criterion_09_pattern_equivalences():
    with Budget(30):
        chi = {m: limiting_distribution(LatticeSpec(100, m)).values for m in (1, 3, 6, 8, 12)}
    assert np.max(np.abs(chi[6] - chi[1])) <= 1e-12
    assert np.max(np.abs(chi[8] - chi[3])) <= 1e-12
    assert chi[12][0] > 0.07 and chi[12][50] > 0.07


@pytest.mark.criterion(10, "asymmetry decays as 1/N for m=2 and vanishes for m=1")
def test_criterion_10_delta_decay():
    sizes = range(20, 201, 2)
    fit = delta_scaling(2, sizes)
    assert fit.params["exponent"] == pytest.approx(-1.0, abs=0.15)
    assert all(asymmetry_delta(n, 1) == 0.0 for n in sizes)


@pytest.mark.criterion(11, "first-maximum times at d=50 do not depend on ring size")
def test_criterion_11_tc_size_independence():
    for m in (1, 2, 3):
        finite = character_time("quantum", m, 50, lattice=LatticeSpec(100, m))
        infinite = character_time("quantum", m, 50)
        assert abs(finite - infinite) <= 1e-3, m


@pytest.mark.criterion(12, "classical equipartition reached at N=100, sooner for larger m")
def test_criterion_12_equipartition():
    times = []
    for m in (1, 2, 3):
        lat = LatticeSpec(100, m)
        t = equipartition_time(lat, rel_tol=0.01)
        assert np.isfinite(t)
        p = classical_probability(lat, 0, 0, [t * (1 + 1e-9)]).values[0]
        assert abs(p - 0.01) <= 1e-4
        times.append(t)
    assert times[0] > times[1] > times[2]


def _time_average(lattice, j, horizon, chunk=20000):
    """Trapezoid average of every quantum probability over [0, horizon] on the resolved grid."""
    t = TimeGrid.resolved(lattice.m, horizon).points
    total = np.zeros(lattice.n)
    for lo in range(0, len(t) - 1, chunk):
        block = t[lo : lo + chunk + 1]
        total += trapezoid(distribution_snapshot(lattice, j, "quantum", block), block, axis=0)
    return total / (t[-1] - t[0])


@pytest.mark.criterion(13, "randomized property suite (>= 1000 cases)")
def test_criterion_13_property_suite():
    rng = np.random.default_rng(20240613)
    cases = 0
    for _ in range(1200):
        n = int(rng.integers(3, 200))
        m = int(rng.integers(1, (n - 1) // 2 + 1))
        t = float(rng.uniform(0, 100))
        lat = LatticeSpec(n, m)
        j, k, shift = (int(x) for x in rng.integers(0, n, 3))
        for kind in ("quantum", "classical"):
            row = distribution_snapshot(lat, j, kind, [t])[0]
            assert abs(row.sum() - 1.0) <= 1e-10
        fn = quantum_probability
        a = fn(lat, j, k, [t]).values[0]
        b = fn(lat, (j + shift) % n, (k + shift) % n, [t]).values[0]
        assert a == b
        d = (k - j) % n
        mirrored = fn(lat, j, (j - d) % n, [t]).values[0]
        assert abs(a - mirrored) <= 1e-12
        cases += 1

    for _ in range(30):
        n = int(rng.integers(3, 25))
        m = int(rng.integers(1, (n - 1) // 2 + 1))
        lat = LatticeSpec(n, m)
        j = int(rng.integers(0, n))
        avg = _time_average(lat, j, 2000.0)
        assert np.max(np.abs(avg - limiting_distribution(lat, j).values)) <= 2e-3, (n, m)
        cases += 1
    assert cases >= 1000
