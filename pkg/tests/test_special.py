import numpy as np
import pytest
from scipy import special as sp

from ringwalk.special import bessel_i_scaled, bessel_j

X = np.concatenate([np.linspace(0, 12, 97), np.linspace(12.5, 200, 120)])


@pytest.mark.parametrize("n", [0, 1, 2, 5, 10, 30, 60, -3, -30])
def test_bessel_j_against_scipy(n):
    np.testing.assert_allclose(bessel_j(n, X), sp.jv(n, X), atol=1e-12, rtol=0)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 10, 30, 60, -4, -31])
def test_bessel_i_scaled_against_scipy(n):
    np.testing.assert_allclose(bessel_i_scaled(n, X), sp.ive(n, X), atol=1e-12, rtol=0)


def test_negative_argument_parity():
    x = np.linspace(0.1, 40, 50)
    for n in (0, 1, 4, 7):
        np.testing.assert_allclose(bessel_j(n, -x), (-1) ** n * bessel_j(n, x), atol=1e-14)


def test_values_at_zero():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(3, 0.0) == 0.0
    assert bessel_i_scaled(0, 0.0) == 1.0
    assert bessel_i_scaled(2, 0.0) == 0.0


def test_scalar_in_scalar_out():
    assert np.ndim(bessel_j(2, 1.5)) == 0
    assert bessel_j(2, 1.5) == pytest.approx(sp.jv(2, 1.5), abs=1e-14)
