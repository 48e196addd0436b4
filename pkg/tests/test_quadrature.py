import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from tpzmc.quadrature import adaptive_gk, gauss_legendre_composite, gk15


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=20))
def test_gk15_exact_for_polynomials(coef):
    p = np.polynomial.Polynomial(coef)
    val, _ = gk15(lambda x: p(x)[:, None], 0.0, 1.3)
    exact = p.integ()(1.3) - p.integ()(0.0)
    assert abs(val[0, 0] - exact) <= 1e-11 * (1 + np.sum(np.abs(coef)) * 1.3 ** len(coef))


def test_adaptive_against_scipy():
    f = lambda x: np.stack([np.exp(-x) * np.sin(5 * x), 1 / (1 + x * x)], axis=-1)
    val, err = adaptive_gk(f, 0.0, 3.0, tol=1e-12)
    ref = [quad(lambda x: f(np.array([x]))[0, k], 0, 3, epsabs=1e-14)[0] for k in range(2)]
    assert np.allclose(val, ref, atol=1e-12, rtol=0)
    assert err <= 1e-12


def test_adaptive_sqrt_singularity():
    val, _ = adaptive_gk(lambda x: (1 / np.sqrt(x))[:, None], 0.0, 1.0, tol=1e-9, max_intervals=20000)
    assert abs(val[0] - 2.0) < 1e-8


def test_adaptive_complex():
    val, _ = adaptive_gk(lambda x: np.exp(1j * x)[:, None], 0.0, np.pi)
    assert abs(val[0] - 2j) < 1e-12


def test_gauss_legendre_composite():
    val = gauss_legendre_composite(lambda x: np.cos(x)[:, None], 0.0, np.pi / 2, panels=8)
    assert abs(val[0] - 1.0) < 1e-14
