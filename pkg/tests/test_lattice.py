import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tpzmc.errors import LatticeDetectionError
from tpzmc.lattice import Periodicity, lattice_detect, lll_reduce, periodicity_classify

BASIS = np.array([[1.3, 0.2, 0.0], [0.1, 1.7, 0.3], [0.0, -0.4, 2.1]])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.lists(st.tuples(*[st.integers(-4, 4)] * 3), min_size=4, max_size=12))
def test_recovers_rank_and_integer_fit(rank, coeffs):
    c = np.array(coeffs)[:, :rank]
    periods = np.vstack([BASIS[:rank], c @ BASIS[:rank]])
    lat = lattice_detect(periods)
    assert lat.rank == rank
    assert np.allclose(lat.coordinates @ lat.basis, periods, atol=1e-9)
    # same lattice: basis change is unimodular
    x = np.linalg.lstsq(BASIS[:rank].T, lat.basis.T, rcond=None)[0]
    assert np.allclose(x, np.rint(x), atol=1e-9)
    assert abs(abs(np.linalg.det(np.rint(x))) - 1) < 1e-9


def test_half_periods_refine_basis():
    lat = lattice_detect([[2.0, 0, 0], [1.0, 0, 0], [0, 3.0, 0]])
    assert lat.rank == 2
    assert sorted(np.round(np.linalg.norm(lat.basis, axis=1), 9)) == [1.0, 3.0]


def test_incommensurable_and_zero():
    with pytest.raises(LatticeDetectionError):
        lattice_detect([[1.0, 0, 0], [np.sqrt(2), 0, 0]])
    lat = lattice_detect([[0.0, 0, 0]])
    assert lat.rank == 0 and periodicity_classify(lat) is Periodicity.NON_PERIODIC
    with pytest.raises(LatticeDetectionError):
        lattice_detect(np.zeros((0, 3)))


def test_lll_shortens():
    b = np.array([[1.0, 0, 0], [7.0, 1.0, 0], [3.0, 5.0, 1.0]])
    r = lll_reduce(b)
    assert np.max(np.linalg.norm(r, axis=1)) <= 1.0 + 1e-12
    assert abs(abs(np.linalg.det(r)) - 1.0) < 1e-12
