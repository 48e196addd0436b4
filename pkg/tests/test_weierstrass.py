import numpy as np
import pytest

from tpzmc import families as fam
from tpzmc.curves import PathSpec
from tpzmc.errors import NotACycleError
from tpzmc.weierstrass import (
    clear_pairs,
    dumbbell_cycle,
    homology_periods,
    pair_period,
    period_vector,
    surface_point,
)


def _bilinear(phi, lorentz):
    d = np.array([-1.0, 1.0, 1.0]) if lorentz else np.ones(3)
    return np.sum(phi * phi * d, axis=-1)


def test_phi_is_null():
    z = np.array([0.3 + 0.2j, -0.7 + 1.1j])
    for spec in (fam.schwarz_h_zmc(0.5), fam.schwarz_h_r3(0.5), fam.karcher_maxface(3), fam.rpd(0.7)):
        w = np.sqrt(spec.data.domain.p(z))
        phi = spec.data.phi(z, w)
        assert np.allclose(_bilinear(phi, spec.signature == "lorentz"), 0, atol=1e-12)


def test_base_point_maps_to_origin():
    data = fam.schwarz_h_zmc(0.5).data
    assert data.domain.on_curve(data.base_z, data.base_w)
    p = surface_point(data, PathSpec.polyline([1.0, 0.9]))
    assert np.linalg.norm(p) < 0.2


def test_pair_period_matches_dumbbell():
    data = fam.schwarz_h_r3(0.5).data
    a, b = clear_pairs(data.domain)[0]
    p = pair_period(data, a, b)
    cyc = dumbbell_cycle(a, b, 0.02)
    q = period_vector(data, cyc, tol=1e-11)
    assert np.allclose(np.abs(p), np.abs(q), atol=1e-7)


def test_not_a_cycle():
    data = fam.schwarz_h_zmc(0.5).data
    with pytest.raises(NotACycleError):
        period_vector(data, PathSpec.polyline([1.0, 2.0]))
    b = 0.5 * np.exp(1j * np.pi / 3)
    with pytest.raises(NotACycleError):
        period_vector(data, PathSpec.circle(b, 0.1))


def test_zmc_maxface_periods_are_real_vectors():
    per = homology_periods(fam.schwarz_h_zmc(0.5).data)
    assert per.shape[1] == 3 and np.isrealobj(per)
