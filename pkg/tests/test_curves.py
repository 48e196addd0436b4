import numpy as np
import pytest

from tpzmc.curves import (
    PathSpec,
    PlanarDomain,
    continue_sheet,
    end_sheet_value,
    integrate_cumulative,
    integrate_form,
    rpd_curve,
    schwarz_h_curve,
)
from tpzmc.errors import ContinuationError, DegenerateCurveError, ParameterError, PreconditionError


def test_branch_points():
    c = schwarz_h_curve(0.5)
    bps = np.asarray(c.branch_points)
    assert len(bps) == 7
    assert np.allclose(np.abs(c.p(bps)), 0, atol=1e-9)
    assert c.is_branched
    assert len(rpd_curve(0.7).branch_points) == 7


def test_degenerate_and_invalid():
    with pytest.raises(DegenerateCurveError):
        schwarz_h_curve(1.0)
    with pytest.raises(ParameterError):
        schwarz_h_curve(-0.5)
    with pytest.raises(ParameterError):
        rpd_curve(0.0)


def test_sheet_continuity():
    c = schwarz_h_curve(0.5)
    path = PathSpec.polyline([1.0, 1.5j, -1.2 + 0.3j])
    w0 = complex(np.sqrt(c.p(1.0)))
    pts = continue_sheet(c, path, w0)
    w = np.array([p.w for p in pts])
    z = np.array([p.z for p in pts])
    assert np.allclose(w * w, c.p(z), rtol=1e-10)
    assert np.all(np.abs(np.diff(w)) < 0.5 * np.minimum(np.abs(w[1:]), np.abs(w[:-1])))


def test_reversal_negates_integral():
    c = schwarz_h_curve(0.5)
    form = lambda z, w: np.stack([1 / w, z / w, z * z / w], axis=-1)
    path = PathSpec.polyline([1.0, 0.8 + 0.9j, -0.4 + 1.1j])
    w0 = complex(np.sqrt(c.p(1.0)))
    fwd = integrate_form(c, path, form, w0)
    w1 = end_sheet_value(c, path, w0)
    back = integrate_form(c, path.reversed(), form, w1)
    assert np.allclose(fwd, -back, atol=1e-10)
    cum, ws = integrate_cumulative(c, path, form, w0)
    assert np.allclose(cum[-1], fwd) and np.allclose(cum[0], 0)
    assert len(ws) == 3


def test_branch_end_integral_is_additive():
    c = schwarz_h_curve(0.5)
    form = lambda z, w: np.stack([1 / w, z / w, 0 * z], axis=-1)
    b = 0.5 * np.exp(1j * np.pi / 3)
    mid = b + 0.2 * (1.0 - b)
    w0 = complex(np.sqrt(c.p(1.0)))
    full = integrate_form(c, PathSpec.polyline([1.0, b], branch_end=True), form, w0, tol=1e-12)
    head = integrate_form(c, PathSpec.polyline([1.0, mid]), form, w0, tol=1e-12)
    w_mid = end_sheet_value(c, PathSpec.polyline([1.0, mid]), w0)
    tail = integrate_form(c, PathSpec.polyline([mid, b], branch_end=True), form, w_mid, tol=1e-12)
    assert np.allclose(full, head + tail, atol=1e-10)


def test_guard_and_preconditions():
    c = schwarz_h_curve(0.5)
    b = 0.5 * np.exp(1j * np.pi / 3)
    w0 = complex(np.sqrt(c.p(1.0)))
    with pytest.raises(ContinuationError):
        integrate_form(c, PathSpec.polyline([1.0, b, 0.1j]), lambda z, w: np.stack([z, z, z], -1), w0)
    with pytest.raises(PreconditionError):
        integrate_form(c, PathSpec.polyline([1.0, 2.0]), lambda z, w: np.stack([z, z, z], -1), 5.0)
    with pytest.raises(PreconditionError):
        PathSpec.polyline([1.0, 1.0])
    with pytest.raises(PreconditionError):
        PathSpec.polyline([1.0, 2.0], branch_end=True).then(PathSpec.polyline([2.0, 3.0]))
    assert np.all(integrate_form(c, PathSpec(), None, w0) == 0)


def test_planar_domain():
    d = PlanarDomain("x", [1j, -1j])
    assert not d.is_branched
    assert np.allclose(d.p(np.array([0.3])), 1.0)
