"""Acceptance criteria 1-11 at their stated tolerances.

Each criterion is split into sub-tests so that one failing sub-check does
not hide the others.  A one-line PASS/FAIL summary per criterion is printed
at the end of the pytest run (see ``conftest.py``).  Run this file directly
to get only the acceptance summary.
"""
import json
import math
import time

import numpy as np
import pytest

from conftest import record
from tpzmc import cli
from tpzmc import families as fam
from tpzmc.curves import PathSpec, end_sheet_value, integrate_form
from tpzmc.lattice import lattice_detect
from tpzmc.lorentz import minkowski_inner
from tpzmc.mesh import (
    boundary_geometry,
    group_translations,
    lattice_from_group,
    piece_generators,
    sample_fundamental_piece,
    symmetry_group,
)
from tpzmc.null_extension import (
    fold_translation,
    gamma,
    gamma_prime,
    matrix_A,
    sigma,
    sigma_prime,
    timelike_extend,
    translation_c,
)
from tpzmc.verification import (
    conformality_residuals,
    family_periods,
    fold_scan,
    line_checks,
    maxface_patch_curvature,
    scherk_extension_residual,
    scherk_graph_curvature,
)
from tpzmc.analysis import convergence_order


def _timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


# -- 1. null curve ----------------------------------------------------------


@pytest.mark.parametrize("a", [0.1, 0.5, 0.9])
def test_c1_null_curve_identity(a):
    rng = np.random.default_rng(1)

    def run():
        s = rng.uniform(-3 * np.pi, 3 * np.pi, 1000)
        v = gamma_prime(s, a)
        return float(np.max(np.abs(minkowski_inner(v, v))))

    worst, dt = _timed(run)
    ok = record(1, f"a={a}", worst <= 1e-12 and dt < 1.0, f"max={worst:.2e}, {dt:.2f}s")
    assert ok, (worst, dt)


# -- 2. folds ----------------------------------------------------------------


@pytest.mark.parametrize("a", [0.1, 0.5, 0.9])
def test_c2_fold_criterion_zmc(a):
    r, dt = _timed(fold_scan, fam.schwarz_h_zmc(a).data, 360)
    ok = record(2, f"zmc a={a}", r.max() <= 1e-10 and dt < 5.0, f"max={r.max():.2e}")
    assert ok


def test_c2_conjugate_fails_fold_check():
    r = fold_scan(fam.schwarz_h_zmc_conjugate(0.5).data, 360)
    failing = int(np.sum(r > 1e-10))
    ok = record(2, "conjugate fails", failing >= 300, f"{failing}/360 failing")
    assert ok


# -- 3. curve symmetries -----------------------------------------------------


def test_c3_symmetry_pushforwards():
    res, dt = _timed(fam.symmetry_residuals, 0.5, 100, np.random.default_rng(3))
    worst = max(max(v["pullback"], v["on_curve"]) for v in res.values())
    ok = record(3, "psi1..psi3", worst <= 1e-10 and dt < 5.0, f"max={worst:.2e}")
    assert ok, res


# -- 4. timelike extension ---------------------------------------------------


A4 = 0.5


def test_c4_conformality():
    r1, r2 = conformality_residuals(A4, 200, np.random.default_rng(4))
    ok = record(4, "conformal", max(r1, r2) <= 1e-10, f"{r1:.1e}, {r2:.1e}")
    assert ok


def test_c4_reflection_in_v_pi():
    rng = np.random.default_rng(5)
    u = rng.uniform(0, np.pi / 3, 200)
    v = rng.uniform(0, np.pi, 200)
    d = np.max(np.abs(timelike_extend(A4, u, np.pi + v) - timelike_extend(A4, u, np.pi - v)))
    ok = record(4, "v -> 2pi - v", d <= 1e-12, f"{d:.1e}")
    assert ok


def test_c4_boundary_lines():
    col0, col1, d0, dplane = line_checks(A4)
    worst = max(col0, col1, d0, dplane)
    ok = record(4, "lines u=0, u=pi/3", worst <= 1e-10, f"{worst:.1e}")
    assert ok


# -- 5. reflection identity --------------------------------------------------


A5 = 0.5
S5 = np.random.default_rng(6).uniform(-np.pi, np.pi, 50)


def test_c5_sigma_prime():
    A = matrix_A()
    d = np.max(np.abs(sigma_prime(A5, S5) - gamma_prime(np.pi / 3 - S5, A5) @ A.T))
    ok = record(5, "sigma' = A gamma'", d <= 1e-12, f"{d:.1e}")
    assert ok


def test_c5_c_from_both_expressions():
    c1, c2 = translation_c(A5)
    d = float(np.max(np.abs(c1 - c2)))
    ok = record(5, "c agreement", d <= 1e-12, f"{d:.1e}")
    assert ok


def test_c5_sigma_equals_A_gamma_plus_c():
    """Literal form of the identity; fails (the sign of the A-term is reversed)."""
    A = matrix_A()
    c, _ = translation_c(A5)
    d = float(np.max(np.linalg.norm(sigma(A5, S5) - (gamma(np.pi / 3 - S5, A5) @ A.T + c), axis=1)))
    ok = record(5, "sigma = A gamma + c", d <= 1e-10, f"max={d:.2f}")
    assert ok, f"sigma - (A gamma(pi/3 - s) + c) reaches {d:.3f}"


def test_c5_sigma_corrected_form_holds():
    """Supplementary: sigma = -A gamma(pi/3 - s) + c' with c' from s = 0."""
    A = matrix_A()
    d = float(np.max(np.linalg.norm(sigma(A5, S5) - (-gamma(np.pi / 3 - S5, A5) @ A.T + fold_translation(A5)), axis=1)))
    assert d <= 1e-10


# -- 6. boundary of the fundamental piece -----------------------------------


def test_c6_boundary_geometry():
    t0 = time.perf_counter()
    geo = boundary_geometry(sample_fundamental_piece(0.5))
    dt = time.perf_counter() - t0
    lines = max(geo["line1"]["residual"], geo["line2"]["residual"])
    planes = max(geo["plane"]["residual"], geo["plane_hat"]["residual"])
    timelike = geo["plane"]["causal"] == "timelike" and geo["plane_hat"]["causal"] == "timelike"
    ok = record(6, "two lines, two timelike planar curves",
                lines <= 1e-6 and planes <= 1e-6 and timelike and dt < 30,
                f"line {lines:.1e}, plane {planes:.1e}")
    assert ok


# -- 7. periodicity ----------------------------------------------------------


def _integer_fit(basis, periods):
    if len(periods) == 0:
        return 0.0
    x, *_ = np.linalg.lstsq(basis.T, np.asarray(periods).T, rcond=None)
    return float(np.max(np.linalg.norm(basis.T @ np.rint(x) - np.asarray(periods).T, axis=0)))


def test_c7_zmc_assembly_rank3():
    piece = sample_fundamental_piece(0.5)
    ops = symmetry_group(piece_generators(piece), 6)
    lat = lattice_from_group(ops)
    raw = np.vstack([group_translations(ops, limit=80), family_periods(fam.schwarz_h_zmc(0.5))])
    fit = _integer_fit(lat.basis, raw)
    ok = record(7, "schwarz-h-zmc", lat.rank == 3 and fit <= 1e-6, f"rank {lat.rank}, fit {fit:.1e}")
    assert ok


@pytest.mark.parametrize("family,parameter,rank", [
    (fam.RPD, 1 / math.sqrt(2), 3),
    (fam.RPD, math.sqrt(2), 3),
    (fam.SCHWARZ_H_R3, 0.5, 3),
    (fam.KARCHER_TOWER, 2, 1),
    (fam.KARCHER_TOWER, 3, 1),
])
def test_c7_family_ranks(family, parameter, rank):
    periods = family_periods(fam.family_spec(family, parameter))
    lat = lattice_detect(periods, tol=1e-6)
    fit = _integer_fit(lat.basis, periods)
    ok = record(7, f"{family} {parameter:.4g}", lat.rank == rank and fit <= 1e-6,
                f"rank {lat.rank}, fit {fit:.1e}")
    assert ok


# -- 8. zero mean curvature --------------------------------------------------


def test_c8_curvature_order_graph():
    r1, r2 = scherk_graph_curvature(0.05), scherk_graph_curvature(0.025)
    order = convergence_order(0.05, r1, 0.025, r2)
    ok = record(8, "graph order", order >= 1.8, f"{order:.2f}")
    assert ok


def test_c8_curvature_order_maxface():
    m1, m2 = maxface_patch_curvature(0.5, 16), maxface_patch_curvature(0.5, 32)
    order = convergence_order(1 / 16, m1, 1 / 32, m2)
    ok = record(8, "maxface order", order >= 1.8, f"{order:.2f}")
    assert ok


def test_c8_scherk_graph_residual():
    res, _, count = scherk_extension_residual(100, np.random.default_rng(8))
    ok = record(8, "scherk graph", res <= 1e-6 and count == 100, f"{res:.1e}")
    assert ok


# -- 9. limits ---------------------------------------------------------------


def test_c9_helicoid_a_0_1():
    d = fam.helicoid_limit_deviation(0.1)
    ok = record(9, "helicoid a=0.1", d <= 1.1e-3, f"{d:.3e}")
    assert ok, f"deviation {d:.4e} > 1.1e-3"


def test_c9_helicoid_a_0_01():
    d = fam.helicoid_limit_deviation(0.01)
    ok = record(9, "helicoid a=0.01", d <= 1e-5, f"{d:.1e}")
    assert ok


def test_c9_helicoid_monotone():
    d = [fam.helicoid_limit_deviation(a) for a in (0.3, 0.2, 0.1, 0.05)]
    ok = record(9, "helicoid monotone", all(x > y for x, y in zip(d, d[1:])))
    assert ok, d


def test_c9_nodal_monotone():
    samples = fam.nodal_circle(0.5)
    d = [fam.nodal_limit_comparison(a, samples) for a in (0.9, 0.99, 0.999)]
    ok = record(9, "nodal monotone", all(x > y for x, y in zip(d, d[1:])))
    assert ok, d


# -- 10. quadrature ----------------------------------------------------------


def _oracle(curve, points, form, w0, panels=400, order=10):
    """Dense composite Gauss-Legendre along a polyline with its own root tracking."""
    x, wts = np.polynomial.legendre.leggauss(order)
    total = np.zeros(3, dtype=complex)
    w_prev = complex(w0)
    for p, q in zip(points[:-1], points[1:]):
        t = (np.arange(panels)[:, None] + 0.5 * (x[None, :] + 1)).ravel() / panels
        z = p + (q - p) * t
        roots = np.sqrt(curve.p(z))
        w = np.empty_like(roots)
        for i, r in enumerate(roots):
            w[i] = r if abs(r - w_prev) <= abs(r + w_prev) else -r
            w_prev = w[i]
        weights = np.tile(wts, panels) / (2 * panels)
        total += (form(z, w) * (weights * (q - p))[:, None]).sum(axis=0)
        end = np.sqrt(curve.p(np.array([q])))[0]
        w_prev = end if abs(end - w_prev) <= abs(end + w_prev) else -end
    return total


def _random_paths(curve, n, rng, clearance=0.15):
    bps = np.asarray(curve.branch_points)
    paths = []
    while len(paths) < n:
        k = rng.integers(2, 5)
        pts = [1.0 + 0j] + list(rng.uniform(0.3, 2.2, k) * np.exp(1j * rng.uniform(0, 2 * np.pi, k)))
        ok = True
        for p, q in zip(pts[:-1], pts[1:]):
            t = np.linspace(0, 1, 400)
            if np.min(np.abs((p + (q - p) * t)[:, None] - bps[None, :])) < clearance:
                ok = False
        if ok:
            paths.append(pts)
    return paths


def test_c10_quadrature_oracle():
    data = fam.schwarz_h_zmc(0.5).data
    curve = data.domain
    rng = np.random.default_rng(10)
    t0 = time.perf_counter()
    worst = 0.0
    for pts in _random_paths(curve, 20, rng):
        got = integrate_form(curve, PathSpec.polyline(pts), data.phi, data.base_w, tol=1e-12)
        ref = _oracle(curve, pts, data.phi, data.base_w)
        worst = max(worst, float(np.max(np.abs(got - ref))))
    dt = time.perf_counter() - t0
    ok = record(10, "20 random paths", worst <= 1e-10 and dt < 30, f"{worst:.1e}")
    assert ok


def test_c10_monodromy_sign_flips():
    curve = fam.schwarz_h_zmc(0.5).data.domain
    bps = list(curve.branch_points)
    assert len(bps) == 7
    flips = 0
    for b in bps:
        r = 0.3 * min(abs(b - q) for q in bps if q != b)
        start = b + r
        w0 = complex(np.sqrt(curve.p(np.array([start])))[0])
        w1 = end_sheet_value(curve, PathSpec.circle(b, r), w0)
        flips += abs(w1 + w0) <= 1e-9 * abs(w0)
    ok = record(10, "monodromy", flips == 7, f"{flips}/7")
    assert ok


# -- 11. reproducibility -----------------------------------------------------


def _cli_run(folder, monkeypatch):
    folder.mkdir()
    monkeypatch.chdir(folder)
    args = ["generate", "--family", "schwarz-h-zmc", "--a", "0.5", "--seed", "7",
            "--out", "mesh.obj,mesh.ply", "--report", "report.json"]
    assert cli.main(args) == 0
    return {name: (folder / name).read_bytes() for name in ("mesh.obj", "mesh.ply", "report.json")}


def test_c11_byte_identical_outputs(tmp_path, monkeypatch):
    t0 = time.perf_counter()
    first = _cli_run(tmp_path / "run1", monkeypatch)
    second = _cli_run(tmp_path / "run2", monkeypatch)
    dt = time.perf_counter() - t0
    same = all(first[k] == second[k] for k in first)
    ok = record(11, "OBJ, PLY, JSON", same and dt < 60, f"{dt:.1f}s")
    assert ok
    assert json.loads(first["report.json"])["status"] == "pass"


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
