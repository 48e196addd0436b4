"""Recover an integer lattice from noisy period vectors.

Periods are folded in one at a time.  A vector outside the current span
raises the rank; a vector inside it is expressed in the current basis, its
coordinates are snapped to nearby rationals, and the enlarged lattice is
recomputed exactly by integer row reduction.  The result is LLL-reduced and
refitted to all inputs by least squares.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import reduce
import math

import numpy as np

from .errors import LatticeDetectionError


class Periodicity(str, Enum):
    NON_PERIODIC = "non-periodic"
    SINGLY_PERIODIC = "singly-periodic"
    DOUBLY_PERIODIC = "doubly-periodic"
    TRIPLY_PERIODIC = "triply-periodic"


@dataclass
class PeriodLattice:
    periods: np.ndarray
    rank: int
    basis: np.ndarray
    coordinates: np.ndarray = field(default=None)
    residual: float = 0.0

    def to_dict(self):
        return {
            "rank": self.rank,
            "basis": self.basis.tolist(),
            "residual": self.residual,
            "n_periods": int(len(self.periods)),
        }


def _row_basis(rows):
    """Basis of the integer row lattice (echelon form via Euclidean steps)."""
    m = [list(r) for r in rows]
    ncols = len(m[0]) if m else 0
    basis = []
    for j in range(ncols):
        live = [r for r in m if r[j] != 0]
        rest = [r for r in m if r[j] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[j]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[j] // piv[j]
                r = [x - q * y for x, y in zip(r, piv)]
                (nxt if r[j] != 0 else rest).append(r)
            live = nxt
        if live:
            basis.append(live[0])
        m = [r for r in rest if any(r)]
    return basis


def lll_reduce(basis, delta=0.75):
    """LLL reduction of a few real row vectors (Euclidean norm)."""
    b = [np.array(v, dtype=float) for v in basis]
    n = len(b)
    if n < 2:
        return np.array(b).reshape(n, -1)

    def gram_schmidt():
        bs, mu = [], np.zeros((n, n))
        for i in range(n):
            v = b[i].copy()
            for j in range(i):
                mu[i, j] = b[i] @ bs[j] / (bs[j] @ bs[j])
                v -= mu[i, j] * bs[j]
            bs.append(v)
        return bs, mu

    k = 1
    bs, mu = gram_schmidt()
    for _ in range(10_000):
        if k >= n:
            break
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                b[k] = b[k] - q * b[j]
                bs, mu = gram_schmidt()
        if bs[k] @ bs[k] >= (delta - mu[k, k - 1] ** 2) * (bs[k - 1] @ bs[k - 1]):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bs, mu = gram_schmidt()
            k = max(k - 1, 1)
    return np.array(b)


def _coordinates(basis, v):
    x, *_ = np.linalg.lstsq(basis.T, v, rcond=None)
    return x, float(np.linalg.norm(basis.T @ x - v))


def lattice_detect(periods, tol=1e-6, max_denominator=64):
    """Rank and basis of the integer lattice generated by ``periods``.

    Every input must be an integer combination of the returned basis within
    ``tol`` (scaled by ``max(1, |v|)``); otherwise
    :class:`LatticeDetectionError` reports the best residual found.
    """
    periods = np.asarray(periods, dtype=float).reshape(-1, 3)
    if len(periods) == 0:
        raise LatticeDetectionError("no periods given")
    norms = np.linalg.norm(periods, axis=1)
    live = periods[norms > tol]
    if len(live) == 0:
        return PeriodLattice(periods, 0, np.zeros((0, 3)), np.zeros((len(periods), 0)), float(norms.max()))
    live = live[np.argsort(np.linalg.norm(live, axis=1), kind="stable")]

    basis = live[:1].copy()
    for v in live[1:]:
        scale = max(1.0, float(np.linalg.norm(v)))
        x, orth = _coordinates(basis, v)
        if orth > tol * scale:
            if len(basis) == 3:
                raise LatticeDetectionError("periods span more than three dimensions", orth)
            basis = np.vstack([basis, v])
            continue
        fracs = [Fraction(float(xi)).limit_denominator(max_denominator) for xi in x]
        snapped = np.array([float(f) for f in fracs])
        resid = float(np.linalg.norm(basis.T @ snapped - v))
        if resid > tol * scale:
            raise LatticeDetectionError(
                f"period {v.tolist()} is not a rational combination of the basis", resid
            )
        if all(f.denominator == 1 for f in fracs):
            continue
        den = reduce(lambda p, q: p * q // math.gcd(p, q), (f.denominator for f in fracs), 1)
        r = len(basis)
        rows = [[den if i == j else 0 for j in range(r)] for i in range(r)]
        rows.append([int(f * den) for f in fracs])
        new = np.array(_row_basis(rows), dtype=float) / den
        basis = new @ basis

    basis = lll_reduce(basis)
    coords = np.array([_coordinates(basis, v)[0] for v in periods]).reshape(len(periods), -1)
    ints = np.rint(coords)
    # Least-squares refit of the basis to every input period.
    fitted, *_ = np.linalg.lstsq(ints, periods, rcond=None)
    if np.linalg.matrix_rank(ints) == len(basis):
        basis = fitted
    scales = np.maximum(1.0, norms)
    residual = float(np.max(np.linalg.norm(ints @ basis - periods, axis=1) / scales))
    if residual > tol:
        raise LatticeDetectionError(f"lattice fit residual {residual:.3e} exceeds {tol:.1e}", residual)
    return PeriodLattice(periods, len(basis), basis, ints.astype(int), residual)


def periodicity_classify(lattice):
    return [
        Periodicity.NON_PERIODIC,
        Periodicity.SINGLY_PERIODIC,
        Periodicity.DOUBLY_PERIODIC,
        Periodicity.TRIPLY_PERIODIC,
    ][lattice.rank]
