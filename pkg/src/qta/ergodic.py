"""Cesaro averages of unitaries and eigenphase commensurability checks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .qlin import as_amplitudes, eig_unitary

TWO_PI = 2 * np.pi


@dataclass(frozen=True, eq=False)
class FixedSpaceProjector:
    matrix: np.ndarray
    rank: int
    tol: float


def fixed_space_projector(u, tol: float = 1e-8) -> FixedSpaceProjector:
    """Orthogonal projector onto ``ker(I - U)``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    vals, vecs = eig_unitary(u)
    fixed = vecs[:, np.abs(vals - 1) < tol]
    d = vecs.shape[0]
    if fixed.shape[1] == 0:
        return FixedSpaceProjector(np.zeros((d, d), dtype=complex), 0, tol)
    q, _ = np.linalg.qr(fixed)
    p = q @ q.conj().T
    return FixedSpaceProjector(0.5 * (p + p.conj().T), fixed.shape[1], tol)


def cesaro_average(u, x, n: int) -> np.ndarray:
    """``(1/N) sum_{k<N} U^k x`` by repeated matrix-vector products."""
    if n < 1:
        raise ValueError("N must be at least 1")
    u = np.asarray(u, dtype=complex)
    v = as_amplitudes(x).copy()
    acc = np.zeros_like(v)
    for _ in range(n):
        acc += v
        v = u @ v
    return acc / n


@dataclass(frozen=True, eq=False)
class ErgodicConvergence:
    n: np.ndarray  # 1..Nmax
    error: np.ndarray
    bound: np.ndarray
    constant: float
    gap: float
    projector: FixedSpaceProjector

    def rows(self):
        return zip(self.n.tolist(), self.error.tolist(), self.bound.tolist())


def ergodic_convergence_check(u, x, n_max: int, tol: float = 1e-8, support_tol: float = 1e-12):
    """Errors ``e(N) = |A_N x - P x|`` for ``N = 1..n_max`` with the bound ``C/N``.

    ``C = 2 |x| / gap`` where ``gap`` is the smallest ``|1 - lambda|`` over
    non-fixed eigenvalues whose eigenvectors carry weight in ``x``.
    """
    if n_max < 2:
        raise ValueError("Nmax must be at least 2")
    u = np.asarray(u, dtype=complex)
    x = as_amplitudes(x)
    proj = fixed_space_projector(u, tol)
    vals, vecs = eig_unitary(u)
    weights = np.abs(vecs.conj().T @ x)
    moving = (np.abs(vals - 1) >= tol) & (weights > support_tol)
    gap = float(np.min(np.abs(1 - vals[moving]))) if moving.any() else float("inf")
    px = proj.matrix @ x

    errors = np.empty(n_max)
    v = x.copy()
    acc = np.zeros_like(v)
    for k in range(n_max):
        acc += v
        v = u @ v
        errors[k] = np.linalg.norm(acc / (k + 1) - px)
    ns = np.arange(1, n_max + 1)
    c = 2 * float(np.linalg.norm(x)) / gap if np.isfinite(gap) else 0.0
    return ErgodicConvergence(ns, errors, c / ns, c, gap, proj)


@dataclass(frozen=True, eq=False)
class EigenphaseReport:
    phases: np.ndarray
    rational: np.ndarray  # symmetric bool matrix; only distinct pairs can be True
    degenerate: np.ndarray  # symmetric bool matrix of coinciding phases
    q_max: int
    tol: float

    @property
    def rational_pairs(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.rational, 1))
        return list(zip(i.tolist(), j.tolist()))

    def to_dict(self) -> dict:
        return {
            "phases": [float(p) for p in self.phases],
            "rationalPairs": [list(p) for p in self.rational_pairs],
            "degeneratePairs": int(np.triu(self.degenerate, 1).sum()),
            "qMax": self.q_max,
            "tol": self.tol,
        }


def is_near_rational(r: float, q_max: int, tol: float) -> bool:
    """Whether ``r`` lies within ``tol`` of some ``p/q`` with ``q <= q_max``."""
    best = Fraction(r).limit_denominator(q_max)
    return abs(r - float(best)) < tol


def eigenphase_report(u, q_max: int = 64, tol: float = 1e-9, distinct_tol: float = 1e-8):
    """Sorted eigenphases in ``[0, 2 pi)`` and pairwise bounded-denominator rationality flags.

    For a pair of distinct phases the smaller is divided by the larger, so a
    zero phase pairs rationally (ratio 0) with everything.
    """
    if q_max < 1:
        raise ValueError("qMax must be at least 1")
    vals, _ = eig_unitary(u)
    phases = np.sort(np.mod(np.angle(vals), TWO_PI))
    # angle() can return values that wrap to exactly 2 pi after mod.
    phases[phases >= TWO_PI] = 0.0
    phases = np.sort(phases)
    d = phases.size
    rational = np.zeros((d, d), dtype=bool)
    degenerate = np.zeros((d, d), dtype=bool)
    for i in range(d):
        for j in range(i + 1, d):
            lo, hi = phases[i], phases[j]
            gap = min(hi - lo, TWO_PI - (hi - lo))
            if gap < distinct_tol:
                degenerate[i, j] = degenerate[j, i] = True
                continue
            flag = is_near_rational(lo / hi, q_max, tol)
            rational[i, j] = rational[j, i] = flag
    return EigenphaseReport(phases, rational, degenerate, q_max, tol)
