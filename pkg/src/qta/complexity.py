"""Reversal operators, coarse complexity, and k-local Pauli Hamiltonians."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .qca import PAULI, GlobalOperator, evolve
from .qlin import (
    MAX_QUBITS,
    NORM_TOL,
    NumericalContractError,
    _as_generator,
    as_amplitudes,
    eig_hermitian,
)


@dataclass(frozen=True, eq=False)
class ReversalOperator:
    matrix: np.ndarray
    phase: float
    overlap: float


@dataclass(frozen=True)
class ComplexityReport:
    value: float
    overlap: float


def reversal_operator(psi0, psi_t) -> ReversalOperator:
    """Minimal-Frobenius-norm Hermitian ``R`` with ``R psi_t = e^{i phase} psi0``.

    The phase rotates ``psi0`` so its overlap ``s`` with ``psi_t`` is real
    and nonnegative; then ``R = b x^H + x b^H - s x x^H`` with ``x = psi_t``
    and ``b`` the rotated ``psi0``.
    """
    a0, x = as_amplitudes(psi0), as_amplitudes(psi_t)
    if a0.shape != x.shape:
        raise ValueError(f"state shapes differ: {a0.shape} vs {x.shape}")
    for v in (a0, x):
        if abs(np.linalg.norm(v) - 1) > NORM_TOL:
            raise NumericalContractError("reversal operator needs normalized states")
    c = np.vdot(x, a0)
    s = abs(c)
    phase = 0.0 if s == 0 else -float(np.angle(c))
    b = np.exp(1j * phase) * a0
    r = np.outer(b, x.conj()) + np.outer(x, b.conj()) - s * np.outer(x, x.conj())
    # Symmetrize away rounding so the Hermitian contract is exact to ~1e-16.
    r = 0.5 * (r + r.conj().T)
    return ReversalOperator(r, phase, float(min(s, 1.0)))


def coarse_complexity(r: ReversalOperator) -> ComplexityReport:
    """Sum of squared eigenvalue moduli of ``R`` (its squared Frobenius norm)."""
    value = float(np.sum(np.abs(r.matrix) ** 2))
    return ComplexityReport(value, r.overlap)


def complexity_of_evolution(state0, g: GlobalOperator, t: int) -> ComplexityReport:
    traj = evolve(state0, g, t)
    return coarse_complexity(reversal_operator(traj.amplitudes[0], traj.amplitudes[-1]))


@dataclass(frozen=True)
class PauliString:
    letters: str

    def __post_init__(self):
        bad = set(self.letters) - set("IXYZ")
        if bad or not self.letters:
            raise ValueError(f"invalid Pauli string {self.letters!r}")

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return pauli_weight(self)

    def matrix(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for ch in self.letters:
            out = np.kron(out, PAULI[ch])
        return out


def pauli_weight(p) -> int:
    letters = p.letters if isinstance(p, PauliString) else str(p)
    if set(letters) - set("IXYZ"):
        raise ValueError(f"invalid Pauli string {letters!r}")
    return sum(ch != "I" for ch in letters)


@dataclass(frozen=True, eq=False)
class KLocalHamiltonian:
    n_qubits: int
    k: int
    terms: list  # (PauliString, J)
    matrix: np.ndarray

    def to_dict(self) -> dict:
        return {
            "K": self.n_qubits,
            "k": self.k,
            "terms": [{"letters": p.letters, "J": float(j)} for p, j in self.terms],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KLocalHamiltonian":
        strings = [PauliString(t["letters"]) for t in d["terms"]]
        k = int(d.get("k", strings[0].weight if strings else 1))
        return hamiltonian_from_terms(zip(strings, (float(t["J"]) for t in d["terms"])), k)


def k_local_strings(n: int, k: int) -> list[PauliString]:
    """All weight-``k`` strings: site subsets in lexicographic order, then letters in XYZ order."""
    out = []
    for sites in itertools.combinations(range(n), k):
        for letters in itertools.product("XYZ", repeat=k):
            chars = ["I"] * n
            for s, a in zip(sites, letters):
                chars[s] = a
            out.append(PauliString("".join(chars)))
    return out


def hamiltonian_from_terms(terms, k: int) -> KLocalHamiltonian:
    terms = [(p if isinstance(p, PauliString) else PauliString(p), float(j)) for p, j in terms]
    if not terms:
        raise ValueError("Hamiltonian needs at least one term")
    n = terms[0][0].n
    dim = 1 << n
    h = np.zeros((dim, dim), dtype=complex)
    for p, j in terms:
        if p.n != n:
            raise ValueError("terms act on different register sizes")
        if p.weight != k:
            raise ValueError(f"term {p.letters} has weight {p.weight}, expected {k}")
        h += j * p.matrix()
    h.setflags(write=False)
    return KLocalHamiltonian(n, k, terms, h)


def build_k_local(n: int, k: int, seed=None, couplings=None) -> KLocalHamiltonian:
    """Exactly k-local Hamiltonian with one coupling per (site subset, letter tuple).

    Couplings are standard normal draws from ``seed`` unless given explicitly,
    in the order of ``k_local_strings``.
    """
    if not 1 <= k <= n <= MAX_QUBITS:
        raise ValueError(f"need 1 <= k <= K <= {MAX_QUBITS}, got k={k}, K={n}")
    strings = k_local_strings(n, k)
    if couplings is None:
        if seed is None:
            raise ValueError("provide a seed or explicit couplings")
        couplings = _as_generator(seed).standard_normal(len(strings))
    couplings = np.asarray(couplings, dtype=float).reshape(-1)
    if couplings.size != len(strings):
        raise ValueError(f"expected {len(strings)} couplings, got {couplings.size}")
    assert len(strings) == comb(n, k) * 3**k
    return hamiltonian_from_terms(zip(strings, couplings), k)


def time_evolution(h: KLocalHamiltonian, t: float) -> np.ndarray:
    """``exp(-i H t)`` through the spectral decomposition of ``H``."""
    m = h.matrix if isinstance(h, KLocalHamiltonian) else np.asarray(h, dtype=complex)
    energies, v = eig_hermitian(m)
    return (v * np.exp(-1j * energies * t)) @ v.conj().T
