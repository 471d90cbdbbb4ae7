"""Dense complex linear algebra for small qubit registers.

Basis convention: index ``b`` of a length-``2**n`` vector is the bitstring
``q0 q1 ... q(n-1)`` with qubit 0 as the most significant bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

MASK64 = (1 << 64) - 1

UNITARY_TOL = 1e-10
EIG_TOL = 1e-8
NORM_TOL = 1e-9
MAX_QUBITS = 12


class NumericalContractError(ValueError):
    """Input violates a numerical precondition (unitarity, Hermiticity, norm)."""


def splitmix64(x: int) -> int:
    """One SplitMix64 output for state ``x``."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RngSeed:
    """Seed for one task of a seeded experiment.

    The task seed is ``splitmix64(master ^ task_index)``; the generator is
    numpy's PCG64 seeded with it.
    """

    master: int
    task_index: int = 0

    def __post_init__(self):
        for v in (self.master, self.task_index):
            if not 0 <= int(v) <= MASK64:
                raise ValueError(f"seed component {v} is not a 64-bit unsigned integer")

    @property
    def task_seed(self) -> int:
        return splitmix64((self.master ^ self.task_index) & MASK64)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.task_seed))


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, RngSeed):
        return seed.generator()
    if isinstance(seed, np.random.Generator):
        return seed
    return RngSeed(int(seed)).generator()


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector of an ``n``-qubit register."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        n = a.size.bit_length() - 1
        if a.size < 2 or 1 << n != a.size:
            raise ValueError(f"state length {a.size} is not a power of two >= 2")
        if not np.all(np.isfinite(a)):
            raise NumericalContractError("state has non-finite amplitudes")
        if abs(np.linalg.norm(a) - 1.0) > NORM_TOL:
            raise NumericalContractError(f"state norm {np.linalg.norm(a):.3e} is not 1")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis state from a bitstring such as ``"100"``."""
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"invalid bitstring {bits!r}")
        a = np.zeros(1 << len(bits), dtype=complex)
        a[int(bits, 2)] = 1.0
        return cls(a)

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        a = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(a)
        if norm == 0:
            raise NumericalContractError("cannot normalize the zero vector")
        return cls(a / norm)

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


def as_amplitudes(state) -> np.ndarray:
    if isinstance(state, StateVector):
        return state.amplitudes
    return np.asarray(state, dtype=complex).reshape(-1)


def n_qubits_of(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) < tol)


def is_hermitian(m: np.ndarray, tol: float = 1e-10) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - m.conj().T)) < tol)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def embed_two_qubit(u: np.ndarray, j: int, n: int) -> np.ndarray:
    """Lift a 4x4 gate onto qubits ``(j, (j+1) % n)`` of an ``n``-qubit register.

    Qubit ``j`` is the first tensor factor of ``u``. The wrap pair
    ``(n-1, 0)`` is handled like any other, so for ``n = 2`` the sites
    ``j = 0`` and ``j = 1`` give ``u`` with its factors swapped.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"two-qubit gate must be 4x4, got {u.shape}")
    if n < 2:
        raise ValueError("need at least two qubits")
    if not 0 <= j < n:
        raise ValueError(f"site {j} out of range for {n} qubits")
    k = (j + 1) % n
    dim = 1 << n
    # Act with u on the row indices of the identity, viewed as an n-fold tensor.
    eye = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    out = np.tensordot(u.reshape(2, 2, 2, 2), eye, axes=([2, 3], [j, k]))
    # tensordot puts the two gate output axes first; restore qubit order.
    out = np.moveaxis(out, [0, 1], [j, k])
    return out.reshape(dim, dim)


def _num_qubits_of_square(m: np.ndarray) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return n_qubits_of(m.shape[0])


def partial_trace(rho: np.ndarray, keep) -> np.ndarray:
    """Reduced density matrix on the qubits in ``keep`` (kept in ascending order)."""
    rho = np.asarray(rho, dtype=complex)
    n = _num_qubits_of_square(rho)
    keep = sorted(set(int(q) for q in keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep {keep} out of range for {n} qubits")
    traced = [q for q in range(n) if q not in keep]
    t = rho.reshape((2,) * (2 * n))
    # Contract each traced qubit's row index with its column index, highest first
    # so the remaining axis positions stay valid.
    m = n
    for q in reversed(traced):
        t = np.trace(t, axis1=q, axis2=q + m)
        m -= 1
    d = 1 << len(keep)
    return t.reshape(d, d)


def validate_density_matrix(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    _num_qubits_of_square(rho)
    if not is_hermitian(rho, 1e-10):
        raise NumericalContractError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > 1e-10:
        raise NumericalContractError("density matrix trace is not 1")
    if np.linalg.eigvalsh(rho)[0] < -1e-9:
        raise NumericalContractError("density matrix is not positive semidefinite")
    return rho


def haar_unitary(d: int, seed) -> np.ndarray:
    """Haar-random ``d x d`` unitary (Ginibre matrix, QR, phase-corrected columns)."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    rng = _as_generator(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_state(n: int, seed) -> StateVector:
    """Uniformly random pure state: i.i.d. complex normals, normalized."""
    if n < 1:
        raise ValueError("need at least one qubit")
    rng = _as_generator(seed)
    dim = 1 << n
    a = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(a / np.linalg.norm(a))


def eig_hermitian(m: np.ndarray):
    """Ascending real eigenvalues and orthonormal eigenvectors (columns)."""
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, EIG_TOL):
        raise NumericalContractError("matrix is not Hermitian")
    return np.linalg.eigh(m)


def eig_unitary(m: np.ndarray):
    """Eigenvalues (on the unit circle) and orthonormal eigenvectors of a unitary.

    Uses the complex Schur form, which is diagonal for normal matrices, so
    the Schur vectors are an orthonormal eigenbasis even under degeneracy.
    """
    m = np.asarray(m, dtype=complex)
    if not is_unitary(m, EIG_TOL):
        raise NumericalContractError("matrix is not unitary")
    t, z = scipy.linalg.schur(m, output="complex")
    vals = np.diag(t).copy()
    # Project rounding off the circle; off-diagonal Schur residue is O(eps).
    vals /= np.abs(vals)
    return vals, z
