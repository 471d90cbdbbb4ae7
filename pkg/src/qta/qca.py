"""Quantum tensor automaton: summed per-site gate products on a cyclic register."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qlin import (
    MAX_QUBITS,
    NORM_TOL,
    UNITARY_TOL,
    NumericalContractError,
    StateVector,
    _as_generator,
    as_amplitudes,
    embed_two_qubit,
    is_unitary,
    n_qubits_of,
    partial_trace,
)

ANNIHILATION_TOL = 1e-12

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class AnnihilatedState(ArithmeticError):
    """The summed operator sent the state to (numerical) zero."""

    def __init__(self, step: int, norm: float):
        super().__init__(f"state annihilated at step {step} (norm {norm:.3e})")
        self.step = step
        self.norm = norm


@dataclass(frozen=True, eq=False)
class LocalRule:
    """Ordered sequence of 4x4 unitaries applied to each (site, right neighbour) pair."""

    gates: tuple

    def __post_init__(self):
        gates = tuple(np.array(g, dtype=complex) for g in self.gates)
        if not gates:
            raise ValueError("a rule needs at least one gate")
        for k, g in enumerate(gates):
            if g.shape != (4, 4):
                raise ValueError(f"gate {k} has shape {g.shape}, expected (4, 4)")
            if not is_unitary(g, UNITARY_TOL):
                raise NumericalContractError(f"gate {k} is not unitary")
            g.setflags(write=False)
        object.__setattr__(self, "gates", gates)


@dataclass(frozen=True, eq=False)
class GlobalOperator:
    n_qubits: int
    matrix: np.ndarray
    rule: LocalRule | None = None


def build_global_operator(rule: LocalRule, n: int) -> GlobalOperator:
    """Sum over sites ``j`` of the gate sequence applied at ``(j, j+1 mod n)``.

    Within a site the first gate acts first. The result is generally not
    unitary.
    """
    if not isinstance(rule, LocalRule):
        rule = LocalRule(rule)
    if not 2 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count {n} outside [2, {MAX_QUBITS}]")
    dim = 1 << n
    total = np.zeros((dim, dim), dtype=complex)
    for j in range(n):
        site = np.eye(dim, dtype=complex)
        for g in rule.gates:
            site = embed_two_qubit(g, j, n) @ site
        total += site
    total.setflags(write=False)
    return GlobalOperator(n, total, rule)


def step(state, g: GlobalOperator, *, index: int = 0) -> StateVector:
    """Apply the summed operator and renormalize."""
    a = as_amplitudes(state)
    if a.size != g.matrix.shape[0]:
        raise ValueError(f"state length {a.size} does not match operator {g.matrix.shape}")
    out = g.matrix @ a
    norm = np.linalg.norm(out)
    if norm <= ANNIHILATION_TOL:
        raise AnnihilatedState(index, norm)
    return StateVector(out / norm)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States for t = 0..T stored row-wise, plus their Born probabilities."""

    amplitudes: np.ndarray
    probabilities: np.ndarray = field(init=False)

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.amplitudes, dtype=complex))
        norms = np.linalg.norm(a, axis=1)
        if np.any(np.abs(norms - 1) > NORM_TOL):
            raise NumericalContractError("trajectory contains a non-normalized state")
        p = np.abs(a) ** 2
        a.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "probabilities", p)

    @property
    def steps(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def n_qubits(self) -> int:
        return n_qubits_of(self.amplitudes.shape[1])

    def __len__(self):
        return self.amplitudes.shape[0]

    def state(self, t: int) -> StateVector:
        return StateVector(self.amplitudes[t])

    @property
    def states(self) -> list[StateVector]:
        return [self.state(t) for t in range(len(self))]


def evolve(state0, g: GlobalOperator, steps: int) -> Trajectory:
    """Iterate ``step`` ``steps`` times; row ``t`` of the result is the state at time t."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    a0 = as_amplitudes(StateVector(as_amplitudes(state0)))
    if a0.size != g.matrix.shape[0]:
        raise ValueError(f"state length {a0.size} does not match operator {g.matrix.shape}")
    m = g.matrix
    out = np.empty((steps + 1, a0.size), dtype=complex)
    out[0] = a0
    for t in range(steps):
        v = m @ out[t]
        norm = np.linalg.norm(v)
        if norm <= ANNIHILATION_TOL:
            raise AnnihilatedState(t + 1, norm)
        out[t + 1] = v / norm
    return Trajectory(out)


def translation_matrix(n: int) -> np.ndarray:
    """Permutation taking ``|q0 q1 ... q(n-1)>`` to ``|q1 ... q(n-1) q0>``."""
    dim = 1 << n
    idx = np.arange(dim)
    msb = idx >> (n - 1)
    target = ((idx << 1) & (dim - 1)) | msb
    t = np.zeros((dim, dim), dtype=complex)
    t[target, idx] = 1.0
    return t


def translate(state) -> StateVector:
    a = as_amplitudes(state)
    n = n_qubits_of(a.size)
    return StateVector(translation_matrix(n) @ a)


def translation_invariance_defect(g) -> float:
    """``max |U T - T U|`` for the cyclic shift ``T``."""
    m = g.matrix if isinstance(g, GlobalOperator) else np.asarray(g, dtype=complex)
    t = translation_matrix(n_qubits_of(m.shape[0]))
    return float(np.max(np.abs(m @ t - t @ m)))


# Teleportation-driven variant ------------------------------------------------

TELEPORT_GATES = {(0, 0): "H", (0, 1): "X", (1, 0): "Y", (1, 1): "Z"}
_GATE_MATRIX = {"H": HADAMARD, "X": PAULI["X"], "Y": PAULI["Y"], "Z": PAULI["Z"]}
_BELL = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def teleport(qubit: np.ndarray, rng: np.random.Generator):
    """Teleport a single-qubit state through a fresh Bell pair.

    Returns the two measured bits (sender qubit, its Bell partner) and the
    corrected state on the receiving qubit.
    """
    psi = np.kron(np.asarray(qubit, dtype=complex), _BELL).reshape(2, 2, 2)
    # CNOT sender -> partner, then Hadamard on the sender.
    psi = psi.copy()
    psi[1] = psi[1, ::-1]
    psi = np.tensordot(HADAMARD, psi, axes=([1], [0]))
    probs = np.sum(np.abs(psi) ** 2, axis=2).reshape(-1)
    outcome = int(rng.choice(4, p=probs / probs.sum()))
    m1, m2 = outcome >> 1, outcome & 1
    received = psi[m1, m2] / np.linalg.norm(psi[m1, m2])
    if m2:
        received = PAULI["X"] @ received
    if m1:
        received = PAULI["Z"] @ received
    return (m1, m2), received, probs


def product_factors(state) -> np.ndarray:
    """Single-qubit factors of a product state, shape ``(n, 2)``.

    Raises ``NumericalContractError`` if the state is entangled.
    """
    if not isinstance(state, StateVector) and np.ndim(state) == 2:
        cells = np.asarray(state, dtype=complex)
        if cells.shape[1] != 2:
            raise ValueError("per-cell states must be length-2 vectors")
        return cells / np.linalg.norm(cells, axis=1, keepdims=True)
    a = as_amplitudes(state)
    n = n_qubits_of(a.size)
    rho = np.outer(a, a.conj())
    cells = np.empty((n, 2), dtype=complex)
    for q in range(n):
        r = partial_trace(rho, {q})
        w, v = np.linalg.eigh(r)
        if w[-1] < 1 - 1e-9:
            raise NumericalContractError(f"qubit {q} is entangled with the rest (purity {w[-1]:.6f})")
        cells[q] = v[:, -1]
    return cells


@dataclass(frozen=True, eq=False)
class TeleportationRun:
    n_qubits: int
    steps: int
    gate_log: list  # gate_log[t][j] = (gate, m1, m2)
    cell_states: np.ndarray  # shape (steps + 1, n, 2)
    min_fidelity: float

    def bit_pairs(self) -> np.ndarray:
        return np.array([[m1, m2] for row in self.gate_log for (_, m1, m2) in row])


def run_teleportation_qca(initial, steps: int, seed) -> TeleportationRun:
    """Synchronous update: cell ``j`` receives the gate selected by teleporting cell ``j+1``.

    The teleported qubit is returned to its cell unchanged, so only the
    classical bits influence the dynamics.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    cells = product_factors(initial)
    n = cells.shape[0]
    rng = _as_generator(seed)
    history = np.empty((steps + 1, n, 2), dtype=complex)
    history[0] = cells
    log = []
    min_fid = 1.0
    for t in range(steps):
        prev = history[t]
        row = []
        for j in range(n):
            (m1, m2), received, _ = teleport(prev[(j + 1) % n], rng)
            min_fid = min(min_fid, float(abs(np.vdot(prev[(j + 1) % n], received)) ** 2))
            gate = TELEPORT_GATES[(m1, m2)]
            history[t + 1, j] = _GATE_MATRIX[gate] @ prev[j]
            row.append((gate, m1, m2))
        log.append(row)
    return TeleportationRun(n, steps, log, history, min_fid)
