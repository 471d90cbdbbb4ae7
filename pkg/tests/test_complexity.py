import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from math import comb

from qta.complexity import (
    KLocalHamiltonian,
    PauliString,
    build_k_local,
    coarse_complexity,
    complexity_of_evolution,
    pauli_weight,
    reversal_operator,
    time_evolution,
)
from qta.qca import CNOT, PAULI, LocalRule, build_global_operator
from qta.qlin import NumericalContractError, RngSeed, StateVector, haar_unitary, random_state


def eig_complexity(r):
    """Independent route: eigendecompose and sum squared moduli."""
    return float(np.sum(np.abs(np.linalg.eigvals(r)) ** 2))


class TestReversalOperator:
    def test_identical_states(self):
        psi = random_state(3, RngSeed(1))
        r = reversal_operator(psi, psi)
        np.testing.assert_allclose(r.matrix, psi.density_matrix(), atol=1e-15)
        np.testing.assert_allclose(r.matrix @ psi.amplitudes, psi.amplitudes, atol=1e-15)
        assert r.overlap == pytest.approx(1)

    def test_orthogonal_states(self):
        a, b = StateVector.basis("01"), StateVector.basis("10")
        r = reversal_operator(a, b)
        expected = np.outer(a.amplitudes, b.amplitudes) + np.outer(b.amplitudes, a.amplitudes)
        np.testing.assert_array_equal(r.matrix, expected)
        w = np.linalg.eigvalsh(r.matrix)
        np.testing.assert_allclose(sorted(w[np.abs(w) > 1e-12]), [-1, 1])
        assert r.phase == 0

    def test_overlap_point_six(self):
        x = StateVector.basis("00")
        psi0 = StateVector(np.array([0.6, 0.8, 0, 0]))
        r = reversal_operator(psi0, x)
        # subspace frame {x, u} with u = |01>
        sub = r.matrix[:2, :2]
        np.testing.assert_allclose(sub, [[0.6, 0.8], [0.8, 0]], atol=1e-15)
        assert np.sum(np.linalg.eigvalsh(sub) ** 2) == pytest.approx(1.64, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            reversal_operator(StateVector.basis("00"), StateVector.basis("000"))

    def test_unnormalized(self):
        with pytest.raises(NumericalContractError):
            reversal_operator(np.array([1, 1]), np.array([1, 0]))

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**31), n=st.integers(1, 4))
    def test_contract_on_random_pairs(self, seed, n):
        psi0 = random_state(n, RngSeed(seed, 0))
        psit = random_state(n, RngSeed(seed, 1))
        r = reversal_operator(psi0, psit)
        assert np.max(np.abs(r.matrix - r.matrix.conj().T)) < 1e-10
        target = np.exp(1j * r.phase) * psi0.amplitudes
        assert np.linalg.norm(r.matrix @ psit.amplitudes - target) < 1e-8
        c = coarse_complexity(r)
        assert abs(c.value - (2 - r.overlap**2)) < 1e-8
        assert abs(c.value - eig_complexity(r.matrix)) < 1e-8
        assert 1 - 1e-12 <= c.value <= 2 + 1e-12


class TestCoarseComplexity:
    def test_examples(self):
        psi = random_state(2, RngSeed(2))
        assert coarse_complexity(reversal_operator(psi, psi)).value == pytest.approx(1, abs=1e-12)
        orth = reversal_operator(StateVector.basis("0"), StateVector.basis("1"))
        assert coarse_complexity(orth).value == pytest.approx(2, abs=1e-12)
        r = reversal_operator(StateVector(np.array([0.6, 0.8])), StateVector.basis("0"))
        assert coarse_complexity(r).value == pytest.approx(1.64, abs=1e-12)
        assert eig_complexity(r.matrix) == pytest.approx(1.64, abs=1e-12)


class TestComplexityOfEvolution:
    def test_zero_steps(self):
        g = build_global_operator(LocalRule([haar_unitary(4, RngSeed(3))]), 3)
        assert complexity_of_evolution(random_state(3, RngSeed(4)), g, 0).value == pytest.approx(1)

    def test_identity_rule(self):
        g = build_global_operator(LocalRule([np.eye(4)]), 3)
        assert complexity_of_evolution(random_state(3, RngSeed(4)), g, 7).value == pytest.approx(1)

    def test_cnot_one_step(self):
        g = build_global_operator(LocalRule([CNOT]), 3)
        c = complexity_of_evolution(StateVector.basis("100"), g, 1)
        assert abs(c.value - 1.2) < 1e-9

    def test_global_phase_invariance(self):
        g = build_global_operator(LocalRule([haar_unitary(4, RngSeed(5))]), 3)
        psi = random_state(3, RngSeed(6))
        base = complexity_of_evolution(psi, g, 4).value
        for theta in (0.3, 2.0, -1.1):
            rotated = StateVector(np.exp(1j * theta) * psi.amplitudes)
            assert abs(complexity_of_evolution(rotated, g, 4).value - base) < 1e-12


class TestPauli:
    @pytest.mark.parametrize("s,w", [("III", 0), ("XIZ", 2), ("YYY", 3)])
    def test_weight(self, s, w):
        assert pauli_weight(s) == w
        assert PauliString(s).weight == w

    def test_invalid_letter(self):
        with pytest.raises(ValueError):
            pauli_weight("XAZ")
        with pytest.raises(ValueError):
            PauliString("Q")

    def test_matrix_ordering(self):
        np.testing.assert_array_equal(PauliString("XZ").matrix(), np.kron(PAULI["X"], PAULI["Z"]))


class TestKLocal:
    def test_term_count_3_2(self):
        assert len(build_k_local(3, 2, seed=RngSeed(0)).terms) == 27

    @pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 6) for k in range(1, n + 1)])
    def test_term_counts(self, n, k):
        h = build_k_local(n, k, seed=RngSeed(n, k))
        assert len(h.terms) == comb(n, k) * 3**k
        assert all(p.weight == k for p, _ in h.terms)
        assert np.max(np.abs(h.matrix - h.matrix.conj().T)) < 1e-10

    def test_single_term_sigma_z(self):
        h = build_k_local(1, 1, couplings=[0, 0, 1])
        np.testing.assert_array_equal(h.matrix, PAULI["Z"])

    def test_k_exceeds_K(self):
        with pytest.raises(ValueError):
            build_k_local(2, 3, seed=RngSeed(0))

    def test_round_trip(self):
        h = build_k_local(3, 2, seed=RngSeed(9))
        h2 = KLocalHamiltonian.from_dict(h.to_dict())
        np.testing.assert_array_equal(h.matrix, h2.matrix)


class TestTimeEvolution:
    def test_t_zero(self):
        h = build_k_local(3, 2, seed=RngSeed(1))
        assert np.max(np.abs(time_evolution(h, 0) - np.eye(8))) < 1e-12

    def test_sigma_z_at_pi(self):
        h = build_k_local(1, 1, couplings=[0, 0, 1])
        assert np.max(np.abs(time_evolution(h, np.pi) + np.eye(2))) < 1e-12

    def test_group_property_and_unitarity(self):
        h = build_k_local(3, 2, seed=RngSeed(2))
        u1, u2, u12 = time_evolution(h, 0.37), time_evolution(h, 1.9), time_evolution(h, 2.27)
        assert np.max(np.abs(u1 @ u2 - u12)) < 1e-8
        assert np.max(np.abs(u12.conj().T @ u12 - np.eye(8))) < 1e-8

    def test_matches_scipy_expm(self):
        from scipy.linalg import expm

        h = build_k_local(3, 3, seed=RngSeed(3))
        assert np.max(np.abs(time_evolution(h, 0.8) - expm(-0.8j * h.matrix))) < 1e-10

    @pytest.mark.parametrize("n,k", [(2, 1), (3, 2), (3, 3)])
    def test_eigenphases_match_energies(self, n, k):
        h = build_k_local(n, k, seed=RngSeed(n * 10 + k))
        t = 0.7
        u = time_evolution(h, t)
        w = np.linalg.eigvals(u)
        assert np.max(np.abs(np.abs(w) - 1)) < 1e-8
        expected = np.exp(-1j * np.linalg.eigvalsh(h.matrix) * t)
        # multiset match on the circle: greedy nearest pairing
        remaining = list(w)
        for z in expected:
            i = int(np.argmin(np.abs(np.array(remaining) - z)))
            assert abs(remaining.pop(i) - z) < 1e-6
