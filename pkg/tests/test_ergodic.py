import numpy as np
import pytest

from qta.complexity import build_k_local, time_evolution
from qta.ergodic import (
    cesaro_average,
    eigenphase_report,
    ergodic_convergence_check,
    fixed_space_projector,
    is_near_rational,
)
from qta.qca import CNOT
from qta.qlin import NumericalContractError, RngSeed, haar_unitary, random_state


def check_projector(p, u):
    m = p.matrix
    assert np.max(np.abs(m @ m - m)) < 1e-8
    assert np.max(np.abs(m - m.conj().T)) < 1e-10
    assert abs(np.trace(m).real - p.rank) < 1e-6
    assert np.max(np.abs(u @ m - m)) < 1e-8
    assert np.max(np.abs(m @ u - m)) < 1e-8


class TestFixedSpaceProjector:
    def test_identity(self):
        p = fixed_space_projector(np.eye(4))
        np.testing.assert_allclose(p.matrix, np.eye(4), atol=1e-12)
        assert p.rank == 4

    def test_diagonal(self):
        u = np.diag([1, np.exp(1j * np.pi / 3)])
        p = fixed_space_projector(u)
        np.testing.assert_allclose(p.matrix, np.diag([1, 0]), atol=1e-12)
        assert p.rank == 1

    def test_minus_identity(self):
        p = fixed_space_projector(-np.eye(3))
        assert p.rank == 0
        np.testing.assert_array_equal(p.matrix, 0)

    def test_degenerate_fixed_space(self):
        q = haar_unitary(6, RngSeed(1))
        u = q @ np.diag([1, 1, 1, 1j, -1, np.exp(0.3j)]) @ q.conj().T
        p = fixed_space_projector(u)
        assert p.rank == 3
        check_projector(p, u)

    def test_haar_unitaries(self):
        for s in range(10):
            u = haar_unitary(8, RngSeed(2, s))
            check_projector(fixed_space_projector(u), u)

    def test_non_unitary(self):
        with pytest.raises(NumericalContractError):
            fixed_space_projector(np.diag([1, 2]))


class TestCesaroAverage:
    def test_identity(self):
        x = random_state(2, RngSeed(0)).amplitudes
        for n in (1, 5, 17):
            np.testing.assert_allclose(cesaro_average(np.eye(4), x, n), x, atol=1e-15)

    def test_quarter_turn_cancels(self):
        a, b = 0.6, 0.8j
        out = cesaro_average(np.diag([1, 1j]), np.array([a, b]), 4)
        np.testing.assert_allclose(out, [a, 0], atol=1e-15)

    def test_minus_identity_even(self):
        x = random_state(2, RngSeed(1)).amplitudes
        np.testing.assert_allclose(cesaro_average(-np.eye(4), x, 10), 0, atol=1e-15)

    def test_linear(self):
        u = haar_unitary(8, RngSeed(3))
        x, y = (random_state(3, RngSeed(4, i)).amplitudes for i in range(2))
        lhs = cesaro_average(u, 2 * x - 0.5j * y, 37)
        rhs = 2 * cesaro_average(u, x, 37) - 0.5j * cesaro_average(u, y, 37)
        assert np.max(np.abs(lhs - rhs)) < 1e-10


class TestErgodicConvergence:
    def test_fixed_vector(self):
        u = np.diag([1, 1j, -1])
        conv = ergodic_convergence_check(u, np.array([1, 0, 0]), 50)
        np.testing.assert_allclose(conv.error, 0, atol=1e-15)

    def test_closed_form_two_level(self):
        theta = 0.9
        a, b = 0.6, 0.8
        u = np.diag([1, np.exp(1j * theta)])
        conv = ergodic_convergence_check(u, np.array([a, b]), 200)
        n = conv.n
        geometric = np.abs((1 - np.exp(1j * theta * n)) / (1 - np.exp(1j * theta)))
        np.testing.assert_allclose(conv.error, b * geometric / n, atol=1e-13)
        assert np.all(conv.error <= 2 * b / (n * abs(1 - np.exp(1j * theta))) + 1e-15)
        assert conv.gap == pytest.approx(abs(1 - np.exp(1j * theta)))

    def test_bound_pointwise_haar(self):
        for s in range(5):
            u = haar_unitary(8, RngSeed(5, s))
            x = random_state(3, RngSeed(6, s)).amplitudes
            conv = ergodic_convergence_check(u, x, 2000)
            assert np.all(conv.error <= conv.bound + 1e-12)

    def test_reaches_tolerance_at_ten_thousand(self):
        u = haar_unitary(8, RngSeed(7))
        x = random_state(3, RngSeed(8)).amplitudes
        conv = ergodic_convergence_check(u, x, 10_000)
        assert conv.gap > 1e-2
        assert conv.error[-1] < 1e-2

    def test_matches_cesaro_average(self):
        u = haar_unitary(4, RngSeed(9))
        x = random_state(2, RngSeed(10)).amplitudes
        conv = ergodic_convergence_check(u, x, 30)
        px = fixed_space_projector(u).matrix @ x
        for n in (1, 7, 30):
            assert abs(conv.error[n - 1] - np.linalg.norm(cesaro_average(u, x, n) - px)) < 1e-12


class TestEigenphaseReport:
    def test_exact_rational(self):
        rep = eigenphase_report(np.diag([np.exp(0.5j * np.pi), np.exp(1j * np.pi)]))
        np.testing.assert_allclose(rep.phases, [np.pi / 2, np.pi])
        assert rep.rational_pairs == [(0, 1)]

    def test_irrational(self):
        rep = eigenphase_report(np.diag([np.exp(1j), np.exp(1j * np.sqrt(2))]))
        assert rep.rational_pairs == []
        assert not is_near_rational(1 / np.sqrt(2), 64, 1e-5)

    def test_cnot_zero_phase(self):
        rep = eigenphase_report(CNOT)
        np.testing.assert_allclose(sorted(set(np.round(rep.phases, 12))), [0, np.pi])
        # every 0-vs-pi pair is rational (ratio 0); coinciding phases are degenerate
        assert len(rep.rational_pairs) == 3
        assert np.array_equal(rep.rational, rep.rational.T)
        assert not np.any(rep.rational & rep.degenerate)

    def test_phases_sorted_in_range(self):
        rep = eigenphase_report(haar_unitary(8, RngSeed(11)))
        assert np.all(np.diff(rep.phases) >= 0)
        assert np.all((rep.phases >= 0) & (rep.phases < 2 * np.pi))

    def test_k_local_generic_is_incommensurate(self):
        h = build_k_local(3, 2, seed=RngSeed(2019))
        rep = eigenphase_report(time_evolution(h, 1.0), q_max=16)
        assert rep.rational_pairs == []
