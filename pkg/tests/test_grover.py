import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcsim.errors import DomainError
from qcsim.gates import hadamard_layer, run_circuit
from qcsim.grover import (
    default_iterations,
    diffuse,
    grover_operator_matrix,
    grover_search,
    grover_state,
    initial_angle,
    oracle_reflect,
    quantum_count,
    quantum_count_full,
    rotation_matrix,
    success_probability,
    uniform_state,
)
from qcsim.rng import Rng
from qcsim.state import StateVector, equal_up_to_global_phase

from conftest import random_amplitudes


def circuit_diffusion(s):
    """H^n (2|0><0| - I) H^n, built from gates instead of the mean trick."""
    n = s.num_qubits
    h = hadamard_layer(n)
    t = run_circuit(h, s)
    amps = -t.amplitudes.copy()
    amps[0] *= -1
    return run_circuit(h, StateVector(amps))


class TestSmallCases:
    def test_n4_one_iteration_exact(self):
        for x in range(4):
            s = grover_state(2, [x], 1)
            assert abs(abs(s.amplitudes[x]) - 1) < 1e-10
            for seed in range(20):
                assert grover_search(2, [x], Rng(seed)).index == x

    def test_n2_no_improvement(self):
        for m in range(4):
            assert abs(success_probability(1, 1, m) - 0.5) < 1e-12
            s = grover_state(1, [1], m)
            assert abs(abs(s.amplitudes[1]) ** 2 - 0.5) < 1e-12

    def test_default_iterations(self):
        assert default_iterations(2, 1) == 1
        assert default_iterations(1, 1) == 0
        for n in range(4, 16):
            approx = math.pi / 4 * math.sqrt(1 << n)
            assert abs(default_iterations(n, 1) - approx) <= 1

    def test_default_is_best(self):
        for n in range(1, 11):
            for M in (1, 2, 3):
                if M >= 1 << n:
                    continue
                m = default_iterations(n, M)
                th = initial_angle(n, M)
                dist = abs((2 * m + 1) * th - math.pi / 2)
                for other in range(0, m + 3):
                    assert dist <= abs((2 * other + 1) * th - math.pi / 2) + 1e-12

    def test_domain(self):
        with pytest.raises(DomainError):
            grover_search(2, [], Rng(0))
        with pytest.raises(DomainError):
            grover_search(2, [4], Rng(0))
        with pytest.raises(DomainError):
            grover_search(1, [0, 1], Rng(0))


class TestAmplitudeFormula:
    def test_grid(self):
        gen = np.random.default_rng(1)
        for n in range(1, 9):
            for M in (1, 2, 3):
                if M >= 1 << n:
                    continue
                marked = sorted(set(gen.choice(1 << n, M, replace=False).tolist()))
                s = uniform_state(n)
                th = initial_angle(n, M)
                for m in range(21):
                    p = float(np.sum(np.abs(s.amplitudes[marked]) ** 2))
                    assert abs(p - math.sin((2 * m + 1) * th) ** 2) < 1e-9
                    s = diffuse(oracle_reflect(s, marked))

    @given(st.integers(1, 7), st.integers(0, 10 ** 6))
    @settings(max_examples=40, deadline=None)
    def test_two_dimensional_invariant(self, n, seed):
        g = np.random.default_rng(seed)
        M = int(g.integers(1, 1 << n))
        marked = sorted(g.choice(1 << n, M, replace=False).tolist())
        s = grover_state(n, marked, int(g.integers(0, 10)))
        a = s.amplitudes
        mask = np.zeros(1 << n, dtype=bool)
        mask[marked] = True
        assert np.allclose(a[mask], a[mask][0])
        assert np.allclose(a[~mask], a[~mask][0])
        assert abs(s.norm() - 1) < 1e-12

    def test_rotation_restricted(self):
        n, marked = 4, [3, 9]
        th = initial_angle(n, 2)
        v = np.array([math.cos(th), math.sin(th)])
        s = uniform_state(n)
        R = rotation_matrix(th)
        for _ in range(6):
            s = diffuse(oracle_reflect(s, marked))
            v = R @ v
            assert abs(abs(s.amplitudes[3]) * math.sqrt(2) - abs(v[1])) < 1e-12


class TestDiffusion:
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_mean_inversion_matches_gates(self, n):
        for seed in range(3):
            s = StateVector(random_amplitudes(n, seed))
            assert equal_up_to_global_phase(diffuse(s), circuit_diffusion(s), 1e-10)

    def test_involution(self):
        s = StateVector(random_amplitudes(4, 2))
        assert diffuse(diffuse(s)) == s
        assert oracle_reflect(oracle_reflect(s, [1, 5]), [1, 5]) == s


class TestSearchStatistics:
    def test_success_rate(self):
        n, marked = 6, [17]
        p = success_probability(n, 1, default_iterations(n, 1))
        wins = sum(grover_search(n, marked, Rng(seed)).found for seed in range(2000))
        assert abs(wins / 2000 - p) < 4 * math.sqrt(p * (1 - p) / 2000) + 1e-3


class TestCounting:
    def test_routes_agree(self):
        for n, marked in ((3, [1]), (4, [2, 7, 11]), (4, [0, 1, 2, 3])):
            for seed in range(6):
                a = quantum_count(n, marked, 6, Rng(seed))
                b = quantum_count_full(n, marked, 6, Rng(seed))
                assert a.estimate == b.estimate

    def test_estimates_are_close(self):
        n, marked = 5, [1, 4, 9, 16, 25]
        ests = [quantum_count(n, marked, 8, Rng(seed)).estimate for seed in range(50)]
        assert np.mean(np.abs(np.array(ests) - 5) <= 1) > 0.8

    def test_operator_is_unitary(self):
        g = grover_operator_matrix(3, [2])
        assert np.allclose(g.conj().T @ g, np.eye(8))
