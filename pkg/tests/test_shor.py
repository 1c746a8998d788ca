import math

import numpy as np
import pytest

from qcsim.errors import DomainError
from qcsim.gates import Gate, phase_gate, qft_circuit, run_circuit, standard_gate
from qcsim.measurement import probabilities
from qcsim.numtheory import classical_period
from qcsim.rng import Rng
from qcsim.shor import (
    PeriodInstance,
    collapse_function_register,
    exact_y_distribution,
    extract_period,
    factor,
    find_period,
    phase_estimate,
    prepare_period_state,
    progression_state,
    sample_y,
    structured_period_state,
    y_distribution,
)
from qcsim.state import StateVector, basis_state

S2 = 1 / math.sqrt(2)
INST15 = PeriodInstance(15, 7)
INST91 = PeriodInstance(91, 4)


def brute_distribution(inst, r):
    """Direct sum with Q terms, no closed form."""
    size = 1 << inst.n
    q = size // r
    k = np.arange(q)
    out = np.empty(size)
    for y in range(size):
        out[y] = abs(np.exp(2j * np.pi * k * r * y / size).sum()) ** 2 / (size * q)
    return out


class TestInstance:
    def test_sizes(self):
        assert (INST15.n0, INST15.n, INST15.r) == (4, 8, 4)
        assert (INST91.n0, INST91.n, INST91.r) == (7, 14, 6)
        assert 2 ** INST91.n > 91 ** 2

    def test_not_coprime(self):
        with pytest.raises(DomainError):
            PeriodInstance(91, 7)


class TestPrepare:
    def test_support_is_function_table(self):
        s = prepare_period_state(INST15)
        amps = s.amplitudes.reshape(256, 16)
        for x in range(256):
            fx = pow(7, x, 15)
            assert math.isclose(abs(amps[x, fx]), 1 / 16)
            assert np.count_nonzero(amps[x]) == 1
        assert set(np.flatnonzero(np.abs(amps).sum(axis=0))) == {1, 4, 7, 13}

    def test_too_large(self):
        with pytest.raises(DomainError):
            prepare_period_state(PeriodInstance(255, 2))


class TestCollapse:
    def test_progression(self):
        rng = Rng(3)
        s = prepare_period_state(INST15)
        for _ in range(10):
            f0, upper = collapse_function_register(s, INST15, rng)
            support = np.flatnonzero(np.abs(upper.amplitudes) > 1e-12)
            assert np.all(np.diff(support) == 4)
            assert support[0] < 4 and pow(7, int(support[0]), 15) == f0
            assert np.allclose(np.abs(upper.amplitudes[support]), 1 / math.sqrt(support.size))

    def test_structured_matches_collapse(self):
        rng = Rng(4)
        s = prepare_period_state(INST15)
        for _ in range(8):
            f0, upper = collapse_function_register(s, INST15, rng)
            x0 = int(np.flatnonzero(np.abs(upper.amplitudes) > 1e-12)[0])
            assert upper == structured_period_state(INST15, x0)
            assert upper == progression_state(8, x0, 4)

    def test_progression_half_register(self):
        s = progression_state(4, 0, 8)
        assert np.allclose(s.amplitudes[[0, 8]], S2)
        assert math.isclose(s.norm(), 1.0)


class TestDistribution:
    def test_table_values(self):
        d = y_distribution(INST91)
        for y in (0, 8192):
            assert abs(d[y] - 0.167) <= 0.001
        for y in (2731, 5461, 10923, 13653):
            assert abs(d[y] - 0.114) <= 0.001
        assert abs(d.probs.sum() - 1) < 1e-9

    def test_closed_form_matches_direct_sum(self):
        inst = PeriodInstance(21, 2)  # r = 6, n = 10
        assert np.allclose(y_distribution(inst).probs, brute_distribution(inst, 6), atol=1e-12)

    def test_power_of_two_period(self):
        d = y_distribution(INST15)
        q = 256 // 4
        mask = np.zeros(256, dtype=bool)
        mask[::q] = True
        assert np.allclose(d.probs[mask], 0.25) and np.allclose(d.probs[~mask], 0, atol=1e-15)

    def test_envelope(self):
        d = y_distribution(INST91)
        for m in range(6):
            center = m * (1 << 14) / 6
            for y in (math.floor(center), math.ceil(center)):
                delta = (y * 6 / (1 << 14) - m) * d.Q
                env = 1 / 6 * (1.0 if abs(delta) < 1e-12 else (math.sin(math.pi * delta) / (math.pi * delta)) ** 2)
                assert abs(d[y] - env) < 1e-3

    def test_peak_weights(self):
        d = y_distribution(INST91)
        for center in d.peak_centers():
            c = round(center)
            window = sum(d[(c + k) % (1 << 14)] for k in (-1, 0, 1))
            assert window > 4 / math.pi ** 2 / 6
            wide = sum(d[(c + k) % (1 << 14)] for k in range(-1365, 1365))
            assert abs(wide - 1 / 6) < 1e-3

    def test_exact_average_close_to_analytic(self):
        assert np.abs(exact_y_distribution(INST91) - y_distribution(INST91).probs).max() < 1e-3
        assert abs(exact_y_distribution(INST91).sum() - 1) < 1e-9

    def test_exact_average_matches_full_simulation(self):
        inst = PeriodInstance(21, 2)
        size = 1 << inst.n
        total = np.zeros(size)
        for x0 in range(6):
            st = structured_period_state(inst, x0)
            count = len(range(x0, size, 6))
            total += count / size * probabilities(run_circuit(qft_circuit(inst.n), st))
        assert np.allclose(total, exact_y_distribution(inst), atol=1e-12)


class TestSampling:
    def test_n15_only_multiples_of_64(self):
        rng = Rng(0)
        for path in ("full", "structured", "analytic"):
            ys = {sample_y(INST15, rng, path) for _ in range(40)}
            assert ys <= {0, 64, 128, 192}

    def test_paths_agree_in_distribution(self):
        inst = PeriodInstance(21, 2)
        probs = exact_y_distribution(inst)
        peaks = np.argsort(-probs)[:12]
        for path in ("full", "structured"):
            rng = Rng(11)
            ys = np.array([sample_y(inst, rng, path) for _ in range(2000)])
            for y in peaks[:6]:
                p = probs[y]
                sigma = math.sqrt(p * (1 - p) / ys.size)
                assert abs(np.mean(ys == y) - p) < 4 * sigma

    def test_analytic_sampler_frequencies(self):
        rng = Rng(12)
        d = y_distribution(INST91)
        ys = np.array([sample_y(INST91, rng, "analytic") for _ in range(10000)])
        for y in (0, 2731, 5461, 8192):
            p = d[y]
            assert abs(np.mean(ys == y) - p) < 3 * math.sqrt(p * (1 - p) / 10000)

    def test_bad_path(self):
        with pytest.raises(DomainError):
            sample_y(INST15, Rng(0), "magic")


class TestExtract:
    def test_multiple_needed(self):
        assert extract_period(5461, INST91) == 6

    def test_direct(self):
        assert extract_period(13653, INST91) == 6

    def test_zero_fails(self):
        assert extract_period(0, INST91) is None

    def test_recovers_for_small_moduli(self):
        failures = total = 0
        for N in (15, 21, 33, 35, 39, 51, 55, 57, 65, 69, 77, 85, 87, 91):
            for a in range(2, N):
                if math.gcd(a, N) != 1:
                    continue
                inst = PeriodInstance(N, a)
                rng = Rng(N * 1000 + a)
                total += 1
                try:
                    r, _ = find_period(inst, rng, "analytic", max_samples=10)
                    failures += r != classical_period(a, N)
                except Exception:
                    failures += 1
        assert failures / total <= 0.05


class TestFactor:
    def test_91_with_a4(self):
        res = factor(91, Rng(0), a=4)
        assert res.factors == (7, 13) and res.r == 6

    def test_15_with_a7(self):
        res = factor(15, Rng(0), a=7)
        assert res.factors == (3, 5) and res.r == 4

    def test_success_rate_15(self):
        wins = 0
        for seed in range(100):
            try:
                wins += factor(15, Rng(seed), max_attempts=1).factors == (3, 5)
            except Exception:
                pass
        assert wins > 40

    def test_rejects_prime_and_even(self):
        with pytest.raises(DomainError):
            factor(13, Rng(0))
        with pytest.raises(DomainError):
            factor(22, Rng(0))


class TestPhaseEstimation:
    def test_x_minus(self):
        minus = StateVector([S2, -S2])
        assert phase_estimate(standard_gate("X"), minus, 1, Rng(0)) == 1

    def test_x_plus(self):
        plus = StateVector([S2, S2])
        assert phase_estimate(standard_gate("X"), plus, 1, Rng(0)) == 0

    def test_r1_on_one(self):
        for seed in range(10):
            assert phase_estimate(phase_gate(1), basis_state(1, 1), 2, Rng(seed)) == 1

    def test_exact_phases(self):
        for k in range(16):
            u = np.diag([1, np.exp(2j * np.pi * k / 16)])
            assert phase_estimate(Gate(u), basis_state(1, 1), 4, Rng(k)) == k
