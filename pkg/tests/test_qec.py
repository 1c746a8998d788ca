import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcsim.errors import DomainError, UncorrectableError
from qcsim.qec import (
    CODE_NAMES,
    RESET,
    PauliString,
    bitflip3_ancilla_syndrome,
    code,
    correct,
    correction_cycle,
    decode,
    encode,
    encode_circuit,
    ft_concatenation,
    inject_error,
    logical_operator_check,
    measure_syndrome,
    pauli_commute_sign,
)
from qcsim.rng import Rng
from qcsim.state import StateVector, basis_state, equal_up_to_global_phase, inner_product

from conftest import random_amplitudes
from reference_tables import BITFLIP3_ANCILLA, FIVE_SIGNS, FT_ROWS, SHOR9_SIGNS

S2 = 1 / math.sqrt(2)
PAULI = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
}


def dense(p: PauliString) -> np.ndarray:
    out = np.eye(1)
    for ch in p.letters:
        out = np.kron(out, PAULI[ch])
    return out


def random_logical(seed):
    return StateVector(random_amplitudes(1, seed))


class TestPauliString:
    def test_parse_sparse_label(self):
        assert PauliString.parse("X1Z3", 4).letters == "XIZI"
        assert PauliString.parse("I", 3).letters == "III"
        assert PauliString.parse("Z2X3X4Z5", 5).letters == "IZXXZ"

    def test_bad_label(self):
        with pytest.raises(DomainError):
            PauliString.parse("X0", 3)
        with pytest.raises(DomainError):
            PauliString.parse("X4", 3)

    def test_label_round_trip(self):
        for letters in ("IXYZ", "ZZZ", "III"):
            p = PauliString(letters)
            assert PauliString.parse(p.label, len(letters)) == p

    @given(st.text("IXYZ", min_size=1, max_size=5), st.integers(0, 10 ** 6))
    @settings(max_examples=60, deadline=None)
    def test_action_matches_kronecker(self, letters, seed):
        p = PauliString(letters)
        amps = random_amplitudes(len(letters), seed)
        assert np.allclose(p.apply_array(amps), dense(p) @ amps, atol=1e-12)
        assert np.allclose(p.matrix(), dense(p))

    @given(st.text("IXYZ", min_size=3, max_size=3), st.text("IXYZ", min_size=3, max_size=3))
    def test_commute_sign_matches_matrices(self, a, b):
        p, q = dense(PauliString(a)), dense(PauliString(b))
        sign = pauli_commute_sign(PauliString(a), PauliString(b))
        assert np.allclose(p @ q, sign * q @ p)

    def test_weight(self):
        assert PauliString("IXIY").weight == 2


@pytest.mark.parametrize("name", CODE_NAMES)
class TestCodeStructure:
    def test_stabilizers_commute_and_square(self, name):
        c = code(name)
        for a, b in itertools.combinations(c.stabilizers, 2):
            assert pauli_commute_sign(a, b) == 1
        for m in c.stabilizers:
            mat = m.matrix()
            assert np.allclose(mat @ mat, np.eye(mat.shape[0]))

    def test_codewords_fixed(self, name):
        c = code(name)
        for m in c.stabilizers:
            for w in (c.logical_zero, c.logical_one):
                assert np.allclose(m.apply(w).amplitudes, w.amplitudes, atol=1e-10)

    def test_codewords_orthonormal(self, name):
        c = code(name)
        assert abs(c.logical_zero.norm() - 1) < 1e-12
        assert abs(c.logical_one.norm() - 1) < 1e-12
        assert abs(inner_product(c.logical_zero, c.logical_one)) < 1e-12

    def test_rows_distinct(self, name):
        c = code(name)
        signs = [row.signs for row in c.syndrome_table]
        assert len(set(signs)) == len(signs)

    def test_signs_match_matrix_action(self, name):
        c = code(name)
        rows = c.syndrome_table
        if name == "SHOR9":
            picks = np.random.default_rng(3).choice(len(rows), 6, replace=False)
            rows = [rows[i] for i in sorted(picks)]
        psi = encode(c, random_logical(5))
        for row in rows:
            corrupted = row.error.apply(psi).amplitudes
            for m, sign in zip(c.stabilizers, row.signs):
                assert np.allclose(m.matrix() @ corrupted, sign * corrupted, atol=1e-10)

    def test_roundtrip_all_errors(self, name):
        c = code(name)
        rng = Rng(17)
        for seed in range(50):
            logical = random_logical(seed)
            for row in c.syndrome_table:
                res = correction_cycle(c, logical, row.error, rng)
                assert res.signs == row.signs
                assert equal_up_to_global_phase(res.recovered, logical, 1e-8)

    def test_encode_preserves_inner_products(self, name):
        c = code(name)
        a, b = random_logical(1), random_logical(2)
        assert abs(inner_product(encode(c, a), encode(c, b)) - inner_product(a, b)) < 1e-12


class TestTables:
    def test_bitflip3_ancilla_table(self):
        c = code("BITFLIP3")
        for label, (x, y) in BITFLIP3_ANCILLA.items():
            assert c.lookup(label).signs == (1 - 2 * x, 1 - 2 * y)

    def test_shor9_table(self):
        c = code("SHOR9")
        assert len(c.syndrome_table) == len(SHOR9_SIGNS) == 22
        for label, signs in SHOR9_SIGNS.items():
            assert c.lookup(label).sign_string == signs

    def test_five_rows_except_x4(self):
        # X4 is covered by the acceptance suite; the generator M4 = X1X2Z3Z5 has
        # I on qubit 4, so the algebra gives ++-+ there.
        c = code("FIVE")
        for label, signs in FIVE_SIGNS.items():
            if label != "X4":
                assert c.lookup(label).sign_string == signs
        assert c.lookup("X4").sign_string == "++-+"

    def test_five_x3_example(self):
        assert code("FIVE").lookup("X3").sign_string == "+-+-"

    def test_five_codeword_support(self):
        zero = code("FIVE").logical_zero.amplitudes
        support = np.flatnonzero(np.abs(zero) > 1e-12)
        assert len(support) == 16
        assert all(bin(int(j)).count("1") % 2 == 0 for j in support)

    def test_non_correctable(self):
        with pytest.raises(DomainError):
            code("BITFLIP3").lookup("Z1")
        with pytest.raises(DomainError):
            code("NOPE")


class TestEncoding:
    @pytest.mark.parametrize("name", ["BITFLIP3", "PHASEFLIP3", "SHOR9"])
    def test_circuit_matches_linear_combination(self, name):
        c = code(name)
        for seed in range(5):
            logical = random_logical(seed)
            assert encode_circuit(c, logical) == encode(c, logical)

    def test_shor9_zero(self):
        ghz = np.zeros(8)
        ghz[[0, 7]] = 1
        expected = np.kron(np.kron(ghz, ghz), ghz) / 2 ** 1.5
        assert np.allclose(code("SHOR9").logical_zero.amplitudes, expected)

    def test_bitflip3_plus(self):
        s = encode(code("BITFLIP3"), StateVector([S2, S2]))
        assert np.allclose(s.amplitudes[[0, 7]], S2)

    def test_decode_rejects_outside_code_space(self):
        with pytest.raises(DomainError):
            decode(code("BITFLIP3"), basis_state(3, 1))


class TestInjectAndMeasure:
    def test_x2_on_bitflip(self):
        a, b = 0.6, 0.8j
        s = encode(code("BITFLIP3"), StateVector([a, b]))
        out = inject_error(s, "X2")
        expected = np.zeros(8, complex)
        expected[0b010], expected[0b101] = a, b
        assert np.allclose(out, expected)
        assert np.allclose(inject_error(s, "X", qubit=1), expected)

    def test_uncorrupted_gives_all_plus(self):
        c = code("STEANE7")
        s = encode(c, random_logical(0))
        signs, post = measure_syndrome(s, c, Rng(0))
        assert signs == (1,) * 6 and post == s

    def test_reset_state_on_shor9(self):
        c = code("SHOR9")
        alpha, beta = 0.6, 0.8
        out = inject_error(encode(c, StateVector([alpha, beta])), RESET, qubit=0)
        first_p = np.zeros(8); first_p[[0b000, 0b011]] = [1, 1]
        first_m = np.zeros(8); first_m[[0b000, 0b011]] = [1, -1]
        ghz_p = np.zeros(8); ghz_p[[0, 7]] = [1, 1]
        ghz_m = np.zeros(8); ghz_m[[0, 7]] = [1, -1]
        expected = (alpha * np.kron(np.kron(first_p, ghz_p), ghz_p)
                    + beta * np.kron(np.kron(first_m, ghz_m), ghz_m)) / 2 ** 1.5
        assert np.allclose(out, expected)

    def test_reset_syndromes_quarter_each(self):
        c = code("SHOR9")
        s = encode(c, random_logical(9))
        raw = inject_error(s, RESET, qubit=0)
        rng = Rng(4)
        counts = {}
        for _ in range(4000):
            signs, post = measure_syndrome(raw, c, rng)
            counts[signs] = counts.get(signs, 0) + 1
            fixed = correct(post, c, signs)
            assert equal_up_to_global_phase(decode(c, fixed), random_logical(9), 1e-8)
        labels = {c.decoder[k].label for k in counts}
        assert labels == {"I", "X1", "Y1", "Z1"}
        for v in counts.values():
            assert abs(v / 4000 - 0.25) < 0.03

    def test_coherent_small_error_every_branch(self):
        c = code("BITFLIP3")
        logical = random_logical(3)
        s = encode(c, logical)
        # correction is exact for any amplitudes; large ones make every branch visible
        eps = [0.3 + 0.1j, -0.4j, 0.5]
        raw = s.amplitudes.copy()
        for k, e in enumerate(eps):
            raw = raw + e * inject_error(s, "X", qubit=k)
        seen = set()
        for seed in range(200):
            signs, post = measure_syndrome(raw, c, Rng(seed))
            seen.add(signs)
            assert equal_up_to_global_phase(decode(c, correct(post, c, signs)), logical, 1e-10)
        assert len(seen) == 4

    def test_incoherent_mixture(self):
        c = code("FIVE")
        logical = random_logical(8)
        gen = Rng(12)
        labels = [row.label for row in c.syndrome_table]
        probs = np.full(len(labels), 1 / len(labels))
        for _ in range(60):
            label = labels[gen.choice(probs)]
            assert correction_cycle(c, logical, label, gen).success

    def test_arbitrary_single_qubit_unitary(self):
        c = code("STEANE7")
        logical = random_logical(4)
        th = 0.37
        u = np.array([[math.cos(th), -math.sin(th) * 1j], [-math.sin(th) * 1j, math.cos(th)]]) @ np.diag([1, np.exp(0.4j)])
        for seed in range(30):
            assert correction_cycle(c, logical, u, Rng(seed), qubit=5).success

    def test_unknown_syndrome(self):
        c = code("SHOR9")
        with pytest.raises(UncorrectableError):
            correct(encode(c, random_logical(0)), c, (-1,) * 8)

    def test_two_errors_defeat_bitflip(self):
        c = code("BITFLIP3")
        res = correction_cycle(c, StateVector([1, 0]), "X1X2", Rng(0))
        assert not res.success


class TestAncillaRoute:
    def test_matches_projector_route(self):
        c = code("BITFLIP3")
        for label in ("I", "X1", "X2", "X3"):
            for seed in range(5):
                s = StateVector(inject_error(encode(c, random_logical(seed)), label))
                a_signs, a_post = bitflip3_ancilla_syndrome(s, Rng(seed))
                p_signs, p_post = measure_syndrome(s, c, Rng(seed))
                assert a_signs == p_signs
                assert equal_up_to_global_phase(a_post, p_post, 1e-10)

    def test_superposed_error_same_distribution(self):
        c = code("BITFLIP3")
        s = encode(c, random_logical(1))
        raw = s.amplitudes + inject_error(s, "X3")
        mixed = StateVector(raw / np.linalg.norm(raw))
        a = [bitflip3_ancilla_syndrome(mixed, Rng(k))[0] for k in range(400)]
        b = [measure_syndrome(mixed, c, Rng(k + 1000))[0] for k in range(400)]
        for signs in {(1, 1), (1, -1)}:
            assert abs(a.count(signs) - b.count(signs)) < 80


class TestLogicalOperators:
    def test_steane(self):
        assert all(logical_operator_check(code("STEANE7")).values())

    def test_shor9_swapped(self):
        assert all(logical_operator_check(code("SHOR9")).values())

    def test_other_codes(self):
        with pytest.raises(DomainError):
            logical_operator_check(code("FIVE"))


class TestConcatenation:
    def test_table(self):
        for levels, rate, qubits in FT_ROWS:
            assert ft_concatenation(Fraction(1, 8), 2, 7, levels) == (rate, qubits)

    def test_level_zero(self):
        assert ft_concatenation(Fraction(1, 100), 5, 9, 0) == (Fraction(1, 100), 1)

    @given(st.integers(1, 6))
    def test_recurrence(self, levels):
        p, c = Fraction(1, 37), Fraction(3)
        prev, _ = ft_concatenation(p, c, 7, levels - 1)
        cur, _ = ft_concatenation(p, c, 7, levels)
        assert cur == c * prev ** 2

    def test_negative(self):
        with pytest.raises(DomainError):
            ft_concatenation(Fraction(1, 8), 2, 7, -1)
