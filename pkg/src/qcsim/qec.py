"""Pauli strings, stabilizer codes, syndrome extraction and correction.

Qubit positions in the API are 0-based like everywhere else in the
package. Textual Pauli labels such as ``"Y4"`` or ``"Z2X3X4Z5"`` use
1-based qubit numbers, the way codes are usually written down, so
``"X1"`` acts on position 0.

``Y`` is the usual ``[[0, -i], [i, 0]]``. Some presentations write ``ZX``
(which equals ``iY``) for the combined bit and phase flip; the two differ
only by a global phase, which no syndrome or fidelity check can see.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, UncorrectableError
from .gates import Circuit, run_circuit, standard_gate, _apply_array, Gate
from .measurement import measure_subset
from .rng import Rng
from .state import StateVector, basis_state, equal_up_to_global_phase, normalize, tensor_product

_PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
_LABEL = re.compile(r"([IXYZ])(\d+)")


class PauliString:
    """Tensor product of single-qubit Paulis, one letter per qubit."""

    __slots__ = ("letters", "__dict__")

    def __init__(self, letters: str):
        letters = letters.upper()
        if not letters or any(ch not in "IXYZ" for ch in letters):
            raise DomainError(f"invalid Pauli letters {letters!r}")
        self.letters = letters

    @classmethod
    def parse(cls, label: str, n: int) -> "PauliString":
        """Build from a sparse label like ``"Z1Z2"``; ``"I"`` is the identity."""
        label = label.strip().upper()
        letters = ["I"] * n
        if label in ("", "I"):
            return cls("".join(letters))
        pos = 0
        for m in _LABEL.finditer(label):
            if m.start() != pos:
                break
            q = int(m.group(2))
            if not 1 <= q <= n:
                raise DomainError(f"qubit label {q} outside 1..{n}")
            if letters[q - 1] != "I":
                raise DomainError(f"qubit {q} appears twice in {label!r}")
            letters[q - 1] = m.group(1)
            pos = m.end()
        if pos != len(label):
            raise DomainError(f"cannot parse Pauli label {label!r}")
        return cls("".join(letters))

    @property
    def n(self) -> int:
        return len(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, PauliString) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __repr__(self) -> str:
        return f"PauliString({self.letters!r})"

    @property
    def label(self) -> str:
        parts = [f"{ch}{i + 1}" for i, ch in enumerate(self.letters) if ch != "I"]
        return "".join(parts) or "I"

    @property
    def weight(self) -> int:
        return sum(ch != "I" for ch in self.letters)

    @cached_property
    def _action(self) -> tuple[np.ndarray, np.ndarray]:
        # P|j> = phase(j) |j ^ flip>, with X flipping, Z signing, and
        # Y = i * X * Z contributing both plus a factor i.
        n = self.n
        flip = 0
        zmask = 0
        ny = 0
        for i, ch in enumerate(self.letters):
            bit = 1 << (n - 1 - i)
            if ch in "XY":
                flip |= bit
            if ch in "ZY":
                zmask |= bit
            ny += ch == "Y"
        j = np.arange(1 << n)
        parity = np.zeros(j.size, dtype=np.int64)
        z = j & zmask
        while np.any(z):
            parity ^= z & 1
            z >>= 1
        phase = (1j ** ny) * (1 - 2 * parity)
        return j ^ flip, phase.astype(np.complex128)

    def apply_array(self, amps: np.ndarray) -> np.ndarray:
        dest, phase = self._action
        out = np.empty_like(amps)
        out[dest] = phase * amps
        return out

    def apply(self, s: StateVector) -> StateVector:
        if s.num_qubits != self.n:
            raise DomainError("Pauli string and state sizes differ")
        return StateVector._trusted(self.apply_array(s.amplitudes))

    def matrix(self) -> np.ndarray:
        """Dense Kronecker product; independent of :meth:`apply`."""
        m = np.array([[1.0 + 0j]])
        for ch in self.letters:
            m = np.kron(m, _PAULI[ch])
        return m

    def __mul__(self, other: "PauliString") -> "PauliString":
        """Product with phases dropped (letters only)."""
        if self.n != other.n:
            raise DomainError("length mismatch")
        table = {("I", c): c for c in "IXYZ"}
        table.update({(c, "I"): c for c in "IXYZ"})
        table.update({(c, c): "I" for c in "XYZ"})
        table.update({("X", "Y"): "Z", ("Y", "X"): "Z", ("Y", "Z"): "X", ("Z", "Y"): "X",
                      ("Z", "X"): "Y", ("X", "Z"): "Y"})
        return PauliString("".join(table[a, b] for a, b in zip(self.letters, other.letters)))


def pauli_commute_sign(p: PauliString, q: PauliString) -> int:
    """+1 if the strings commute, -1 if they anticommute."""
    if p.n != q.n:
        raise DomainError("Pauli strings differ in length")
    clashes = sum(a != "I" and b != "I" and a != b for a, b in zip(p.letters, q.letters))
    return -1 if clashes % 2 else 1


@dataclass(frozen=True)
class SyndromeRow:
    error: PauliString
    signs: tuple

    @property
    def label(self) -> str:
        return self.error.label

    @property
    def sign_string(self) -> str:
        return format_signs(self.signs)


def format_signs(signs: Sequence[int]) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


class StabilizerCode:
    """A one-logical-qubit stabilizer code with its correction table."""

    def __init__(self, name: str, stabilizers: Sequence[PauliString], logical_zero: StateVector,
                 logical_one: StateVector, correctable: Sequence[PauliString]):
        self.name = name
        self.stabilizers = tuple(stabilizers)
        self.n_physical = self.stabilizers[0].n
        self.logical_zero = logical_zero
        self.logical_one = logical_one
        self.correctable = tuple(correctable)

    def __repr__(self) -> str:
        return f"StabilizerCode({self.name}, n={self.n_physical})"

    @cached_property
    def syndrome_table(self) -> tuple:
        return tuple(
            SyndromeRow(e, tuple(pauli_commute_sign(m, e) for m in self.stabilizers))
            for e in self.correctable
        )

    @cached_property
    def decoder(self) -> dict:
        table = {}
        for row in self.syndrome_table:
            if row.signs in table:
                raise DomainError(f"{self.name}: syndrome {row.sign_string} is ambiguous")
            table[row.signs] = row.error
        return table

    def lookup(self, label: str) -> SyndromeRow:
        target = PauliString.parse(label, self.n_physical)
        for row in self.syndrome_table:
            if row.error == target:
                return row
        raise DomainError(f"{label} is not a correctable error of {self.name}")


def _stabilized(start: StateVector, gens: Sequence[PauliString]) -> StateVector:
    amps = start.amplitudes.copy()
    for g in gens:
        amps = amps + g.apply_array(amps)
    return normalize(amps)


def _single_errors(n: int, letters: str = "XYZ") -> list[PauliString]:
    return [PauliString.parse(f"{ch}{q}", n) for ch in letters for q in range(1, n + 1)]


def _build(name: str) -> StabilizerCode:
    P = PauliString.parse
    ident = lambda n: PauliString("I" * n)
    if name == "BITFLIP3":
        stabs = [P("Z1Z2", 3), P("Z2Z3", 3)]
        zero, one = basis_state(3, 0), basis_state(3, 7)
        errs = [ident(3)] + _single_errors(3, "X")
    elif name == "PHASEFLIP3":
        stabs = [P("X1X2", 3), P("X2X3", 3)]
        plus = StateVector([1 / math.sqrt(2), 1 / math.sqrt(2)])
        minus = StateVector([1 / math.sqrt(2), -1 / math.sqrt(2)])
        zero = tensor_product(tensor_product(plus, plus), plus)
        one = tensor_product(tensor_product(minus, minus), minus)
        errs = [ident(3)] + _single_errors(3, "Z")
    elif name == "SHOR9":
        stabs = [P(s, 9) for s in ("Z1Z2", "Z2Z3", "Z4Z5", "Z5Z6", "Z7Z8", "Z8Z9",
                                    "X1X2X3X4X5X6", "X4X5X6X7X8X9")]
        blocks = []
        for sign in (1, -1):
            b = np.zeros(8, dtype=np.complex128)
            b[0], b[7] = 1, sign
            b /= math.sqrt(2)
            blocks.append(np.kron(np.kron(b, b), b))
        zero, one = StateVector(blocks[0]), StateVector(blocks[1])
        # Z errors within a block are indistinguishable; one representative each.
        errs = ([ident(9)] + _single_errors(9, "X") + _single_errors(9, "Y")
                + [P(f"Z{q}", 9) for q in (1, 4, 7)])
    elif name == "FIVE":
        stabs = [P(s, 5) for s in ("Z2X3X4Z5", "Z1Z3X4X5", "X1Z2Z4X5", "X1X2Z3Z5")]
        zero = _stabilized(basis_state(5, 0), stabs)
        one = _stabilized(basis_state(5, 31), stabs)
        errs = [ident(5)] + _single_errors(5)
    elif name == "STEANE7":
        xs = [P(s, 7) for s in ("X1X5X6X7", "X2X4X6X7", "X3X4X5X7")]
        zs = [P(s, 7) for s in ("Z1Z5Z6Z7", "Z2Z4Z6Z7", "Z3Z4Z5Z7")]
        stabs = zs + xs
        zero = _stabilized(basis_state(7, 0), xs)
        one = _stabilized(basis_state(7, 127), xs)
        errs = [ident(7)] + _single_errors(7)
    else:
        raise DomainError(f"unknown code {name!r}")
    return StabilizerCode(name, stabs, zero, one, errs)


CODE_NAMES = ("BITFLIP3", "PHASEFLIP3", "SHOR9", "FIVE", "STEANE7")
_CACHE: dict = {}


def code(name: str) -> StabilizerCode:
    """Look up one of BITFLIP3, PHASEFLIP3, SHOR9, FIVE, STEANE7."""
    key = name.upper().replace("-", "").replace("_", "")
    if key not in _CACHE:
        _CACHE[key] = _build(key)
    return _CACHE[key]


def _one_qubit(logical: StateVector) -> tuple[complex, complex]:
    if logical.num_qubits != 1:
        raise DomainError("logical input must be a single qubit")
    return complex(logical[0]), complex(logical[1])


def encode(c: StabilizerCode, logical: StateVector) -> StateVector:
    """``alpha * |0_L> + beta * |1_L>``."""
    alpha, beta = _one_qubit(logical)
    return StateVector._trusted(alpha * c.logical_zero.amplitudes + beta * c.logical_one.amplitudes)


def encoding_circuit(c: StabilizerCode) -> Circuit:
    """Gate-level encoder with the logical input on qubit 0 and ancillas in |0>."""
    cnot, h = standard_gate("CNOT"), standard_gate("H")
    if c.name == "BITFLIP3":
        return Circuit(3).add(cnot, 0, 1).add(cnot, 0, 2)
    if c.name == "PHASEFLIP3":
        return Circuit(3).add(cnot, 0, 1).add(cnot, 0, 2).add(h, 0).add(h, 1).add(h, 2)
    if c.name == "SHOR9":
        circ = Circuit(9).add(cnot, 0, 3).add(cnot, 0, 6)
        for top in (0, 3, 6):
            circ.add(h, top)
        for top in (0, 3, 6):
            circ.add(cnot, top, top + 1).add(cnot, top, top + 2)
        return circ
    raise DomainError(f"no encoding circuit for {c.name}")


def encode_circuit(c: StabilizerCode, logical: StateVector) -> StateVector:
    _one_qubit(logical)
    start = tensor_product(logical, basis_state(c.n_physical - 1, 0))
    return run_circuit(encoding_circuit(c), start)


def decode(c: StabilizerCode, s: StateVector, tol: float = 1e-8) -> StateVector:
    """Read the logical qubit back out of a state inside the code space."""
    alpha = np.vdot(c.logical_zero.amplitudes, s.amplitudes)
    beta = np.vdot(c.logical_one.amplitudes, s.amplitudes)
    weight = abs(alpha) ** 2 + abs(beta) ** 2
    if weight < 1 - tol:
        raise DomainError(f"state has only weight {weight:.3g} in the code space")
    return normalize([alpha, beta])


# Reset to |0>: (1 + X + iY + Z)/2 = [[1, 1], [0, 0]].
RESET = np.array([[1, 1], [0, 0]], dtype=np.complex128)


def inject_error(s: StateVector, op, qubit: Optional[int] = None) -> np.ndarray:
    """Apply an error operator and return the raw (possibly unnormalized) amplitudes.

    Args:
        s: State or raw amplitude array.
        op: A :class:`PauliString` on the whole register, a Pauli letter, a
            sparse label like ``"X2"``, or any 2x2 matrix.
        qubit: 0-based target for a letter or matrix.
    """
    amps = s.amplitudes if isinstance(s, StateVector) else np.asarray(s, dtype=np.complex128)
    n = amps.size.bit_length() - 1
    if isinstance(op, str):
        if qubit is None:
            op = PauliString.parse(op, n)
        else:
            op = _PAULI[op.upper()]
    if isinstance(op, PauliString):
        if op.n != n:
            raise DomainError("Pauli string and state sizes differ")
        return op.apply_array(amps)
    m = np.asarray(op, dtype=np.complex128)
    if m.shape != (2, 2):
        raise DomainError("error map must be 2x2")
    if qubit is None or not 0 <= qubit < n:
        raise DomainError(f"qubit {qubit} out of range")
    return _apply_array(amps, n, Gate(m, "E", check=False), (qubit,))


def measure_syndrome(s, c: StabilizerCode, rng: Rng) -> tuple[tuple, StateVector]:
    """Projectively measure each stabilizer in turn.

    Each outcome ``+-1`` is drawn with probability ``||(1 +- M)/2 psi||**2``
    and the state is renormalized after every projection.
    """
    amps = s.amplitudes if isinstance(s, StateVector) else np.asarray(s, dtype=np.complex128)
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise DomainError("cannot measure a zero vector")
    amps = amps / norm
    signs = []
    for m in c.stabilizers:
        m_amps = m.apply_array(amps)
        plus = 0.5 * (amps + m_amps)
        p_plus = float(np.vdot(plus, plus).real)
        p_plus = min(max(p_plus, 0.0), 1.0)
        if rng.choice([p_plus, 1.0 - p_plus]) == 0:
            signs.append(1)
            amps = plus / math.sqrt(p_plus)
        else:
            minus = 0.5 * (amps - m_amps)
            signs.append(-1)
            amps = minus / math.sqrt(1.0 - p_plus)
    return tuple(signs), StateVector._trusted(amps)


def correct(s: StateVector, c: StabilizerCode, signs: Sequence[int]) -> StateVector:
    """Undo the error that the syndrome table associates with ``signs``."""
    key = tuple(int(x) for x in signs)
    err = c.decoder.get(key)
    if err is None:
        raise UncorrectableError(f"{c.name}: syndrome {format_signs(key)} is not in the table")
    return err.apply(s)


@dataclass(frozen=True)
class CycleResult:
    signs: tuple
    identified: PauliString
    recovered: StateVector
    success: bool


def correction_cycle(c: StabilizerCode, logical: StateVector, error, rng: Rng,
                     qubit: Optional[int] = None) -> CycleResult:
    """Encode, corrupt, measure, correct, decode, and compare with the input."""
    encoded = encode(c, logical)
    signs, collapsed = measure_syndrome(inject_error(encoded, error, qubit), c, rng)
    fixed = correct(collapsed, c, signs)
    recovered = decode(c, fixed)
    return CycleResult(signs, c.decoder[signs], recovered, equal_up_to_global_phase(recovered, logical, 1e-8))


def bitflip3_ancilla_syndrome(s: StateVector, rng: Rng) -> tuple[tuple, StateVector]:
    """Bit-flip syndrome via two ancilla wires, as a cross-check fixture.

    Ancilla x accumulates the parity of qubits 0 and 1, ancilla y that of
    qubits 1 and 2. Returns signs in the same form as
    :func:`measure_syndrome` and the collapsed 3-qubit data state.
    """
    if s.num_qubits != 3:
        raise DomainError("bit-flip code uses three qubits")
    cnot = standard_gate("CNOT")
    full = tensor_product(s, basis_state(2, 0))
    circ = Circuit(5).add(cnot, 0, 3).add(cnot, 1, 3).add(cnot, 1, 4).add(cnot, 2, 4)
    res = measure_subset(run_circuit(circ, full), [3, 4], rng)
    x, y = res.bits
    data = res.post_state.amplitudes.reshape(8, 4)[:, (x << 1) | y]
    return (1 - 2 * x, 1 - 2 * y), StateVector._trusted(data.copy())


def logical_operator_check(c: StabilizerCode) -> dict:
    """Check transversal products against logical X, Z (and H for STEANE7).

    On SHOR9 the roles swap: the product of all Z acts as logical X and the
    product of all X as logical Z.
    """
    n = c.n_physical
    zero, one = c.logical_zero, c.logical_one
    all_x, all_z = PauliString("X" * n), PauliString("Z" * n)
    minus_one = StateVector._trusted(-one.amplitudes)

    def acts(op, a, b):
        return bool(np.allclose(op(a).amplitudes, b.amplitudes, atol=1e-10))

    def logical_x(op):
        return acts(op, zero, one) and acts(op, one, zero)

    def logical_z(op):
        return acts(op, zero, zero) and acts(op, one, minus_one)

    if c.name == "STEANE7":
        h = standard_gate("H")
        hc = Circuit(n)
        for q in range(n):
            hc.add(h, q)
        s2 = 1 / math.sqrt(2)
        plus = StateVector._trusted(s2 * (zero.amplitudes + one.amplitudes))
        minus = StateVector._trusted(s2 * (zero.amplitudes - one.amplitudes))
        run = lambda st: run_circuit(hc, st)
        return {
            "X_all_is_logical_X": logical_x(all_x.apply),
            "Z_all_is_logical_Z": logical_z(all_z.apply),
            "H_all_is_logical_H": acts(run, zero, plus) and acts(run, one, minus),
        }
    if c.name == "SHOR9":
        return {
            "Z_all_is_logical_X": logical_x(all_z.apply),
            "X_all_is_logical_Z": logical_z(all_x.apply),
        }
    raise DomainError("logical operator check covers STEANE7 and SHOR9")


def ft_concatenation(p, c, n_code: int, levels: int) -> tuple[Fraction, int]:
    """Error rate and qubit count after ``levels`` rounds of concatenation.

    Rate is ``p`` at level 0 and ``(c*p)**(2**l) / c`` otherwise; each level
    multiplies the qubit count by ``n_code``.

    >>> ft_concatenation(Fraction(1, 8), 2, 7, 2)
    (Fraction(1, 512), 49)
    """
    if levels < 0:
        raise DomainError("levels must be non-negative")
    p, c = Fraction(p), Fraction(c)
    rate = p if levels == 0 else (c * p) ** (2 ** levels) / c
    return rate, n_code ** levels
