"""Gate matrices, circuits and the QFT builder.

Gates are dense ``2**k x 2**k`` unitaries. A :class:`GateOp` places a gate on
an ordered list of target qubits; for controlled gates the controls come
first. :func:`apply` never forms the full ``2**n`` operator: it views the
amplitudes as an ``n``-axis tensor and contracts the gate against the
target axes only.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .state import DEFAULT_TOL, StateVector

_S2 = 1.0 / math.sqrt(2.0)


class Gate:
    """A named unitary acting on ``arity`` qubits.

    Args:
        matrix: Square matrix of side ``2**arity``.
        name: Label used in circuit listings.
        check: Verify unitarity to ``DEFAULT_TOL``.
    """

    __slots__ = ("matrix", "name", "arity", "_diag")

    def __init__(self, matrix, name: str = "U", check: bool = True):
        m = np.array(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("gate matrix must be square")
        dim = m.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise DomainError("gate dimension must be a power of two")
        if check and not is_unitary(m):
            raise DomainError(f"gate {name} is not unitary")
        m.setflags(write=False)
        self.matrix = m
        self.name = name
        self.arity = dim.bit_length() - 1
        off = m - np.diag(np.diag(m))
        self._diag = np.diag(m).copy() if not np.any(off) else None

    def __repr__(self) -> str:
        return f"Gate({self.name}, arity={self.arity})"

    @property
    def is_diagonal(self) -> bool:
        return self._diag is not None

    def dagger(self) -> "Gate":
        name = self.name[:-1] if self.name.endswith("†") else self.name + "†"
        return Gate(self.matrix.conj().T, name, check=False)

    def __matmul__(self, other: "Gate") -> "Gate":
        return Gate(self.matrix @ other.matrix, f"{self.name}·{other.name}", check=False)


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=tol, rtol=0))


def phase_gate(d: int) -> Gate:
    """``R_d = diag(1, exp(i*pi/2**d))``; negative ``d`` gives the inverse."""
    if d == 0:
        raise DomainError("phase gate index must be nonzero")
    sign = 1 if d > 0 else -1
    phase = cmath.exp(sign * 1j * math.pi / 2 ** abs(d))
    return Gate(np.diag([1.0, phase]), f"R{d}")


_FIXED = {
    "I": np.eye(2),
    "X": [[0, 1], [1, 0]],
    "Y": [[0, -1j], [1j, 0]],
    "Z": [[1, 0], [0, -1]],
    "H": [[_S2, _S2], [_S2, -_S2]],
    "CNOT": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    "CZ": np.diag([1, 1, 1, -1]),
    "SWAP": [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
}


def standard_gate(name: str, d: int | None = None) -> Gate:
    """Look up a gate by name.

    Names: I, X, Y, Z, H, CNOT, CZ, SWAP, TOFFOLI, and the phase gates
    ``R`` / ``R_d`` (with ``d``) and ``R_-d``. ``"R3"`` is shorthand for
    ``standard_gate("R", 3)``.
    """
    key = name.upper().replace("_", "")
    if key in _FIXED:
        return Gate(_FIXED[key], key)
    if key == "TOFFOLI":
        m = np.eye(8)
        m[6:, 6:] = [[0, 1], [1, 0]]
        return Gate(m, "TOFFOLI")
    if key.startswith("R"):
        rest = key[1:]
        if rest in ("", "D"):
            if d is None:
                raise DomainError("phase gate needs d")
            return phase_gate(d)
        if rest in ("-", "-D"):
            if d is None:
                raise DomainError("phase gate needs d")
            return phase_gate(-abs(d))
        try:
            return phase_gate(int(rest))
        except ValueError:
            pass
    raise DomainError(f"unknown gate {name!r}")


def controlled(g: Gate) -> Gate:
    """``[[1, 0], [0, g]]`` with the new control as the leading qubit."""
    dim = g.matrix.shape[0]
    m = np.eye(2 * dim, dtype=np.complex128)
    m[dim:, dim:] = g.matrix
    return Gate(m, "C" + g.name, check=False)


@dataclass(frozen=True)
class GateOp:
    gate: Gate
    targets: tuple

    def __init__(self, gate: Gate, targets: Iterable[int]):
        t = tuple(int(q) for q in targets)
        if len(t) != gate.arity:
            raise DomainError(f"{gate.name} needs {gate.arity} targets, got {len(t)}")
        if len(set(t)) != len(t):
            raise DomainError("gate targets must be distinct")
        if any(q < 0 for q in t):
            raise DomainError("negative qubit position")
        object.__setattr__(self, "gate", gate)
        object.__setattr__(self, "targets", t)

    def dagger(self) -> "GateOp":
        return GateOp(self.gate.dagger(), self.targets)


def _apply_array(amps: np.ndarray, n: int, gate: Gate, targets: Sequence[int]) -> np.ndarray:
    k = gate.arity
    psi = amps.reshape((2,) * n)
    if gate.is_diagonal:
        # Broadcast the diagonal over the target axes only.
        shape = [1] * n
        for q in targets:
            shape[q] = 2
        diag = gate._diag.reshape((2,) * k)
        order = np.argsort(targets)
        diag = np.transpose(diag, order).reshape(shape)
        return (psi * diag).reshape(-1)
    g = gate.matrix.reshape((2,) * (2 * k))
    out = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), list(targets)))
    out = np.moveaxis(out, list(range(k)), list(targets))
    return out.reshape(-1)


def apply(s: StateVector, op: GateOp) -> StateVector:
    """Apply one gate operation and return the new state."""
    n = s.num_qubits
    if any(q >= n for q in op.targets):
        raise DomainError(f"target out of range for {n} qubits: {op.targets}")
    return StateVector._trusted(_apply_array(s.amplitudes, n, op.gate, op.targets))


@dataclass
class Circuit:
    """Ordered gate operations on ``width`` qubits, applied left to right."""

    width: int
    ops: list = field(default_factory=list)

    def __post_init__(self):
        if self.width < 1:
            raise DomainError("circuit width must be at least 1")
        for op in self.ops:
            self._check(op)

    def _check(self, op: GateOp) -> None:
        if any(q >= self.width for q in op.targets):
            raise DomainError(f"op {op.gate.name}{op.targets} exceeds width {self.width}")

    def add(self, gate: Gate | str, *targets: int) -> "Circuit":
        if isinstance(gate, str):
            gate = standard_gate(gate)
        op = GateOp(gate, targets)
        self._check(op)
        self.ops.append(op)
        return self

    def extend(self, other: "Circuit", offset: int = 0) -> "Circuit":
        for op in other.ops:
            self.add(op.gate, *(q + offset for q in op.targets))
        return self

    def inverse(self) -> "Circuit":
        return Circuit(self.width, [op.dagger() for op in reversed(self.ops)])

    def unitary(self) -> np.ndarray:
        """Dense matrix of the whole circuit (column ``x`` = image of ``|x>``)."""
        dim = 1 << self.width
        cols = np.eye(dim, dtype=np.complex128)
        # Evolve every basis column at once by treating columns as a batch axis.
        batch = cols.T.reshape((dim,) + (2,) * self.width)
        for op in self.ops:
            batch = _apply_batch(batch, self.width, op)
        return batch.reshape(dim, dim).T

    def count(self, name_prefix: str = "") -> int:
        return sum(1 for op in self.ops if op.gate.name.startswith(name_prefix))

    def __len__(self) -> int:
        return len(self.ops)


def _apply_batch(batch: np.ndarray, n: int, op: GateOp) -> np.ndarray:
    shifted = tuple(q + 1 for q in op.targets)
    k = op.gate.arity
    g = op.gate.matrix.reshape((2,) * (2 * k))
    out = np.tensordot(g, batch, axes=(list(range(k, 2 * k)), list(shifted)))
    return np.moveaxis(out, list(range(k)), list(shifted))


def run_circuit(c: Circuit, s: StateVector) -> StateVector:
    if c.width != s.num_qubits:
        raise DomainError(f"circuit width {c.width} != state qubits {s.num_qubits}")
    amps = s.amplitudes
    for op in c.ops:
        amps = _apply_array(amps, c.width, op.gate, op.targets)
    return StateVector._trusted(amps)


def hadamard_layer(n: int, offset: int = 0, width: int | None = None) -> Circuit:
    """H on qubits ``offset .. offset+n-1`` of a ``width``-qubit circuit."""
    if n < 1:
        raise DomainError("need at least one qubit")
    c = Circuit(width if width is not None else offset + n)
    h = standard_gate("H")
    for q in range(offset, offset + n):
        c.add(h, q)
    return c


def qft_circuit(n: int, include_swaps: bool = True, d_max: int | None = None) -> Circuit:
    """Quantum Fourier transform on ``n`` qubits.

    Qubit ``i`` gets a Hadamard followed by controlled ``R_{j-i}`` from each
    lower qubit ``j > i``. With ``include_swaps`` the output order is
    reversed so the unitary equals ``omega**(x*y) / sqrt(2**n)``. Phase
    gates with ``d > d_max`` are dropped when ``d_max`` is given.
    """
    if n < 1:
        raise DomainError("need at least one qubit")
    c = Circuit(n)
    h = standard_gate("H")
    for i in range(n):
        c.add(h, i)
        for j in range(i + 1, n):
            d = j - i
            if d_max is not None and d > d_max:
                continue
            c.add(controlled(phase_gate(d)), j, i)
    if include_swaps:
        swap = standard_gate("SWAP")
        for i in range(n // 2):
            c.add(swap, i, n - 1 - i)
    return c


def inverse_qft_circuit(n: int, include_swaps: bool = True, d_max: int | None = None) -> Circuit:
    """Adjoint of :func:`qft_circuit`, built from ``R_-d`` phase gates."""
    return qft_circuit(n, include_swaps, d_max).inverse()


def dft_matrix(n: int, sign: int = 1) -> np.ndarray:
    """Reference matrix ``exp(sign*2*pi*i*x*y/N) / sqrt(N)`` for ``N = 2**n``."""
    dim = 1 << n
    xy = np.outer(np.arange(dim), np.arange(dim))
    return np.exp(sign * 2j * np.pi * xy / dim) / math.sqrt(dim)


def sqrt_x_gate() -> Gate:
    """``V = (1 - i)(1 + iX)/2``, a square root of X."""
    return Gate(0.5 * (1 - 1j) * (np.eye(2) + 1j * np.array(_FIXED["X"])), "V")


def toffoli_decomposed() -> Circuit:
    """Toffoli on (control, control, target) = (0, 1, 2) from two-qubit gates."""
    v = sqrt_x_gate()
    cv = controlled(v)
    cvd = controlled(v.dagger())
    cnot = standard_gate("CNOT")
    c = Circuit(3)
    c.add(cv, 1, 2)
    c.add(cnot, 0, 1)
    c.add(cvd, 1, 2)
    c.add(cnot, 0, 1)
    c.add(cv, 0, 2)
    return c


def multi_controlled(g: Gate, num_controls: int) -> Gate:
    """Wrap ``g`` in ``num_controls`` controls via repeated :func:`controlled`."""
    for _ in range(num_controls):
        g = controlled(g)
    return g
