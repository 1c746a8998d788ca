"""Dense complex state vectors.

Basis index ``x`` of an ``n``-qubit state encodes qubit 0 (the top circuit
wire) as the most significant bit, so ``basis_state(4, 10)`` is ``|1010>``.
States are immutable: every operation returns a fresh :class:`StateVector`.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

DEFAULT_TOL = 1e-10


class StateVector:
    """Normalized amplitudes of an ``n``-qubit register.

    Args:
        amplitudes: Sequence of length ``2**n``. Must already be normalized
            to within ``tol``; use :func:`normalize` for raw vectors.
        tol: Allowed deviation of the squared norm from 1.

    Example:
        >>> s = StateVector([1, 0, 0, 0])
        >>> s.num_qubits
        2
    """

    __slots__ = ("_amps", "_n")

    def __init__(self, amplitudes, tol: float = DEFAULT_TOL):
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        size = amps.size
        if size < 2 or size & (size - 1):
            raise DomainError(f"amplitude count {size} is not a power of two >= 2")
        if not np.all(np.isfinite(amps)):
            raise DomainError("amplitudes must be finite")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > tol:
            raise DomainError(f"state is not normalized (norm^2 = {norm2!r})")
        amps.setflags(write=False)
        self._amps = amps
        self._n = size.bit_length() - 1

    @classmethod
    def _trusted(cls, amps: np.ndarray) -> "StateVector":
        # Skips validation for arrays produced by unitary evolution.
        obj = cls.__new__(cls)
        amps = np.ascontiguousarray(amps, dtype=np.complex128).reshape(-1)
        amps.setflags(write=False)
        obj._amps = amps
        obj._n = amps.size.bit_length() - 1
        return obj

    @property
    def num_qubits(self) -> int:
        return self._n

    @property
    def dim(self) -> int:
        return self._amps.size

    @property
    def amplitudes(self) -> np.ndarray:
        """Read-only view of the amplitude array."""
        return self._amps

    def __getitem__(self, index):
        return self._amps[index]

    def __len__(self) -> int:
        return self._amps.size

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self._n}, amplitudes={self._amps!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self._n == other._n and np.allclose(self._amps, other._amps, atol=DEFAULT_TOL, rtol=0)

    __hash__ = None

    def norm(self) -> float:
        return float(np.linalg.norm(self._amps))

    def tensor(self, other: "StateVector") -> "StateVector":
        return tensor_product(self, other)


def basis_state(n: int, x: int) -> StateVector:
    """Computational basis state ``|x>`` on ``n`` qubits.

    >>> basis_state(2, 2).amplitudes.real.tolist()
    [0.0, 0.0, 1.0, 0.0]
    """
    if n < 1:
        raise DomainError("qubit count must be at least 1")
    if not 0 <= x < (1 << n):
        raise DomainError(f"basis index {x} out of range for {n} qubits")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[x] = 1.0
    return StateVector._trusted(amps)


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    """``a ⊗ b`` with ``a`` occupying the most significant qubits."""
    return StateVector._trusted(np.kron(a.amplitudes, b.amplitudes))


def _check_same_size(a: StateVector, b: StateVector) -> None:
    if a.num_qubits != b.num_qubits:
        raise DomainError(f"qubit counts differ: {a.num_qubits} vs {b.num_qubits}")


def inner_product(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, conjugating the left argument."""
    _check_same_size(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = DEFAULT_TOL) -> bool:
    """True when ``|<a|b>| >= 1 - tol``."""
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    return abs(inner_product(a, b)) >= 1.0 - tol


def normalize(amplitudes) -> StateVector:
    """Scale a nonzero vector (or state) to unit norm.

    >>> normalize([3, 4]).amplitudes.real.tolist()
    [0.6, 0.8]
    """
    if isinstance(amplitudes, StateVector):
        amplitudes = amplitudes.amplitudes
    amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(amps)
    if norm == 0.0 or not np.isfinite(norm):
        raise DomainError("cannot normalize a zero or non-finite vector")
    return StateVector(amps / norm)


def random_state(n: int, rng) -> StateVector:
    """Haar-ish random state from Gaussian amplitudes drawn with ``rng``."""
    re = rng.normals(1 << n)
    im = rng.normals(1 << n)
    return normalize(re + 1j * im)
