"""Born-rule sampling, partial measurement and expectation values.

Measuring qubit ``q`` reports bit 0 for the +1 eigenvalue of Z and bit 1 for
-1. Outcome bits of a partial measurement are listed in the order the
qubits were requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .gates import Gate, _apply_array
from .rng import PROB_FLOOR, Rng
from .state import DEFAULT_TOL, StateVector


@dataclass(frozen=True)
class MeasurementResult:
    bits: tuple
    probability: float
    post_state: StateVector

    @property
    def value(self) -> int:
        """Outcome bits read as a big-endian integer."""
        v = 0
        for b in self.bits:
            v = (v << 1) | b
        return v

    @property
    def bitstring(self) -> str:
        return "".join(str(b) for b in self.bits)


def probabilities(s: StateVector) -> np.ndarray:
    """``|a_x|**2`` for every basis index ``x``."""
    return np.abs(s.amplitudes) ** 2


def _int_to_bits(x: int, n: int) -> tuple:
    return tuple((x >> (n - 1 - i)) & 1 for i in range(n))


def measure_all(s: StateVector, rng: Rng) -> MeasurementResult:
    p = probabilities(s)
    x = rng.choice(p)
    post = np.zeros_like(s.amplitudes)
    post[x] = 1.0
    return MeasurementResult(_int_to_bits(x, s.num_qubits), float(p[x]), StateVector._trusted(post))


def sample_counts(s: StateVector, shots: int, rng: Rng) -> dict:
    """Histogram ``{basis index: count}`` of ``shots`` full measurements."""
    idx = rng.categorical(probabilities(s), shots)
    vals, counts = np.unique(idx, return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}


def _check_positions(qubits: Sequence[int], n: int) -> tuple:
    q = tuple(int(x) for x in qubits)
    if not q:
        raise DomainError("no qubits to measure")
    if len(set(q)) != len(q):
        raise DomainError("duplicate qubit positions")
    if any(x < 0 or x >= n for x in q):
        raise DomainError(f"qubit position out of range for {n} qubits")
    return q


def marginal(s: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Distribution of the listed qubits, indexed big-endian in list order."""
    n = s.num_qubits
    q = _check_positions(qubits, n)
    p = probabilities(s).reshape((2,) * n)
    rest = tuple(i for i in range(n) if i not in q)
    m = p.sum(axis=rest) if rest else p
    # m has the kept axes in ascending order; reorder to the requested order.
    m = np.transpose(m, np.argsort(np.argsort(q)))
    return m.reshape(-1)


def project(s: StateVector, qubits: Sequence[int], bits: Sequence[int]) -> tuple:
    """Project onto the given outcome.

    Returns:
        ``(probability, post_state)``; ``post_state`` is ``None`` when the
        outcome has zero probability.
    """
    n = s.num_qubits
    q = _check_positions(qubits, n)
    if len(bits) != len(q) or any(b not in (0, 1) for b in bits):
        raise DomainError("need one 0/1 bit per measured qubit")
    psi = s.amplitudes.reshape((2,) * n)
    # Zero every branch that disagrees with the requested bits.
    mask = np.ones((2,) * n, dtype=bool)
    for qq, b in zip(q, bits):
        sl = [slice(None)] * n
        sl[qq] = 1 - b
        mask[tuple(sl)] = False
    kept = np.where(mask, psi, 0).reshape(-1)
    prob = float(np.vdot(kept, kept).real)
    if prob <= PROB_FLOOR:
        return 0.0, None
    return prob, StateVector._trusted(kept / math.sqrt(prob))


def measure_subset(s: StateVector, qubits: Sequence[int], rng: Rng) -> MeasurementResult:
    """Generalized Born rule: sample the listed qubits and renormalize."""
    q = _check_positions(qubits, s.num_qubits)
    m = marginal(s, q)
    outcome = rng.choice(m)
    bits = _int_to_bits(outcome, len(q))
    prob, post = project(s, q, bits)
    return MeasurementResult(bits, prob, post)


def _as_matrix(obs) -> np.ndarray:
    m = obs.matrix if isinstance(obs, Gate) else np.asarray(obs, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("observable must be a square matrix")
    if not np.allclose(m, m.conj().T, atol=DEFAULT_TOL, rtol=0):
        raise DomainError("observable is not Hermitian")
    return m


def _apply_matrix(s: StateVector, m: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    n = s.num_qubits
    t = _check_positions(targets, n)
    if m.shape[0] != 1 << len(t):
        raise DomainError("observable size does not match target count")
    return _apply_array(s.amplitudes, n, Gate(m, "O", check=False), t)


def expectation(s: StateVector, obs, targets: Sequence[int]) -> float:
    """``<psi|O|psi>`` for a Hermitian ``obs`` on ``targets``."""
    m = _as_matrix(obs)
    val = np.vdot(s.amplitudes, _apply_matrix(s, m, targets))
    return float(val.real)


def uncertainty(s: StateVector, obs, targets: Sequence[int]) -> float:
    """Root-mean-square deviation ``sqrt(<A^2> - <A>^2)``.

    Evaluated as ``||(A - <A>) psi||``, which is the same quantity for a
    Hermitian ``A`` but does not lose precision when it is near zero.
    """
    m = _as_matrix(obs)
    a_psi = _apply_matrix(s, m, targets)
    mean = float(np.vdot(s.amplitudes, a_psi).real)
    return float(np.linalg.norm(a_psi - mean * s.amplitudes))
