"""Grover search, its rotation geometry, and quantum counting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import DomainError
from .gates import Gate
from .measurement import measure_all
from .rng import Rng
from .shor import phase_estimate
from .state import StateVector


def _marked_array(marked: Iterable[int], dim: int) -> np.ndarray:
    idx = np.array(sorted({int(m) for m in marked}), dtype=np.int64)
    if idx.size == 0:
        raise DomainError("marked set is empty")
    if idx[0] < 0 or idx[-1] >= dim:
        raise DomainError("marked index out of range")
    return idx


def uniform_state(n: int) -> StateVector:
    return StateVector._trusted(np.full(1 << n, 1.0 / math.sqrt(1 << n), dtype=np.complex128))


def oracle_reflect(s: StateVector, marked: Iterable[int]) -> StateVector:
    """Flip the sign of every marked amplitude."""
    idx = _marked_array(marked, s.dim)
    amps = s.amplitudes.copy()
    amps[idx] *= -1
    return StateVector._trusted(amps)


def diffuse(s: StateVector) -> StateVector:
    """Reflect about the uniform state: ``2|u><u|s> - |s>``."""
    amps = s.amplitudes
    return StateVector._trusted(2.0 * amps.mean() - amps)


def grover_iterate(s: StateVector, marked: Iterable[int]) -> StateVector:
    return diffuse(oracle_reflect(s, marked))


def initial_angle(n: int, M: int) -> float:
    """``theta0 = arcsin(sqrt(M / N))``."""
    N = 1 << n
    if not 0 <= M <= N:
        raise DomainError("marked count must lie in [0, N]")
    return math.asin(math.sqrt(M / N))


def default_iterations(n: int, M: int) -> int:
    """Iteration count that brings ``(2m+1)*theta0`` closest to ``pi/2``.

    This is ``round(pi/(4*theta0) - 1/2)`` with halves rounded down, which
    approaches ``(pi/4)*sqrt(N/M)`` for large ``N / M``.
    """
    theta0 = initial_angle(n, M)
    if theta0 == 0:
        raise DomainError("no marked states")
    target = math.pi / (4 * theta0) - 0.5
    return max(0, math.ceil(target - 0.5))


def success_probability(n: int, M: int, m: int) -> float:
    """``sin((2m+1)*theta0)**2``."""
    if M < 1:
        raise DomainError("need at least one marked state")
    return math.sin((2 * m + 1) * initial_angle(n, M)) ** 2


def grover_state(n: int, marked: Iterable[int], iterations: int) -> StateVector:
    """State after ``iterations`` rounds starting from the uniform state."""
    marked = _marked_array(marked, 1 << n)
    s = uniform_state(n)
    for _ in range(iterations):
        s = grover_iterate(s, marked)
    return s


@dataclass(frozen=True)
class GroverResult:
    index: int
    found: bool
    iterations: int
    success_probability: float


def grover_search(n: int, marked: Iterable[int], rng: Rng, iterations: Optional[int] = None) -> GroverResult:
    """Amplify the marked states, then measure once."""
    marked = _marked_array(marked, 1 << n)
    M = marked.size
    if M >= 1 << n:
        raise DomainError("every state is marked; nothing to search")
    m = default_iterations(n, M) if iterations is None else int(iterations)
    if m < 0:
        raise DomainError("iteration count must be non-negative")
    s = grover_state(n, marked, m)
    x = measure_all(s, rng).value
    p = float(np.sum(np.abs(s.amplitudes[marked]) ** 2))
    return GroverResult(x, bool(np.isin(x, marked)), m, p)


def rotation_matrix(theta0: float) -> np.ndarray:
    """Grover iterate on the ordered basis ``(|a_perp>, |a>)``: rotation by ``2*theta0``."""
    c, s = math.cos(2 * theta0), math.sin(2 * theta0)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class CountResult:
    estimate: int
    phase_integer: int
    theta_estimate: float


def _count_from_phase(phi: int, bits: int, n: int) -> CountResult:
    # The rotation has eigenphases exp(+-2i*theta0), so phi/2**t ~ theta0/pi
    # or 1 - theta0/pi; sin^2 is the same for both.
    theta = math.pi * phi / (1 << bits)
    return CountResult(int(round((1 << n) * math.sin(theta) ** 2)), phi, theta)


def quantum_count(n: int, marked: Iterable[int], precision_bits: int, rng: Rng) -> CountResult:
    """Estimate the number of marked states by phase estimation.

    Phase estimation runs on the 2x2 rotation that the Grover iterate
    performs inside the span of the marked and unmarked uniform states,
    starting from the uniform state (a superposition of both eigenvectors).
    """
    marked_list = sorted({int(m) for m in marked})
    if any(m < 0 or m >= 1 << n for m in marked_list):
        raise DomainError("marked index out of range")
    theta0 = initial_angle(n, len(marked_list))
    g = Gate(rotation_matrix(theta0), "G")
    start = StateVector([math.cos(theta0), math.sin(theta0)])
    return _count_from_phase(phase_estimate(g, start, precision_bits, rng), precision_bits, n)


def grover_operator_matrix(n: int, marked: Iterable[int]) -> np.ndarray:
    """Dense ``2**n`` Grover iterate, for cross-checks at small ``n``."""
    dim = 1 << n
    cols = []
    for x in range(dim):
        e = np.zeros(dim, dtype=np.complex128)
        e[x] = 1.0
        cols.append(grover_iterate(StateVector._trusted(e), marked).amplitudes if marked else e)
    return np.array(cols).T


def quantum_count_full(n: int, marked: Iterable[int], precision_bits: int, rng: Rng) -> CountResult:
    """Same estimate using the full ``2**n``-dimensional Grover iterate."""
    marked = sorted({int(m) for m in marked})
    if marked:
        g = Gate(grover_operator_matrix(n, marked), "G", check=False)
    else:
        g = Gate(-np.eye(1 << n) + 2.0 / (1 << n), "G", check=False)
    return _count_from_phase(phase_estimate(g, uniform_state(n), precision_bits, rng), precision_bits, n)
