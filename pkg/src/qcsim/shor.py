"""Quantum period finding and the factoring driver built on it.

Three interchangeable routes produce the measured value ``y``:

* ``full`` simulates both registers (upper ``n`` qubits, lower ``n0``),
  measures the lower register, applies the QFT to the upper one and
  measures it.
* ``structured`` skips the lower register: measuring it leaves the upper
  register in an evenly weighted arithmetic progression ``x0 + k*r``,
  which is built directly.
* ``analytic`` samples the closed-form distribution of ``y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import AlgorithmFailure, DomainError
from .gates import Gate, Circuit, controlled, hadamard_layer, inverse_qft_circuit, qft_circuit, run_circuit
from .measurement import measure_all, measure_subset
from .numtheory import best_fraction_below, classical_period, gcd, is_prime, mod_exp
from .rng import Rng
from .state import StateVector, basis_state, tensor_product

FULL_QUBIT_CAP = 22
STRUCTURED_QUBIT_CAP = 20
CMAX = 8


@dataclass(frozen=True)
class PeriodInstance:
    """Period-finding problem for ``f(x) = a**x mod N``.

    ``n0`` is the bit length of ``N`` and the upper register has ``n = 2*n0``
    qubits so that ``2**n > N**2``.
    """

    N: int
    a: int

    def __post_init__(self):
        if self.N < 3:
            raise DomainError("N must be at least 3")
        if not 1 < self.a < self.N or gcd(self.a, self.N) != 1:
            raise DomainError(f"a={self.a} must lie in (1, N) and be coprime to N={self.N}")

    @property
    def n0(self) -> int:
        return self.N.bit_length()

    @property
    def n(self) -> int:
        return 2 * self.n0

    @property
    def r(self) -> int:
        return classical_period(self.a, self.N)

    def function_table(self) -> np.ndarray:
        size = 1 << self.n
        out = np.empty(size, dtype=np.int64)
        v = 1
        for x in range(size):
            out[x] = v
            v = v * self.a % self.N
        return out


def prepare_period_state(inst: PeriodInstance) -> StateVector:
    """``2**(-n/2) * sum_x |x>|a**x mod N>`` on ``n + n0`` qubits."""
    n, n0 = inst.n, inst.n0
    if n + n0 > FULL_QUBIT_CAP:
        raise DomainError(f"{n + n0} qubits exceeds the full-state cap of {FULL_QUBIT_CAP}")
    fx = inst.function_table()
    amps = np.zeros(1 << (n + n0), dtype=np.complex128)
    x = np.arange(1 << n)
    amps[(x << n0) | fx] = 1.0 / math.sqrt(1 << n)
    return StateVector._trusted(amps)


def _upper_register(s: StateVector, n: int, n0: int) -> StateVector:
    # After the lower register is measured its value is fixed, so the upper
    # amplitudes are the single nonzero column.
    block = s.amplitudes.reshape(1 << n, 1 << n0)
    col = int(np.argmax(np.abs(block).sum(axis=0)))
    return StateVector._trusted(block[:, col].copy())


def collapse_function_register(state: StateVector, inst: PeriodInstance, rng: Rng) -> tuple[int, StateVector]:
    """Measure the lower register; return its value and the upper state."""
    n, n0 = inst.n, inst.n0
    res = measure_subset(state, range(n, n + n0), rng)
    f0 = res.value
    return f0, _upper_register(res.post_state, n, n0)


def structured_period_state(inst: PeriodInstance, x0: int) -> StateVector:
    """Upper-register state left behind when the lower register reads ``a**x0``.

    The support is read off the function table, so the period itself is
    never consulted.
    """
    n = inst.n
    if n > STRUCTURED_QUBIT_CAP:
        raise DomainError(f"{n} qubits exceeds the structured-path cap")
    fx = inst.function_table()
    support = fx == fx[x0]
    amps = support.astype(np.complex128) / math.sqrt(int(support.sum()))
    return StateVector._trusted(amps)


def progression_state(n: int, x0: int, r: int) -> StateVector:
    """Even superposition of ``x0, x0 + r, x0 + 2r, ...`` below ``2**n``."""
    if not 0 <= x0 < r or r < 1:
        raise DomainError("need 0 <= x0 < r")
    idx = np.arange(x0, 1 << n, r)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[idx] = 1.0 / math.sqrt(idx.size)
    return StateVector._trusted(amps)


@dataclass(frozen=True)
class YDistribution:
    probs: np.ndarray
    r: int
    n: int

    @property
    def Q(self) -> int:
        return (1 << self.n) // self.r

    def peak_centers(self) -> list[float]:
        return [m * (1 << self.n) / self.r for m in range(self.r)]

    def __getitem__(self, y: int) -> float:
        return float(self.probs[y])


def _geometric_weight(y: np.ndarray, r: int, n: int, count: int) -> np.ndarray:
    """``|sum_{k<count} exp(2*pi*i*k*r*y/2**n)|**2`` via the sine-ratio form."""
    size = 1 << n
    # Reduce r*y mod 2**n exactly so the phase argument stays in [0, 1).
    frac = ((y.astype(np.int64) * r) % size) / size
    # Distance to the nearest integer; the sum is periodic in frac.
    delta = np.minimum(frac, 1.0 - frac)
    num = np.sin(np.pi * count * delta)
    den = np.sin(np.pi * delta)
    small = np.abs(np.pi * delta) < 1e-8
    out = np.empty_like(delta)
    safe = ~small
    out[safe] = (num[safe] / den[safe]) ** 2
    # Near delta = 0 the ratio tends to count; keep the leading correction.
    z = np.pi * delta[small]
    out[small] = (count * (1 - (count ** 2 - 1) * z ** 2 / 6)) ** 2
    return out


def y_distribution(inst: PeriodInstance, r: Optional[int] = None) -> YDistribution:
    """``P(y) = |sum_{k<Q} exp(2*pi*i*k*r*y/2**n)|**2 / (2**n * Q)``, ``Q = 2**n // r``."""
    r = inst.r if r is None else r
    n = inst.n
    q = (1 << n) // r
    y = np.arange(1 << n)
    probs = _geometric_weight(y, r, n, q) / ((1 << n) * q)
    return YDistribution(probs, r, n)


def exact_y_distribution(inst: PeriodInstance) -> np.ndarray:
    """Distribution averaged over the lower-register outcome (every ``x0``)."""
    n = inst.n
    r = inst.r
    size = 1 << n
    y = np.arange(size)
    total = np.zeros(size)
    for x0 in range(r):
        # P(x0 branch) = count/size and P(y | branch) = weight/(size*count).
        count = len(range(x0, size, r))
        total += _geometric_weight(y, r, n, count)
    return total / size ** 2


@lru_cache(maxsize=32)
def _analytic_probs(N: int, a: int) -> np.ndarray:
    probs = y_distribution(PeriodInstance(N, a)).probs
    probs.setflags(write=False)
    return probs


@lru_cache(maxsize=8)
def _qft(n: int) -> Circuit:
    # shared between calls; only ever read
    return qft_circuit(n, include_swaps=True)


def sample_y(inst: PeriodInstance, rng: Rng, path: str = "auto") -> int:
    """Run one period-finding measurement and return ``y``."""
    if path == "auto":
        path = "full" if inst.n + inst.n0 <= 16 else "structured"
    n = inst.n
    if path == "full":
        s = prepare_period_state(inst)
        _, upper = collapse_function_register(s, inst, rng)
    elif path == "structured":
        # Measuring the lower register picks a^x0 with x0 uniform over all x.
        x0 = rng.integers(0, 1 << n)
        upper = structured_period_state(inst, x0)
    elif path == "analytic":
        return rng.choice(_analytic_probs(inst.N, inst.a))
    else:
        raise DomainError(f"unknown sampling path {path!r}")
    out = run_circuit(_qft(n), upper)
    return measure_all(out, rng).value


def extract_period(y: int, inst: PeriodInstance, cmax: int = CMAX) -> Optional[int]:
    """Recover ``r`` from ``y`` by continued fractions; ``None`` on failure.

    The convergent of ``y / 2**n`` with the largest denominator below ``N``
    gives a candidate ``r0``; small multiples ``c*r0`` cover the case where
    the numerator shared a factor with ``r``.
    """
    if y == 0:
        return None
    _, r0 = best_fraction_below(y, 1 << inst.n, inst.N)
    if r0 < 1:
        return None
    for c in range(1, cmax + 1):
        if mod_exp(inst.a, c * r0, inst.N) == 1:
            return c * r0
    return None


def find_period(inst: PeriodInstance, rng: Rng, path: str = "auto", max_samples: int = 10) -> tuple[int, int]:
    """Sample until a period is extracted; returns ``(r, samples_used)``."""
    for used in range(1, max_samples + 1):
        r = extract_period(sample_y(inst, rng, path), inst)
        if r is not None:
            return r, used
    raise AlgorithmFailure(f"no period found in {max_samples} samples")


@dataclass(frozen=True)
class FactorResult:
    factors: tuple
    a: int
    r: Optional[int]
    attempts: int
    samples: int
    lucky: bool = False


def factor(N: int, rng: Rng, a: Optional[int] = None, path: str = "auto",
           max_attempts: int = 20, max_samples: int = 10) -> FactorResult:
    """Split an odd semiprime ``N`` into its two prime factors.

    Each attempt picks a base ``a`` (or uses the one given), finds its
    period ``r`` and, when ``r`` is even and ``a**(r/2) != -1 mod N``, reads
    the factors from ``gcd(a**(r/2) +- 1, N)``.
    """
    if N < 15 or N % 2 == 0 or is_prime(N):
        raise DomainError("N must be an odd composite of at least 15")
    total_samples = 0
    for attempt in range(1, max_attempts + 1):
        base = a if a is not None else rng.integers(2, N)
        g = math.gcd(base, N)
        if g != 1:
            return FactorResult(tuple(sorted((g, N // g))), base, None, attempt, total_samples, lucky=True)
        inst = PeriodInstance(N, base)
        try:
            r, used = find_period(inst, rng, path, max_samples)
            total_samples += used
        except AlgorithmFailure:
            total_samples += max_samples
            continue
        if r % 2:
            continue
        half = mod_exp(base, r // 2, N)
        if half == N - 1:
            continue
        p, q = math.gcd(half - 1, N), math.gcd(half + 1, N)
        for cand in (p, q):
            if 1 < cand < N:
                return FactorResult(tuple(sorted((cand, N // cand))), base, r, attempt, total_samples)
    raise AlgorithmFailure(f"factoring {N} failed after {max_attempts} attempts")


def phase_estimate(u: Gate, eigstate: StateVector, n_bits: int, rng: Rng) -> int:
    """Estimate the phase ``phi`` of ``u|psi> = exp(2*pi*i*phi)|psi>`` to ``n_bits``.

    Counting qubit ``j`` (0 = most significant) controls ``u**(2**(n_bits-1-j))``;
    an inverse QFT then leaves ``phi' = 2**n_bits * phi`` in the counting
    register.
    """
    if n_bits < 1:
        raise DomainError("need at least one counting bit")
    k = u.arity
    if eigstate.num_qubits != k:
        raise DomainError("eigenstate width does not match the gate")
    width = n_bits + k
    c = Circuit(width)
    c.extend(hadamard_layer(n_bits))
    targets = list(range(n_bits, width))
    power = u.matrix
    for j in reversed(range(n_bits)):
        c.add(controlled(Gate(power, f"U^{2 ** (n_bits - 1 - j)}", check=False)), j, *targets)
        power = power @ power
    c.extend(inverse_qft_circuit(n_bits, include_swaps=True))
    s = run_circuit(c, tensor_product(basis_state(n_bits, 0), eigstate))
    return measure_subset(s, range(n_bits), rng).value
