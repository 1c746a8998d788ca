"""Black-box oracles and the query algorithms that use them.

An oracle ``U_f |x>|y> = |x>|y XOR f(x)>`` is applied as a permutation of
basis indices rather than as a gate list; it is exact and cheap. Each
:class:`Oracle` counts how many times it has been applied so callers can
check query counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import AlgorithmFailure, DomainError, PromiseViolation
from .gates import Circuit, hadamard_layer, run_circuit, standard_gate
from .measurement import measure_subset
from .rng import Rng
from .state import StateVector, basis_state, tensor_product

CONSTANT = "CONSTANT"
BALANCED = "BALANCED"


def bitwise_dot(x: int, y: int) -> int:
    """Parity of ``popcount(x & y)``.

    >>> bitwise_dot(0b1101, 0b1110)
    0
    """
    return bin(x & y).count("1") & 1


@dataclass
class OracleSpec:
    """Truth table of ``f: [0, 2**n_in) -> [0, 2**n_out)``."""

    n_in: int
    n_out: int
    table: tuple

    def __post_init__(self):
        self.table = tuple(int(v) for v in self.table)
        if self.n_in < 1 or self.n_out < 1:
            raise DomainError("oracle needs at least one input and one output bit")
        if len(self.table) != 1 << self.n_in:
            raise DomainError(f"table must have {1 << self.n_in} entries")
        if any(v < 0 or v >= 1 << self.n_out for v in self.table):
            raise DomainError(f"table values must fit in {self.n_out} bits")

    @classmethod
    def from_function(cls, f: Callable[[int], int], n_in: int, n_out: int) -> "OracleSpec":
        return cls(n_in, n_out, tuple(f(x) for x in range(1 << n_in)))

    def __call__(self, x: int) -> int:
        return self.table[x]


@dataclass
class Oracle:
    """Permutation unitary for an :class:`OracleSpec`, with a call counter."""

    spec: OracleSpec
    calls: int = 0
    _perm: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n_in, n_out = self.spec.n_in, self.spec.n_out
        x = np.arange(1 << n_in)[:, None]
        y = np.arange(1 << n_out)[None, :]
        fx = np.asarray(self.spec.table)[:, None]
        src = (x << n_out) | y
        dst = (x << n_out) | (y ^ fx)
        perm = np.empty(1 << (n_in + n_out), dtype=np.int64)
        perm[dst.reshape(-1)] = src.reshape(-1)
        self._perm = perm

    @property
    def width(self) -> int:
        return self.spec.n_in + self.spec.n_out

    def apply(self, s: StateVector) -> StateVector:
        if s.num_qubits != self.width:
            raise DomainError(f"oracle acts on {self.width} qubits, state has {s.num_qubits}")
        self.calls += 1
        return StateVector._trusted(s.amplitudes[self._perm])

    def matrix(self) -> np.ndarray:
        dim = 1 << self.width
        m = np.zeros((dim, dim))
        m[np.arange(dim), self._perm] = 1.0
        return m


def build_oracle(f: OracleSpec) -> Oracle:
    return Oracle(f)


@dataclass(frozen=True)
class QueryResult:
    answer: object
    oracle_calls: int
    samples: tuple = ()


def _kickback_run(oracle: Oracle, n: int) -> StateVector:
    """H^n on |0..0>, |1> ancilla through H, one oracle call, H^n on the input."""
    width = oracle.width
    start = tensor_product(basis_state(n, 0), basis_state(oracle.spec.n_out, 1))
    c = hadamard_layer(width)
    s = oracle.apply(run_circuit(c, start))
    return run_circuit(hadamard_layer(n, width=width), s)


def deutsch(f: OracleSpec, rng: Rng | None = None) -> QueryResult:
    """Classify a one-bit function as constant or balanced with one query."""
    if f.n_in != 1 or f.n_out != 1:
        raise DomainError("deutsch needs a 1-bit to 1-bit function")
    return deutsch_jozsa(f, rng)


def deutsch_jozsa(f: OracleSpec, rng: Rng | None = None) -> QueryResult:
    """Constant-or-balanced test with one query.

    The input register reads ``0`` with certainty for a constant ``f`` and
    never reads ``0`` for a balanced one. If ``f`` breaks the promise the
    answer is whatever that single measurement implies.
    """
    if f.n_out != 1:
        raise DomainError("deutsch_jozsa needs a one-bit output")
    rng = rng if rng is not None else Rng(0)
    oracle = build_oracle(f)
    s = _kickback_run(oracle, f.n_in)
    y = measure_subset(s, range(f.n_in), rng).value
    return QueryResult(CONSTANT if y == 0 else BALANCED, oracle.calls, (y,))


def bv_spec(a: int, n: int) -> OracleSpec:
    """``f(x) = a·x`` as an oracle table."""
    if not 0 <= a < 1 << n:
        raise DomainError(f"hidden string must fit in {n} bits")
    return OracleSpec.from_function(lambda x: bitwise_dot(a, x), n, 1)


def bernstein_vazirani(f: OracleSpec, rng: Rng | None = None) -> QueryResult:
    """Recover ``a`` from ``f(x) = a·x`` with a single query."""
    if f.n_out != 1:
        raise DomainError("bernstein_vazirani needs a one-bit output")
    rng = rng if rng is not None else Rng(0)
    oracle = build_oracle(f)
    s = _kickback_run(oracle, f.n_in)
    a = measure_subset(s, range(f.n_in), rng).value
    return QueryResult(a, oracle.calls, (a,))


def bv_oracle_circuit(a: int, n: int) -> Circuit:
    """Gate-level ``U_f`` for ``f(x) = a·x``: a CNOT onto the ancilla per set bit."""
    c = Circuit(n + 1)
    cnot = standard_gate("CNOT")
    for i in range(n):
        if (a >> (n - 1 - i)) & 1:
            c.add(cnot, i, n)
    return c


def gf2_solve(rows: Sequence[int], n: int) -> list[int]:
    """Basis of ``{a : row·a = 0 for every row}`` over GF(2).

    >>> gf2_solve([3, 4, 7, 9], 4)
    [6]
    """
    pivots = _gf2_reduce(rows)
    free = [b for b in range(n) if b not in pivots]
    basis = []
    for fb in free:
        v = 1 << fb
        for pb, prow in pivots.items():
            if (prow >> fb) & 1:
                v |= 1 << pb
        basis.append(v)
    return sorted(basis)


def _gf2_reduce(rows: Sequence[int]) -> dict[int, int]:
    pivots: dict[int, int] = {}  # pivot bit -> reduced row
    for row in rows:
        r = int(row)
        for bit in sorted(pivots, reverse=True):
            if (r >> bit) & 1:
                r ^= pivots[bit]
        if r == 0:
            continue
        top = r.bit_length() - 1
        # Keep the system fully reduced so free variables read off directly.
        for bit, prow in list(pivots.items()):
            if (prow >> top) & 1:
                pivots[bit] = prow ^ r
        pivots[top] = r
    return pivots


def gf2_rank(rows: Sequence[int]) -> int:
    return len(_gf2_reduce(rows))


def simon_sample(oracle: Oracle, rng: Rng) -> int:
    """One round: H on input, query, measure output, H on input, measure input."""
    n = oracle.spec.n_in
    start = basis_state(oracle.width, 0)
    s = run_circuit(hadamard_layer(n, width=oracle.width), start)
    s = oracle.apply(s)
    s = measure_subset(s, range(n, oracle.width), rng).post_state
    s = run_circuit(hadamard_layer(n, width=oracle.width), s)
    return measure_subset(s, range(n), rng).value


def simon(f: OracleSpec, rng: Rng, max_runs: int | None = None) -> QueryResult:
    """Find the hidden period ``a`` of a two-to-one ``f(x) = f(x XOR a)``.

    Rounds repeat until the sampled ``y`` values have rank ``n - 1``, for at
    most ``n + 20`` rounds. Any output width of at least ``n - 1`` bits is
    accepted since only which inputs collide matters.
    """
    n = f.n_in
    if f.n_out < n - 1:
        raise DomainError("simon needs at least n-1 output bits")
    max_runs = n + 20 if max_runs is None else max_runs
    oracle = build_oracle(f)
    samples: list[int] = []
    while gf2_rank(samples) < n - 1:
        if len(samples) >= max_runs:
            raise AlgorithmFailure(f"rank n-1 not reached in {max_runs} rounds")
        samples.append(simon_sample(oracle, rng))
    candidates = [a for a in gf2_solve(samples, n) if a != 0]
    if len(candidates) != 1:
        raise PromiseViolation("sampled equations do not single out one period")
    a = candidates[0]
    if f(0) != f(a):
        raise PromiseViolation(f"f(0) != f({a}); function is not periodic")
    return QueryResult(a, oracle.calls, tuple(samples))


def simon_spec_from_period(a: int, n: int, rng: Rng, n_out: int | None = None) -> OracleSpec:
    """Random two-to-one function with period ``a`` (distinct value per coset)."""
    if not 0 < a < 1 << n:
        raise DomainError("period must be a nonzero n-bit integer")
    n_out = n if n_out is None else n_out
    reps = sorted({min(x, x ^ a) for x in range(1 << n)})
    if len(reps) > 1 << n_out:
        raise DomainError("output register too small for a two-to-one function")
    order = np.argsort(rng.randoms(1 << n_out), kind="stable")
    value = {r: int(order[i]) for i, r in enumerate(reps)}
    return OracleSpec.from_function(lambda x: value[min(x, x ^ a)], n, n_out)
