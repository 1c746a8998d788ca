"""Spin measurements along arbitrary axes and Bell-inequality experiments."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .gates import Gate
from .measurement import measure_subset
from .rng import Rng
from .state import StateVector

_S2 = 1 / math.sqrt(2)
SINGLET = StateVector([0, _S2, -_S2, 0])


@dataclass(frozen=True)
class Direction:
    """Unit vector given by polar angle ``theta`` and azimuth ``phi``."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not -1e-12 <= self.theta <= math.pi + 1e-12:
            raise DomainError("theta must lie in [0, pi]")

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def angle_to(self, other: "Direction") -> float:
        return math.acos(max(-1.0, min(1.0, float(self.vector @ other.vector))))

    @classmethod
    def in_plane(cls, angle: float) -> "Direction":
        """Direction in the x-z plane at ``angle`` from +z (any real angle)."""
        angle = math.remainder(angle, 2 * math.pi)
        return cls(abs(angle), 0.0 if angle >= 0 else math.pi)


def bloch_state(d: Direction, which: int) -> StateVector:
    """Spin-up (``which=0``) or spin-down (``which=1``) state along ``d``."""
    c, s = math.cos(d.theta / 2), math.sin(d.theta / 2)
    e = cmath.exp(1j * d.phi)
    if which == 0:
        return StateVector([c, e * s])
    if which == 1:
        return StateVector([-s, e * c])
    raise DomainError("which must be 0 or 1")


def basis_change(d: Direction) -> np.ndarray:
    """Unitary whose rows are ``<0_d|`` and ``<1_d|``; maps ``|k_d>`` to ``|k>``."""
    return np.array([bloch_state(d, 0).amplitudes.conj(), bloch_state(d, 1).amplitudes.conj()])


def spin_observable(d: Direction) -> Gate:
    """``sigma . n``."""
    nx, ny, nz = d.vector
    return Gate([[nz, nx - 1j * ny], [nx + 1j * ny, -nz]], "sigma_n")


def _sign_index(o: int) -> int:
    if o not in (1, -1):
        raise DomainError("outcomes are +1 or -1")
    return 0 if o == 1 else 1


def singlet_joint_probability(a: Direction, c: Direction, outcomes: tuple) -> float:
    """Probability that Alice (along ``a``) and Bob (along ``c``) see ``outcomes``."""
    oa, oc = outcomes
    _sign_index(oa), _sign_index(oc)
    theta = a.angle_to(c)
    if oa == oc:
        return 0.5 * math.sin(theta / 2) ** 2
    return 0.5 * math.cos(theta / 2) ** 2


def measure_pair(s: StateVector, a: Direction, b: Direction, rng: Rng) -> tuple[int, int]:
    """Measure qubit 0 along ``a`` and qubit 1 along ``b``; outcomes are +-1."""
    u = np.kron(basis_change(a), basis_change(b))
    rotated = StateVector._trusted(u @ s.amplitudes)
    bits = measure_subset(rotated, [0, 1], rng).bits
    return 1 - 2 * bits[0], 1 - 2 * bits[1]


def rotated_outcome_probs(s: StateVector, a: Direction, b: Direction) -> np.ndarray:
    """Born weights of (++, +-, -+, --) for the two axes."""
    u = np.kron(basis_change(a), basis_change(b))
    return np.abs(u @ s.amplitudes) ** 2


@dataclass(frozen=True)
class PairStats:
    trials: int
    counts: tuple  # (++, +-, -+, --)

    def frequency(self, oa: int, ob: int) -> float:
        if self.trials == 0:
            return float("nan")
        return self.counts[2 * _sign_index(oa) + _sign_index(ob)] / self.trials


def correlation_run(a: Direction, b: Direction, trials: int, rng: Rng,
                    state: StateVector = SINGLET) -> PairStats:
    """``trials`` independent measurements with fixed axes, sampled in one batch."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    outcomes = rng.categorical(rotated_outcome_probs(state, a, b), trials)
    counts = np.bincount(outcomes, minlength=4)
    return PairStats(trials, tuple(int(x) for x in counts))


def bell_experiment(directions: Sequence[Direction], trials: int, rng: Rng) -> dict:
    """Alice and Bob each pick an axis uniformly at random per trial.

    Returns ``{(i, j): PairStats}`` for every ordered pair of direction
    indices, where ``i`` is Alice's choice and ``j`` is Bob's.
    """
    if trials < 1:
        raise DomainError("trials must be at least 1")
    k = len(directions)
    alice = rng.integers(0, k, trials)
    bob = rng.integers(0, k, trials)
    out = {}
    for i in range(k):
        for j in range(k):
            sel = int(np.count_nonzero((alice == i) & (bob == j)))
            if sel:
                out[i, j] = correlation_run(directions[i], directions[j], sel, rng)
            else:
                out[i, j] = PairStats(0, (0, 0, 0, 0))
    return out


def bell_experiment_sequential(directions: Sequence[Direction], trials: int, rng: Rng) -> dict:
    """Trial-by-trial version of :func:`bell_experiment` using partial measurement."""
    k = len(directions)
    tallies = {(i, j): [0, 0, 0, 0] for i in range(k) for j in range(k)}
    for _ in range(trials):
        i, j = rng.integers(0, k), rng.integers(0, k)
        oa, ob = measure_pair(SINGLET, directions[i], directions[j], rng)
        tallies[i, j][2 * _sign_index(oa) + _sign_index(ob)] += 1
    return {key: PairStats(sum(v), tuple(v)) for key, v in tallies.items()}


@dataclass(frozen=True)
class InequalityReport:
    theta: float
    lhs: float
    rhs: float
    violated: bool
    lhs_sin: float
    rhs_sin: float


def bell_inequality_check(theta: float, tol: float = 1e-12) -> InequalityReport:
    """Quantum prediction for axes a, c, b spaced by ``theta`` in one plane.

    ``lhs = sin(theta)**2`` and ``rhs = 2*sin(theta/2)**2`` are twice
    ``P(+a;+b)`` and ``P(+a;+c) + P(+c;+b)``. Their square roots
    ``sin(theta)`` and ``sqrt(2)*sin(theta/2)`` are returned too.
    """
    if not 0 < theta < math.pi:
        raise DomainError("theta must lie strictly between 0 and pi")
    lhs = math.sin(theta) ** 2
    rhs = 2 * math.sin(theta / 2) ** 2
    return InequalityReport(theta, lhs, rhs, lhs > rhs + tol,
                            math.sin(theta), math.sqrt(2) * math.sin(theta / 2))


# Hidden-variable populations: Alice's predetermined outcomes along (a, b, c).
# Bob always carries the opposite values.
POPULATIONS = (
    (1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1),
    (-1, 1, 1), (-1, 1, -1), (-1, -1, 1), (-1, -1, -1),
)


@dataclass(frozen=True)
class HiddenVariableReport:
    trials: int
    population_counts: tuple
    p_ab: float  # P(+a; +b): Alice +1 along a, Bob +1 along b
    p_ac: float
    p_cb: float
    satisfied: bool
    sampled: dict  # conditional frequencies from random axis choices


def hidden_variable_experiment(weights: Sequence[float], trials: int, rng: Rng) -> HiddenVariableReport:
    """Local deterministic model drawing each pair from the 8 populations.

    Each pair carries fixed answers for all three axes, so the joint
    probabilities can be counted directly and always obey
    ``P(+a;+b) <= P(+a;+c) + P(+c;+b)``. The report also includes
    frequencies from random axis choices, as an experiment would see.
    """
    if len(weights) != 8:
        raise DomainError("need one weight per population")
    pop = rng.categorical(weights, trials)
    table = np.array(POPULATIONS)[pop]  # Alice's values; Bob's are the negation
    alice, bob = table, -table
    A, B, C = 0, 1, 2

    def joint(i, j):
        return int(np.count_nonzero((alice[:, i] == 1) & (bob[:, j] == 1)))

    n_ab, n_ac, n_cb = joint(A, B), joint(A, C), joint(C, B)
    choice_a = rng.integers(0, 3, trials)
    choice_b = rng.integers(0, 3, trials)
    rows = np.arange(trials)
    oa = alice[rows, choice_a]
    ob = bob[rows, choice_b]
    sampled = {}
    names = "abc"
    for i in range(3):
        for j in range(3):
            sel = (choice_a == i) & (choice_b == j)
            total = int(np.count_nonzero(sel))
            hits = int(np.count_nonzero(sel & (oa == 1) & (ob == 1)))
            sampled[names[i] + names[j]] = hits / total if total else float("nan")
    counts = tuple(int(x) for x in np.bincount(pop, minlength=8))
    return HiddenVariableReport(trials, counts, n_ab / trials, n_ac / trials, n_cb / trials,
                                n_ab <= n_ac + n_cb, sampled)
