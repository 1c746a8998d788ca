"""Density matrices, reduced states and entanglement diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .gates import Gate
from .measurement import project
from .state import DEFAULT_TOL, StateVector

EIG_CLAMP = 1e-10


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix."""

    __slots__ = ("rho",)

    def __init__(self, rho, tol: float = DEFAULT_TOL):
        m = np.array(rho, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("density matrix must be square")
        if not np.allclose(m, m.conj().T, atol=tol, rtol=0):
            raise DomainError("density matrix must be Hermitian")
        if abs(np.trace(m).real - 1.0) > tol:
            raise DomainError("density matrix must have unit trace")
        if np.linalg.eigvalsh(m).min() < -tol:
            raise DomainError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        self.rho = m

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues with tiny negatives clamped to zero."""
        ev = np.linalg.eigvalsh(self.rho)
        return np.where((ev < 0) & (ev >= -EIG_CLAMP), 0.0, ev)

    def purity(self) -> float:
        return float(np.trace(self.rho @ self.rho).real)

    def entropy(self) -> float:
        """Von Neumann entropy in nats."""
        ev = self.eigenvalues()
        ev = ev[ev > 0]
        return float(-np.sum(ev * np.log(ev)))

    def expectation(self, obs) -> float:
        m = obs.matrix if isinstance(obs, Gate) else np.asarray(obs)
        return float(np.trace(self.rho @ m).real)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


def from_pure(s: StateVector) -> DensityMatrix:
    a = s.amplitudes
    return DensityMatrix(np.outer(a, a.conj()))


def mixed_from_ensemble(states: Sequence[StateVector], probs: Sequence[float]) -> DensityMatrix:
    p = np.asarray(probs, dtype=float)
    if len(states) != p.size or p.size == 0:
        raise DomainError("need one probability per state")
    if np.any(p < 0) or abs(p.sum() - 1.0) > DEFAULT_TOL:
        raise DomainError("probabilities must be non-negative and sum to 1")
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise DomainError("ensemble states differ in size")
    rho = sum(pi * np.outer(s.amplitudes, s.amplitudes.conj()) for pi, s in zip(p, states))
    return DensityMatrix(rho)


def _split(s: StateVector, keep: Sequence[int]) -> tuple[np.ndarray, tuple, tuple]:
    """Amplitudes as a matrix ``C[i, j]`` with ``i`` over kept qubits."""
    n = s.num_qubits
    k = tuple(int(q) for q in keep)
    if not k or len(set(k)) != len(k) or any(q < 0 or q >= n for q in k):
        raise DomainError("kept qubits must be distinct positions in range")
    rest = tuple(q for q in range(n) if q not in k)
    psi = s.amplitudes.reshape((2,) * n).transpose(k + rest)
    return psi.reshape(1 << len(k), 1 << len(rest)), k, rest


def partial_trace(s: StateVector, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state of the ``keep`` qubits: ``rho[i, i'] = sum_j C[i, j] C*[i', j]``."""
    c, _, _ = _split(s, keep)
    return DensityMatrix(c @ c.conj().T)


@dataclass(frozen=True)
class EntanglementReport:
    purity: float
    entropy: float
    product: bool


def entanglement_report(s: StateVector, keep: Sequence[int]) -> EntanglementReport:
    rho = partial_trace(s, keep)
    purity = rho.purity()
    return EntanglementReport(purity, rho.entropy(), purity >= 1 - 1e-8)


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_states: tuple
    right_states: tuple
    keep: tuple
    rest: tuple

    @property
    def rank(self) -> int:
        return int(self.coefficients.size)

    def reconstruct(self) -> StateVector:
        """Reassemble ``sum_a c_a |phi_a> (x) |sigma_a>`` in original qubit order."""
        c = sum(ca * np.outer(l.amplitudes, r.amplitudes)
                for ca, l, r in zip(self.coefficients, self.left_states, self.right_states))
        n = len(self.keep) + len(self.rest)
        psi = c.reshape((2,) * n)
        order = np.argsort(self.keep + self.rest)
        return StateVector(psi.transpose(order).reshape(-1), tol=1e-8)


def schmidt(s: StateVector, keep: Sequence[int], tol: float = 1e-12) -> SchmidtDecomposition:
    """Schmidt decomposition across ``keep`` versus the remaining qubits.

    Coefficients are descending. Each left vector is rotated so its first
    nonzero component is real and positive; the matching right vector
    absorbs the conjugate phase.
    """
    c, k, rest = _split(s, keep)
    u, sv, vh = np.linalg.svd(c)
    lefts, rights, coeffs = [], [], []
    for a in range(sv.size):
        if sv[a] <= tol:
            continue
        left = u[:, a]
        right = vh[a, :]
        lead = left[np.flatnonzero(np.abs(left) > 1e-12)[0]]
        phase = lead / abs(lead)
        left = left / phase
        right = right * phase
        lefts.append(StateVector(left, tol=1e-8))
        rights.append(StateVector(right, tol=1e-8))
        coeffs.append(sv[a])
    return SchmidtDecomposition(np.array(coeffs), tuple(lefts), tuple(rights), k, rest)


def evolve(rho: DensityMatrix, u) -> DensityMatrix:
    """``U rho U^dagger``."""
    m = u.matrix if isinstance(u, Gate) else np.asarray(u, dtype=np.complex128)
    if m.shape != rho.rho.shape:
        raise DomainError("operator and density matrix sizes differ")
    return DensityMatrix(m @ rho.rho @ m.conj().T)


def post_measurement_mixture(s: StateVector, measured: Sequence[int], keep: Sequence[int]) -> DensityMatrix:
    """Reduced state of ``keep`` averaged over outcomes of measuring ``measured``.

    Equal to :func:`partial_trace` of the unmeasured state whenever the two
    sets are disjoint: measuring a distant qubit cannot change local
    statistics.
    """
    measured = tuple(measured)
    total = np.zeros((1 << len(keep),) * 2, dtype=np.complex128)
    for outcome in range(1 << len(measured)):
        bits = [(outcome >> (len(measured) - 1 - i)) & 1 for i in range(len(measured))]
        prob, post = project(s, measured, bits)
        if post is not None:
            total += prob * partial_trace(post, keep).rho
    return DensityMatrix(total, tol=1e-8)
