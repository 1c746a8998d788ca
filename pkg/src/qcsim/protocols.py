"""Quantum key distribution (BB84, B92) and teleportation.

Photons are single qubits. Polarization maps onto bases as follows:

===========  ==========  ========
basis        bit 0       bit 1
===========  ==========  ========
Z (rectil.)  |0> horiz.  |1> vert.
X (diagonal) |+> = H|0>  |-> = H|1>
===========  ==========  ========

QKD runs simulate many photons at once as an array of 2-amplitude states,
which keeps 10**5-photon runs fast while still sampling every measurement
from Born weights.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError
from .gates import GateOp, apply, standard_gate
from .measurement import measure_subset
from .rng import Rng
from .state import StateVector, tensor_product

_S2 = 1 / math.sqrt(2)
_H = np.array([[_S2, _S2], [_S2, -_S2]])
BASIS_NAMES = ("Z", "X")


def _encode(bases: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """Photon states ``H**basis |bit>`` as an (n, 2) array."""
    states = np.zeros((bases.size, 2), dtype=np.complex128)
    states[np.arange(bases.size), bits] = 1.0
    x = bases == 1
    states[x] = states[x] @ _H.T
    return states


def _measure(states: np.ndarray, bases: np.ndarray, rng: Rng) -> np.ndarray:
    """Measure each photon in its basis; returns outcome bits."""
    rotated = states.copy()
    x = bases == 1
    rotated[x] = rotated[x] @ _H.T  # H is its own inverse
    p1 = np.abs(rotated[:, 1]) ** 2
    p1 = np.where(p1 < 1e-14, 0.0, p1)
    return (rng.randoms(states.shape[0]) < p1).astype(np.int8)


@dataclass
class QkdTranscript:
    """Per-photon record of one key-distribution run."""

    protocol: str
    alice_basis: np.ndarray
    alice_bit: np.ndarray
    bob_basis: np.ndarray
    bob_bit: np.ndarray
    kept: np.ndarray
    sifted_key_alice: np.ndarray
    sifted_key_bob: np.ndarray
    eve_basis: Optional[np.ndarray] = None
    eve_bit: Optional[np.ndarray] = None

    @property
    def n_photons(self) -> int:
        return int(self.alice_basis.size)

    @property
    def key_length(self) -> int:
        return int(self.sifted_key_alice.size)

    @property
    def disagreements(self) -> int:
        return int(np.count_nonzero(self.sifted_key_alice != self.sifted_key_bob))

    @property
    def disagreement_rate(self) -> float:
        return self.disagreements / self.key_length if self.key_length else 0.0

    @property
    def sifted_fraction(self) -> float:
        return self.key_length / self.n_photons

    def records(self):
        for i in range(self.n_photons):
            yield {
                "index": i,
                "alice_basis": BASIS_NAMES[self.alice_basis[i]],
                "alice_bit": int(self.alice_bit[i]),
                "eve_basis": None if self.eve_basis is None else BASIS_NAMES[self.eve_basis[i]],
                "bob_basis": BASIS_NAMES[self.bob_basis[i]],
                "bob_bit": int(self.bob_bit[i]),
                "kept": bool(self.kept[i]),
            }

    def to_lines(self) -> str:
        """One comma-separated line per photon, with a header row."""
        buf = io.StringIO()
        buf.write("index,alice_basis,alice_bit,eve_basis,bob_basis,bob_bit,kept\n")
        for r in self.records():
            eve = r["eve_basis"] or "-"
            buf.write(f"{r['index']},{r['alice_basis']},{r['alice_bit']},{eve},"
                      f"{r['bob_basis']},{r['bob_bit']},{int(r['kept'])}\n")
        return buf.getvalue()

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records())

    def summary(self) -> dict:
        return {
            "protocol": self.protocol,
            "photons": self.n_photons,
            "eve_present": self.eve_basis is not None,
            "key_length": self.key_length,
            "sifted_fraction": self.sifted_fraction,
            "disagreements": self.disagreements,
            "disagreement_rate": self.disagreement_rate,
        }


def _intercept(states: np.ndarray, rng: Rng) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eve measures in a random basis and resends what she saw."""
    n = states.shape[0]
    eve_basis = rng.bits(n)
    eve_bit = _measure(states, eve_basis, rng)
    return _encode(eve_basis, eve_bit), eve_basis, eve_bit


def bb84(n_photons: int, eve_present: bool, rng: Rng) -> QkdTranscript:
    """BB84 with an optional intercept-resend eavesdropper."""
    if n_photons < 1:
        raise DomainError("need at least one photon")
    alice_basis = rng.bits(n_photons)
    alice_bit = rng.bits(n_photons)
    photons = _encode(alice_basis, alice_bit)
    eve_basis = eve_bit = None
    if eve_present:
        photons, eve_basis, eve_bit = _intercept(photons, rng)
    bob_basis = rng.bits(n_photons)
    bob_bit = _measure(photons, bob_basis, rng)
    kept = alice_basis == bob_basis
    return QkdTranscript("bb84", alice_basis, alice_bit, bob_basis, bob_bit, kept,
                         alice_bit[kept], bob_bit[kept], eve_basis, eve_bit)


def b92(n_photons: int, eve_present: bool, rng: Rng) -> QkdTranscript:
    """B92: Alice sends ``|0>`` (k=0) or ``H|0>`` (k=1).

    Bob measures in basis ``l``. An outcome of 1 is only possible when
    ``l != k``, so those photons are kept: Bob's key bit is ``l`` and
    Alice's is ``1 - k``.
    """
    if n_photons < 1:
        raise DomainError("need at least one photon")
    k = rng.bits(n_photons)
    photons = _encode(k, np.zeros(n_photons, dtype=np.int8))
    eve_basis = eve_bit = None
    if eve_present:
        photons, eve_basis, eve_bit = _intercept(photons, rng)
    bob_basis = rng.bits(n_photons)
    bob_bit = _measure(photons, bob_basis, rng)
    kept = bob_bit == 1
    return QkdTranscript("b92", k, k, bob_basis, bob_bit, kept,
                         (1 - k[kept]).astype(np.int8), bob_basis[kept], eve_basis, eve_bit)


def clean_key_rate(key_bits: int, runs: int, rng: Rng) -> float:
    """Fraction of ``runs`` intercepted BB84 keys of ``key_bits`` bits with no error."""
    need = key_bits * runs
    photons = int(2.2 * need) + 64
    bits_a: list = []
    bits_b: list = []
    have = 0
    while have < need:
        t = bb84(photons, True, rng)
        bits_a.append(t.sifted_key_alice)
        bits_b.append(t.sifted_key_bob)
        have += t.key_length
    a = np.concatenate(bits_a)[:need].reshape(runs, key_bits)
    b = np.concatenate(bits_b)[:need].reshape(runs, key_bits)
    return float(np.mean(np.all(a == b, axis=1)))


@dataclass(frozen=True)
class TeleportResult:
    x: int
    y: int
    bob_state: StateVector
    alice_post: tuple


BELL00 = StateVector([_S2, 0, 0, _S2])
_X = standard_gate("X")
_Z = standard_gate("Z")


def teleport(psi: StateVector, rng: Rng) -> TeleportResult:
    """Send ``psi`` from qubit 0 to qubit 2 using a shared Bell pair on qubits 1, 2.

    Alice applies CNOT(0 -> 1) and H(0), then measures ``x`` (qubit 0) and
    ``y`` (qubit 1). Bob applies ``X**y`` and then ``Z**x``.
    """
    if psi.num_qubits != 1:
        raise DomainError("teleport sends one qubit")
    s = tensor_product(psi, BELL00)
    s = apply(s, GateOp(standard_gate("CNOT"), (0, 1)))
    s = apply(s, GateOp(standard_gate("H"), (0,)))
    res = measure_subset(s, [0, 1], rng)
    x, y = res.bits
    bob = bob_qubit(res.post_state, x, y)
    if y:
        bob = apply(bob, GateOp(_X, (0,)))
    if x:
        bob = apply(bob, GateOp(_Z, (0,)))
    return TeleportResult(x, y, bob, (x, y))


def bob_qubit(post: StateVector, x: int, y: int) -> StateVector:
    """Bob's qubit once Alice's two qubits are known to read ``x, y``."""
    amps = post.amplitudes.reshape(2, 2, 2)[x, y]
    return StateVector._trusted(amps / np.linalg.norm(amps))
