"""State-vector simulation of textbook quantum algorithms."""

from .errors import AlgorithmFailure, DomainError, PromiseViolation, QcsimError, UncorrectableError
from .gates import Circuit, Gate, GateOp, apply, controlled, qft_circuit, run_circuit, standard_gate
from .measurement import expectation, measure_all, measure_subset, probabilities, uncertainty
from .rng import Rng
from .state import (
    StateVector,
    basis_state,
    equal_up_to_global_phase,
    inner_product,
    normalize,
    tensor_product,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmFailure", "Circuit", "DomainError", "Gate", "GateOp", "PromiseViolation",
    "QcsimError", "Rng", "StateVector", "UncorrectableError", "apply", "basis_state",
    "controlled", "equal_up_to_global_phase", "expectation", "inner_product", "measure_all",
    "measure_subset", "normalize", "probabilities", "qft_circuit", "run_circuit",
    "standard_gate", "tensor_product", "uncertainty",
]
