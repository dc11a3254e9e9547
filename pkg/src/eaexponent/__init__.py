"""Quantum Rényi divergences, channel Rényi information and strong converse
exponents for entanglement-assisted communication, with desk-scale checks."""

from .divergence import (DivergenceValue, RenyiOrder, StateEnsemble, fidelity,
                         holevo_information, log_euclidean_divergence, mutual_information,
                         relative_entropy, sandwiched_divergence, von_neumann_entropy)
from .errors import (ConvergenceError, DomainError, InvariantError, ShapeError,
                     SizeLimitError)
from .operators import QuantumChannel
from .optimize import (ExponentQuery, ExponentResult, channel_renyi_info, ea_capacity,
                       exponent_candidate_F, f1_f2_split, feedback_exponent,
                       log_euclidean_channel_info, quantum_exponent, sandwiched_mutual_info,
                       strong_converse_exponent, variational_F)

__all__ = [
    "ConvergenceError", "DivergenceValue", "DomainError", "ExponentQuery", "ExponentResult",
    "InvariantError", "QuantumChannel", "RenyiOrder", "ShapeError", "SizeLimitError",
    "StateEnsemble", "channel_renyi_info", "ea_capacity", "exponent_candidate_F",
    "f1_f2_split", "feedback_exponent", "fidelity", "holevo_information",
    "log_euclidean_channel_info", "log_euclidean_divergence", "mutual_information",
    "quantum_exponent", "relative_entropy", "sandwiched_divergence",
    "sandwiched_mutual_info", "strong_converse_exponent", "variational_F",
    "von_neumann_entropy",
]
