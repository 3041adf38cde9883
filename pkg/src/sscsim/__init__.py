"""Subsystem surface codes with three-qubit check operators.

A simulation and analysis suite for subsystem toric and planar surface
codes: code construction and validation, scheduled syndrome-extraction
circuits, Pauli-frame Monte Carlo under several noise models, decoding by
minimum-weight perfect matching on virtual lattices, threshold estimation
with finite-size scaling fits, and the exactly solvable three-body check
Hamiltonian with its gauge-decoupling circuit.
"""

from .pauli import PauliOperator, commutes, conjugate_by_cnot, in_span, multiply
from .codes import Code, CodeGroups, CodeLayout, Triangle, build, distance_bruteforce, validate_code

__all__ = [
    "PauliOperator",
    "multiply",
    "commutes",
    "conjugate_by_cnot",
    "in_span",
    "Code",
    "CodeGroups",
    "CodeLayout",
    "Triangle",
    "build",
    "validate_code",
    "distance_bruteforce",
]

__version__ = "0.1.0"
