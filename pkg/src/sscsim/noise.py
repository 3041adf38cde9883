"""Stochastic error models and their samplers.

Three models are supported:

* ``code-capacity``: independent bit flips at rate p on code qubits with
  noiseless syndrome measurement.
* ``circuit``: every elementary circuit operation can fail with
  probability p.  A noisy CNOT is the ideal gate followed, with
  probability p, by one of the 16 two-qubit Paulis drawn uniformly; a
  noisy measurement flips its outcome with probability p; a noisy
  preparation yields the orthogonal state with probability p.
* ``direct-parity``: each three-qubit check is measured directly; the
  perfect parity projection is followed, with probability p, by one of
  the 64 three-qubit Paulis drawn uniformly, and the reported outcome is
  independently flipped with probability p.

All Monte Carlo runs track the X sector only, so the samplers here expose
the exact X-component marginals of the models above: a faulty CNOT yields
IX, XI, XX each with probability p/4 (the identity outcome keeps its p/4
mass rather than being renormalized), and a faulty three-qubit
depolarizing event yields each of the 8 three-bit X patterns with
probability p/8.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CodeLayout
from .pauli import PauliOperator

VARIANTS = ("code-capacity", "circuit", "direct-parity")


@dataclass(frozen=True)
class NoiseModel:
    """An error-model variant together with its single rate parameter."""

    variant: str
    p: float

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown noise variant {self.variant!r}")
        if not 0.0 <= self.p <= 0.5:
            raise ValueError(f"error rate p={self.p} outside [0, 0.5]")


@dataclass(frozen=True)
class Fault:
    """A single deterministic fault location in a readout circuit.

    ``kind`` is one of ``gate`` (a two-qubit X pattern after a CNOT),
    ``measure`` (outcome flip), ``prepare`` (preparation flip) or ``data``
    (single-qubit X between direct parity rounds).  ``round`` is the global
    round index; -1 denotes the preparations before round 0.  ``triangle``
    is a flat triangle id (kind-major, then plaquette) where applicable,
    ``qubit`` a code-qubit index for ``data`` faults, and ``pattern`` one
    of ``XI``, ``IX``, ``XX`` for gate faults (control qubit first).
    """

    kind: str
    round: int
    triangle: int = -1
    qubit: int = -1
    pattern: str = ""

    @property
    def rate_factor(self) -> float:
        """Probability of this fault in units of the model rate p."""
        if self.kind == "gate":
            return 0.25
        if self.kind == "data":
            return 0.5  # one constituent of a three-qubit depolarizing draw
        return 1.0


# ---------------------------------------------------------------------------
# vectorized samplers (the hot path of the frame simulation)


def sample_flip_mask(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Independent Bernoulli(p) flips as a uint8 vector."""
    if p == 0.0:
        return np.zeros(n, dtype=np.uint8)
    return (rng.random(n) < p).astype(np.uint8)


def sample_cnot_x_marginals(
    n_gates: int, p: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """X-sector marginal of depolarizing CNOT noise for a batch of gates.

    Returns (control_flips, target_flips); each of IX, XI, XX occurs with
    probability p/4 per gate, the remaining p/4 identity mass is kept.
    """
    if p == 0.0:
        z = np.zeros(n_gates, dtype=np.uint8)
        return z, z
    faulty = rng.random(n_gates) < p
    pattern = rng.integers(0, 4, n_gates, dtype=np.uint8)
    ctrl = (faulty & ((pattern == 1) | (pattern == 3))).astype(np.uint8)
    tgt = (faulty & ((pattern == 2) | (pattern == 3))).astype(np.uint8)
    return ctrl, tgt


def sample_triple_x_patterns(
    n_events: int, p: float, rng: np.random.Generator
) -> np.ndarray:
    """X-sector marginal of three-qubit depolarizing noise.

    Returns an (n_events, 3) uint8 array; each of the 8 X patterns occurs
    with probability p/8 per event (identity included).
    """
    if p == 0.0:
        return np.zeros((n_events, 3), dtype=np.uint8)
    faulty = rng.random(n_events) < p
    pattern = rng.integers(0, 8, n_events, dtype=np.uint8)
    bits = ((pattern[:, None] >> np.arange(3, dtype=np.uint8)) & 1).astype(np.uint8)
    bits[~faulty] = 0
    return bits


# ---------------------------------------------------------------------------
# model-level sampling interfaces


def sample_code_capacity(
    layout: CodeLayout, p: float, rng: np.random.Generator
) -> PauliOperator:
    """Independent X error on each code qubit with probability p."""
    bits = sample_flip_mask(layout.n_qubits, p, rng)
    return PauliOperator.from_x_bitvec(bits)


def sample_circuit_fault_layer(
    schedule, layout: CodeLayout, p: float, rng: np.random.Generator, base_round: int = 0
) -> list[Fault]:
    """Sample all faults of one four-round period over the full lattice.

    This is the object-level view of the same distributions used by the
    vectorized frame simulation: per CNOT a two-qubit X pattern (IX, XI,
    XX each with probability p/4), per measurement an outcome flip with
    probability p, per preparation a flip with probability p.  Only
    X-sector-relevant preparation and measurement faults are emitted
    (those on the ancillas of Z-type triangles).
    """
    from .codes import TRIANGLE_KINDS, X_KINDS

    n_plaq = layout.n_plaquettes
    faults: list[Fault] = []
    names = ("II", "XI", "IX", "XX")
    for r in range(4):
        R = base_round + r
        for kind in TRIANGLE_KINDS:
            kidx = TRIANGLE_KINDS.index(kind)
            loc = schedule.local[kind]
            if loc.measure_round == r % 4:
                if kind not in X_KINDS:
                    for p_idx in np.flatnonzero(sample_flip_mask(n_plaq, p, rng)):
                        faults.append(Fault("measure", R, kidx * n_plaq + int(p_idx)))
                    for p_idx in np.flatnonzero(sample_flip_mask(n_plaq, p, rng)):
                        faults.append(Fault("prepare", R, kidx * n_plaq + int(p_idx)))
            else:
                ctrl, tgt = sample_cnot_x_marginals(n_plaq, p, rng)
                code = ctrl * 1 + tgt * 2
                for p_idx in np.flatnonzero(code):
                    faults.append(
                        Fault(
                            "gate",
                            R,
                            kidx * n_plaq + int(p_idx),
                            pattern=names[code[p_idx]],
                        )
                    )
    return faults


def sample_direct_parity_fault(
    p: float, rng: np.random.Generator
) -> tuple[bool, PauliOperator]:
    """One direct three-qubit parity measurement's noise draw.

    Returns (outcome_flip, three_qubit_pauli): the outcome flips with
    probability p, and with probability p a uniformly random three-qubit
    Pauli follows the projection.
    """
    flip = bool(rng.random() < p)
    pauli = PauliOperator.identity(3)
    if rng.random() < p:
        idx = int(rng.integers(0, 64))
        xs = [i for i in range(3) if (idx >> i) & 1]
        zs = [i for i in range(3) if (idx >> (3 + i)) & 1]
        pauli = PauliOperator.from_support(3, x_support=xs, z_support=zs)
    return flip, pauli
