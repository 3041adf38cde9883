"""Pauli-frame simulation of the syndrome readout circuits.

Only the X sector is simulated: the code and error models are symmetric
under the exchange of X and Z (horizontal lattice reflection plus a
two-round time shift), so Z-type error correction is the mirror image of
what is computed here.  The simulation state is one X-frame bit per code
qubit and per ancilla.  CNOT gates propagate frame bits (control feeds
target), a Z-basis ancilla measurement returns the parity of the X frame
accumulated on that ancilla, and preparations reset ancilla frame bits.

Two extraction modes are provided:

* ``ReadoutCircuit``: the scheduled CNOT circuit.  Each triangle follows
  its four-round local schedule; the plaquette syndrome bit s_p(t) is the
  product of the outcomes of its two Z-type triangles, measured in two
  consecutive rounds of period t.
* ``DirectParityCircuit``: direct three-qubit parity measurements, one
  round for all X-type triangles and one for all Z-type triangles per
  cycle, with three-qubit depolarizing noise after each projection.

A trial runs T periods (cycles) of noisy extraction followed by one
noiseless syndrome layer computed directly from the final data frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codes import Code, TRIANGLE_KINDS, X_KINDS
from .noise import (
    Fault,
    NoiseModel,
    sample_cnot_x_marginals,
    sample_flip_mask,
    sample_triple_x_patterns,
)
from .pauli import PauliOperator
from .scheduling import Schedule

Z_KIND_INDICES = tuple(
    i for i, k in enumerate(TRIANGLE_KINDS) if k not in X_KINDS
)
X_KIND_INDICES = tuple(i for i, k in enumerate(TRIANGLE_KINDS) if k in X_KINDS)


@dataclass
class TrialRecord:
    """One Monte Carlo trial: syndrome history and accumulated data error.

    ``syndromes_z`` has T+1 rows of plaquette syndrome bits (0 meaning +1);
    rows 0..T-1 come from the noisy extraction rounds, row T is the final
    noiseless readout.  The decoder later fills in ``correction_x`` and the
    ``success`` verdict.
    """

    syndromes_z: np.ndarray
    accumulated_x: np.ndarray
    T: int
    correction_x: np.ndarray | None = None
    success: bool | None = None


def defect_nodes(syndromes_z: np.ndarray) -> np.ndarray:
    """Defects of a syndrome history: nodes (p, t) where the bit changes.

    Node (p, t) for t in [0, T] is a defect iff s_p(t-1) != s_p(t), with
    the pre-history reference s_p(-1) = +1 and s_p(T) the final noiseless
    layer.  Returns an array of shape (n_defects, 2) with columns
    (plaquette, t).
    """
    prev = np.vstack([np.zeros((1, syndromes_z.shape[1]), dtype=np.uint8), syndromes_z[:-1]])
    marks = np.argwhere((syndromes_z ^ prev).astype(bool))
    return np.stack([marks[:, 1], marks[:, 0]], axis=1) if marks.size else marks.reshape(0, 2)


def _tri_arrays(code: Code) -> tuple[np.ndarray, np.ndarray]:
    """(4, L^2, 3) triangle qubit indices and (4, L^2) ancilla indices."""
    layout = code.layout
    n_plaq = layout.n_plaquettes
    tri = np.zeros((4, n_plaq, 3), dtype=np.int64)
    for t in code.triangles:
        kidx = TRIANGLE_KINDS.index(t.kind)
        tri[kidx, layout.plaquette(*t.plaquette)] = t.qubits
    anc = layout.n_qubits + np.arange(4 * n_plaq).reshape(4, n_plaq)
    return tri, anc


def _zstab_masks(code: Code) -> np.ndarray:
    """(L^2, n_code) uint8 supports of the plaquette Z stabilizers."""
    n = code.layout.n_qubits
    masks = np.zeros((code.layout.n_plaquettes, n), dtype=np.uint8)
    for i, s in enumerate(code.groups.stabilizers_z):
        masks[i, s.z_support()] = 1
    return masks


class ReadoutCircuit:
    """Compiled scheduled readout circuit for the toric code."""

    def __init__(self, code: Code, schedule: Schedule):
        if code.layout.geometry != "toric":
            raise ValueError("scheduled readout is defined on the toric geometry")
        self.code = code
        self.layout = code.layout
        self.schedule = schedule
        self.n_code = code.layout.n_qubits
        self.n_plaq = code.layout.n_plaquettes
        self.tri_qubits, self.anc = _tri_arrays(code)
        self.zstab_masks = _zstab_masks(code)
        self.z_anc_flat = self.anc[list(Z_KIND_INDICES)].ravel()
        # per round: measured kind indices and (kind, ctrl, tgt) gate batches
        self.meas_at: list[list[int]] = [[] for _ in range(4)]
        self.gates_at: list[list[tuple[int, np.ndarray, np.ndarray]]] = [
            [] for _ in range(4)
        ]
        for kidx, kind in enumerate(TRIANGLE_KINDS):
            loc = schedule.local[kind]
            self.meas_at[loc.measure_round].append(kidx)
            for r in range(4):
                off = (r - loc.measure_round) % 4
                if off == 0:
                    continue
                qubits = self.tri_qubits[kidx, :, loc.role_at_offset(off)]
                if kind in X_KINDS:
                    ctrl, tgt = self.anc[kidx], qubits
                else:
                    ctrl, tgt = qubits, self.anc[kidx]
                self.gates_at[r].append((kidx, ctrl, tgt))

    @property
    def n_total(self) -> int:
        return self.n_code + 4 * self.n_plaq

    def n_rounds(self, T: int) -> int:
        return 4 * T

    def simulate(
        self,
        T: int,
        noise: NoiseModel | None = None,
        rng: np.random.Generator | None = None,
        initial_error: np.ndarray | None = None,
        fault: Fault | None = None,
    ) -> TrialRecord:
        """Run T periods of extraction plus the final noiseless layer.

        Draw order per period (fixed for reproducibility): for each round,
        measurement flips then preparation flips for the measured Z-type
        kind, then CNOT fault marginals batch by batch in kind order.
        """
        if T < 1:
            raise ValueError("need at least one round of syndrome extraction")
        p = noise.p if noise is not None else 0.0
        if p > 0.0 and rng is None:
            raise ValueError("noisy simulation needs an rng")
        if fault is not None:
            self._check_fault(fault, T)
        n_plaq = self.n_plaq
        frame = np.zeros(self.n_total, dtype=np.uint8)
        if initial_error is not None:
            frame[: self.n_code] = initial_error
        if p > 0.0:
            frame[self.z_anc_flat] = sample_flip_mask(self.z_anc_flat.size, p, rng)
        if (
            fault is not None
            and fault.kind == "prepare"
            and fault.round == -1
            and fault.triangle // n_plaq in Z_KIND_INDICES
        ):
            frame[self.anc.ravel()[fault.triangle]] ^= 1

        z_out = {k: np.zeros((T, n_plaq), dtype=np.uint8) for k in Z_KIND_INDICES}
        for t in range(T):
            for r in range(4):
                R = 4 * t + r
                for kidx in self.meas_at[r]:
                    anc = self.anc[kidx]
                    if kidx in Z_KIND_INDICES:
                        out = frame[anc].copy()
                        if p > 0.0:
                            out ^= sample_flip_mask(n_plaq, p, rng)
                        if (
                            fault is not None
                            and fault.kind == "measure"
                            and fault.round == R
                            and fault.triangle // n_plaq == kidx
                        ):
                            out[fault.triangle % n_plaq] ^= 1
                        z_out[kidx][t] = out
                        frame[anc] = (
                            sample_flip_mask(n_plaq, p, rng)
                            if p > 0.0
                            else np.zeros(n_plaq, dtype=np.uint8)
                        )
                    else:
                        # X-basis outcome and |+> preparation: X frame resets
                        frame[anc] = 0
                    if (
                        fault is not None
                        and fault.kind == "prepare"
                        and fault.round == R
                        and fault.triangle // n_plaq == kidx
                        and kidx in Z_KIND_INDICES
                    ):
                        # a faulty |+> preparation is a Z flip: X-sector no-op
                        frame[anc[fault.triangle % n_plaq]] ^= 1
                for kidx, ctrl, tgt in self.gates_at[r]:
                    frame[tgt] ^= frame[ctrl]
                    if p > 0.0:
                        cf, tf = sample_cnot_x_marginals(n_plaq, p, rng)
                        frame[ctrl] ^= cf
                        frame[tgt] ^= tf
                    if (
                        fault is not None
                        and fault.kind == "gate"
                        and fault.round == R
                        and fault.triangle // n_plaq == kidx
                    ):
                        plaq = fault.triangle % n_plaq
                        if fault.pattern in ("XI", "XX"):
                            frame[ctrl[plaq]] ^= 1
                        if fault.pattern in ("IX", "XX"):
                            frame[tgt[plaq]] ^= 1

        syn = np.zeros((T + 1, n_plaq), dtype=np.uint8)
        se, nw = TRIANGLE_KINDS.index("SE"), TRIANGLE_KINDS.index("NW")
        syn[:T] = z_out[se] ^ z_out[nw]
        syn[T] = (self.zstab_masks @ frame[: self.n_code]) & 1
        return TrialRecord(syn, frame[: self.n_code].copy(), T)

    def _check_fault(self, fault: Fault, T: int) -> None:
        if fault.kind not in ("gate", "measure", "prepare"):
            raise ValueError(f"invalid fault kind {fault.kind!r} for circuit mode")
        if not (-1 <= fault.round < 4 * T):
            raise ValueError(f"fault round {fault.round} outside circuit")
        if not 0 <= fault.triangle < 4 * self.n_plaq:
            raise ValueError(f"fault triangle {fault.triangle} out of range")
        kidx = fault.triangle // self.n_plaq
        loc = self.schedule.local[TRIANGLE_KINDS[kidx]]
        if fault.round >= 0:
            is_meas_round = fault.round % 4 == loc.measure_round
            if fault.kind == "gate" and is_meas_round:
                raise ValueError("gate fault placed in a measurement round")
            if fault.kind in ("measure", "prepare") and not is_meas_round:
                raise ValueError("measurement fault outside the measurement round")
        elif fault.kind != "prepare":
            raise ValueError("only preparations occur before round 0")
        if fault.kind == "gate" and fault.pattern not in ("XI", "IX", "XX"):
            raise ValueError(f"invalid gate fault pattern {fault.pattern!r}")


class DirectParityCircuit:
    """Direct parity extraction: two rounds per cycle, no ancillas."""

    def __init__(self, code: Code):
        if code.layout.geometry != "toric":
            raise ValueError("direct parity extraction is defined on the toric geometry")
        self.code = code
        self.layout = code.layout
        self.n_code = code.layout.n_qubits
        self.n_plaq = code.layout.n_plaquettes
        self.tri_qubits, _ = _tri_arrays(code)
        self.zstab_masks = _zstab_masks(code)

    def n_rounds(self, T: int) -> int:
        return 2 * T

    def simulate(
        self,
        T: int,
        noise: NoiseModel | None = None,
        rng: np.random.Generator | None = None,
        initial_error: np.ndarray | None = None,
        fault: Fault | None = None,
    ) -> TrialRecord:
        """Run T two-round cycles plus the final noiseless layer.

        Within a round all projections are simultaneous: outcomes are read
        from the pre-round frame, then the per-measurement depolarizing X
        patterns are applied.  A ``data`` fault at round 2t lands after the
        X-type round of cycle t, at round 2t+1 after the Z-type round.
        """
        if T < 1:
            raise ValueError("need at least one extraction cycle")
        p = noise.p if noise is not None else 0.0
        if p > 0.0 and rng is None:
            raise ValueError("noisy simulation needs an rng")
        if fault is not None:
            self._check_fault(fault, T)
        n_plaq = self.n_plaq
        frame = np.zeros(self.n_code, dtype=np.uint8)
        if initial_error is not None:
            frame[:] = initial_error
        z_out = {k: np.zeros((T, n_plaq), dtype=np.uint8) for k in Z_KIND_INDICES}
        for t in range(T):
            for kidx in X_KIND_INDICES:
                if p > 0.0:
                    pats = sample_triple_x_patterns(n_plaq, p, rng)
                    frame[self.tri_qubits[kidx].ravel()] ^= pats.ravel()
            if fault is not None and fault.kind == "data" and fault.round == 2 * t:
                frame[fault.qubit] ^= 1
            for kidx in Z_KIND_INDICES:
                out = frame[self.tri_qubits[kidx]].sum(axis=1).astype(np.uint8) & 1
                if p > 0.0:
                    out ^= sample_flip_mask(n_plaq, p, rng)
                if (
                    fault is not None
                    and fault.kind == "measure"
                    and fault.round == 2 * t + 1
                    and fault.triangle // n_plaq == kidx
                ):
                    out[fault.triangle % n_plaq] ^= 1
                z_out[kidx][t] = out
            for kidx in Z_KIND_INDICES:
                if p > 0.0:
                    pats = sample_triple_x_patterns(n_plaq, p, rng)
                    frame[self.tri_qubits[kidx].ravel()] ^= pats.ravel()
            if fault is not None and fault.kind == "data" and fault.round == 2 * t + 1:
                frame[fault.qubit] ^= 1

        syn = np.zeros((T + 1, n_plaq), dtype=np.uint8)
        se, nw = TRIANGLE_KINDS.index("SE"), TRIANGLE_KINDS.index("NW")
        syn[:T] = z_out[se] ^ z_out[nw]
        syn[T] = (self.zstab_masks @ frame) & 1
        return TrialRecord(syn, frame.copy(), T)

    def _check_fault(self, fault: Fault, T: int) -> None:
        if fault.kind not in ("measure", "data"):
            raise ValueError(f"invalid fault kind {fault.kind!r} for direct mode")
        if not 0 <= fault.round < 2 * T:
            raise ValueError(f"fault round {fault.round} outside circuit")
        if fault.kind == "measure":
            if fault.round % 2 != 1:
                raise ValueError("outcome-flip faults happen in Z-type rounds")
            if not 0 <= fault.triangle < 4 * self.n_plaq:
                raise ValueError("fault triangle out of range")
            if fault.triangle // self.n_plaq not in Z_KIND_INDICES:
                raise ValueError("only Z-type outcome flips are X-sector visible")
        if fault.kind == "data" and not 0 <= fault.qubit < self.n_code:
            raise ValueError("data fault qubit out of range")


def simulate_trial(
    circuit: ReadoutCircuit | DirectParityCircuit,
    noise: NoiseModel,
    T: int,
    seed_or_rng,
    initial_error: np.ndarray | None = None,
) -> TrialRecord:
    """One stochastic trial; identical seeds yield identical records."""
    rng = (
        seed_or_rng
        if isinstance(seed_or_rng, np.random.Generator)
        else np.random.default_rng(seed_or_rng)
    )
    return circuit.simulate(T, noise=noise, rng=rng, initial_error=initial_error)


def inject_single_fault(
    circuit: ReadoutCircuit | DirectParityCircuit, fault: Fault, T: int
) -> tuple[np.ndarray, PauliOperator]:
    """Propagate exactly one fault through an otherwise noiseless circuit.

    Returns (defects, residual): the defect nodes (plaquette, t) of the
    resulting syndrome history and the accumulated X error left on the
    code qubits after the final round.
    """
    rec = circuit.simulate(T, fault=fault)
    residual = PauliOperator.from_x_bitvec(rec.accumulated_x)
    return defect_nodes(rec.syndromes_z), residual


def enumerate_fault_locations(
    circuit: ReadoutCircuit | DirectParityCircuit,
    T: int,
    plaquettes: "list[int] | None" = None,
) -> list[Fault]:
    """All X-sector-relevant single-fault locations over T periods.

    Circuit mode: every two-qubit X pattern after every CNOT, outcome
    flips on Z-type ancillas, and X preparation flips on Z-type ancillas
    (including the preparations before round 0).  Direct mode: outcome
    flips on Z-type checks and the single-qubit X constituents of the
    three-qubit depolarizing draws after each round.  Faults on X-basis
    ancilla preparations and measurements only touch the Z sector and are
    omitted.  ``plaquettes`` restricts the enumeration (default: all).
    """
    n_plaq = circuit.n_plaq
    plist = list(range(n_plaq)) if plaquettes is None else list(plaquettes)
    faults: list[Fault] = []
    if isinstance(circuit, ReadoutCircuit):
        for kidx in Z_KIND_INDICES:
            faults += [Fault("prepare", -1, kidx * n_plaq + p) for p in plist]
        for t in range(T):
            for r in range(4):
                R = 4 * t + r
                for kidx, kind in enumerate(TRIANGLE_KINDS):
                    loc = circuit.schedule.local[kind]
                    if loc.measure_round == r:
                        if kidx in Z_KIND_INDICES:
                            for p in plist:
                                tri = kidx * n_plaq + p
                                faults.append(Fault("measure", R, tri))
                                faults.append(Fault("prepare", R, tri))
                    else:
                        for p in plist:
                            for pattern in ("XI", "IX", "XX"):
                                faults.append(
                                    Fault("gate", R, kidx * n_plaq + p, pattern=pattern)
                                )
    else:
        for t in range(T):
            for kidx in X_KIND_INDICES:
                for p in plist:
                    for pos in range(3):
                        q = int(circuit.tri_qubits[kidx, p, pos])
                        faults.append(
                            Fault("data", 2 * t, triangle=kidx * n_plaq + p, qubit=q)
                        )
            for kidx in Z_KIND_INDICES:
                for p in plist:
                    tri = kidx * n_plaq + p
                    faults.append(Fault("measure", 2 * t + 1, tri))
                    for pos in range(3):
                        q = int(circuit.tri_qubits[kidx, p, pos])
                        faults.append(Fault("data", 2 * t + 1, triangle=tri, qubit=q))
    return faults
