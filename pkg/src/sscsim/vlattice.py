"""Virtual decoding lattices: 2D triangular and 3D space-time graphs.

A virtual lattice is the decoding graph.  Its nodes are syndrome checks
(2D: the Z-type stabilizers; 3D: pairs (plaquette, t) of a plaquette and
a syndrome time slot) and its edges are the defect pairs that single
faults can create, each carrying a prior probability, a matching weight
and a representative data correction.

The 2D lattice covers noiseless-syndrome (code capacity) decoding: one
edge per code qubit, joining the one or two Z-checks the qubit
anticommutes with.  On the torus this is the regular triangular lattice
of degree 6; on the open lattice, qubits violating a single check give
boundary edges, and the weight-2 boundary stabilizers of the undecoded
sides appear as additional check nodes.

The 3D lattice is built by exhaustive single-fault enumeration of the
readout circuit (scheduled CNOT or direct parity extraction): every fault
producing two defects adds its probability to the edge between them.
Translation invariance is exploited by enumerating faults at one base
plaquette and tiling the result over the lattice; the tiling is verified
against direct enumeration in the test suite.  Edge weights are
w = -ln(prior).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .codes import Code
from .framesim import (
    DirectParityCircuit,
    ReadoutCircuit,
    defect_nodes,
    enumerate_fault_locations,
    inject_single_fault,
)
from .pauli import PauliOperator, SpanBasis
from .scheduling import Schedule


@dataclass
class DefectSet:
    """Virtual-lattice nodes flagged as defects."""

    nodes: np.ndarray

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass
class VirtualLattice:
    """A decoding graph with priors, weights and correction representatives.

    ``edges_u``/``edges_v`` hold node indices; ``edges_v`` is -1 for a
    boundary edge (open geometry).  ``corr_indptr``/``corr_qubits`` is a
    CSR list of the code qubits of each edge's correction representative.
    """

    geometry: str
    mode: str  # "2d" or "3d"
    L: int
    T: int
    p: float
    n_nodes: int
    node_coords: list
    edges_u: np.ndarray
    edges_v: np.ndarray
    prior: np.ndarray
    weight: np.ndarray
    corr_indptr: np.ndarray
    corr_qubits: np.ndarray
    fault_counts: np.ndarray  # (E, 3): gate-, measurement-, preparation-like
    zero_defect_prob: float = 0.0

    def n_edges(self) -> int:
        return len(self.edges_u)

    def edge_correction(self, e: int) -> np.ndarray:
        return self.corr_qubits[self.corr_indptr[e] : self.corr_indptr[e + 1]]

    def has_boundary(self) -> bool:
        return bool((self.edges_v < 0).any())

    def graph_matrix(self) -> sp.csr_matrix:
        """Sparse adjacency over nodes plus one boundary hub (last index).

        Parallel edges (e.g. wrap-around pairs at L = 2) collapse to their
        minimum weight; shortest paths only ever use the lighter one.
        """
        nb = self.n_nodes + 1
        u = self.edges_u.astype(np.int64)
        v = np.where(self.edges_v < 0, self.n_nodes, self.edges_v).astype(np.int64)
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        order = np.lexsort((self.weight, hi, lo))
        lo, hi, w = lo[order], hi[order], self.weight[order]
        first = np.ones(len(lo), dtype=bool)
        first[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
        return sp.coo_matrix(
            (w[first], (lo[first], hi[first])), shape=(nb, nb)
        ).tocsr()

    def neighbor_table(self, node: int) -> list[tuple[tuple, float, np.ndarray]]:
        """Incident edges of one node: (coordinate delta, prior, counts)."""
        out = []
        for e in range(self.n_edges()):
            u, v = self.edges_u[e], self.edges_v[e]
            if node not in (u, v):
                continue
            other = v if u == node else u
            if other < 0:
                out.append((("boundary",), self.prior[e], self.fault_counts[e]))
                continue
            ca, cb = self.node_coords[node], self.node_coords[other]
            if self.mode == "3d":
                d = tuple(_wrap_delta(cb[i] - ca[i], self.L) for i in range(2)) + (
                    cb[2] - ca[2],
                )
            else:
                d = (ca, cb)
            out.append((d, self.prior[e], self.fault_counts[e]))
        return out


def _wrap_delta(d: int, L: int) -> int:
    d %= L
    return d - L if d > L // 2 else d


# ---------------------------------------------------------------------------
# 2D lattices


def _check_incidence(code: Code, sector: str) -> tuple[list, np.ndarray]:
    """Z-checks (for X-sector decoding) and their qubit incidence matrix."""
    opposite = "Z" if sector == "X" else "X"
    checks = list(code.groups.checks_of_type(opposite))
    n = code.layout.n_qubits
    inc = np.zeros((len(checks), n), dtype=np.uint8)
    for i, op in enumerate(checks):
        sup = op.z_support() if opposite == "Z" else op.x_support()
        inc[i, sup] = 1
    return checks, inc


def _check_coords(code: Code, sector: str) -> list:
    L = code.layout.L
    coords: list = [(r, c) for r in range(L) for c in range(L)]
    if code.layout.geometry == "planar":
        # weight-2 checks of the decoded sector, in construction order
        if sector == "X":
            coords += [("top", c) for c in range(L)]
            coords += [("bottom", c) for c in range(L)]
        else:
            coords += [("left", r) for r in range(L)]
            coords += [("right", r) for r in range(L)]
    return coords


def build_2d(code: Code, p: float = 0.5, sector: str = "X") -> VirtualLattice:
    """Decoding graph for noiseless syndrome extraction.

    One node per check of the opposite Pauli type, one edge per code
    qubit.  All edges carry the uniform prior p and weight 1, so matching
    minimizes the number of flipped qubits.
    """
    layout = code.layout
    checks, inc = _check_incidence(code, sector)
    n_nodes = len(checks)
    eu, ev, corr = [], [], []
    for q in range(layout.n_qubits):
        hits = np.flatnonzero(inc[:, q])
        if len(hits) == 2:
            eu.append(int(hits[0]))
            ev.append(int(hits[1]))
        elif len(hits) == 1:
            eu.append(int(hits[0]))
            ev.append(-1)
        else:
            raise RuntimeError(f"qubit {q} touches {len(hits)} checks")
        corr.append(q)
    E = len(eu)
    counts = np.zeros((E, 3), dtype=np.int64)
    counts[:, 0] = 1
    return VirtualLattice(
        geometry=layout.geometry,
        mode="2d",
        L=layout.L,
        T=0,
        p=p,
        n_nodes=n_nodes,
        node_coords=_check_coords(code, sector),
        edges_u=np.array(eu, dtype=np.int64),
        edges_v=np.array(ev, dtype=np.int64),
        prior=np.full(E, p, dtype=np.float64),
        weight=np.ones(E, dtype=np.float64),
        corr_indptr=np.arange(E + 1, dtype=np.int64),
        corr_qubits=np.array(corr, dtype=np.int64),
        fault_counts=counts,
    )


def defects_from_syndrome(syndrome_bits: np.ndarray) -> DefectSet:
    """2D defects: the violated checks of one noiseless syndrome layer."""
    return DefectSet(np.flatnonzero(syndrome_bits).astype(np.int64))


def defects_from_history(syndromes_z: np.ndarray) -> DefectSet:
    """3D defects: nodes (p, t) where consecutive syndrome bits differ.

    ``syndromes_z`` has T+1 rows (T noisy rounds plus the final noiseless
    layer); node (p, t) is compared against the pre-history reference +1
    at t = 0.  Node ids are t * n_plaquettes + p.
    """
    n_plaq = syndromes_z.shape[1]
    marks = defect_nodes(syndromes_z)
    return DefectSet((marks[:, 1] * n_plaq + marks[:, 0]).astype(np.int64))


# ---------------------------------------------------------------------------
# 3D lattices from single-fault enumeration


def _qubit_between_plaquettes(code: Code) -> dict[tuple[int, int], int]:
    """Toric map from unordered Z-check plaquette pairs to their code qubit."""
    _, inc = _check_incidence(code, "X")
    pairmap: dict[tuple[int, int], int] = {}
    for q in range(code.layout.n_qubits):
        a, b = np.flatnonzero(inc[:, q])
        pairmap[(int(a), int(b))] = q
        pairmap[(int(b), int(a))] = q
    return pairmap


def _translate_plaq(p: int, dr: int, dc: int, L: int) -> int:
    r, c = divmod(p, L)
    return ((r + dr) % L) * L + (c + dc) % L


def build_3d(
    code: Code,
    T: int,
    p: float,
    mode: str = "circuit",
    schedule: Schedule | None = None,
    full_enumeration: bool = False,
) -> VirtualLattice:
    """Space-time decoding graph from exhaustive single-fault enumeration.

    Nodes are (plaquette, t) for t in [0, T].  Every enumerated fault must
    create 0 or 2 defects; a fault with an odd defect count aborts the
    construction.  Each two-defect fault adds its probability to the edge
    between its defects; the edge correction representative is the single
    qubit of the spatial projection (identity for time-like edges), and
    every fault's residual is verified against the representative modulo
    the X-type gauge span.  By default faults are enumerated at one base
    plaquette and tiled by translation; ``full_enumeration=True`` injects
    at every plaquette instead (the tests compare both on small
    instances).
    """
    layout = code.layout
    if layout.geometry != "toric":
        raise ValueError("3D virtual lattices are built on the toric geometry")
    if mode == "circuit":
        if schedule is None:
            raise ValueError("circuit mode needs a schedule")
        circuit = ReadoutCircuit(code, schedule)
    elif mode == "direct":
        circuit = DirectParityCircuit(code)
    else:
        raise ValueError(f"unknown extraction mode {mode!r}")

    L = layout.L
    n_plaq = layout.n_plaquettes
    pairmap = _qubit_between_plaquettes(code)
    gauge_basis = SpanBasis(
        layout.n_qubits,
        [t.operator(layout.n_qubits) for t in code.triangles if t.pauli_kind == "X"],
    )

    base_plaqs = list(range(n_plaq)) if full_enumeration else [0]
    faults = enumerate_fault_locations(circuit, T, plaquettes=base_plaqs)

    kind_col = {"gate": 0, "measure": 1, "prepare": 2, "data": 0}
    acc: dict[tuple[int, int], np.ndarray] = {}
    zero_defect = 0.0
    for f in faults:
        defects, residual = inject_single_fault(circuit, f, T)
        prob = f.rate_factor * p
        if len(defects) == 0:
            if not gauge_basis.contains(residual):
                raise RuntimeError(f"invisible fault with non-gauge residual: {f}")
            zero_defect += prob * (1 if full_enumeration else n_plaq)
            continue
        if len(defects) != 2:
            raise RuntimeError(
                f"fault {f} created {len(defects)} defects; "
                "single faults must create 0 or 2"
            )
        (p1, t1), (p2, t2) = defects
        rep = _representative(pairmap, int(p1), int(p2))
        _verify_residual(layout.n_qubits, residual, rep, gauge_basis, f)
        translations = (
            [(0, 0)]
            if full_enumeration
            else [(dr, dc) for dr in range(L) for dc in range(L)]
        )
        for dr, dc in translations:
            q1 = _translate_plaq(int(p1), dr, dc, L)
            q2 = _translate_plaq(int(p2), dr, dc, L)
            u = int(t1) * n_plaq + q1
            v = int(t2) * n_plaq + q2
            if u > v:
                u, v = v, u
            rec = acc.get((u, v))
            if rec is None:
                rec = np.zeros(4, dtype=np.float64)
                acc[(u, v)] = rec
            rec[kind_col[f.kind]] += 1
            rec[3] += prob

    keys = sorted(acc.keys())
    E = len(keys)
    eu = np.array([k[0] for k in keys], dtype=np.int64)
    ev = np.array([k[1] for k in keys], dtype=np.int64)
    prior = np.array([acc[k][3] for k in keys], dtype=np.float64)
    counts = np.array([acc[k][:3] for k in keys], dtype=np.int64)
    corr_lists = []
    for u, v in keys:
        pa, ta = u % n_plaq, u // n_plaq
        pb = v % n_plaq
        if pa == pb:
            corr_lists.append(np.zeros(0, dtype=np.int64))
        else:
            corr_lists.append(np.array([pairmap[(pa, pb)]], dtype=np.int64))
    corr_indptr = np.zeros(E + 1, dtype=np.int64)
    for i, cl in enumerate(corr_lists):
        corr_indptr[i + 1] = corr_indptr[i] + len(cl)
    corr_qubits = (
        np.concatenate(corr_lists) if corr_lists else np.zeros(0, dtype=np.int64)
    )
    if (prior <= 0).any() or (prior >= 1).any():
        raise RuntimeError("edge priors must lie strictly inside (0, 1)")
    coords = [
        (pq // L, pq % L, t) for t in range(T + 1) for pq in range(n_plaq)
    ]
    return VirtualLattice(
        geometry="toric",
        mode="3d",
        L=L,
        T=T,
        p=p,
        n_nodes=n_plaq * (T + 1),
        node_coords=coords,
        edges_u=eu,
        edges_v=ev,
        prior=prior,
        weight=-np.log(prior),
        corr_indptr=corr_indptr,
        corr_qubits=corr_qubits,
        fault_counts=counts,
        zero_defect_prob=zero_defect,
    )


def _representative(pairmap, p1: int, p2: int) -> np.ndarray:
    if p1 == p2:
        return np.zeros(0, dtype=np.int64)
    q = pairmap.get((p1, p2))
    if q is None:
        raise RuntimeError(
            f"defect pair at plaquettes {p1},{p2} is not a triangular-lattice edge"
        )
    return np.array([q], dtype=np.int64)


def _verify_residual(n, residual, rep, gauge_basis, fault) -> None:
    rep_op = PauliOperator.from_support(n, x_support=rep)
    if not gauge_basis.contains(residual * rep_op):
        raise RuntimeError(
            f"fault {fault}: residual differs from the edge representative "
            "by a non-gauge element"
        )


def bulk_prior_table(lattice: VirtualLattice) -> list[tuple[tuple, float]]:
    """Neighbor classes of a bulk node: (delta coords, prior / p) pairs.

    Uses a node in the middle of the time window, where the edge structure
    is free of start-up and final-readout effects.
    """
    n_plaq = lattice.L * lattice.L
    node = (lattice.T // 2) * n_plaq + (lattice.L // 2) * lattice.L + lattice.L // 2
    table = [
        (delta, prior / lattice.p)
        for delta, prior, _ in lattice.neighbor_table(node)
    ]
    return sorted(table, key=lambda t: (-t[1], t[0]))
