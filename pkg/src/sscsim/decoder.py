"""Minimum-weight perfect matching decoding on virtual lattices.

Decoding reduces lattice matching to complete-graph matching: single
source shortest paths from every defect give geodesic distances (and, on
open geometries, a distance to the nearest boundary), exact blossom
matching pairs the defects, and the correction is the XOR of the edge
corrections along each matched geodesic.

A ``Decoder`` instance caches the all-pairs distance matrix of its
lattice (the graphs are translation invariant and reused across many
Monte Carlo trials), so per-trial work is gathering the defect submatrix,
one exact matching, and short greedy walks to recover geodesic paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .codes import Code
from .matching import min_weight_perfect_matching
from .pauli import PauliOperator, in_span
from .vlattice import DefectSet, VirtualLattice


@dataclass
class MatchingProblem:
    """Complete-graph matching instance over a defect set."""

    defects: np.ndarray
    dist: np.ndarray  # (k, k) geodesic distances
    boundary_dist: np.ndarray | None  # (k,) or None on closed geometry
    decoder: "Decoder"


@dataclass
class Correction:
    """Matched defect pairs and the correction they imply."""

    pairs: list[tuple[int, int]]  # node ids; -1 stands for the boundary
    bits: np.ndarray  # uint8 over code qubits
    operator: PauliOperator

    @property
    def matching_weight(self) -> float:
        return self._weight

    _weight: float = 0.0


class Decoder:
    """Matching decoder bound to one virtual lattice."""

    def __init__(self, lattice: VirtualLattice, n_code: int, k_neighbors: int = 24):
        self.lattice = lattice
        self.n_code = n_code
        self.k_neighbors = k_neighbors
        self.boundary_node = lattice.n_nodes  # hub index in the padded graph
        graph = lattice.graph_matrix()
        self.dist_all = dijkstra(graph, directed=False)
        # adjacency sorted by neighbor id for deterministic tie-breaking
        nbrs: list[list[tuple[int, float, int]]] = [
            [] for _ in range(lattice.n_nodes + 1)
        ]
        for e in range(lattice.n_edges()):
            u = int(lattice.edges_u[e])
            v = int(lattice.edges_v[e])
            if v < 0:
                v = self.boundary_node
            w = float(lattice.weight[e])
            nbrs[u].append((v, w, e))
            nbrs[v].append((u, w, e))
        self.adj = [sorted(entries) for entries in nbrs]

    # -- decoding operations ------------------------------------------------

    def matching_problem(self, defects: DefectSet | np.ndarray) -> MatchingProblem:
        nodes = defects.nodes if isinstance(defects, DefectSet) else np.asarray(defects)
        nodes = nodes.astype(np.int64)
        sub = self.dist_all[np.ix_(nodes, nodes)]
        if not np.isfinite(sub).all():
            raise RuntimeError("virtual lattice is disconnected across defects")
        bdist = None
        if self.lattice.has_boundary():
            bdist = self.dist_all[nodes, self.boundary_node]
        return MatchingProblem(nodes, sub, bdist, self)

    def mwpm(self, problem: MatchingProblem) -> Correction:
        """Exact minimum-weight perfect matching plus correction extraction.

        On open geometries each defect gets a virtual boundary partner and
        the boundary partners form a zero-weight clique, the standard
        even-parity completion.  On the torus an odd defect count means
        corrupted input.
        """
        k = len(problem.defects)
        bits = np.zeros(self.n_code, dtype=np.uint8)
        if k == 0:
            return Correction([], bits, PauliOperator.from_x_bitvec(bits))
        if problem.boundary_dist is None:
            if k % 2 != 0:
                raise RuntimeError("odd defect count on a closed geometry")
            dist = problem.dist
        else:
            big = float(k + 1) * (problem.dist.max() + problem.boundary_dist.max() + 1.0)
            dist = np.full((2 * k, 2 * k), big, dtype=np.float64)
            dist[:k, :k] = problem.dist
            dist[k:, k:] = 0.0
            idx = np.arange(k)
            dist[idx, k + idx] = problem.boundary_dist
            dist[k + idx, idx] = problem.boundary_dist
        mate = min_weight_perfect_matching(dist, k_neighbors=self.k_neighbors)

        pairs: list[tuple[int, int]] = []
        weight = 0.0
        for i in range(k):
            j = int(mate[i])
            if j < i:
                continue
            if j >= k:  # matched to own boundary partner
                u = int(problem.defects[i])
                pairs.append((u, -1))
                weight += float(problem.boundary_dist[i])
                self._walk(u, self.boundary_node, bits)
            else:
                u = int(problem.defects[i])
                v = int(problem.defects[j])
                pairs.append((u, v))
                weight += float(problem.dist[i, j])
                self._walk(u, v, bits)
        corr = Correction(pairs, bits, PauliOperator.from_x_bitvec(bits))
        corr._weight = weight
        return corr

    def decode(self, defects: DefectSet | np.ndarray) -> Correction:
        return self.mwpm(self.matching_problem(defects))

    # -- internals ---------------------------------------------------------

    def _walk(self, u: int, v: int, bits: np.ndarray) -> None:
        """Recover one geodesic by greedy descent on cached distances.

        Each step moves to the neighbor minimizing (edge weight + remaining
        distance); ties resolve to the smallest neighbor id.  Distances
        strictly decrease by at least the minimum edge weight per step, so
        the walk terminates.
        """
        lattice = self.lattice
        steps = 0
        while u != v:
            best_w = None
            best = -1
            best_e = -1
            for nbr, w, e in self.adj[u]:
                cand = w + self.dist_all[nbr, v]
                if best_w is None or cand < best_w:
                    best_w = cand
                    best = nbr
                    best_e = e
            qubits = lattice.edge_correction(best_e)
            bits[qubits] ^= 1
            u = best
            steps += 1
            if steps > lattice.n_nodes + 1:
                raise RuntimeError("geodesic walk failed to terminate")


def all_pairs_defect_distances(
    lattice_or_decoder, defects: DefectSet | np.ndarray, n_code: int | None = None
) -> MatchingProblem:
    """Geodesic distances between defects (plus boundary distances).

    Accepts a prebuilt ``Decoder`` (preferred: its distance matrix is
    cached) or a ``VirtualLattice``.
    """
    if isinstance(lattice_or_decoder, Decoder):
        return lattice_or_decoder.matching_problem(defects)
    if n_code is None:
        raise ValueError("building a transient decoder needs n_code")
    return Decoder(lattice_or_decoder, n_code).matching_problem(defects)


def mwpm(problem: MatchingProblem) -> Correction:
    return problem.decoder.mwpm(problem)


def judge(
    accumulated: PauliOperator,
    correction: PauliOperator,
    code: Code,
    check_span: bool = False,
) -> bool:
    """Success verdict: does the residual act trivially on the logicals?

    The residual is accumulated * correction.  It must restore the trivial
    syndrome (anything else means the simulation or decoder is broken);
    success then means it commutes with every bare Z logical.  With
    ``check_span=True`` the verdict is cross-validated against GF(2)
    membership of the residual in the span of the X-type gauge generators
    and stabilizers.
    """
    residual = accumulated * correction
    for chk in code.groups.checks_of_type("Z"):
        if not residual.commutes(chk):
            raise RuntimeError(
                "residual error has a nontrivial syndrome; "
                "decoder output is inconsistent"
            )
    success = all(residual.commutes(lz) for lz in code.groups.logical_z)
    if check_span:
        n = code.layout.n_qubits
        gens = [
            t.operator(n) for t in code.triangles if t.pauli_kind == "X"
        ] + list(code.groups.checks_of_type("X"))
        assert in_span(residual, gens) == success, "span and commutation disagree"
    return success


def judge_bits(
    accumulated_bits: np.ndarray,
    correction_bits: np.ndarray,
    zlogical_masks: np.ndarray,
) -> bool:
    """Fast-path verdict on raw bit vectors (X sector).

    ``zlogical_masks`` holds one support row per bare Z logical; success
    iff the residual overlaps each row evenly.
    """
    residual = accumulated_bits ^ correction_bits
    return bool(((zlogical_masks @ residual) % 2 == 0).all())
