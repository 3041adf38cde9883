"""Spectral analysis of the three-body check Hamiltonian.

The Hamiltonian is minus the sum of all triangle operators.  Because the
weight-6 stabilizers commute with every term, the spectrum decomposes
into syndrome sectors: within the sector of fixed stabilizer eigenvalues
(x_p, z_p) each plaquette contributes an independent two-level gauge
qubit with Hamiltonian -[(1+x_p) Xbar + (1+z_p) Zbar], whose extreme
eigenvalues are -/+ sqrt((1+x_p)^2 + (1+z_p)^2).  Minimizing over
sectors gives the ground energy -2 sqrt(2) L^2 in the trivial sector
with a fourfold logical degeneracy, a gauge excitation gap 4 sqrt(2),
and a syndrome excitation gap 2 (sqrt(2) - 1); syndrome excitations come
in pairs because the stabilizer products over all plaquettes are fixed.

An independent numeric verification (sparse matrix-free power iteration
at L = 2) and a search for the four-round CNOT circuit that decouples
the gauge qubits complete the module.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .codes import Code, CodeLayout, build
from .pauli import PauliOperator

SQRT2 = math.sqrt(2.0)


def gauge_qubit_levels(x: int, z: int) -> tuple[float, float]:
    """Extreme eigenvalues of one gauge qubit at fixed syndromes x, z."""
    if x not in (-1, 1) or z not in (-1, 1):
        raise ValueError("syndrome eigenvalues are +1 or -1")
    e = math.sqrt((1 + x) ** 2 + (1 + z) ** 2)
    return (-e, e)


def gauge_gap() -> float:
    """Cost of one gauge excitation in the trivial sector."""
    return gauge_qubit_levels(1, 1)[1] - gauge_qubit_levels(1, 1)[0]


def syndrome_gap() -> float:
    """Cost of flipping one syndrome bit (they flip in pairs)."""
    return gauge_qubit_levels(1, -1)[0] - gauge_qubit_levels(1, 1)[0]


def deformation_gap_bound() -> float:
    """Lower bound on the gap along the interpolation to the plain
    star/plaquette Hamiltonian: the smaller of the two endpoint gaps."""
    delta_prime = 2 * syndrome_gap()  # syndrome pairs dominate: 4(sqrt2 - 1)
    delta_second = 2.0
    return min(delta_prime, delta_second)


# per-plaquette excitation costs relative to the ground state choice
# (x, z, level) -> energy above -2 sqrt(2); the (-1,-1) sector has a
# doubly degenerate zero eigenvalue, hence internal multiplicity 2.
_EXCITATIONS = (
    # (cost, flips_x, flips_z, internal_multiplicity)
    (4 * SQRT2, 0, 0, 1),  # gauge excitation in the trivial sector
    (2 * SQRT2 - 2, 0, 1, 1),  # z syndrome flipped, lower level
    (2 * SQRT2 + 2, 0, 1, 1),  # z syndrome flipped, upper level
    (2 * SQRT2 - 2, 1, 0, 1),  # x syndrome flipped, lower level
    (2 * SQRT2 + 2, 1, 0, 1),  # x syndrome flipped, upper level
    (2 * SQRT2, 1, 1, 2),  # both flipped: two zero modes
)


@dataclass
class SectorSpectrum:
    """Low-lying exact spectrum summary."""

    L: int
    ground_energy: float
    ground_degeneracy: int
    gap_gauge: float
    gap_syndrome: float
    levels: list[tuple[float, int]]  # (energy, degeneracy), ascending


def spectrum(L: int, max_levels: int = 6) -> SectorSpectrum:
    """Enumerate the lowest ``max_levels`` exact energy levels.

    Levels are enumerated by the multiset of excited plaquettes subject to
    the parity constraints (the products of all x_p and of all z_p are
    fixed, so syndrome flips of either type come in even numbers), with
    multinomial degeneracy counting and the fourfold logical degeneracy.
    """
    if L < 2:
        raise ValueError("need L >= 2")
    n_plaq = L * L
    e0 = -2 * SQRT2 * n_plaq
    acc: dict[float, int] = {}
    max_excited = min(n_plaq, 4)
    for k in range(max_excited + 1):
        for combo in itertools.combinations_with_replacement(
            range(len(_EXCITATIONS)), k
        ):
            fx = sum(_EXCITATIONS[i][1] for i in combo)
            fz = sum(_EXCITATIONS[i][2] for i in combo)
            if fx % 2 or fz % 2:
                continue
            cost = sum(_EXCITATIONS[i][0] for i in combo)
            mult = 1
            remaining = n_plaq
            for i in set(combo):
                c = combo.count(i)
                mult *= math.comb(remaining, c) * _EXCITATIONS[i][3] ** c
                remaining -= c
            energy = round(e0 + cost, 9)
            acc[energy] = acc.get(energy, 0) + 4 * mult
    levels = sorted(acc.items())[:max_levels]
    return SectorSpectrum(
        L=L,
        ground_energy=e0,
        ground_degeneracy=levels[0][1],
        gap_gauge=gauge_gap(),
        gap_syndrome=syndrome_gap(),
        levels=levels,
    )


# ---------------------------------------------------------------------------
# numeric cross-check


def _hamiltonian_terms(code: Code, drop_terms: int = 0):
    """X-permutation masks and Z-sign masks of the triangle terms."""
    perms = []
    signs = []
    for t in code.triangles[drop_terms:]:
        mask = 0
        for q in t.qubits:
            mask |= 1 << int(q)
        if t.pauli_kind == "X":
            perms.append(mask)
        else:
            signs.append(mask)
    return perms, signs


def verify_ground_energy_numeric(
    L: int = 2, tol: float = 1e-8, max_iter: int = 50_000, drop_terms: int = 0
) -> float:
    """Minimal eigenvalue by shifted power iteration on the full matrix.

    Only L = 2 is tractable (12 qubits, dimension 4096).  The operator
    c I - H with c above the spectral radius is applied matrix-free; the
    Rayleigh quotient of the converged dominant eigenvector gives the
    ground energy.
    """
    if L != 2:
        raise ValueError("exact diagonalization is limited to L = 2")
    code = build(L, "toric")
    n = code.layout.n_qubits
    dim = 1 << n
    perms_m, signs_m = _hamiltonian_terms(code, drop_terms)
    idx = np.arange(dim, dtype=np.int64)
    perms = [idx ^ m for m in perms_m]
    signs = [1.0 - 2.0 * (np.bitwise_count(idx & m) & 1) for m in signs_m]
    shift = float(len(perms) + len(signs)) + 1.0

    def apply_shifted(v: np.ndarray) -> np.ndarray:
        out = shift * v
        for perm in perms:  # -(X-type term)
            out += v[perm]
        for sign in signs:  # -(Z-type term)
            out += sign * v
        return out

    rng = np.random.default_rng(12345)
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    lam_old = 0.0
    for _ in range(max_iter):
        w = apply_shifted(v)
        lam = float(v @ w)
        v = w / np.linalg.norm(w)
        if abs(lam - lam_old) < tol * 0.01:
            break
        lam_old = lam
    else:
        raise RuntimeError("power iteration did not converge")
    return shift - lam


# ---------------------------------------------------------------------------
# decoupling circuit search


#: roles of the eight qubits in a plaquette cell
CELL_ROLES = ("vNW", "vNE", "vSW", "vSE", "top", "bottom", "left", "right")
_ROLE_CLASS = {
    "vNW": "vertex",
    "vNE": "vertex",
    "vSW": "vertex",
    "vSE": "vertex",
    "top": "hedge",
    "bottom": "hedge",
    "left": "vedge",
    "right": "vedge",
}


def _role_qubit(layout: CodeLayout, r: int, c: int, role: str) -> int:
    if role == "vNW":
        return layout.vertex(r, c)
    if role == "vNE":
        return layout.vertex(r, c + 1)
    if role == "vSW":
        return layout.vertex(r + 1, c)
    if role == "vSE":
        return layout.vertex(r + 1, c + 1)
    if role == "top":
        return layout.hedge(r, c)
    if role == "bottom":
        return layout.hedge(r + 1, c)
    if role == "left":
        return layout.vedge(r, c)
    if role == "right":
        return layout.vedge(r, c + 1)
    raise ValueError(f"unknown cell role {role!r}")


def _valid_round_choices() -> list[tuple[str, str]]:
    """Ordered (control, target) role pairs giving disjoint CNOT rounds.

    A round applies the same CNOT at every plaquette; it is disjoint iff
    the two roles come from different qubit classes (each class is covered
    exactly once per role).
    """
    out = []
    for a in CELL_ROLES:
        for b in CELL_ROLES:
            if _ROLE_CLASS[a] != _ROLE_CLASS[b]:
                out.append((a, b))
    return out


@dataclass(frozen=True)
class CnotCircuit:
    """A translation-invariant circuit: per round one CNOT per plaquette."""

    rounds: tuple[tuple[str, str], ...]

    def cnot_list(self, layout: CodeLayout) -> list[list[tuple[int, int]]]:
        out = []
        for ctrl_role, tgt_role in self.rounds:
            gates = [
                (
                    _role_qubit(layout, r, c, ctrl_role),
                    _role_qubit(layout, r, c, tgt_role),
                )
                for r in range(layout.L)
                for c in range(layout.L)
            ]
            out.append(gates)
        return out

    def conjugate(self, op: PauliOperator, layout: CodeLayout) -> PauliOperator:
        for gates in self.cnot_list(layout):
            for ctrl, tgt in gates:
                op = op.conjugate_by_cnot(ctrl, tgt)
        return op


def _round_maps(layout: CodeLayout, choice: tuple[str, str]):
    """Per-qubit CNOT partner maps of one round: (target_of, control_of)."""
    n = layout.n_qubits
    tgt_of = -np.ones(n, dtype=np.int64)
    ctl_of = -np.ones(n, dtype=np.int64)
    for r in range(layout.L):
        for c in range(layout.L):
            ctl = _role_qubit(layout, r, c, choice[0])
            tgt = _role_qubit(layout, r, c, choice[1])
            tgt_of[ctl] = tgt
            ctl_of[tgt] = ctl
    return tgt_of, ctl_of


def _apply_round_x(support: np.ndarray, tgt_of: np.ndarray) -> np.ndarray:
    out = support.copy()
    hits = tgt_of[support.astype(bool)]
    hits = hits[hits >= 0]
    out[hits] ^= 1
    return out


def _apply_round_z(support: np.ndarray, ctl_of: np.ndarray) -> np.ndarray:
    out = support.copy()
    hits = ctl_of[support.astype(bool)]
    hits = hits[hits >= 0]
    out[hits] ^= 1
    return out


def decoupling_search(L: int = 4, n_rounds: int = 4) -> CnotCircuit:
    """Find a four-round circuit decoupling the gauge qubits.

    Searches all translation-invariant assignments of one CNOT per
    plaquette per round (40 disjoint role pairs per round) in
    lexicographic order, pruning on the gauge-pair images: conjugation by
    one disjoint CNOT round can at most halve the weight of an X- or
    Z-type operator, so after k rounds a viable candidate must have gauge
    images of weight at most 2^(rounds-k).  A hit must map the plaquette
    gauge pair to weight-1 X and Z on a common qubit and every stabilizer
    to a weight-4 operator.
    """
    if L < 3:
        raise ValueError("need L >= 3 to avoid wrap-around artifacts")
    code = build(L, "toric")
    layout = code.layout
    n = layout.n_qubits
    choices = _valid_round_choices()
    maps = [_round_maps(layout, ch) for ch in choices]

    xbar = np.zeros(n, dtype=np.uint8)
    xbar[list(code.triangle(0, 0, "SW").qubits)] = 1
    zbar = np.zeros(n, dtype=np.uint8)
    zbar[list(code.triangle(0, 0, "SE").qubits)] = 1

    stabs_x = [s.x_bitvec() for s in code.groups.stabilizers_x]
    stabs_z = [s.z_bitvec() for s in code.groups.stabilizers_z]

    def dfs(depth: int, xs: np.ndarray, zs: np.ndarray, picked: list[int]):
        if depth == n_rounds:
            if xs.sum() != 1 or zs.sum() != 1:
                return None
            if int(np.flatnonzero(xs)[0]) != int(np.flatnonzero(zs)[0]):
                return None
            return _check_stabilizer_images(picked)
        bound = 1 << (n_rounds - depth - 1)
        for ci in range(len(choices)):
            tgt_of, ctl_of = maps[ci]
            xs2 = _apply_round_x(xs, tgt_of)
            zs2 = _apply_round_z(zs, ctl_of)
            if xs2.sum() > bound or zs2.sum() > bound:
                continue
            picked.append(ci)
            hit = dfs(depth + 1, xs2, zs2, picked)
            if hit is not None:
                return hit
            picked.pop()
        return None

    def _check_stabilizer_images(picked: list[int]):
        for sx in stabs_x:
            img = sx
            for ci in picked:
                img = _apply_round_x(img, maps[ci][0])
            if img.sum() != 4:
                return None
        for sz in stabs_z:
            img = sz
            for ci in picked:
                img = _apply_round_z(img, maps[ci][1])
            if img.sum() != 4:
                return None
        return CnotCircuit(tuple(choices[ci] for ci in picked))

    hit = dfs(0, xbar, zbar, [])
    if hit is None:
        raise RuntimeError("decoupling search exhausted without a hit")
    return hit


@dataclass
class DecouplingReport:
    stabilizer_weights: list[int]
    images_commute: bool
    gauge_images_weight1: bool
    gauge_pairs_share_qubit: bool
    stabilizers_avoid_gauge_qubits: bool

    @property
    def passed(self) -> bool:
        return (
            all(w == 4 for w in self.stabilizer_weights)
            and self.images_commute
            and self.gauge_images_weight1
            and self.gauge_pairs_share_qubit
        )


def verify_decoupling(circuit: CnotCircuit, L: int = 4) -> DecouplingReport:
    """Full operator-level verification of a decoupling circuit."""
    code = build(L, "toric")
    layout = code.layout
    n = layout.n_qubits
    stab_imgs = [
        circuit.conjugate(s, layout)
        for s in code.groups.stabilizers_x + code.groups.stabilizers_z
    ]
    weights = [s.weight for s in stab_imgs]
    commute = all(
        a.commutes(b)
        for i, a in enumerate(stab_imgs)
        for b in stab_imgs[i + 1 :]
    )
    w1 = True
    share = True
    gauge_sup = set()
    for r in range(L):
        for c in range(L):
            xi = circuit.conjugate(code.triangle(r, c, "SW").operator(n), layout)
            zi = circuit.conjugate(code.triangle(r, c, "SE").operator(n), layout)
            w1 &= xi.weight == 1 and zi.weight == 1
            xs, zs = xi.x_support(), zi.z_support()
            if len(xs) == 1 and len(zs) == 1:
                share &= int(xs[0]) == int(zs[0])
                gauge_sup.add(int(xs[0]))
    avoid = all(
        not (set(np.union1d(s.x_support(), s.z_support()).tolist()) & gauge_sup)
        for s in stab_imgs
    )
    return DecouplingReport(weights, commute, w1, share, avoid)
