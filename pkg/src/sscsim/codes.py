"""Construction of subsystem toric and planar surface codes with 3-qubit checks.

Geometry and conventions
------------------------
The code lives on an L x L square lattice; qubits sit on vertices and on
edge midpoints.  Rows grow southward, columns eastward; plaquette (r, c)
has its north-west corner at vertex (r, c).  On the torus all coordinates
wrap mod L.  The planar variant has open boundaries: (L+1)^2 vertices,
2L(L+1) edges and weight-2 boundary stabilizers on every boundary edge.

Each plaquette carries four triangles, one per corner.  A triangle is a
vertex plus the two plaquette edges incident to it; its 3-qubit check
operator is XXX on SW/NE corners and ZZZ on SE/NW corners.  Products of
the two same-type triangles of a plaquette give the weight-6 stabilizers.
The SW/SE triangle pair of each plaquette is kept as the local logical
pair of that plaquette's gauge qubit.

Boundary stabilizer placement (planar) is forced by commutation with the
triangle operators once the X/Z side assignment is fixed: X-type pairs on
the left/right boundaries, Z-type on top/bottom, each weight-2 operator
coupling a boundary-edge midpoint to one specific endpoint vertex.  The
side assignment is the one under which the horizontal X string and the
vertical Z string remain logical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Literal, Sequence

import numpy as np

from .pauli import PauliOperator, SpanBasis, gf2_rank, in_span

Geometry = Literal["toric", "planar"]

TRIANGLE_KINDS = ("NW", "NE", "SW", "SE")
X_KINDS = ("SW", "NE")
Z_KINDS = ("SE", "NW")


@dataclass(frozen=True)
class CodeLayout:
    """Qubit indexing for one lattice geometry.

    Qubits are numbered contiguously: vertices first, then horizontal-edge
    midpoints, then vertical-edge midpoints, each block in row-major order.
    """

    L: int
    geometry: Geometry

    @property
    def n_vertex_rows(self) -> int:
        return self.L if self.geometry == "toric" else self.L + 1

    @property
    def n_vertex_cols(self) -> int:
        return self.n_vertex_rows

    @property
    def n_vertices(self) -> int:
        return self.n_vertex_rows * self.n_vertex_cols

    @property
    def n_hedges(self) -> int:
        if self.geometry == "toric":
            return self.L * self.L
        return (self.L + 1) * self.L

    @property
    def n_vedges(self) -> int:
        return self.n_hedges

    @property
    def n_qubits(self) -> int:
        return self.n_vertices + self.n_hedges + self.n_vedges

    @property
    def n_plaquettes(self) -> int:
        return self.L * self.L

    # -- site indexing ------------------------------------------------------

    def vertex(self, r: int, c: int) -> int:
        if self.geometry == "toric":
            r %= self.L
            c %= self.L
            return r * self.L + c
        self._check(0 <= r <= self.L and 0 <= c <= self.L, "vertex", r, c)
        return r * (self.L + 1) + c

    def hedge(self, r: int, c: int) -> int:
        """Midpoint of the edge from vertex (r, c) to vertex (r, c+1)."""
        if self.geometry == "toric":
            r %= self.L
            c %= self.L
            return self.n_vertices + r * self.L + c
        self._check(0 <= r <= self.L and 0 <= c < self.L, "hedge", r, c)
        return self.n_vertices + r * self.L + c

    def vedge(self, r: int, c: int) -> int:
        """Midpoint of the edge from vertex (r, c) to vertex (r+1, c)."""
        if self.geometry == "toric":
            r %= self.L
            c %= self.L
            return self.n_vertices + self.n_hedges + r * self.L + c
        self._check(0 <= r < self.L and 0 <= c <= self.L, "vedge", r, c)
        return self.n_vertices + self.n_hedges + r * (self.L + 1) + c

    def plaquette(self, r: int, c: int) -> int:
        if self.geometry == "toric":
            r %= self.L
            c %= self.L
        else:
            self._check(0 <= r < self.L and 0 <= c < self.L, "plaquette", r, c)
        return r * self.L + c

    def _check(self, ok: bool, what: str, r: int, c: int) -> None:
        if not ok:
            raise IndexError(f"{what} ({r},{c}) outside planar lattice of size {self.L}")

    def site_of(self, index: int) -> tuple[str, int, int]:
        """Inverse of the index map: (kind, row, col) of a qubit index."""
        if not 0 <= index < self.n_qubits:
            raise IndexError(f"qubit index {index} out of range")
        if index < self.n_vertices:
            w = self.n_vertex_cols
            return ("vertex", index // w, index % w)
        index -= self.n_vertices
        if index < self.n_hedges:
            w = self.L
            return ("hedge", index // w, index % w)
        index -= self.n_hedges
        w = self.L if self.geometry == "toric" else self.L + 1
        return ("vedge", index // w, index % w)

    def index_map(self) -> dict[tuple[str, int, int], int]:
        return {self.site_of(i): i for i in range(self.n_qubits)}

    def plaquettes(self) -> Iterator[tuple[int, int]]:
        for r in range(self.L):
            for c in range(self.L):
                yield (r, c)


@dataclass(frozen=True)
class Triangle:
    """One 3-qubit check: a corner vertex and the two incident plaquette edges.

    ``qubits`` is the triple (vertex, horizontal-edge, vertical-edge); the
    fixed role order is what the scheduling machinery permutes.
    """

    plaquette: tuple[int, int]
    kind: str
    qubits: tuple[int, int, int]
    pauli_kind: str

    def operator(self, n_qubits: int) -> PauliOperator:
        if self.pauli_kind == "X":
            return PauliOperator.from_support(n_qubits, x_support=self.qubits)
        return PauliOperator.from_support(n_qubits, z_support=self.qubits)


def _triangle(layout: CodeLayout, r: int, c: int, kind: str) -> Triangle:
    if kind == "NW":
        qubits = (layout.vertex(r, c), layout.hedge(r, c), layout.vedge(r, c))
    elif kind == "NE":
        qubits = (layout.vertex(r, c + 1), layout.hedge(r, c), layout.vedge(r, c + 1))
    elif kind == "SW":
        qubits = (layout.vertex(r + 1, c), layout.hedge(r + 1, c), layout.vedge(r, c))
    elif kind == "SE":
        qubits = (
            layout.vertex(r + 1, c + 1),
            layout.hedge(r + 1, c),
            layout.vedge(r, c + 1),
        )
    else:
        raise ValueError(f"unknown triangle kind {kind!r}")
    pauli_kind = "X" if kind in X_KINDS else "Z"
    return Triangle((r, c), kind, qubits, pauli_kind)


@dataclass(frozen=True)
class CodeGroups:
    """Stabilizer, gauge and logical operators of one code instance."""

    stabilizers_x: tuple[PauliOperator, ...]
    stabilizers_z: tuple[PauliOperator, ...]
    boundary_stabilizers: tuple[PauliOperator, ...]
    gauge_x: tuple[PauliOperator, ...]
    gauge_z: tuple[PauliOperator, ...]
    logical_x: tuple[PauliOperator, ...]
    logical_z: tuple[PauliOperator, ...]

    def boundary_of_type(self, pauli_kind: str) -> tuple[PauliOperator, ...]:
        picked = []
        for op in self.boundary_stabilizers:
            is_x = op.x_bits.any()
            if (pauli_kind == "X") == bool(is_x):
                picked.append(op)
        return tuple(picked)

    def checks_of_type(self, pauli_kind: str) -> tuple[PauliOperator, ...]:
        """All stabilizers of one Pauli type, plaquette ones first."""
        base = self.stabilizers_x if pauli_kind == "X" else self.stabilizers_z
        return base + self.boundary_of_type(pauli_kind)

    def all_stabilizers(self) -> tuple[PauliOperator, ...]:
        return self.stabilizers_x + self.stabilizers_z + self.boundary_stabilizers


@dataclass(frozen=True)
class Code:
    layout: CodeLayout
    triangles: tuple[Triangle, ...]
    groups: CodeGroups

    def triangle(self, r: int, c: int, kind: str) -> Triangle:
        return self._by_key[(self.layout.plaquette(r, c), kind)]

    @property
    def _by_key(self) -> dict[tuple[int, str], Triangle]:
        key = "_by_key_cache"
        cache = self.__dict__.get(key)
        if cache is None:
            cache = {
                (self.layout.plaquette(*t.plaquette), t.kind): t
                for t in self.triangles
            }
            object.__setattr__(self, key, cache)
        return cache


def _boundary_stabilizers(layout: CodeLayout) -> list[PauliOperator]:
    """Weight-2 boundary stabilizers of the planar code.

    The endpoint pairings are the unique ones commuting with every triangle
    operator: top edges pair east, bottom edges pair west, left edges pair
    north, right edges pair south.
    """
    L = layout.L
    n = layout.n_qubits
    ops: list[PauliOperator] = []
    for c in range(L):  # top (Z-type)
        ops.append(
            PauliOperator.from_support(
                n, z_support=(layout.hedge(0, c), layout.vertex(0, c + 1))
            )
        )
    for c in range(L):  # bottom (Z-type)
        ops.append(
            PauliOperator.from_support(
                n, z_support=(layout.hedge(L, c), layout.vertex(L, c))
            )
        )
    for r in range(L):  # left (X-type)
        ops.append(
            PauliOperator.from_support(
                n, x_support=(layout.vedge(r, 0), layout.vertex(r, 0))
            )
        )
    for r in range(L):  # right (X-type)
        ops.append(
            PauliOperator.from_support(
                n, x_support=(layout.vedge(r, L), layout.vertex(r + 1, L))
            )
        )
    return ops


def _logicals(layout: CodeLayout) -> tuple[list, list]:
    """Canonical logical representatives on row 0 and column 0."""
    L = layout.L
    n = layout.n_qubits
    ncols = L if layout.geometry == "toric" else L + 1
    gamma = [layout.vertex(0, c) for c in range(ncols)]
    gamma += [layout.hedge(0, c) for c in range(L)]
    lam = [layout.vertex(r, 0) for r in range(ncols)]
    lam += [layout.vedge(r, 0) for r in range(L)]
    x1 = PauliOperator.from_support(n, x_support=gamma)
    z1 = PauliOperator.from_support(n, z_support=lam)
    if layout.geometry == "toric":
        x2 = PauliOperator.from_support(n, x_support=lam)
        z2 = PauliOperator.from_support(n, z_support=gamma)
        return [x1, x2], [z1, z2]
    return [x1], [z1]


def build(L: int, geometry: Geometry) -> Code:
    """Build the full code: layout, triangles, stabilizers, gauge, logicals."""
    if L < 2:
        raise ValueError(f"unsupported lattice size L={L}; need L >= 2")
    if geometry not in ("toric", "planar"):
        raise ValueError(f"unknown geometry {geometry!r}")
    layout = CodeLayout(L, geometry)
    n = layout.n_qubits

    triangles: list[Triangle] = []
    for r, c in layout.plaquettes():
        for kind in TRIANGLE_KINDS:
            triangles.append(_triangle(layout, r, c, kind))

    by_key = {(layout.plaquette(*t.plaquette), t.kind): t for t in triangles}
    stab_x: list[PauliOperator] = []
    stab_z: list[PauliOperator] = []
    gauge_x: list[PauliOperator] = []
    gauge_z: list[PauliOperator] = []
    for r, c in layout.plaquettes():
        p = layout.plaquette(r, c)
        sw = by_key[(p, "SW")].operator(n)
        ne = by_key[(p, "NE")].operator(n)
        se = by_key[(p, "SE")].operator(n)
        nw = by_key[(p, "NW")].operator(n)
        stab_x.append(sw * ne)
        stab_z.append(se * nw)
        gauge_x.append(sw)
        gauge_z.append(se)

    boundary = _boundary_stabilizers(layout) if geometry == "planar" else []
    logical_x, logical_z = _logicals(layout)

    groups = CodeGroups(
        stabilizers_x=tuple(stab_x),
        stabilizers_z=tuple(stab_z),
        boundary_stabilizers=tuple(boundary),
        gauge_x=tuple(gauge_x),
        gauge_z=tuple(gauge_z),
        logical_x=tuple(logical_x),
        logical_z=tuple(logical_z),
    )
    return Code(layout, tuple(triangles), groups)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    checks: dict[str, bool] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def _record(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks[name] = self.checks.get(name, True) and ok
        if not ok:
            self.failures.append(f"{name}: {detail}")


def validate_code(code: Code) -> ValidationReport:
    """Structural validation of a built code.

    Verifies stabilizer commutativity, triangle/stabilizer commutation, the
    global product identities on the torus, GF(2) generator counts, derived
    qubit counts, the delta-patterned logical commutation, and that logicals
    commute with every gauge generator.
    """
    layout, groups = code.layout, code.groups
    L = layout.L
    n = layout.n_qubits
    report = ValidationReport()
    stabs = groups.all_stabilizers()

    ok = True
    for i, a in enumerate(stabs):
        for b in stabs[i + 1 :]:
            if not a.commutes(b):
                ok = False
                report._record(
                    "stabilizers_commute", False, f"{a.to_text()} vs {b.to_text()}"
                )
    report._record("stabilizers_commute", ok)

    ok = True
    for t in code.triangles:
        op = t.operator(n)
        for s in stabs:
            if not op.commutes(s):
                ok = False
                report._record(
                    "triangles_commute_with_stabilizers",
                    False,
                    f"{t.kind}@{t.plaquette} vs {s.to_text()}",
                )
    report._record("triangles_commute_with_stabilizers", ok)

    if layout.geometry == "toric":
        prod_x = PauliOperator.identity(n)
        prod_z = PauliOperator.identity(n)
        for sx in groups.stabilizers_x:
            prod_x = prod_x * sx
        for sz in groups.stabilizers_z:
            prod_z = prod_z * sz
        report._record(
            "global_products_identity",
            prod_x.is_identity and prod_z.is_identity,
            f"prod_x={prod_x.to_text()} prod_z={prod_z.to_text()}",
        )

    s_rank = gf2_rank(stabs)
    expected_s = 2 * (L * L - 1) if layout.geometry == "toric" else 2 * L * L + 4 * L
    report._record("stabilizer_rank", s_rank == expected_s, f"{s_rank} != {expected_s}")

    g = L * L
    k_prime = n - s_rank
    k = k_prime - g
    expected_k = 2 if layout.geometry == "toric" else 1
    report._record(
        "derived_counts",
        k_prime == g + expected_k and k == expected_k,
        f"k'={k_prime} g={g} k={k}",
    )
    report.counts.update(n=n, s=s_rank, k_prime=k_prime, g=g, k=k)

    ok = True
    for i, lx in enumerate(groups.logical_x):
        for j, lz in enumerate(groups.logical_z):
            expect_anticommute = i == j
            if lx.commutes(lz) == expect_anticommute:
                ok = False
                report._record(
                    "logical_commutation_pattern",
                    False,
                    f"Xbar_{i+1} vs Zbar_{j+1}",
                )
    for pair in (groups.logical_x, groups.logical_z):
        for i, a in enumerate(pair):
            for b in pair[i + 1 :]:
                if not a.commutes(b):
                    ok = False
                    report._record(
                        "logical_commutation_pattern", False, "same-type logicals"
                    )
    report._record("logical_commutation_pattern", ok)

    ok = True
    for t in code.triangles:
        op = t.operator(n)
        for lop in groups.logical_x + groups.logical_z:
            if not op.commutes(lop):
                ok = False
                report._record(
                    "logicals_commute_with_gauge",
                    False,
                    f"{t.kind}@{t.plaquette} vs {lop.to_text()}",
                )
    report._record("logicals_commute_with_gauge", ok)

    return report


# ---------------------------------------------------------------------------
# brute-force distance oracle


def _support_mask(op: PauliOperator, pauli_kind: str) -> int:
    sup = op.z_support() if pauli_kind == "Z" else op.x_support()
    mask = 0
    for q in sup.tolist():
        mask |= 1 << q
    return mask


def _gf2_int_span(masks: Sequence[int]) -> list[int]:
    """Row-echelon basis of integer bit rows."""
    basis: list[int] = []
    for m in masks:
        for b in basis:
            m = min(m, m ^ b)
        if m:
            basis.append(m)
            basis.sort(reverse=True)
    return basis


def _in_int_span(m: int, basis: Sequence[int]) -> bool:
    for b in basis:
        m = min(m, m ^ b)
    return m == 0


def _nullspace_basis(check_masks: Sequence[int], n: int) -> list[int]:
    """Basis of bit patterns with even overlap against every check mask."""
    basis = _gf2_int_span(check_masks)
    # reduce fully so every pivot column appears in exactly one row
    for i, b in enumerate(basis):
        piv = 1 << (b.bit_length() - 1)
        for j, other in enumerate(basis):
            if j != i and other & piv:
                basis[j] = other ^ b
    pivots = [b.bit_length() - 1 for b in basis]
    free = [i for i in range(n) if i not in pivots]
    null: list[int] = []
    for f in free:
        v = 1 << f
        for b, piv in zip(basis, pivots):
            if (b >> f) & 1:
                v |= 1 << piv
        null.append(v)
    return null


def distance_bruteforce(code: Code, error_type: str) -> int:
    """Exhaustive minimum-distance oracle for one error type.

    Returns the minimum weight over all patterns of the given type that
    commute with every opposite-type stabilizer yet lie outside the GF(2)
    span of the same-type gauge generators and stabilizers.  Refuses
    instances with more than 24 qubits.
    """
    if error_type not in ("X", "Z"):
        raise ValueError("error_type must be 'X' or 'Z'")
    n = code.layout.n_qubits
    if n > 24:
        raise ValueError(f"instance too large for exhaustive search: n={n} > 24")
    opposite = "Z" if error_type == "X" else "X"
    check_masks = [
        _support_mask(op, opposite) for op in code.groups.checks_of_type(opposite)
    ]
    own_ops = [
        t.operator(n) for t in code.triangles if t.pauli_kind == error_type
    ] + list(code.groups.checks_of_type(error_type))
    own_basis = _gf2_int_span([_support_mask(op, error_type) for op in own_ops])

    null_basis = _nullspace_basis(check_masks, n)
    # enumerate the full trivial-syndrome space by Gray-style expansion
    patterns = np.zeros(1, dtype=np.uint64)
    for v in null_basis:
        patterns = np.concatenate([patterns, patterns ^ np.uint64(v)])
    weights = np.bitwise_count(patterns)
    best = None
    for m, w in sorted(zip(patterns.tolist(), weights.tolist()), key=lambda t: t[1]):
        if m == 0:
            continue
        if best is not None and w >= best:
            break
        if not _in_int_span(m, own_basis):
            best = w
            break
    if best is None:
        raise RuntimeError("no logical representative found; code is trivial")
    return int(best)
