"""Tests for the binary symplectic Pauli algebra."""

import itertools

import numpy as np
import pytest

from sscsim import build
from sscsim.pauli import PauliOperator, commutes, conjugate_by_cnot, in_span, multiply


def random_pauli(rng, n):
    return PauliOperator.from_x_bitvec(rng.integers(0, 2, n)).multiply(
        PauliOperator.from_z_bitvec(rng.integers(0, 2, n))
    )


def test_multiply_involution():
    x1 = PauliOperator.from_support(4, x_support=[1])
    assert multiply(x1, x1).is_identity


def test_multiply_disjoint_components():
    a = PauliOperator.from_support(4, x_support=[1, 2])
    b = PauliOperator.from_support(4, z_support=[2, 3])
    prod = a * b
    assert prod.x_support().tolist() == [1, 2]
    assert prod.z_support().tolist() == [2, 3]
    assert prod.weight == 3


def test_multiply_triangles_gives_weight6_stabilizer():
    code = build(2, "toric")
    n = code.layout.n_qubits
    sw = code.triangle(0, 0, "SW").operator(n)
    ne = code.triangle(0, 0, "NE").operator(n)
    stab = multiply(sw, ne)
    assert stab.weight == 6
    assert stab == code.groups.stabilizers_x[0]


def test_multiply_size_mismatch():
    with pytest.raises(ValueError):
        multiply(PauliOperator.identity(3), PauliOperator.identity(4))


def test_stabilizers_commute_toric_l4():
    code = build(4, "toric")
    for sx in code.groups.stabilizers_x:
        for sz in code.groups.stabilizers_z:
            assert commutes(sx, sz)


def test_logical_pair_anticommutes():
    code = build(3, "toric")
    x1 = code.groups.logical_x[0]
    z1 = code.groups.logical_z[0]
    assert not commutes(x1, z1)
    assert commutes(x1, code.groups.logical_z[1])


def test_identity_commutes_with_anything():
    rng = np.random.default_rng(7)
    ident = PauliOperator.identity(20)
    for _ in range(50):
        assert commutes(ident, random_pauli(rng, 20))


def test_commutes_is_symmetric_randomized():
    rng = np.random.default_rng(2024)
    n = 37
    for _ in range(100_000):
        a = random_pauli(rng, n)
        b = random_pauli(rng, n)
        assert commutes(a, b) == commutes(b, a)


def test_cnot_defining_rules():
    n = 4
    c, t = 1, 2
    xc = PauliOperator.from_support(n, x_support=[c])
    assert conjugate_by_cnot(xc, c, t) == PauliOperator.from_support(n, x_support=[c, t])
    zt = PauliOperator.from_support(n, z_support=[t])
    assert conjugate_by_cnot(zt, c, t) == PauliOperator.from_support(n, z_support=[c, t])
    xt = PauliOperator.from_support(n, x_support=[t])
    assert conjugate_by_cnot(xt, c, t) == xt
    zc = PauliOperator.from_support(n, z_support=[c])
    assert conjugate_by_cnot(zc, c, t) == zc


def test_cnot_is_involution_and_preserves_form():
    rng = np.random.default_rng(5)
    n = 16
    for _ in range(2000):
        a = random_pauli(rng, n)
        b = random_pauli(rng, n)
        c, t = rng.choice(n, size=2, replace=False)
        ac = conjugate_by_cnot(a, c, t)
        bc = conjugate_by_cnot(b, c, t)
        assert conjugate_by_cnot(ac, c, t) == a
        assert commutes(a, b) == commutes(ac, bc)


def test_cnot_rejects_bad_indices():
    p = PauliOperator.identity(3)
    with pytest.raises(ValueError):
        conjugate_by_cnot(p, 1, 1)
    with pytest.raises(IndexError):
        conjugate_by_cnot(p, 0, 5)


def test_in_span_stabilizer_inside_triangle_span():
    code = build(3, "toric")
    n = code.layout.n_qubits
    xtris = [t.operator(n) for t in code.triangles if t.pauli_kind == "X"]
    for sx in code.groups.stabilizers_x:
        assert in_span(sx, xtris)


def test_in_span_logical_outside_triangle_span():
    code = build(3, "toric")
    n = code.layout.n_qubits
    xtris = [t.operator(n) for t in code.triangles if t.pauli_kind == "X"]
    assert not in_span(code.groups.logical_x[0], xtris)


def test_in_span_identity_and_empty():
    assert in_span(PauliOperator.identity(5), [])
    assert not in_span(PauliOperator.from_support(5, x_support=[0]), [])


def test_in_span_matches_exhaustive_subset_xor():
    rng = np.random.default_rng(11)
    n = 10
    for _ in range(60):
        k = int(rng.integers(1, 9))
        gens = [random_pauli(rng, n) for _ in range(k)]
        probe = random_pauli(rng, n)
        if rng.random() < 0.5:
            # force a member half of the time
            probe = PauliOperator.identity(n)
            for g in gens:
                if rng.random() < 0.5:
                    probe = probe * g
        member = any(
            _xor_all(n, subset) == probe
            for r in range(k + 1)
            for subset in itertools.combinations(gens, r)
        )
        assert in_span(probe, gens) == member


def _xor_all(n, ops):
    acc = PauliOperator.identity(n)
    for op in ops:
        acc = acc * op
    return acc


def test_text_form_roundtrip():
    p = PauliOperator.from_support(9, x_support=[1, 5, 7], z_support=[7, 8])
    text = p.to_text()
    assert text == "+X1 X5 Y7 Z8"
    assert PauliOperator.from_text(text, 9) == p
    assert PauliOperator.from_text("+I", 3) == PauliOperator.identity(3)
