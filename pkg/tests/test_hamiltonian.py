"""Tests of the exact spectrum and the gauge-decoupling circuit."""

import math

import pytest

from sscsim.hamiltonian import (
    decoupling_search,
    deformation_gap_bound,
    gauge_gap,
    gauge_qubit_levels,
    spectrum,
    syndrome_gap,
    verify_decoupling,
    verify_ground_energy_numeric,
)

SQRT2 = math.sqrt(2.0)


def test_gauge_qubit_level_table():
    assert gauge_qubit_levels(1, 1) == pytest.approx((-2 * SQRT2, 2 * SQRT2))
    assert gauge_qubit_levels(1, -1) == pytest.approx((-2.0, 2.0))
    assert gauge_qubit_levels(-1, 1) == pytest.approx((-2.0, 2.0))
    assert gauge_qubit_levels(-1, -1) == pytest.approx((0.0, 0.0))
    with pytest.raises(ValueError):
        gauge_qubit_levels(0, 1)


def test_gaps():
    assert gauge_gap() == pytest.approx(4 * SQRT2)
    assert syndrome_gap() == pytest.approx(2 * (SQRT2 - 1))
    assert deformation_gap_bound() == pytest.approx(4 * (SQRT2 - 1))


@pytest.mark.parametrize("L", [2, 3, 4])
def test_spectrum_ground_state(L):
    s = spectrum(L)
    assert s.ground_energy == pytest.approx(-2 * SQRT2 * L * L)
    assert s.ground_degeneracy == 4
    assert s.gap_gauge == pytest.approx(4 * SQRT2)
    assert s.gap_syndrome == pytest.approx(2 * (SQRT2 - 1))


@pytest.mark.parametrize("L", [2, 3, 4])
def test_first_excitation_is_a_syndrome_pair(L):
    s = spectrum(L)
    e1, deg1 = s.levels[1]
    assert e1 - s.ground_energy == pytest.approx(2 * syndrome_gap())
    # two choices of flip type times plaquette pairs, 4-fold logical
    n = L * L
    assert deg1 == 4 * 2 * (n * (n - 1) // 2)


def test_numeric_ground_energy_matches_analytic():
    e0 = verify_ground_energy_numeric(2, tol=1e-8)
    assert abs(e0 - (-8 * SQRT2)) < 1e-6


def test_numeric_is_deterministic():
    assert verify_ground_energy_numeric(2) == verify_ground_energy_numeric(2)


def test_dropping_a_term_raises_energy():
    full = verify_ground_energy_numeric(2)
    dropped = verify_ground_energy_numeric(2, drop_terms=1)
    assert dropped > full + 0.1


def test_numeric_rejects_large_l():
    with pytest.raises(ValueError):
        verify_ground_energy_numeric(3)


@pytest.fixture(scope="module")
def circuit():
    return decoupling_search()


def test_decoupling_contract(circuit):
    report = verify_decoupling(circuit, 4)
    assert all(w == 4 for w in report.stabilizer_weights)
    assert report.images_commute
    assert report.gauge_images_weight1
    assert report.gauge_pairs_share_qubit
    assert report.passed


def test_decoupling_holds_on_larger_lattice(circuit):
    assert verify_decoupling(circuit, 5).passed


def test_decoupling_is_four_disjoint_rounds(circuit):
    from sscsim.codes import CodeLayout

    assert len(circuit.rounds) == 4
    layout = CodeLayout(4, "toric")
    for gates in circuit.cnot_list(layout):
        used = [q for pair in gates for q in pair]
        assert len(used) == len(set(used))


def test_conjugation_preserves_commutation(circuit):
    from sscsim import build

    code = build(4, "toric")
    layout = code.layout
    n = layout.n_qubits
    ops = [code.triangle(0, 0, k).operator(n) for k in ("NW", "NE", "SW", "SE")]
    ops += [code.groups.stabilizers_x[3], code.groups.logical_z[0]]
    images = [circuit.conjugate(op, layout) for op in ops]
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            assert ops[i].commutes(ops[j]) == images[i].commutes(images[j])
