"""Tests of matching-based decoding, path recovery and the success judge."""

import math

import numpy as np
import pytest

from sscsim import build
from sscsim.decoder import Decoder, all_pairs_defect_distances, judge, judge_bits, mwpm
from sscsim.framesim import (
    ReadoutCircuit,
    enumerate_fault_locations,
    inject_single_fault,
)
from sscsim.noise import NoiseModel
from sscsim.pauli import PauliOperator
from sscsim.scheduling import find_schedule
from sscsim.vlattice import build_2d, build_3d, defects_from_history, defects_from_syndrome


@pytest.fixture(scope="module")
def schedule():
    return find_schedule()


def _zmat(code):
    checks = code.groups.checks_of_type("Z")
    m = np.zeros((len(checks), code.layout.n_qubits), np.uint8)
    for i, s in enumerate(checks):
        m[i, s.z_support()] = 1
    return m


def _zlogs(code):
    logs = code.groups.logical_z
    m = np.zeros((len(logs), code.layout.n_qubits), np.uint8)
    for i, s in enumerate(logs):
        m[i, s.z_support()] = 1
    return m


def test_empty_defect_set_gives_identity():
    code = build(4, "toric")
    dec = Decoder(build_2d(code), code.layout.n_qubits)
    corr = dec.decode(np.zeros(0, dtype=np.int64))
    assert corr.operator.is_identity and not corr.pairs


def test_adjacent_defects_distance_is_edge_weight(schedule):
    code = build(4, "toric")
    lat = build_3d(code, 4, 0.006, "circuit", schedule)
    dec = Decoder(lat, code.layout.n_qubits)
    n_plaq = 16
    # same plaquette, one step apart in time: the vertical edge, whose
    # prior is 11p/2
    u, v = 1 * n_plaq + 5, 2 * n_plaq + 5
    problem = dec.matching_problem(np.array([u, v]))
    assert problem.dist[0, 1] == pytest.approx(-math.log(5.5 * 0.006))


def test_toric_distances_respect_wraparound():
    L = 6
    code = build(L, "toric")
    dec = Decoder(build_2d(code), code.layout.n_qubits)
    # nodes on the same row, separated by a full row sweep
    a = 0
    b = L - 1  # one column step across the seam
    problem = dec.matching_problem(np.array([a, b]))
    assert problem.dist[0, 1] == 1.0  # wraps around, not L-1 hops


def test_l2_parallel_edges_collapse_to_min_weight():
    # at L=2 the wrap-around makes qubit pairs connect the same two nodes;
    # geodesics must use the lighter parallel edge, and decoding must still
    # restore the syndrome
    code = build(2, "toric")
    dec = Decoder(build_2d(code), code.layout.n_qubits)
    assert dec.matching_problem(np.array([0, 1])).dist[0, 1] == 1.0
    zmat = _zmat(code)
    rng = np.random.default_rng(1)
    for _ in range(200):
        err = (rng.random(code.layout.n_qubits) < 0.1).astype(np.uint8)
        corr = dec.decode(defects_from_syndrome((zmat @ err) & 1))
        assert not (((zmat @ (err ^ corr.bits)) & 1).any())


def test_odd_defects_on_torus_rejected():
    code = build(3, "toric")
    dec = Decoder(build_2d(code), code.layout.n_qubits)
    with pytest.raises(RuntimeError):
        dec.decode(np.array([0, 1, 2]))


def test_planar_boundary_matching_handles_odd_defects():
    code = build(3, "planar")
    lat = build_2d(code)
    dec = Decoder(lat, code.layout.n_qubits)
    zmat, zlogs = _zmat(code), _zlogs(code)
    # a single X on the left-boundary vertical edge creates one defect
    q = code.layout.vedge(1, 0)
    err = np.zeros(code.layout.n_qubits, np.uint8)
    err[q] = 1
    syn = (zmat @ err) & 1
    defects = defects_from_syndrome(syn)
    assert len(defects) == 1
    corr = dec.decode(defects)
    assert len(corr.pairs) == 1 and corr.pairs[0][1] == -1
    assert not (((zmat @ (err ^ corr.bits)) & 1).any())
    assert judge_bits(err, corr.bits, zlogs)


def test_single_fault_sweep_is_fully_corrected(schedule):
    # every single fault at L=3 is corrected: failures need two faults
    T = 3
    code = build(3, "toric")
    circuit = ReadoutCircuit(code, schedule)
    lat = build_3d(code, T, 0.003, "circuit", schedule)
    dec = Decoder(lat, code.layout.n_qubits)
    for fault in enumerate_fault_locations(circuit, T):
        defects, residual = inject_single_fault(circuit, fault, T)
        corr = dec.decode(defects_from_history(circuit.simulate(T, fault=fault).syndromes_z))
        assert judge(residual, corr.operator, code), fault


def test_judge_examples():
    code = build(3, "toric")
    n = code.layout.n_qubits
    err = PauliOperator.from_support(n, x_support=[0, 5, 7])
    assert judge(err, err, code)  # E* = E exactly
    ident = PauliOperator.identity(n)
    assert not judge(code.groups.logical_x[0], ident, code)  # residual = logical
    triangle = code.triangle(1, 1, "SW").operator(n)
    assert judge(triangle, ident, code)  # residual = gauge element


def test_judge_rejects_inconsistent_residual():
    code = build(3, "toric")
    n = code.layout.n_qubits
    bad = PauliOperator.from_support(n, x_support=[0])
    with pytest.raises(RuntimeError):
        judge(bad, PauliOperator.identity(n), code)


def test_judge_commutation_agrees_with_span_membership(schedule):
    # random decoded residuals, cross-validated through check_span
    code = build(4, "toric")
    circuit = ReadoutCircuit(code, schedule)
    lat = build_3d(code, 4, 0.01, "circuit", schedule)
    dec = Decoder(lat, code.layout.n_qubits)
    nm = NoiseModel("circuit", 0.01)
    for seed in range(300):
        rec = circuit.simulate(4, noise=nm, rng=np.random.default_rng(seed))
        corr = dec.decode(defects_from_history(rec.syndromes_z))
        acc = PauliOperator.from_x_bitvec(rec.accumulated_x)
        judge(acc, corr.operator, code, check_span=True)  # asserts agreement


def test_correction_restores_syndrome_code_capacity():
    code = build(6, "toric")
    lat = build_2d(code)
    dec = Decoder(lat, code.layout.n_qubits)
    zmat = _zmat(code)
    rng = np.random.default_rng(17)
    for _ in range(500):
        err = (rng.random(code.layout.n_qubits) < 0.08).astype(np.uint8)
        syn = (zmat @ err) & 1
        corr = dec.decode(defects_from_syndrome(syn))
        assert not (((zmat @ (err ^ corr.bits)) & 1).any())


def test_matching_problem_via_free_functions():
    code = build(3, "toric")
    lat = build_2d(code)
    dec = Decoder(lat, code.layout.n_qubits)
    problem = all_pairs_defect_distances(dec, np.array([0, 4]))
    corr = mwpm(problem)
    assert len(corr.pairs) == 1
    assert corr.matching_weight == problem.dist[0, 1]


def test_decoding_is_deterministic(schedule):
    code = build(4, "toric")
    lat = build_3d(code, 4, 0.008, "circuit", schedule)
    dec = Decoder(lat, code.layout.n_qubits)
    circuit = ReadoutCircuit(code, schedule)
    nm = NoiseModel("circuit", 0.008)
    rec = circuit.simulate(4, noise=nm, rng=np.random.default_rng(5))
    d = defects_from_history(rec.syndromes_z)
    a = dec.decode(d)
    b = dec.decode(d)
    assert np.array_equal(a.bits, b.bits) and a.pairs == b.pairs
