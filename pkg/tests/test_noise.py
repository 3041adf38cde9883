"""Statistical and structural tests of the error-model samplers."""

import numpy as np
import pytest

from sscsim import build
from sscsim.noise import (
    Fault,
    NoiseModel,
    sample_circuit_fault_layer,
    sample_cnot_x_marginals,
    sample_code_capacity,
    sample_direct_parity_fault,
    sample_flip_mask,
    sample_triple_x_patterns,
)
from sscsim.scheduling import find_schedule


def test_noise_model_validation():
    NoiseModel("circuit", 0.1)
    with pytest.raises(ValueError):
        NoiseModel("circuit", 0.7)
    with pytest.raises(ValueError):
        NoiseModel("something", 0.1)


def test_code_capacity_edge_cases():
    layout = build(3, "toric").layout
    rng = np.random.default_rng(0)
    assert sample_code_capacity(layout, 0.0, rng).is_identity
    full = sample_code_capacity(layout, 1.0, rng)
    assert full.weight == layout.n_qubits


def test_code_capacity_mean_weight():
    # toric L=8: 192 qubits at p=0.07; the sample mean over 1e5 draws must
    # sit within 3 sigma of the binomial expectation
    layout = build(8, "toric").layout
    rng = np.random.default_rng(42)
    n, p, samples = layout.n_qubits, 0.07, 100_000
    total = 0
    for _ in range(samples):
        total += int(sample_flip_mask(n, p, rng).sum())
    mean = total / samples
    sigma_mean = np.sqrt(n * p * (1 - p) / samples)
    assert abs(mean - n * p) < 3 * sigma_mean


def test_cnot_marginal_rates():
    rng = np.random.default_rng(7)
    p, n = 0.04, 1_000_000
    ctrl, tgt = sample_cnot_x_marginals(n, p, rng)
    xi = int(((ctrl == 1) & (tgt == 0)).sum())
    ix = int(((ctrl == 0) & (tgt == 1)).sum())
    xx = int(((ctrl == 1) & (tgt == 1)).sum())
    expect = n * p / 4
    sigma = np.sqrt(n * (p / 4) * (1 - p / 4))
    for count in (xi, ix, xx):
        assert abs(count - expect) < 4 * sigma


def test_triple_pattern_rates():
    rng = np.random.default_rng(11)
    p, n = 0.04, 1_000_000
    pats = sample_triple_x_patterns(n, p, rng)
    codes = pats @ np.array([1, 2, 4], dtype=np.uint8)
    expect = n * p / 8
    sigma = np.sqrt(n * (p / 8))
    for code in range(1, 8):
        count = int((codes == code).sum())
        assert abs(count - expect) < 4 * sigma, code
    # identity keeps its p/8 mass: nontrivial total is 7p/8
    nontrivial = int((codes != 0).sum())
    assert abs(nontrivial - n * 7 * p / 8) < 4 * np.sqrt(n * 7 * p / 8)


def test_flip_mask_rate_and_zero():
    rng = np.random.default_rng(3)
    assert not sample_flip_mask(1000, 0.0, rng).any()
    hits = int(sample_flip_mask(1_000_000, 0.01, rng).sum())
    assert abs(hits - 10_000) < 4 * np.sqrt(10_000)


def test_fault_layer_rates_per_location():
    # one period on the L=2 torus: each CNOT fails with p/4 per pattern,
    # each Z-ancilla measurement and preparation with p
    schedule = find_schedule()
    layout = build(2, "toric").layout
    p, layers = 0.05, 50_000
    rng = np.random.default_rng(123)
    gate_counts: dict = {}
    mp_counts: dict = {}
    for _ in range(layers):
        for f in sample_circuit_fault_layer(schedule, layout, p, rng):
            key = (f.kind, f.round, f.triangle, f.pattern)
            if f.kind == "gate":
                gate_counts[key] = gate_counts.get(key, 0) + 1
            else:
                mp_counts[key] = mp_counts.get(key, 0) + 1
    # 12 L^2 gate locations x 3 patterns, 2 L^2 measurements + preparations
    assert len(gate_counts) == 12 * 4 * 3
    assert len(mp_counts) == 2 * 2 * 4
    sig_gate = np.sqrt(layers * p / 4)
    for key, count in gate_counts.items():
        assert abs(count - layers * p / 4) < 5 * sig_gate, key
    sig_mp = np.sqrt(layers * p)
    for key, count in mp_counts.items():
        assert abs(count - layers * p) < 5 * sig_mp, key


def test_fault_layer_empty_at_zero():
    schedule = find_schedule()
    layout = build(2, "toric").layout
    rng = np.random.default_rng(0)
    assert sample_circuit_fault_layer(schedule, layout, 0.0, rng) == []


def test_direct_parity_fault_interface():
    rng = np.random.default_rng(5)
    flip, pauli = sample_direct_parity_fault(0.0, rng)
    assert flip is False and pauli.is_identity
    flips = 0
    nontrivial = 0
    n = 200_000
    for _ in range(n):
        flip, pauli = sample_direct_parity_fault(0.01, rng)
        flips += flip
        nontrivial += not pauli.is_identity
    assert abs(flips - n * 0.01) < 4 * np.sqrt(n * 0.01)
    # 63 of 64 Paulis are nontrivial
    expect = n * 0.01 * 63 / 64
    assert abs(nontrivial - expect) < 4 * np.sqrt(expect)


def test_fault_rate_factors():
    assert Fault("gate", 0, 0, pattern="XX").rate_factor == 0.25
    assert Fault("measure", 1, 0).rate_factor == 1.0
    assert Fault("prepare", 1, 0).rate_factor == 1.0
    assert Fault("data", 0, qubit=3).rate_factor == 0.5
