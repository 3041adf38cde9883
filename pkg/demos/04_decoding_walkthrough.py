"""One noisy memory experiment, decoded step by step.

Runs T rounds of scheduled noisy extraction on the toric code, extracts
the defect history, matches defects along least-weight space-time
geodesics, applies the correction and asks whether the residual acts
trivially on the logical qubits.
"""

import numpy as np

from sscsim import build
from sscsim.decoder import Decoder, judge
from sscsim.framesim import ReadoutCircuit, simulate_trial
from sscsim.noise import NoiseModel
from sscsim.pauli import PauliOperator
from sscsim.scheduling import find_schedule
from sscsim.vlattice import build_3d, defects_from_history

L = T = 8
p = 0.006
schedule = find_schedule()
code = build(L, "toric")
circuit = ReadoutCircuit(code, schedule)
noise = NoiseModel("circuit", p)

lattice = build_3d(code, T, p, "circuit", schedule)
decoder = Decoder(lattice, code.layout.n_qubits)

record = simulate_trial(circuit, noise, T, seed_or_rng=7)
defects = defects_from_history(record.syndromes_z)
print(f"L={L}, T={T}, p={p}: accumulated error weight "
      f"{int(record.accumulated_x.sum())}, defects {len(defects)}")

correction = decoder.decode(defects)
print(f"matched {len(correction.pairs)} pairs, "
      f"matching weight {correction.matching_weight:.2f}, "
      f"correction weight {int(correction.bits.sum())}")

accumulated = PauliOperator.from_x_bitvec(record.accumulated_x)
ok = judge(accumulated, correction.operator, code, check_span=True)
print("logical info preserved:", ok)

# ---------------------------------------------------------------------------
# the same machinery over a few seeds

failures = 0
trials = 200
for seed in range(trials):
    rec = simulate_trial(circuit, noise, T, seed_or_rng=seed)
    corr = decoder.decode(defects_from_history(rec.syndromes_z))
    acc = PauliOperator.from_x_bitvec(rec.accumulated_x)
    failures += not judge(acc, corr.operator, code)
print(f"\nfailure rate over {trials} trials: {failures / trials:.3f}")
