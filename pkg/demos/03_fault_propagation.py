"""Single faults, defect pairs, and the fault-derived decoding graph.

Injects individual faults into the noiseless readout circuit and watches
the defect pairs they create, then builds the 3D virtual lattice by
exhaustive enumeration and prints the bulk neighbor classes with their
prior probabilities.
"""

import numpy as np

from sscsim import build
from sscsim.codes import TRIANGLE_KINDS
from sscsim.framesim import (
    ReadoutCircuit,
    enumerate_fault_locations,
    inject_single_fault,
)
from sscsim.noise import Fault
from sscsim.scheduling import find_schedule
from sscsim.vlattice import build_3d, bulk_prior_table

L = T = 4
schedule = find_schedule()
code = build(L, "toric")
circuit = ReadoutCircuit(code, schedule)
n_plaq = L * L

# a flipped ancilla measurement outcome: two defects on the time axis
se = TRIANGLE_KINDS.index("SE")
fault = Fault("measure", 4 * 1 + schedule.measure_round("SE"), se * n_plaq + 5)
defects, residual = inject_single_fault(circuit, fault, T)
print("measurement flip       -> defects", defects.tolist(), "residual", residual)

# a two-qubit X pattern after a CNOT: a data error plus its detection
sw = TRIANGLE_KINDS.index("SW")
fault = Fault("gate", 4 * 1 + (schedule.measure_round("SW") + 2) % 4,
              sw * n_plaq + 5, pattern="IX")
defects, residual = inject_single_fault(circuit, fault, T)
print("IX after a CNOT        -> defects", defects.tolist(), "residual", residual)

# every single fault creates zero or two defects
histogram = {}
for fault in enumerate_fault_locations(circuit, T):
    d, _ = inject_single_fault(circuit, fault, T)
    histogram[len(d)] = histogram.get(len(d), 0) + 1
print("defect-count histogram over all single faults:", dict(sorted(histogram.items())))

# ---------------------------------------------------------------------------
# The decoding graph: edges are single-fault defect pairs, their priors
# the summed fault probabilities.  A bulk node has 14 neighbors in 7
# antipodal classes.

p = 0.006
lattice = build_3d(code, T, p, "circuit", schedule)
print(f"\n3D lattice at p={p}: {lattice.n_nodes} nodes, {lattice.n_edges()} edges")
print("bulk neighbor classes (delta row, col, t -> prior / p):")
for delta, ratio in bulk_prior_table(lattice):
    print(f"   {delta}: {float(ratio):g}")
total = float(lattice.prior.sum()) + lattice.zero_defect_prob
print(f"probability conservation: edge priors + invisible faults = {total:.6f}")
