"""The four-round triangle readout schedule and its correctness checks.

Every triangle cycles through measure / gate / gate / gate.  The search
fixes the measurement pattern (X-type triangles in rounds 3 and 0,
Z-type in 1 and 2) and looks for CNOT orderings that are consistent (no
qubit does two things in one round) and correct (the circuit can be
deformed, gate by commuting gate, into the ideal two-step readout).
"""

from sscsim.codes import CodeLayout
from sscsim.scheduling import check_consistent, check_correct, find_schedule, make_schedule

schedule = find_schedule()
print(schedule.describe())
print()

for L in range(2, 7):
    print(f"consistent on the full L={L} torus:", check_consistent(schedule, CodeLayout(L, "toric")))
print("correct (every overlapping X/Z triangle pair deformable):", check_correct(schedule))
print("invariant under X/Z exchange (reflection + two-round shift):",
      schedule.is_exchange_symmetric())

# ---------------------------------------------------------------------------
# Counterexamples.  Measuring every kind in the same round would need
# 4 L^2 simultaneous CNOTs on 3 L^2 code qubits:

bad = make_schedule({k: 0 for k in ("SW", "NE", "SE", "NW")},
                    {k: (0, 1, 2) for k in ("SW", "NE", "SE", "NW")})
print("\nall-kinds-measure-together is consistent?",
      check_consistent(bad, CodeLayout(4, "toric")))

# And a consistent schedule can still be incorrect: here the leading
# triangle's last gate grabs the shared vertex exactly when the tailing
# triangle's first gate needs it.

sneaky = make_schedule(
    {"SW": 3, "NE": 0, "SE": 1, "NW": 2},
    {"SW": (0, 1, 2), "SE": (0, 1, 2), "NE": (2, 1, 0), "NW": (2, 1, 0)},
)
print("sneaky schedule consistent?", check_consistent(sneaky, CodeLayout(4, "toric")),
      "correct?", check_correct(sneaky))
