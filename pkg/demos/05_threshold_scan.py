"""Small threshold scans of the three noise models with scaling-form fits.

A desk-scale version of the production scans: fewer trials and sizes so
the whole script runs in roughly ten minutes on one core.  The full runs
(10^4 trials per point) live in the acceptance suite and the CLI; see
README for the measured thresholds.
"""

from sscsim.montecarlo import RunConfig, fit_threshold, run, write_results_csv


def scan(noise, L_list, p_list, trials, seed, label):
    cfg = RunConfig(geometry="toric", noise=noise, L_list=L_list,
                    p_list=p_list, trials=trials, seed=seed)
    print(f"\n== {label} ==")
    res = run(cfg, progress=lambda msg: print("  " + msg))
    write_results_csv(f"demo_scan_{noise}.csv", res)
    fit = fit_threshold(res)
    print(f"   fitted threshold p_th = {fit.p_th:.4f}, exponent nu = {fit.nu:.2f}, "
          f"crossings = {fit.crossings}")
    return fit


# noiseless syndrome extraction: independent bit flips only
scan(
    "code-capacity",
    (8, 12, 16),
    tuple(round(0.050 + 0.005 * i, 4) for i in range(7)),
    trials=1500,
    seed=11,
    label="code capacity (noiseless syndromes)",
)

# the scheduled CNOT extraction circuit with depolarizing gate noise
scan(
    "circuit",
    (6, 8, 12),
    tuple(round(0.004 + 0.0005 * i, 5) for i in range(9)),
    trials=800,
    seed=12,
    label="circuit-based extraction",
)

# direct three-qubit parity measurements
scan(
    "direct-parity",
    (6, 8, 12),
    tuple(round(0.008 + 0.0015 * i, 5) for i in range(6)),
    trials=800,
    seed=13,
    label="direct parity measurements",
)
