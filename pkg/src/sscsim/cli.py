"""Command-line entry point wiring all modules together.

One command with subcommands; CSV is the interchange format for tabular
results and JSON for structured dumps.  Every results file is written
together with a run manifest (full configuration echo, seed, version,
timestamps, output digests); re-running a scan from its manifest
reproduces identical failure counts.  The environment variable SSC_SEED
overrides ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .codes import build, distance_bruteforce, validate_code
from .decoder import Decoder
from .framesim import (
    DirectParityCircuit,
    ReadoutCircuit,
    enumerate_fault_locations,
    inject_single_fault,
)
from .hamiltonian import (
    decoupling_search,
    spectrum,
    verify_decoupling,
    verify_ground_energy_numeric,
)
from .montecarlo import (
    FitError,
    RunConfig,
    fit_threshold,
    read_results_csv,
    run,
    write_results_csv,
)
from .scheduling import find_schedule
from .vlattice import VirtualLattice, build_2d, build_3d

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3


class ConfigError(ValueError):
    pass


def _parse_p_list(text: str) -> tuple[float, ...]:
    """Comma list ('0.004,0.005') or range syntax 'start:stop:step'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"bad rate range {text!r}; use start:stop:step")
        start, stop, step = (float(x) for x in parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"bad rate range {text!r}")
        n = int(round((stop - start) / step))
        vals = [start + i * step for i in range(n + 1)]
        return tuple(round(v, 12) for v in vals if v <= stop + 1e-12)
    vals = tuple(float(x) for x in text.split(",") if x.strip())
    if not vals:
        raise ConfigError("empty error-rate list")
    return vals


def _parse_l_list(text: str) -> tuple[int, ...]:
    vals = tuple(int(x) for x in text.split(",") if x.strip())
    if not vals:
        raise ConfigError("empty size list")
    return vals


def _seed(args) -> int:
    env = os.environ.get("SSC_SEED")
    if env is not None:
        return int(env)
    return args.seed


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(path: str, config: dict, outputs: dict[str, str]) -> None:
    manifest = {
        "tool": "sscsim",
        "version": __version__,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "config": config,
        "outputs": {k: _sha256(v) for k, v in outputs.items()},
        "files": outputs,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_build_code(args) -> int:
    code = build(args.L, args.geometry)
    report = validate_code(code)
    out = {
        "L": args.L,
        "geometry": args.geometry,
        "n_qubits": code.layout.n_qubits,
        "counts": report.counts,
        "validation": {"passed": report.passed, "checks": report.checks,
                       "failures": report.failures},
    }
    if args.dump == "json":
        out["qubit_index"] = {
            f"{kind}({r},{c})": i
            for (kind, r, c), i in sorted(
                code.layout.index_map().items(), key=lambda kv: kv[1]
            )
        }
        out["triangles"] = [
            {
                "plaquette": list(t.plaquette),
                "kind": t.kind,
                "qubits": list(t.qubits),
                "pauli_kind": t.pauli_kind,
            }
            for t in code.triangles
        ]
        groups = code.groups
        out["operators"] = {
            "stabilizers_x": [s.to_text() for s in groups.stabilizers_x],
            "stabilizers_z": [s.to_text() for s in groups.stabilizers_z],
            "boundary_stabilizers": [s.to_text() for s in groups.boundary_stabilizers],
            "gauge_x": [s.to_text() for s in groups.gauge_x],
            "gauge_z": [s.to_text() for s in groups.gauge_z],
            "logical_x": [s.to_text() for s in groups.logical_x],
            "logical_z": [s.to_text() for s in groups.logical_z],
        }
    if args.distance:
        out["distance"] = {
            et: distance_bruteforce(code, et) for et in ("X", "Z")
        }
    _emit(out)
    return EXIT_OK if report.passed else 1


def cmd_find_schedule(args) -> int:
    sched = find_schedule()
    if args.dump:
        print(sched.describe())
    _emit(
        {
            "measure_rounds": {k: sched.local[k].measure_round for k in sched.local},
            "cnot_orders": {
                k: list(sched.local[k].cnot_order) for k in sched.local
            },
            "exchange_symmetric": sched.is_exchange_symmetric(),
        }
    )
    return EXIT_OK


def cmd_enumerate_faults(args) -> int:
    code = build(args.L, "toric")
    if args.mode == "circuit":
        circuit = ReadoutCircuit(code, find_schedule())
    else:
        circuit = DirectParityCircuit(code)
    writer = csv.writer(sys.stdout)
    writer.writerow(
        ["fault_id", "kind", "round", "triangle", "qubit", "pattern",
         "defects", "residual_support"]
    )
    for i, f in enumerate(enumerate_fault_locations(circuit, args.T)):
        defects, residual = inject_single_fault(circuit, f, args.T)
        writer.writerow(
            [
                i,
                f.kind,
                f.round,
                f.triangle,
                f.qubit,
                f.pattern,
                ";".join(f"({p},{t})" for p, t in defects.tolist()),
                ";".join(str(q) for q in residual.x_support().tolist()),
            ]
        )
    return EXIT_OK


def _build_lattice(args) -> VirtualLattice:
    code = build(args.L, args.geometry)
    if args.mode == "2d":
        return build_2d(code, p=args.p)
    if args.mode == "circuit":
        return build_3d(code, args.T, args.p, "circuit", find_schedule())
    if args.mode == "direct":
        return build_3d(code, args.T, args.p, "direct")
    raise ConfigError(f"unknown lattice mode {args.mode!r}")


def cmd_dump_lattice(args) -> int:
    lattice = _build_lattice(args)
    writer = csv.writer(sys.stdout)
    writer.writerow(["node_a", "node_b", "prior", "weight", "correction_qubits"])
    for e in range(lattice.n_edges()):
        writer.writerow(
            [
                int(lattice.edges_u[e]),
                int(lattice.edges_v[e]),
                repr(float(lattice.prior[e])),
                repr(float(lattice.weight[e])),
                ";".join(str(q) for q in lattice.edge_correction(e).tolist()),
            ]
        )
    return EXIT_OK


def _load_lattice_csv(path: str) -> VirtualLattice:
    eu, ev, prior, weight, corr = [], [], [], [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            eu.append(int(row["node_a"]))
            ev.append(int(row["node_b"]))
            prior.append(float(row["prior"]))
            weight.append(float(row["weight"]))
            corr.append(
                [int(x) for x in row["correction_qubits"].split(";") if x]
            )
    n_nodes = max(max(eu), max(ev)) + 1
    indptr = np.zeros(len(corr) + 1, dtype=np.int64)
    for i, c in enumerate(corr):
        indptr[i + 1] = indptr[i] + len(c)
    flat = np.array([q for c in corr for q in c], dtype=np.int64)
    return VirtualLattice(
        geometry="unknown",
        mode="file",
        L=0,
        T=0,
        p=0.0,
        n_nodes=n_nodes,
        node_coords=[None] * n_nodes,
        edges_u=np.array(eu, dtype=np.int64),
        edges_v=np.array(ev, dtype=np.int64),
        prior=np.array(prior),
        weight=np.array(weight),
        corr_indptr=indptr,
        corr_qubits=flat,
        fault_counts=np.zeros((len(eu), 3), dtype=np.int64),
    )


def cmd_decode(args) -> int:
    lattice = _load_lattice_csv(args.lattice)
    with open(args.defects) as fh:
        defects = np.array(
            [int(tok) for tok in fh.read().replace(",", " ").split()],
            dtype=np.int64,
        )
    n_code = int(lattice.corr_qubits.max()) + 1 if len(lattice.corr_qubits) else 1
    decoder = Decoder(lattice, n_code)
    corr = decoder.decode(defects)
    writer = csv.writer(sys.stdout)
    writer.writerow(["node_a", "node_b"])
    for u, v in corr.pairs:
        writer.writerow([u, v])
    writer.writerow([])
    writer.writerow(["correction_support"])
    writer.writerow([";".join(map(str, np.flatnonzero(corr.bits).tolist()))])
    return EXIT_OK


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        geometry=args.geometry,
        noise=args.noise,
        L_list=_parse_l_list(args.L),
        p_list=_parse_p_list(args.p),
        trials=args.trials,
        seed=_seed(args),
        T_policy=args.T,
        k_neighbors=args.k_neighbors,
        jobs=args.jobs,
    )


def cmd_run_trials(args) -> int:
    config = _config_from_args(args)
    results = run(config, progress=_progress(args))
    _emit(
        [
            {
                "L": r.L, "T": r.T, "p": r.p, "trials": r.trials,
                "failures": r.failures, "rate": r.rate,
                "ci": [r.ci_low, r.ci_high],
            }
            for r in results
        ]
    )
    return EXIT_OK


def _progress(args):
    if getattr(args, "quiet", False):
        return None
    return lambda msg: print(msg, file=sys.stderr, flush=True)


def cmd_threshold_scan(args) -> int:
    if not args.from_manifest and (args.L is None or args.p is None):
        raise ConfigError("threshold-scan needs --L and --p (or --from-manifest)")
    if args.from_manifest:
        with open(args.from_manifest) as fh:
            manifest = json.load(fh)
        cfg_dict = manifest["config"]
        config = RunConfig(
            geometry=cfg_dict["geometry"],
            noise=cfg_dict["noise"],
            L_list=tuple(cfg_dict["L_list"]),
            p_list=tuple(cfg_dict["p_list"]),
            trials=cfg_dict["trials"],
            seed=cfg_dict["seed"],
            T_policy=cfg_dict["T_policy"],
            k_neighbors=cfg_dict.get("k_neighbors", 24),
            jobs=args.jobs,
        )
    else:
        config = _config_from_args(args)
    results = run(config, progress=_progress(args))
    out = args.out
    write_results_csv(out, results)
    cfg_echo = {
        "geometry": config.geometry,
        "noise": config.noise,
        "L_list": list(config.L_list),
        "p_list": list(config.p_list),
        "trials": config.trials,
        "seed": config.seed,
        "T_policy": config.T_policy,
        "k_neighbors": config.k_neighbors,
    }
    _write_manifest(out + ".manifest.json", cfg_echo, {"results": out})
    if args.from_manifest and args.check:
        with open(args.from_manifest) as fh:
            old = json.load(fh)
        same = old["outputs"]["results"] == _sha256(out)
        _emit({"reproduced": same})
        return EXIT_OK if same else 1
    return EXIT_OK


def cmd_fit_threshold(args) -> int:
    points = read_results_csv(args.results)
    fit = fit_threshold(points)
    _emit(
        {
            "p_th": fit.p_th,
            "nu": fit.nu,
            "coefficients": {"a": fit.coeffs[0], "b": fit.coeffs[1], "c": fit.coeffs[2]},
            "rms_residual": fit.rms_residual,
            "residuals": fit.residuals.tolist(),
            "crossings": fit.crossings,
        }
    )
    return EXIT_OK


def cmd_hamiltonian_spectrum(args) -> int:
    s = spectrum(args.L, max_levels=args.levels)
    out = {
        "L": s.L,
        "ground_energy": s.ground_energy,
        "ground_degeneracy": s.ground_degeneracy,
        "gap_gauge": s.gap_gauge,
        "gap_syndrome": s.gap_syndrome,
        "levels": [{"energy": e, "degeneracy": d} for e, d in s.levels],
    }
    if args.numeric and args.L == 2:
        out["numeric_ground_energy"] = verify_ground_energy_numeric(2)
    _emit(out)
    return EXIT_OK


def cmd_decouple_search(args) -> int:
    circuit = decoupling_search(L=args.L)
    report = verify_decoupling(circuit, args.L)
    out = {
        "rounds": [list(r) for r in circuit.rounds],
        "verification": {
            "stabilizer_weights_all_4": all(w == 4 for w in report.stabilizer_weights),
            "images_commute": report.images_commute,
            "gauge_images_weight1": report.gauge_images_weight1,
            "gauge_pairs_share_qubit": report.gauge_pairs_share_qubit,
            "stabilizers_avoid_gauge_qubits": report.stabilizers_avoid_gauge_qubits,
            "passed": report.passed,
        },
    }
    if args.dump:
        code = build(args.L, "toric")
        layout = code.layout
        n = layout.n_qubits
        table = {}
        for name, op in (
            ("stabilizer_x(0,0)", code.groups.stabilizers_x[0]),
            ("stabilizer_z(0,0)", code.groups.stabilizers_z[0]),
            ("gauge_x(0,0)", code.triangle(0, 0, "SW").operator(n)),
            ("gauge_z(0,0)", code.triangle(0, 0, "SE").operator(n)),
        ):
            table[name] = circuit.conjugate(op, layout).to_text()
        out["conjugated_operators"] = table
    _emit(out)
    return EXIT_OK if report.passed else 1


# ---------------------------------------------------------------------------


def _add_scan_args(sp, default_trials: int, required: bool = True):
    sp.add_argument("--geometry", default="toric", choices=["toric", "planar"])
    sp.add_argument(
        "--noise",
        default="circuit",
        choices=["code-capacity", "circuit", "direct-parity"],
    )
    sp.add_argument("--L", required=required, help="comma list of lattice sizes")
    sp.add_argument(
        "--p", required=required, help="error rates: comma list or start:stop:step"
    )
    sp.add_argument("--T", default="L", help="rounds of extraction ('L' or integer)")
    sp.add_argument("--trials", type=int, default=default_trials)
    sp.add_argument("--seed", type=int, default=2024)
    sp.add_argument("--k-neighbors", type=int, default=24)
    sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--quiet", action="store_true")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sscsim",
        description="Subsystem surface codes with three-qubit checks: "
        "build, schedule, simulate, decode, analyze.",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("build-code", help="construct and validate a code")
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--geometry", default="toric", choices=["toric", "planar"])
    sp.add_argument("--dump", choices=["json", "none"], default="none")
    sp.add_argument("--distance", action="store_true",
                    help="include the brute-force distance (small L only)")
    sp.set_defaults(func=cmd_build_code)

    sp = sub.add_parser("find-schedule", help="search the readout schedule")
    sp.add_argument("--dump", action="store_true")
    sp.set_defaults(func=cmd_find_schedule)

    sp = sub.add_parser("enumerate-faults", help="sweep all single faults")
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--T", type=int, required=True)
    sp.add_argument("--mode", default="circuit", choices=["circuit", "direct"])
    sp.set_defaults(func=cmd_enumerate_faults)

    sp = sub.add_parser("dump-lattice", help="emit a virtual lattice as CSV")
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--T", type=int, default=4)
    sp.add_argument("--p", type=float, default=0.006)
    sp.add_argument("--geometry", default="toric", choices=["toric", "planar"])
    sp.add_argument("--mode", default="circuit", choices=["2d", "circuit", "direct"])
    sp.add_argument("--format", default="csv", choices=["csv"])
    sp.set_defaults(func=cmd_dump_lattice)

    sp = sub.add_parser("decode", help="decode a defect file on a lattice file")
    sp.add_argument("--lattice", required=True)
    sp.add_argument("--defects", required=True)
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("run-trials", help="Monte Carlo run, JSON summary")
    _add_scan_args(sp, default_trials=1000)
    sp.set_defaults(func=cmd_run_trials)

    sp = sub.add_parser("threshold-scan", help="Monte Carlo scan to CSV + manifest")
    _add_scan_args(sp, default_trials=10_000, required=False)
    sp.add_argument("--out", required=True)
    sp.add_argument("--from-manifest", default=None,
                    help="rerun the configuration stored in a manifest")
    sp.add_argument("--check", action="store_true",
                    help="with --from-manifest: verify identical output digest")
    sp.set_defaults(func=cmd_threshold_scan)

    sp = sub.add_parser("fit-threshold", help="finite-size scaling fit of a CSV")
    sp.add_argument("results")
    sp.set_defaults(func=cmd_fit_threshold)

    sp = sub.add_parser("hamiltonian-spectrum", help="exact low-lying spectrum")
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--levels", type=int, default=6)
    sp.add_argument("--numeric", action="store_true",
                    help="cross-check the ground energy numerically (L=2)")
    sp.set_defaults(func=cmd_hamiltonian_spectrum)

    sp = sub.add_parser("decouple-search", help="find the gauge-decoupling circuit")
    sp.add_argument("--L", type=int, default=4)
    sp.add_argument("--dump", action="store_true")
    sp.set_defaults(func=cmd_decouple_search)

    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, FitError) as exc:
        json.dump({"error": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        json.dump({"error": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
