"""Monte Carlo orchestration: trials, failure rates, threshold fits.

A run sweeps lattice sizes and error rates for one noise model.  Each
point builds its code, virtual lattice and decoder once, then runs
independent trials.  Trial randomness descends from a counter-based
split of the master seed (seed, point index, trial index), so results
are reproducible and independent of worker scheduling or chunking.

Threshold estimation fits the standard finite-size scaling ansatz

    rate ~ a + b u + c u^2,   u = (p - p_th) L^(1/nu)

to the scanned points by damped (Levenberg-Marquardt style) least
squares with analytic derivatives, seeded by the visual crossing of the
two largest sizes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .codes import Code, build
from .decoder import Decoder, judge_bits
from .framesim import DirectParityCircuit, ReadoutCircuit, simulate_trial
from .noise import NoiseModel, sample_flip_mask
from .scheduling import Schedule, find_schedule
from .vlattice import (
    build_2d,
    build_3d,
    defects_from_history,
    defects_from_syndrome,
)


@dataclass(frozen=True)
class RunConfig:
    geometry: str = "toric"
    noise: str = "circuit"  # code-capacity | circuit | direct-parity
    L_list: tuple[int, ...] = (8, 12, 16)
    p_list: tuple[float, ...] = (0.004, 0.006, 0.008)
    trials: int = 10_000
    seed: int = 2024
    T_policy: str = "L"  # "L" or an integer literal
    k_neighbors: int = 24
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not self.p_list:
            raise ValueError("empty error-rate list")
        if not self.L_list:
            raise ValueError("empty size list")
        for p in self.p_list:
            NoiseModel(self.noise, p)  # validates variant and range
        if self.noise != "code-capacity" and self.geometry != "toric":
            raise ValueError("noisy extraction runs on the toric geometry")

    def rounds_for(self, L: int) -> int:
        if self.T_policy == "L":
            return L
        return int(self.T_policy)


@dataclass
class ResultPoint:
    geometry: str
    noise: str
    L: int
    T: int
    p: float
    trials: int
    failures: int
    rate: float
    ci_low: float
    ci_high: float


def wilson_interval(failures: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """95% Wilson score interval; well behaved at low failure counts."""
    if trials == 0:
        return (0.0, 1.0)
    phat = failures / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (
        z
        * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
        / denom
    )
    return (max(0.0, center - half), min(1.0, center + half))


def _trial_rng(seed: int, point_index: int, trial: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((seed, point_index, trial)))
    )


class _PointContext:
    """Everything one (L, p) point needs to run trials."""

    def __init__(self, config: RunConfig, L: int, p: float, schedule: Schedule | None):
        self.config = config
        self.noise = NoiseModel(config.noise, p)
        self.code = build(L, config.geometry)
        layout = self.code.layout
        self.n_code = layout.n_qubits
        self.T = config.rounds_for(L)
        if config.noise == "code-capacity":
            self.circuit = None
            lattice = build_2d(self.code, p=p)
            checks = self.code.groups.checks_of_type("Z")
            self.zchecks = np.zeros((len(checks), self.n_code), dtype=np.uint8)
            for i, s in enumerate(checks):
                self.zchecks[i, s.z_support()] = 1
        elif config.noise == "circuit":
            self.circuit = ReadoutCircuit(self.code, schedule)
            lattice = build_3d(self.code, self.T, p, "circuit", schedule)
        else:
            self.circuit = DirectParityCircuit(self.code)
            lattice = build_3d(self.code, self.T, p, "direct")
        self.decoder = Decoder(lattice, self.n_code, config.k_neighbors)
        logs = self.code.groups.logical_z
        self.zlogs = np.zeros((len(logs), self.n_code), dtype=np.uint8)
        for i, s in enumerate(logs):
            self.zlogs[i, s.z_support()] = 1

    def run_trial(self, rng: np.random.Generator) -> bool:
        """Returns True on decoding failure."""
        if self.circuit is None:
            err = sample_flip_mask(self.n_code, self.noise.p, rng)
            syn = (self.zchecks @ err) & 1
            corr = self.decoder.decode(defects_from_syndrome(syn))
            return not judge_bits(err, corr.bits, self.zlogs)
        rec = simulate_trial(self.circuit, self.noise, self.T, rng)
        corr = self.decoder.decode(defects_from_history(rec.syndromes_z))
        rec.correction_x = corr.bits
        rec.success = judge_bits(rec.accumulated_x, corr.bits, self.zlogs)
        return not rec.success


def run(
    config: RunConfig,
    progress: Callable[[str], None] | None = None,
) -> list[ResultPoint]:
    """Execute the full scan; deterministic for a given config and seed."""
    schedule = find_schedule() if config.noise == "circuit" else None
    results: list[ResultPoint] = []
    point_index = 0
    for L in config.L_list:
        for p in config.p_list:
            ctx = _PointContext(config, L, p, schedule)
            failures = _run_point(ctx, config, point_index, progress)
            ci_low, ci_high = wilson_interval(failures, config.trials)
            results.append(
                ResultPoint(
                    geometry=config.geometry,
                    noise=config.noise,
                    L=L,
                    T=ctx.T if ctx.circuit is not None else 0,
                    p=p,
                    trials=config.trials,
                    failures=failures,
                    rate=failures / config.trials,
                    ci_low=ci_low,
                    ci_high=ci_high,
                )
            )
            if progress is not None:
                progress(
                    f"L={L} p={p:g}: {failures}/{config.trials} failures "
                    f"({failures / config.trials:.4f})"
                )
            point_index += 1
    return results


_FORK_CTX: "_PointContext | None" = None  # inherited by forked pool workers


def _run_point(
    ctx: _PointContext,
    config: RunConfig,
    point_index: int,
    progress: Callable[[str], None] | None,
) -> int:
    failures = 0
    if config.jobs > 1:
        # workers inherit the point context through fork, so the cached
        # distance matrix is shared copy-on-write instead of pickled
        import multiprocessing as mp

        global _FORK_CTX
        _FORK_CTX = ctx
        chunks = [c for c in np.array_split(np.arange(config.trials), config.jobs * 4) if len(c)]
        mp_ctx = mp.get_context("fork")
        with mp_ctx.Pool(processes=config.jobs) as pool:
            parts = pool.starmap(
                _chunk_worker,
                [(config.seed, point_index, chunk) for chunk in chunks],
            )
        _FORK_CTX = None
        return int(sum(parts))
    for t in range(config.trials):
        if ctx.run_trial(_trial_rng(config.seed, point_index, t)):
            failures += 1
        if progress is not None and (t + 1) % 2000 == 0:
            progress(f"  ... {t + 1}/{config.trials} trials")
    return failures


def _chunk_worker(seed: int, point_index: int, trials) -> int:
    failures = 0
    for t in trials:
        if _FORK_CTX.run_trial(_trial_rng(seed, point_index, int(t))):
            failures += 1
    return failures


# ---------------------------------------------------------------------------
# finite-size scaling fit


@dataclass
class ThresholdFit:
    p_th: float
    nu: float
    coeffs: tuple[float, float, float]
    residuals: np.ndarray
    rms_residual: float
    crossings: int


class FitError(RuntimeError):
    pass


def _arrays(points: Sequence[ResultPoint]):
    L = np.array([pt.L for pt in points], dtype=np.float64)
    p = np.array([pt.p for pt in points], dtype=np.float64)
    y = np.array([pt.rate for pt in points], dtype=np.float64)
    sigma = np.array(
        [
            max(
                math.sqrt(max(pt.rate * (1 - pt.rate), 1e-12) / max(pt.trials, 1)),
                0.5 / max(pt.trials, 1),
            )
            for pt in points
        ],
        dtype=np.float64,
    )
    return L, p, y, sigma


def crossing_count(points: Sequence[ResultPoint], La: int, Lb: int) -> int:
    """Sign changes of rate(La) - rate(Lb) across the common p grid."""
    ra = {pt.p: pt.rate for pt in points if pt.L == La}
    rb = {pt.p: pt.rate for pt in points if pt.L == Lb}
    diffs = [ra[p] - rb[p] for p in sorted(set(ra) & set(rb))]
    signs = [d for d in diffs if d != 0.0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def _initial_crossing(points: Sequence[ResultPoint]) -> float:
    sizes = sorted({pt.L for pt in points})
    if len(sizes) < 2:
        raise FitError("need at least two lattice sizes")
    La, Lb = sizes[-1], sizes[-2]
    ra = {pt.p: pt.rate for pt in points if pt.L == La}
    rb = {pt.p: pt.rate for pt in points if pt.L == Lb}
    ps = sorted(set(ra) & set(rb))
    diff = [ra[p] - rb[p] for p in ps]
    for i in range(len(diff) - 1):
        if diff[i] == 0.0:
            return ps[i]
        if (diff[i] < 0) != (diff[i + 1] < 0):
            frac = abs(diff[i]) / (abs(diff[i]) + abs(diff[i + 1]))
            return ps[i] + frac * (ps[i + 1] - ps[i])
    raise FitError(
        "no crossing of the two largest sizes inside the scanned range"
    )


def fit_threshold(
    points: Sequence[ResultPoint],
    scaling_fraction: float = 0.6,
    refinements: int = 2,
) -> ThresholdFit:
    """Fit the quadratic scaling ansatz; returns threshold and exponent.

    Requires at least three sizes and four rates spanning a crossing.  The
    quadratic form is only the leading behavior near the crossing, so
    after a first fit over all points the fit is refined on the scaling
    window: the ``scaling_fraction`` of points with the smallest rescaled
    deviation |(p - p_th) L^(1/nu)|, re-seeded from the previous estimate.
    Data generated exactly from the ansatz is recovered to machine
    precision regardless of the window.
    """
    fit = _fit_core(points, None)
    for _ in range(max(0, refinements)):
        L, p, _, _ = _arrays(points)
        u = np.abs((p - fit.p_th) * L ** (1.0 / fit.nu))
        cut = np.quantile(u, min(1.0, scaling_fraction))
        sel = [pt for pt, ui in zip(points, u) if ui <= cut + 1e-300]
        if len({pt.L for pt in sel}) < 3 or len({pt.p for pt in sel}) < 4:
            break
        fit = _fit_core(sel, (fit.p_th, fit.nu))
    # crossing bookkeeping always refers to the full scan
    sizes = sorted({pt.L for pt in points})
    fit.crossings = crossing_count(points, sizes[-1], sizes[-2])
    return fit


def _fit_core(
    points: Sequence[ResultPoint], theta0: tuple[float, float] | None
) -> ThresholdFit:
    sizes = sorted({pt.L for pt in points})
    rates = sorted({pt.p for pt in points})
    if len(sizes) < 3 or len(rates) < 4:
        raise FitError("need >= 3 sizes and >= 4 error rates for the scaling fit")
    L, p, y, sigma = _arrays(points)

    def design(p_th: float, nu: float) -> np.ndarray:
        u = (p - p_th) * L ** (1.0 / nu)
        return np.stack([np.ones_like(u), u, u * u], axis=1)

    def projected_residual(theta: np.ndarray):
        # the quadratic coefficients are linear: solve them exactly and
        # keep only (p_th, nu) as nonlinear parameters
        A = design(theta[0], theta[1]) / sigma[:, None]
        beta, *_ = np.linalg.lstsq(A, y / sigma, rcond=None)
        return (y / sigma - A @ beta), beta

    # robust start: visual crossing of the two largest sizes, then a local
    # grid over the exponent; refinement passes reuse the previous estimate
    if theta0 is None:
        p0 = _initial_crossing(points)
        nu_grid = np.linspace(0.6, 2.4, 10)
    else:
        p0 = theta0[0]
        nu_grid = np.linspace(max(0.3, theta0[1] - 0.5), theta0[1] + 0.5, 7)
    span = (rates[-1] - rates[0]) or max(p0, 1e-3)
    best = None
    for pg in np.linspace(p0 - 0.2 * span, p0 + 0.2 * span, 9):
        for ng in nu_grid:
            r, _ = projected_residual(np.array([pg, ng]))
            c = float(r @ r)
            if best is None or c < best[0]:
                best = (c, pg, ng)
    theta = np.array([best[1], best[2]])

    # damped Gauss-Newton on the projected residual
    r, beta = projected_residual(theta)
    cost = float(r @ r)
    lam = 1e-6
    scale = np.array([span, 1.0])
    for _ in range(120):
        J = np.empty((len(y), 2))
        for k in range(2):
            h = 1e-7 * scale[k]
            rp, _ = projected_residual(theta + h * np.eye(2)[k])
            J[:, k] = (rp - r) / h
        g = J.T @ r
        H = J.T @ J
        moved = False
        for _inner in range(50):
            try:
                step = np.linalg.solve(H + lam * np.eye(2), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            cand = theta + step
            if not 0.05 < cand[1] < 20:
                lam *= 10
                continue
            r_new, beta_new = projected_residual(cand)
            cost_new = float(r_new @ r_new)
            if cost_new <= cost * (1 + 1e-15):
                improved = cost - cost_new
                theta, r, beta, cost = cand, r_new, beta_new, cost_new
                lam = max(lam * 0.25, 1e-14)
                moved = True
                break
            lam *= 10
        if not moved or np.abs(step / scale).max() < 1e-11:
            break

    A = design(theta[0], theta[1])
    residuals = y - A @ beta
    return ThresholdFit(
        p_th=float(theta[0]),
        nu=float(theta[1]),
        coeffs=(float(beta[0]), float(beta[1]), float(beta[2])),
        residuals=residuals,
        rms_residual=float(np.sqrt(residuals @ residuals / len(residuals))),
        crossings=crossing_count(points, sizes[-1], sizes[-2])
        if len(sizes) >= 2
        else 0,
    )


# ---------------------------------------------------------------------------
# CSV interchange


CSV_COLUMNS = (
    "geometry",
    "noise",
    "L",
    "T",
    "p",
    "trials",
    "failures",
    "rate",
    "ci_low",
    "ci_high",
)


def write_results_csv(path: str, points: Iterable[ResultPoint]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for pt in points:
            w.writerow(
                [
                    pt.geometry,
                    pt.noise,
                    int(pt.L),
                    int(pt.T),
                    repr(float(pt.p)),
                    int(pt.trials),
                    int(pt.failures),
                    repr(float(pt.rate)),
                    repr(float(pt.ci_low)),
                    repr(float(pt.ci_high)),
                ]
            )


def read_results_csv(path: str) -> list[ResultPoint]:
    out: list[ResultPoint] = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                ResultPoint(
                    geometry=row["geometry"],
                    noise=row["noise"],
                    L=int(row["L"]),
                    T=int(row["T"]),
                    p=float(row["p"]),
                    trials=int(row["trials"]),
                    failures=int(row["failures"]),
                    rate=float(row["rate"]),
                    ci_low=float(row["ci_low"]),
                    ci_high=float(row["ci_high"]),
                )
            )
    return out
