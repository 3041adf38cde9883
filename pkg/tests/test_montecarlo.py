"""Tests of trial orchestration, intervals and the scaling fit."""

import numpy as np
import pytest

from sscsim.montecarlo import (
    FitError,
    ResultPoint,
    RunConfig,
    crossing_count,
    fit_threshold,
    read_results_csv,
    run,
    wilson_interval,
    write_results_csv,
)


def _synthetic_points(pth, nu, a=0.1, b=6.0, c=40.0, sizes=(8, 12, 16), n_p=8,
                      span=0.3):
    pts = []
    for L in sizes:
        for p in np.linspace(pth * (1 - span), pth * (1 + span), n_p):
            u = (p - pth) * L ** (1.0 / nu)
            y = a + b * u + c * u * u
            pts.append(
                ResultPoint("toric", "circuit", L, L, float(p), 10**9,
                            int(round(y * 1e9)), y, y, y)
            )
    return pts


def test_wilson_interval_edges():
    lo, hi = wilson_interval(0, 1000)
    assert lo == 0.0 and 0 < hi < 0.01
    lo, hi = wilson_interval(1000, 1000)
    assert hi == 1.0 and lo > 0.99
    lo, hi = wilson_interval(500, 1000)
    assert lo < 0.5 < hi


@pytest.mark.parametrize("pth,nu", [(0.0063, 1.36), (0.065, 1.0), (0.0095, 1.9)])
def test_fit_recovers_planted_parameters(pth, nu):
    fit = fit_threshold(_synthetic_points(pth, nu))
    assert abs(fit.p_th - pth) < 1e-6
    assert abs(fit.nu - nu) < 1e-4
    assert fit.rms_residual < 1e-9


def test_fit_requires_enough_data():
    pts = _synthetic_points(0.006, 1.3, sizes=(8, 12))
    with pytest.raises(FitError):
        fit_threshold(pts)


def test_fit_reports_missing_crossing():
    # strictly ordered curves with no crossing in range
    pts = []
    for L in (8, 12, 16):
        for p in np.linspace(0.001, 0.002, 6):
            y = 0.1 * L / 8 + p  # larger sizes strictly worse everywhere
            pts.append(ResultPoint("toric", "circuit", L, L, float(p), 1000,
                                   int(y * 1000), y, y, y))
    with pytest.raises(FitError):
        fit_threshold(pts)


def test_crossing_count():
    pts = _synthetic_points(0.0063, 1.3)
    assert crossing_count(pts, 16, 12) == 1


def test_zero_rate_at_zero_noise():
    cfg = RunConfig(noise="code-capacity", L_list=(3,), p_list=(0.0,),
                    trials=50, seed=1)
    res = run(cfg)
    assert res[0].failures == 0


def test_high_rate_plateau_above_threshold():
    # far above threshold the decoder is guessing among the four cosets
    cfg = RunConfig(noise="code-capacity", L_list=(8,), p_list=(0.25,),
                    trials=400, seed=9)
    res = run(cfg)
    assert res[0].rate > 0.5


def test_run_is_deterministic():
    cfg = RunConfig(noise="code-capacity", L_list=(4,), p_list=(0.06,),
                    trials=150, seed=5)
    a = run(cfg)
    b = run(cfg)
    assert [r.failures for r in a] == [r.failures for r in b]


def test_parallel_jobs_reproduce_serial_counts():
    base = dict(noise="code-capacity", L_list=(4,), p_list=(0.06, 0.08),
                trials=120, seed=7)
    serial = run(RunConfig(**base, jobs=1))
    parallel = run(RunConfig(**base, jobs=2))
    assert [r.failures for r in serial] == [r.failures for r in parallel]


def test_csv_roundtrip(tmp_path):
    cfg = RunConfig(noise="code-capacity", L_list=(3,), p_list=(0.05,),
                    trials=80, seed=2)
    res = run(cfg)
    path = tmp_path / "res.csv"
    write_results_csv(str(path), res)
    back = read_results_csv(str(path))
    assert back[0].failures == res[0].failures
    assert back[0].p == res[0].p
    assert back[0].rate == res[0].rate


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(noise="circuit", p_list=())
    with pytest.raises(ValueError):
        RunConfig(noise="circuit", geometry="planar")
    with pytest.raises(ValueError):
        RunConfig(noise="nope")
    with pytest.raises(ValueError):
        RunConfig(trials=0)


def test_circuit_and_direct_smoke():
    for noise in ("circuit", "direct-parity"):
        cfg = RunConfig(noise=noise, L_list=(3,), p_list=(0.004,),
                        trials=40, seed=3)
        res = run(cfg)
        assert res[0].trials == 40
        assert 0 <= res[0].failures <= 40
