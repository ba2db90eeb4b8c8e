"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The SNR and current sweeps run once per session at full size (200
repetitions per point) and are shared by the criteria that read them.
"""

import itertools
import math
import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from ddtea.bench import bench_speed
from ddtea.cli import main
from ddtea.device import params_for_current, synthetic_default
from ddtea.dynamics import (
    BlowUpError,
    ThieleParams,
    blow_up_time,
    evolve_closed_form,
    rk4_grid,
    steady_state,
)
from ddtea.experiment import TrialConfig, sweep
from ddtea.fitting import fit_logistic, richards

REPS = 200


def nearest(axis, value):
    i = int(np.argmin(np.abs(axis - value)))
    assert abs(axis[i] - value) < 1e-9
    return i


@pytest.fixture(scope="module")
def snr_sweep():
    return sweep(TrialConfig(), "snr", np.linspace(-20.0, 40.0, 25), REPS, threads=0)


@pytest.fixture(scope="module")
def current_sweep():
    return sweep(TrialConfig(), "current", np.linspace(1.05, 2.0, 20), REPS, threads=0)


def test_1_oracle_equivalence(verdict):
    grid = list(
        itertools.product(
            [-2e8, -0.5e8, 0.5e8, 2e8], [-8e8, -1e8], [1, 2, 3], [0.01, 0.1, 0.5], [1e-9, 10e-9, 100e-9]
        )
    )
    a, b, n, s0, dt = (np.array(col, dtype=float) for col in zip(*grid))
    t0 = time.perf_counter()
    oracle = rk4_grid(a, b, n, s0, dt, step_divisor=1e6)
    elapsed = time.perf_counter() - t0
    closed = np.array([evolve_closed_form(ThieleParams(*g[:3]), g[3], g[4]) for g in grid])
    rel = np.abs(closed - oracle) / np.maximum(oracle, 1e-12)
    ok = bool(rel.max() <= 1e-8 and elapsed < 60)
    verdict(1, ok, f"points={len(grid)} max_rel={rel.max():.3g} rk4_seconds={elapsed:.1f}")
    assert ok


def test_2_semigroup_and_fixed_points(verdict):
    rng = np.random.default_rng(2024)
    worst_semigroup = 0.0
    for _ in range(5000):
        sign = rng.choice([-1.0, 1.0], 2)
        a = sign[0] * 10 ** rng.uniform(6, 9)
        b = sign[1] * 10 ** rng.uniform(6, 9)
        n = rng.uniform(0.5, 4)
        s0 = rng.uniform(1e-3, 1)
        t1, t2 = 10 ** rng.uniform(-10, -6, 2)
        p = ThieleParams(a, b, n)
        try:
            direct = evolve_closed_form(p, s0, t1 + t2)
            chained = evolve_closed_form(p, evolve_closed_form(p, s0, t1), t2)
        except BlowUpError:
            continue
        if direct > 1e-250:
            worst_semigroup = max(worst_semigroup, abs(chained - direct) / direct)

    worst_converge = 0.0
    for _ in range(5000):
        n = rng.uniform(0.5, 3)
        a = 10 ** rng.uniform(6, 9)
        s_inf = rng.uniform(0.05, 1.0)
        p = ThieleParams(a, -a / s_inf**n, n)
        s0 = rng.uniform(0.01, 1.0)
        err = abs(evolve_closed_form(p, s0, 40 / (n * a)) - steady_state(p))
        worst_converge = max(worst_converge, err)

    # bisection on the literal radicand (1 + r) exp(-2t) - r with r = s0^n beta/alpha = 1
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if 2 * math.exp(-2 * mid) - 1 > 0 else (lo, mid)
    t_star = blow_up_time(ThieleParams(1, 1, 2), 1.0)
    with pytest.raises(BlowUpError) as info:
        evolve_closed_form(ThieleParams(1, 1, 2), 1.0, 1.0)
    t_err = max(abs(t_star - lo), abs(info.value.t_star - math.log(2) / 2))

    ok = worst_semigroup <= 1e-12 and worst_converge <= 1e-9 and t_err <= 1e-9
    verdict(
        2, ok,
        f"semigroup_rel={worst_semigroup:.3g} converge_abs={worst_converge:.3g} t_star_err={t_err:.3g}",
    )
    assert ok


def test_3_noise_floor(snr_sweep, verdict):
    low = snr_sweep.axis <= -5
    acc = snr_sweep.mean_accuracy[low]
    ok = bool(snr_sweep.valid[low].all() and np.all((acc >= 0.40) & (acc <= 0.62)))
    detail = " ".join(f"{x:g}dB:{y:.3f}" for x, y in zip(snr_sweep.axis[low], acc))
    verdict(3, ok, detail)
    assert ok


def test_4_snr_improvement(snr_sweep, verdict):
    ax, acc = snr_sweep.axis, snr_sweep.mean_accuracy
    gain = acc[nearest(ax, 30.0)] - acc[nearest(ax, -10.0)]
    band = (ax >= -20) & (ax <= 30)
    rho = spearmanr(ax[band], acc[band]).statistic
    ok = bool(gain >= 0.25 and rho >= 0.9)
    verdict(4, ok, f"acc(+30)-acc(-10)={gain:.3f} spearman={rho:.3f}")
    assert ok


def test_5_rmse_explosion(snr_sweep, verdict):
    ax, rmse = snr_sweep.axis, snr_sweep.mean_rmse
    lo, hi = rmse[nearest(ax, -20.0)], rmse[nearest(ax, 30.0)]
    ok = bool(lo >= 2 * hi)
    verdict(5, ok, f"rmse(-20)={lo:.4f} rmse(+30)={hi:.4f} ratio={lo / hi:.3f} (need >= 2)")
    assert ok


def test_6_current_dependence(current_sweep, verdict):
    ax, acc = current_sweep.axis, current_sweep.mean_accuracy
    high, low = acc[nearest(ax, 1.8)], acc[nearest(ax, 1.05)]
    ok = bool(current_sweep.valid.all() and high >= low - 0.02)
    verdict(6, ok, f"acc(1.8)={high:.4f} acc(1.05)={low:.4f} (need acc(1.8) >= acc(1.05) - 0.02)")
    assert ok


def test_7_logistic_fit(verdict):
    x = np.arange(31.0)
    truth = dict(A=0.5, K=1.0, B=0.4, M=10.0, nu=1.0)
    clean = fit_logistic(x, richards(x, **truth))
    worst = max(abs(getattr(clean, k) - v) / abs(v) for k, v in truth.items())
    noisy = fit_logistic(x, richards(x, **truth) + np.random.default_rng(7).normal(0, 0.01, x.size))
    ok = worst <= 0.01 and clean.r_squared >= 0.9999 and noisy.r_squared >= 0.98
    verdict(
        7, ok,
        f"max_param_rel={worst:.3g} r2_clean={clean.r_squared:.6f} r2_noisy={noisy.r_squared:.4f}",
    )
    assert ok


def test_8_speedup(verdict):
    p = params_for_current(synthetic_default(), 1.5)
    r = bench_speed(p, 0.01, 100e-9, 1e-12, closed_evals=100_000, rk4_traces=10)
    ok = r.speedup >= 100 and r.rel_diff <= 1e-8
    verdict(8, ok, f"speedup={r.speedup:.0f} rel_diff={r.rel_diff:.3g}")
    assert ok


def test_9_cli_determinism(tmp_path, verdict):
    base = ["sweep", "--axis", "snr", "--reps", "20", "--seed", "11", "--fit"]
    outputs = {}
    for threads in (1, 4, 16):
        out = tmp_path / f"t{threads}"
        assert main(base + ["--threads", str(threads), "--out", str(out)]) == 0
        outputs[threads] = (out / "sweep.csv").read_bytes()
    replay = tmp_path / "replay"
    assert main(["sweep", "--config", str(tmp_path / "t1" / "manifest.txt"), "--out", str(replay)]) == 0
    same_threads = outputs[1] == outputs[4] == outputs[16]
    same_replay = (replay / "sweep.csv").read_bytes() == outputs[1]
    ok = same_threads and same_replay
    verdict(9, ok, f"threads_identical={same_threads} manifest_replay_identical={same_replay}")
    assert ok
