"""Trial pipeline, repeated-trial sweeps and deterministic seed derivation.

Every trial draws its randomness from ``mix(master_seed, point, rep)``::

    splitmix64(x) = finalizer of (x + 0x9E3779B97F4A7C15) mod 2**64 with
        z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
        z ^= z >> 27; z *= 0x94D049BB133111EB
        z ^= z >> 31
    mix(m, p, r)  = splitmix64(splitmix64(splitmix64(m) ^ p) ^ r)

and each consumer takes its own stream ``splitmix64(trial_seed ^ k)`` with
k = 1 (task order), 2 (noise), 3 (mask, only when masks are resampled).
Results therefore do not depend on scheduling or thread count.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .device import DeviceModel, synthetic_default
from .readout import Metrics, add_bias, evaluate, train_ridge
from .reservoir import ReservoirConfig, collect_states, make_mask
from .signals import TaskConfig, add_noise, generate_task

MASK64 = 0xFFFFFFFFFFFFFFFF
STREAM_TASK, STREAM_NOISE, STREAM_MASK = 1, 2, 3


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix(master: int, point: int, rep: int) -> int:
    return splitmix64(splitmix64(splitmix64(master & MASK64) ^ point) ^ rep)


def stream(trial_seed: int, k: int) -> int:
    return splitmix64(trial_seed ^ k)


class TrialError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")


@dataclass(frozen=True)
class TrialConfig:
    task: TaskConfig = field(default_factory=TaskConfig)
    rc: ReservoirConfig = field(default_factory=ReservoirConfig)
    model: DeviceModel = field(default_factory=synthetic_default)
    snr_db: float | None = None
    lam: float | None = None
    split: float = 0.8
    washout: int = 50
    master_seed: int = 0
    resample_mask: bool = False

    def __post_init__(self):
        if not 0 < self.split < 1:
            raise ValueError(f"split must lie in (0, 1), got {self.split}")
        total = self.task.segments * self.task.samples_per_period
        if self.washout < 0 or self.washout + 10 > total:
            raise ValueError(f"washout {self.washout} leaves fewer than 10 of {total} samples")
        if self.snr_db is not None and not math.isfinite(self.snr_db):
            raise ValueError(f"snr_db must be finite or None, got {self.snr_db}")
        if self.lam is not None and not self.lam >= 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")


def scale_input(u: np.ndarray) -> np.ndarray:
    """Shrink the sequence to unit peak if noise pushed it beyond [-1, 1]."""
    peak = float(np.max(np.abs(u)))
    return u / peak if peak > 1.0 else u


def run_trial(c: TrialConfig, rep_index: int, point_index: int = 0) -> Metrics:
    """One full pass: task, noise, reservoir, washout, split, ridge, score."""
    seed = mix(c.master_seed, point_index, rep_index)
    stage = "signal"
    try:
        sig = generate_task(replace(c.task, seed=stream(seed, STREAM_TASK)))
        if c.snr_db is not None:
            stage = "noise"
            sig = add_noise(sig, c.snr_db, stream(seed, STREAM_NOISE))
        stage = "reservoir"
        mask_seed = stream(seed, STREAM_MASK) if c.resample_mask else c.rc.mask_seed
        mask = make_mask(c.rc.n_virtual, mask_seed)
        c.rc.check_against(c.model)
        X = add_bias(collect_states(c.model, c.rc, scale_input(sig.samples), mask))
        y = sig.labels.astype(float)
        X, y = X[c.washout :], y[c.washout :]
        n_train = int(c.split * len(y))
        if n_train < 1 or n_train >= len(y):
            raise ValueError(f"split {c.split} leaves an empty train or test set")
        stage = "readout"
        w = train_ridge(X[:n_train], y[:n_train], c.lam)
        return evaluate(w, X[n_train:], y[n_train:])
    except Exception as exc:
        raise TrialError(stage, exc) from exc


@dataclass
class SweepResult:
    axis_name: str
    axis: np.ndarray
    mean_accuracy: np.ndarray
    std_accuracy: np.ndarray
    mean_rmse: np.ndarray
    std_rmse: np.ndarray
    n_reps: int
    valid: np.ndarray
    errors: dict[int, str] = field(default_factory=dict)

    def to_csv(self, comments: list[str] | None = None) -> str:
        buf = io.StringIO()
        buf.write("axis,mean_accuracy,std_accuracy,mean_rmse,std_rmse,n_reps,valid\n")
        for i in range(len(self.axis)):
            vals = (
                self.axis[i],
                self.mean_accuracy[i],
                self.std_accuracy[i],
                self.mean_rmse[i],
                self.std_rmse[i],
            )
            buf.write(",".join(format(float(v), ".17g") for v in vals))
            buf.write(f",{self.n_reps},{int(self.valid[i])}\n")
        for line in comments or ():
            buf.write(f"# {line}\n")
        return buf.getvalue()


def point_config(c: TrialConfig, axis: str, value: float) -> TrialConfig:
    if axis == "current":
        return replace(c, rc=replace(c.rc, zeta_bias=float(value)))
    if axis == "snr":
        return replace(c, snr_db=float(value))
    raise ValueError(f"unknown sweep axis {axis!r}; expected 'current' or 'snr'")


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get("DDTEA_THREADS", "1"))
    if threads < 0:
        raise ValueError(f"threads must be >= 0, got {threads}")
    return threads or (os.cpu_count() or 1)


def _sample_std(a: np.ndarray) -> float:
    return float(np.std(a, ddof=1)) if len(a) > 1 else 0.0


def sweep(
    c: TrialConfig, axis: str, values, n_reps: int = 200, threads: int | None = None
) -> SweepResult:
    """Run ``n_reps`` trials per axis value; failed points are marked invalid."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("sweep needs at least one axis value")
    if n_reps < 1:
        raise ValueError(f"n_reps must be >= 1, got {n_reps}")
    configs = [point_config(c, axis, v) for v in values]

    def work(item):
        p, r = item
        try:
            m = run_trial(configs[p], r, p)
            return m.accuracy, m.rmse, None
        except TrialError as exc:
            return math.nan, math.nan, str(exc)

    items = [(p, r) for p in range(len(values)) for r in range(n_reps)]
    n_threads = resolve_threads(threads)
    if n_threads == 1:
        results = list(map(work, items))
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(work, items, chunksize=max(1, n_reps // 4)))

    acc = np.array([r[0] for r in results]).reshape(len(values), n_reps)
    rmse = np.array([r[1] for r in results]).reshape(len(values), n_reps)
    errors = {}
    for (p, _), res in zip(items, results):
        if res[2] is not None and p not in errors:
            errors[p] = res[2]
    valid = np.array([p not in errors for p in range(len(values))])
    nan = np.full(len(values), math.nan)
    out = SweepResult(axis, values, nan.copy(), nan.copy(), nan.copy(), nan.copy(), n_reps, valid, errors)
    for p in np.flatnonzero(valid):
        out.mean_accuracy[p] = float(np.mean(acc[p]))
        out.std_accuracy[p] = _sample_std(acc[p])
        out.mean_rmse[p] = float(np.mean(rmse[p]))
        out.std_rmse[p] = _sample_std(rmse[p])
    return out
