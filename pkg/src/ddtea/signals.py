"""Sine/square classification task and input-referred white Gaussian noise."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace

import numpy as np

SINE, SQUARE = 0, 1


def philox(seed: int) -> np.random.Generator:
    """Counter-based generator keyed by a 64-bit seed (no global state)."""
    return np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF))


@dataclass(frozen=True)
class TaskConfig:
    segments: int = 100
    samples_per_period: int = 12
    seed: int = 0
    class_balance: float = 0.5

    def __post_init__(self):
        if self.segments < 1:
            raise ValueError(f"segments must be >= 1, got {self.segments}")
        if self.samples_per_period < 2:
            raise ValueError(f"samples_per_period must be >= 2, got {self.samples_per_period}")
        if not 0.0 <= self.class_balance <= 1.0:
            raise ValueError(f"class_balance must lie in [0, 1], got {self.class_balance}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class LabeledSignal:
    """Samples with per-sample class labels; ``snr_db`` is None for a clean signal."""

    samples: np.ndarray
    labels: np.ndarray
    snr_db: float | None = None

    def __post_init__(self):
        if len(self.samples) != len(self.labels):
            raise ValueError("samples and labels differ in length")

    def __len__(self):
        return len(self.samples)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("sample,label\n")
        for x, y in zip(self.samples, self.labels):
            buf.write(f"{x:.17g},{int(y)}\n")
        return buf.getvalue()


def periods(samples_per_period: int) -> tuple[np.ndarray, np.ndarray]:
    """One period of each waveform; the square wave takes sign(0) := +1."""
    sine = np.sin(2 * np.pi * np.arange(samples_per_period) / samples_per_period)
    square = np.where(sine >= 0, 1.0, -1.0)
    return sine, square


def generate_task(c: TaskConfig, classes=None) -> LabeledSignal:
    """Concatenate ``c.segments`` periods, each sine or square at random.

    ``classes`` forces the per-segment class sequence (mainly for tests).
    """
    if classes is None:
        classes = (philox(c.seed).random(c.segments) < c.class_balance).astype(np.int64)
    else:
        classes = np.asarray(classes, dtype=np.int64)
        if classes.shape != (c.segments,):
            raise ValueError(f"need {c.segments} forced classes, got {classes.shape}")
    sine, square = periods(c.samples_per_period)
    samples = np.where(classes[:, None] == SQUARE, square, sine).ravel()
    labels = np.repeat(classes, c.samples_per_period)
    return LabeledSignal(samples, labels)


def noise_sigma(samples: np.ndarray, snr_db: float) -> float:
    power = float(np.mean(np.square(samples)))
    return math.sqrt(power / 10 ** (snr_db / 10))


def add_noise(sig: LabeledSignal, snr_db: float, seed: int) -> LabeledSignal:
    """Add white Gaussian noise at ``snr_db`` relative to the empirical signal power."""
    if len(sig) == 0:
        raise ValueError("cannot add noise to an empty signal")
    if not math.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite, got {snr_db}")
    sigma = noise_sigma(sig.samples, snr_db)
    noisy = sig.samples + sigma * philox(seed).standard_normal(len(sig))
    return replace(sig, samples=noisy, snr_db=float(snr_db))
