"""Time-multiplexed single-oscillator reservoir.

Each input sample ``u_k`` is spread over ``n_virtual`` consecutive node
intervals of length ``theta``.  During node ``i`` the oscillator is driven at
``zeta = zeta_bias + zeta_span*m_i*u_k`` and the orbit at the end of the
interval is the node's reading.  The orbit is never reset, so one continuous
trajectory runs through the whole input.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .device import CurrentOutOfRangeError, DeviceModel, ModelInvariantError
from .dynamics import BlowUpError, _chain_closed_form
from .signals import LabeledSignal, philox


@dataclass(frozen=True)
class ReservoirConfig:
    n_virtual: int = 24
    theta: float = 20e-9
    zeta_bias: float = 1.5
    zeta_span: float = 0.3
    mask_seed: int = 0
    s_init: float = 0.01

    def __post_init__(self):
        if self.n_virtual < 1:
            raise ValueError(f"n_virtual must be >= 1, got {self.n_virtual}")
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise ValueError(f"theta must be > 0, got {self.theta}")
        if not (math.isfinite(self.s_init) and self.s_init >= 0):
            raise ValueError(f"s_init must be >= 0, got {self.s_init}")
        if not (math.isfinite(self.zeta_bias) and math.isfinite(self.zeta_span)):
            raise ValueError("zeta_bias and zeta_span must be finite")

    def check_against(self, model: DeviceModel, max_abs_input: float = 1.0) -> None:
        """Both drive extremes must lie in the model's validity interval."""
        swing = abs(self.zeta_span) * max_abs_input
        for zeta in (self.zeta_bias - swing, self.zeta_bias + swing):
            model.check_range(zeta, " (reservoir drive extreme)")


def make_mask(n_virtual: int, mask_seed: int) -> np.ndarray:
    """Binary +/-1 input mask of length ``n_virtual``."""
    if n_virtual < 1:
        raise ValueError(f"n_virtual must be >= 1, got {n_virtual}")
    bits = philox(mask_seed).integers(0, 2, size=n_virtual)
    return np.where(bits == 1, 1.0, -1.0)


def drive_currents(rc: ReservoirConfig, mask: np.ndarray, u: np.ndarray) -> np.ndarray:
    """(samples, n_virtual) drive currents, ``zeta_bias + (zeta_span*m_i)*u_k``."""
    return rc.zeta_bias + (rc.zeta_span * mask)[None, :] * np.asarray(u, dtype=float)[:, None]


def collect_states(
    model: DeviceModel,
    rc: ReservoirConfig,
    sig: LabeledSignal | np.ndarray,
    mask: np.ndarray | None = None,
) -> np.ndarray:
    """Run the oscillator over the masked input; returns a (samples, n_virtual) matrix.

    ``mask`` defaults to ``make_mask(rc.n_virtual, rc.mask_seed)``.

    Raises:
        CurrentOutOfRangeError: a node's drive current leaves the model's
            interval; the message names the sample and node.
        BlowUpError: the orbit diverges inside a node interval.
    """
    u = sig.samples if isinstance(sig, LabeledSignal) else np.asarray(sig, dtype=float)
    if mask is None:
        mask = make_mask(rc.n_virtual, rc.mask_seed)
    if len(mask) != rc.n_virtual:
        raise ValueError(f"mask length {len(mask)} != n_virtual {rc.n_virtual}")
    zeta = drive_currents(rc, mask, u)
    outside = np.flatnonzero(~((zeta >= model.zeta_min) & (zeta <= model.zeta_max)))
    if outside.size:
        k, i = divmod(int(outside[0]), rc.n_virtual)
        raise CurrentOutOfRangeError(
            float(zeta[k, i]), model.zeta_min, model.zeta_max, f" at sample {k}, node {i}"
        )
    alpha, beta, n = (np.ascontiguousarray(a.ravel()) for a in model.arrays(zeta))
    if np.any(beta == 0):
        k, i = divmod(int(np.flatnonzero(beta == 0)[0]), rc.n_virtual)
        raise ModelInvariantError(f"degenerate model: beta = 0 at sample {k}, node {i}")
    states, bad, t_star = _chain_closed_form(alpha, beta, n, float(rc.s_init), float(rc.theta))
    if bad >= 0:
        k, i = divmod(int(bad), rc.n_virtual)
        err = BlowUpError(t_star)
        err.args = (f"{err.args[0]} at sample {k}, node {i}",)
        raise err
    return states.reshape(zeta.shape)


def states_to_csv(states: np.ndarray) -> str:
    buf = io.StringIO()
    buf.write(",".join(f"v{i}" for i in range(states.shape[1])) + "\n")
    for row in states:
        buf.write(",".join(format(v, ".17g") for v in row) + "\n")
    return buf.getvalue()
