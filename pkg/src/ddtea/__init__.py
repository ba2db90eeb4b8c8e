"""Closed-form spin-torque vortex oscillator dynamics and a single-oscillator reservoir."""

__version__ = "0.1.0"

from .device import DeviceModel, load_model, params_for_current, synthetic_default
from .dynamics import (
    BlowUpError,
    InvalidParameterError,
    ThieleParams,
    evolve_closed_form,
    evolve_rk4,
    steady_state,
    trace,
)
from .experiment import SweepResult, TrialConfig, run_trial, sweep
from .fitting import LogisticFit, fit_logistic
from .readout import Metrics, evaluate, train_ridge
from .reservoir import ReservoirConfig, collect_states, make_mask
from .signals import LabeledSignal, TaskConfig, add_noise, generate_task

__all__ = [
    "BlowUpError",
    "DeviceModel",
    "InvalidParameterError",
    "LabeledSignal",
    "LogisticFit",
    "Metrics",
    "ReservoirConfig",
    "SweepResult",
    "TaskConfig",
    "ThieleParams",
    "TrialConfig",
    "add_noise",
    "collect_states",
    "evaluate",
    "evolve_closed_form",
    "evolve_rk4",
    "fit_logistic",
    "generate_task",
    "load_model",
    "make_mask",
    "params_for_current",
    "run_trial",
    "steady_state",
    "sweep",
    "synthetic_default",
    "trace",
    "train_ridge",
]
