"""Run configuration: option tables, ``ddtea-config v1`` files and manifests.

A config file is line oriented::

    ddtea-config v1
    # comments start with '#'
    zeta_bias = 1.5
    snr_db = clean

Values resolve as built-in default <- config file <- command-line flag.  The
manifest written next to every output is a config file holding the fully
resolved values, so ``--config manifest.txt`` replays the run.
"""

from __future__ import annotations

import datetime
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from . import __version__

CONFIG_HEADER = "ddtea-config v1"


class ConfigError(ValueError):
    pass


def _float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"not a finite number: {text!r}")
    return v


def _uint64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise ValueError(f"not an unsigned 64-bit integer: {text!r}")
    return v


def _snr(text: str) -> float | None:
    return None if text.strip().lower() in ("clean", "none") else _float(text)


def _lam(text: str) -> float | None:
    return None if text.strip().lower() in ("auto", "none") else _float(text)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text: str) -> float | None:
    return None if text.strip().lower() in ("", "none") else _float(text)


def _opt_int(text: str) -> int | None:
    return None if text.strip().lower() in ("", "none") else int(text)


def _axis(text: str) -> str:
    if text not in ("current", "snr"):
        raise ValueError(f"axis must be 'current' or 'snr', got {text!r}")
    return text


@dataclass(frozen=True)
class Option:
    key: str
    parse: Callable[[str], Any]
    default: Any
    help: str = ""
    #: spelling of None in files and manifests
    none_text: str = "none"

    @property
    def is_switch(self) -> bool:
        """Boolean options take no value on the command line."""
        return self.parse is _bool

    @property
    def flag(self) -> str:
        return "--" + self.key.replace("_", "-")


def format_value(v: Any, none_text: str = "none") -> str:
    if v is None:
        return none_text
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


TASK_OPTIONS = [
    Option("segments", int, 100, "waveform periods per trial"),
    Option("samples_per_period", int, 12, "samples per waveform period"),
    Option("class_balance", _float, 0.5, "probability that a segment is square"),
    Option("n_virtual", int, 24, "virtual neurons per input sample"),
    Option("theta", _float, 20e-9, "node duration, s"),
    Option("zeta_bias", _float, 1.5, "bias drive current (units of critical current)"),
    Option("zeta_span", _float, 0.3, "drive modulation amplitude"),
    Option("mask_seed", _uint64, 0, "seed of the +/-1 input mask"),
    Option("s_init", _float, 0.01, "initial reduced orbit"),
    Option("snr_db", _snr, None, "input SNR in dB, or 'clean'", "clean"),
    Option("lambda", _lam, None, "ridge regulariser, or 'auto'", "auto"),
    Option("split", _float, 0.8, "training fraction after washout"),
    Option("washout", int, 50, "leading samples discarded"),
    Option("seed", _uint64, 0, "master seed"),
    Option("model", str, "synthetic", "device model file, or 'synthetic'"),
    Option("resample_mask", _bool, False, "draw a fresh mask for every trial"),
]

TRIAL_OPTIONS = TASK_OPTIONS + [Option("rep", int, 0, "repetition index")]

SWEEP_OPTIONS = TASK_OPTIONS + [
    Option("axis", _axis, None, "sweep axis: current or snr"),
    Option("from", _opt_float, None, "first axis value"),
    Option("to", _opt_float, None, "last axis value"),
    Option("points", _opt_int, None, "number of axis values"),
    Option("reps", int, 200, "trials per axis value"),
    Option("fit", _bool, False, "fit a generalised logistic curve"),
    Option("svg", _bool, False, "also write sweep.svg"),
]

TRACE_OPTIONS = [
    Option("alpha", _opt_float, None, "growth rate, 1/s"),
    Option("beta", _opt_float, None, "nonlinear rate, 1/s"),
    Option("n", _opt_float, None, "nonlinearity exponent"),
    Option("zeta", _opt_float, None, "drive current (instead of alpha/beta/n)"),
    Option("model", str, "synthetic", "device model file, or 'synthetic'"),
    Option("s0", _float, 0.01, "initial reduced orbit"),
    Option("t_end", _opt_float, None, "end of the time grid, s"),
    Option("points", int, 200, "grid points including t=0"),
    Option("svg", _bool, False, "also write trace.svg"),
]

SWEEP_DEFAULTS = {
    "current": (1.05, 2.0, 20),
    "snr": (-20.0, 40.0, 25),
}


def loads_config(text: str, options: list[Option], source: str = "<string>") -> dict[str, Any]:
    """Parse a config body into {key: parsed value} for keys it sets."""
    table = {o.key: o for o in options}
    values: dict[str, Any] = {}
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != CONFIG_HEADER:
                raise ConfigError(f"{source}:{lineno}: expected header {CONFIG_HEADER!r}")
            header_seen = True
            continue
        key, sep, val = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        if key not in table:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = table[key].parse(val.strip())
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from None
    if not header_seen:
        raise ConfigError(f"{source}: empty config file")
    return values


def resolve(options: list[Option], file_values: dict, flag_values: dict) -> dict[str, Any]:
    """Defaults, then config-file values, then command-line values (raw strings)."""
    out = {o.key: o.default for o in options}
    out.update(file_values)
    for o in options:
        raw = flag_values.get(o.key)
        if raw is None:
            continue
        try:
            out[o.key] = o.parse(raw)
        except ValueError as exc:
            raise ConfigError(f"{o.flag}: {exc}") from None
    return out


def dumps_manifest(values: dict[str, Any], command: str, timestamp: str | None = None) -> str:
    if timestamp is None:
        timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    lines = [
        CONFIG_HEADER,
        f"# tool=ddtea {__version__}",
        f"# command={command}",
        f"# timestamp={timestamp}",
    ]
    none_text = {o.key: o.none_text for o in TASK_OPTIONS}
    lines += [f"{k} = {format_value(v, none_text.get(k, 'none'))}" for k, v in values.items()]
    return "\n".join(lines) + "\n"


def write_manifest(directory: Path, values: dict[str, Any], command: str) -> Path:
    path = Path(directory) / "manifest.txt"
    path.write_text(dumps_manifest(values, command), encoding="utf-8", newline="\n")
    return path
