"""Drive-current to oscillator-parameter mapping.

Currents are normalised to the critical current (``zeta = 1`` is the
oscillation threshold, where the growth rate changes sign).  A model is
either the built-in synthetic default or a set of power-basis polynomials
in ``zeta`` read from a ``ddtea-model v1`` text file::

    ddtea-model v1
    # comment
    zeta_range 0.5 2.5
    alpha -100000000 100000000
    beta 0 -200000000
    n 2
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import ThieleParams

MODEL_HEADER = "ddtea-model v1"
MAX_DEGREE = 6
CHECK_GRID_POINTS = 1000

#: Synthetic default growth-rate scale, 1/s.
A0 = 1.0e8
#: Synthetic default nonlinear-rate scale, 1/s.
B0 = 2.0e8
SYNTHETIC_RANGE = (0.5, 2.5)


class ModelError(ValueError):
    """Base class for device-model failures."""


class ModelParseError(ModelError):
    pass


class ModelInvariantError(ModelError):
    pass


class CurrentOutOfRangeError(ModelError):
    def __init__(self, zeta, zeta_min, zeta_max, where=""):
        self.zeta = zeta
        super().__init__(
            f"drive current zeta={zeta!r} outside validity interval "
            f"[{zeta_min!r}, {zeta_max!r}]{where}"
        )


def horner(coeffs, x):
    """Evaluate an ascending-power polynomial; works on floats and arrays."""
    acc = coeffs[-1] * np.ones_like(x) if isinstance(x, np.ndarray) else float(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class DeviceModel:
    kind: str
    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    n: tuple[float, ...]
    zeta_min: float
    zeta_max: float

    def __post_init__(self):
        if self.kind not in ("synthetic-default", "polynomial"):
            raise ModelError(f"unknown model kind {self.kind!r}")
        if not (math.isfinite(self.zeta_min) and math.isfinite(self.zeta_max)):
            raise ModelInvariantError("validity interval must be finite")
        if not self.zeta_min < self.zeta_max:
            raise ModelInvariantError(
                f"empty validity interval [{self.zeta_min}, {self.zeta_max}]"
            )
        for name in ("alpha", "beta", "n"):
            coeffs = getattr(self, name)
            if not 1 <= len(coeffs) <= MAX_DEGREE + 1:
                raise ModelInvariantError(
                    f"{name}: need 1..{MAX_DEGREE + 1} coefficients, got {len(coeffs)}"
                )
            if not all(math.isfinite(c) for c in coeffs):
                raise ModelInvariantError(f"{name}: non-finite coefficient")

    def arrays(self, zeta):
        """(alpha, beta, n) evaluated elementwise; no range checking."""
        zeta = np.asarray(zeta, dtype=float)
        if self.kind == "synthetic-default":
            return A0 * (zeta - 1.0), -B0 * zeta, np.full_like(zeta, 2.0)
        return horner(self.alpha, zeta), horner(self.beta, zeta), horner(self.n, zeta)

    def check_range(self, zeta: float, where: str = "") -> None:
        if not (self.zeta_min <= zeta <= self.zeta_max):
            raise CurrentOutOfRangeError(zeta, self.zeta_min, self.zeta_max, where)


def synthetic_default() -> DeviceModel:
    """alpha = A0*(zeta - 1), beta = -B0*zeta, n = 2 on zeta in [0.5, 2.5]."""
    return DeviceModel(
        "synthetic-default", (-A0, A0), (0.0, -B0), (2.0,), *SYNTHETIC_RANGE
    )


def params_for_current(m: DeviceModel, zeta: float) -> ThieleParams:
    """Oscillator parameters at normalised drive current ``zeta``."""
    if not math.isfinite(zeta) or zeta < 0:
        raise ModelError(f"drive current must be finite and >= 0, got {zeta!r}")
    m.check_range(zeta)
    if m.kind == "synthetic-default":
        alpha, beta, n = A0 * (zeta - 1.0), -B0 * zeta, 2.0
    else:
        alpha, beta, n = horner(m.alpha, zeta), horner(m.beta, zeta), horner(m.n, zeta)
    if beta == 0:
        raise ModelInvariantError(f"degenerate model: beta = 0 at zeta={zeta!r}")
    return ThieleParams(alpha, beta, n)


def validate(m: DeviceModel) -> DeviceModel:
    """Grid check that oscillation stays bounded and n stays positive."""
    grid = np.linspace(m.zeta_min, m.zeta_max, CHECK_GRID_POINTS)
    alpha, beta, n = m.arrays(grid)
    bad = np.flatnonzero((alpha > 0) & ~(beta < 0))
    if bad.size:
        z = grid[bad[0]]
        raise ModelInvariantError(
            f"beta(zeta) must be < 0 where alpha(zeta) > 0; fails at zeta={z:.17g} "
            f"(alpha={alpha[bad[0]]:.17g}, beta={beta[bad[0]]:.17g})"
        )
    bad = np.flatnonzero(~(np.isfinite(n) & (n > 0)))
    if bad.size:
        raise ModelInvariantError(f"n(zeta) must be > 0; fails at zeta={grid[bad[0]]:.17g}")
    return m


def _fmt(values) -> str:
    return " ".join(format(v, ".17g") for v in values)


def dumps_model(m: DeviceModel) -> str:
    return "\n".join(
        [
            MODEL_HEADER,
            f"zeta_range {_fmt((m.zeta_min, m.zeta_max))}",
            f"alpha {_fmt(m.alpha)}",
            f"beta {_fmt(m.beta)}",
            f"n {_fmt(m.n)}",
            "",
        ]
    )


def save_model(m: DeviceModel, path) -> None:
    Path(path).write_text(dumps_model(m), encoding="utf-8", newline="\n")


def loads_model(text: str, source: str = "<string>") -> DeviceModel:
    """Parse and validate a model file body. The result is always polynomial."""
    header_seen = False
    fields: dict[str, tuple[float, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != MODEL_HEADER:
                raise ModelParseError(
                    f"{source}:{lineno}: expected header {MODEL_HEADER!r}, got {line!r}"
                )
            header_seen = True
            continue
        key, *vals = line.split()
        if key not in ("zeta_range", "alpha", "beta", "n"):
            raise ModelParseError(f"{source}:{lineno}: unknown field {key!r}")
        if key in fields:
            raise ModelParseError(f"{source}:{lineno}: duplicate field {key!r}")
        try:
            fields[key] = tuple(float(v) for v in vals)
        except ValueError as exc:
            raise ModelParseError(f"{source}:{lineno}: field {key!r}: {exc}") from None
        if not fields[key]:
            raise ModelParseError(f"{source}:{lineno}: field {key!r} has no values")
    if not header_seen:
        raise ModelParseError(f"{source}: empty model file")
    missing = [k for k in ("zeta_range", "alpha", "beta", "n") if k not in fields]
    if missing:
        raise ModelParseError(f"{source}: missing field(s) {', '.join(missing)}")
    if len(fields["zeta_range"]) != 2:
        raise ModelParseError(f"{source}: zeta_range needs exactly 2 values")
    lo, hi = fields["zeta_range"]
    return validate(DeviceModel("polynomial", fields["alpha"], fields["beta"], fields["n"], lo, hi))


def load_model(path) -> DeviceModel:
    path = Path(path)
    return loads_model(path.read_text(encoding="utf-8"), source=str(path))
