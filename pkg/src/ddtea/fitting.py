"""Generalised logistic (Richards) curve fits for sweep curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

NM_OPTIONS = {"xatol": 1e-12, "fatol": 1e-30, "maxiter": 5000, "maxfev": 10000}
MAX_RESTARTS = 8


@dataclass(frozen=True)
class LogisticFit:
    A: float
    K: float
    B: float
    M: float
    nu: float
    r_squared: float
    sse: float = 0.0
    degenerate: bool = False

    def __call__(self, x):
        return richards(x, self.A, self.K, self.B, self.M, self.nu)

    def as_comments(self) -> list[str]:
        keys = ("A", "K", "B", "M", "nu", "r_squared", "sse")
        line = " ".join(f"{k}={getattr(self, k):.17g}" for k in keys)
        return [line + f" degenerate={int(self.degenerate)}"]


def richards(x, A, K, B, M, nu):
    """``A + (K - A) / (1 + exp(-B*(x - M)))**(1/nu)``, overflow-safe."""
    x = np.asarray(x, dtype=float)
    return A + (K - A) * np.exp(-np.logaddexp(0.0, -B * (x - M)) / nu)


def _sse(theta, x, y):
    A, K, B, M, log_nu = theta
    if not np.isfinite(log_nu) or abs(log_nu) > 50:
        return np.inf
    r = richards(x, A, K, B, M, np.exp(log_nu)) - y
    return float(np.dot(r, r))


def starts(x: np.ndarray, y: np.ndarray) -> list[np.ndarray]:
    """The five starting points tried by :func:`fit_logistic`.

    All share A = min y, K = max y and nu = 1.  With ``b = 10/(x range)``,
    ``M_half`` the x closest to the mid-level of y and ``M_mid`` the middle of
    the x range, the starts are (b, M_half), (-b, M_half), (b/4, M_half),
    (-b/4, M_half) and (sign*b, M_mid), where sign follows the end-to-end
    trend of y.
    """
    lo, hi = float(np.min(y)), float(np.max(y))
    b = 10.0 / (x[-1] - x[0])
    m_half = float(x[np.argmin(np.abs(y - 0.5 * (lo + hi)))])
    m_mid = 0.5 * float(x[0] + x[-1])
    sign = 1.0 if y[-1] >= y[0] else -1.0
    return [
        np.array([lo, hi, B, M, 0.0])
        for B, M in ((b, m_half), (-b, m_half), (b / 4, m_half), (-b / 4, m_half), (sign * b, m_mid))
    ]


def _polish(theta, x, y):
    best = minimize(_sse, theta, args=(x, y), method="Nelder-Mead", options=NM_OPTIONS)
    for _ in range(MAX_RESTARTS):
        nxt = minimize(_sse, best.x, args=(x, y), method="Nelder-Mead", options=NM_OPTIONS)
        if not nxt.fun < best.fun * (1 - 1e-9):
            if nxt.fun < best.fun:
                best = nxt
            break
        best = nxt
    return best.x, float(best.fun)


def fit_logistic(x, y) -> LogisticFit:
    """Least-squares Richards fit by multi-start Nelder-Mead.

    Among fits of (numerically) equal error the one with ``B >= 0`` wins, so
    the symmetric nu = 1 case reports the rising parameterisation.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if len(x) < 6:
        raise ValueError(f"need at least 6 points, got {len(x)}")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
        raise ValueError("x and y must be finite")
    if np.any(np.diff(x) <= 0):
        raise ValueError("x must be strictly increasing")
    if np.ptp(y) < 1e-12:
        c = float(np.mean(y))
        return LogisticFit(c, c, 0.0, float(np.mean(x)), 1.0, 1.0, 0.0, degenerate=True)

    fits = [_polish(t, x, y) for t in starts(x, y)]
    best_sse = min(s for _, s in fits)
    tied = [f for f in fits if f[1] <= best_sse * (1 + 1e-6) + 1e-24]
    theta, sse = max(tied, key=lambda f: (f[0][2] >= 0, -f[1]))
    sst = float(np.sum((y - y.mean()) ** 2))
    A, K, B, M, log_nu = (float(v) for v in theta)
    return LogisticFit(A, K, B, M, float(np.exp(log_nu)), 1.0 - sse / sst, sse)
