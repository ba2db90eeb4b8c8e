"""Ridge-regression readout and the two scores: accuracy and RMSE."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import scipy.linalg

PIVOT_RTOL = 1e-12
DEFAULT_RIDGE_SCALE = 1e-6


class SingularSystemError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    rmse: float


def add_bias(states: np.ndarray) -> np.ndarray:
    """Append the constant bias column used by the readout."""
    return np.hstack([states, np.ones((states.shape[0], 1))])


def default_ridge(X: np.ndarray) -> float:
    """``1e-6 * trace(X^T X) / columns``."""
    return DEFAULT_RIDGE_SCALE * float(np.sum(X * X)) / X.shape[1]


def train_ridge(X, y, lam: float | None = None, bias: bool = True) -> np.ndarray:
    """Minimise ``|Xw - y|^2 + lam*|w_nobias|^2`` via the normal equations.

    With ``bias=True`` the last column of ``X`` is the bias and is left
    unpenalised.  ``lam=None`` selects :func:`default_ridge`.

    Raises:
        SingularSystemError: a Cholesky pivot falls below ``1e-12`` of the
            largest diagonal entry of the system.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError(f"shape mismatch: X {X.shape}, y {y.shape}")
    if lam is None:
        lam = default_ridge(X)
    if not lam >= 0:
        raise ValueError(f"regulariser must be >= 0, got {lam}")
    A = X.T @ X
    penalty = np.full(X.shape[1], lam)
    if bias:
        penalty[-1] = 0.0
    A[np.diag_indices_from(A)] += penalty
    scale = float(np.max(np.diag(A))) if A.size else 0.0
    try:
        factor, lower = scipy.linalg.cho_factor(A, lower=True, check_finite=True)
    except np.linalg.LinAlgError:
        raise SingularSystemError("normal equations are not positive definite") from None
    pivots = np.diag(factor) ** 2
    if scale <= 0 or pivots.min() < PIVOT_RTOL * scale:
        raise SingularSystemError(
            f"normal equations are rank deficient (min pivot {pivots.min():.3g}, "
            f"scale {scale:.3g})"
        )
    return scipy.linalg.cho_solve((factor, lower), X.T @ y)


def evaluate(w, X, y) -> Metrics:
    """Score ``p = Xw`` against 0/1 targets; class 1 iff ``p > 0.5``."""
    w = np.asarray(w, dtype=float)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[1] != w.shape[0] or X.shape[0] != y.shape[0]:
        raise ValueError(f"shape mismatch: w {w.shape}, X {X.shape}, y {y.shape}")
    return score(X @ w, y)


def score(p, y) -> Metrics:
    p = np.asarray(p, dtype=float)
    y = np.asarray(y, dtype=float)
    if p.shape != y.shape or p.size == 0:
        raise ValueError(f"shape mismatch: predictions {p.shape}, targets {y.shape}")
    rmse = float(np.sqrt(np.mean((p - y) ** 2)))
    accuracy = float(np.mean((p > 0.5) == (y > 0.5)))
    return Metrics(accuracy, rmse)


def weights_to_csv(w) -> str:
    buf = io.StringIO()
    buf.write("w\n")
    for v in np.asarray(w, dtype=float):
        buf.write(f"{v:.17g}\n")
    return buf.getvalue()
