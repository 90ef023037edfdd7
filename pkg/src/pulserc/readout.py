"""Linear readout layer: ridge training, prediction, and eval metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DegenerateVarianceError, DimensionError, ParameterError, SingularSystemError


@dataclass(frozen=True)
class ReadoutWeights:
    """Trained output weights (bias weight included) and the ridge
    strength they were fitted with."""

    weights: np.ndarray
    ridge_lambda: float

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1:
            raise ParameterError("weights must be a 1-d vector")
        if not np.all(np.isfinite(w)):
            raise ParameterError("weights must be finite")


@dataclass(frozen=True)
class EvalReport:
    pearson: float
    nrmse: float
    n_samples: int


def fit_ridge(states: np.ndarray, targets: np.ndarray,
              ridge_lambda: float = 1e-6) -> ReadoutWeights:
    """Solve ``min_w ||R w - y||^2 + lambda ||w||^2``.

    Uses the regularized normal equations with a Cholesky factorization;
    every column, the bias one included, is penalized alike. With
    ``ridge_lambda = 0`` the state matrix must have full column rank.
    """
    r = np.asarray(states, dtype=float)
    y = np.asarray(targets, dtype=float).ravel()
    if r.ndim != 2:
        raise DimensionError(f"states must be 2-d, got shape {r.shape}")
    if r.shape[0] != y.size:
        raise DimensionError(
            f"states have {r.shape[0]} rows but targets have {y.size} entries")
    if not (math.isfinite(ridge_lambda) and ridge_lambda >= 0.0):
        raise ParameterError(f"ridge_lambda must be >= 0, got {ridge_lambda!r}")
    if ridge_lambda == 0.0 and r.shape[0] < r.shape[1]:
        raise SingularSystemError(
            f"{r.shape[0]} rows cannot determine {r.shape[1]} weights; "
            "set ridge_lambda > 0")

    gram = r.T @ r + ridge_lambda * np.eye(r.shape[1])
    try:
        factor = cho_factor(gram)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            "normal equations are singular; set ridge_lambda > 0 "
            f"(currently {ridge_lambda!r})") from exc
    w = cho_solve(factor, r.T @ y)
    return ReadoutWeights(w, float(ridge_lambda))


def predict(states: np.ndarray, w: ReadoutWeights) -> np.ndarray:
    """Apply the readout: one predicted value per state row.

    A single 1-d state vector yields a scalar.
    """
    r = np.asarray(states, dtype=float)
    single = r.ndim == 1
    r = np.atleast_2d(r)
    if r.shape[1] != w.weights.size:
        raise DimensionError(
            f"states have {r.shape[1]} columns but readout has "
            f"{w.weights.size} weights")
    out = r @ w.weights
    return float(out[0]) if single else out


def pearson(y: np.ndarray, yhat: np.ndarray) -> float:
    """Sample Pearson correlation between two equal-length sequences."""
    a, b = _paired(y, yhat)
    a = a - a.mean()
    b = b - b.mean()
    va = float(a @ a)
    vb = float(b @ b)
    if va == 0.0 or vb == 0.0:
        raise DegenerateVarianceError("pearson is undefined for a constant sequence")
    r = float(a @ b) / math.sqrt(va * vb)
    # guard against rounding spilling just outside [-1, 1]
    return max(-1.0, min(1.0, r))


def nrmse(y: np.ndarray, yhat: np.ndarray) -> float:
    """Root mean squared error normalized by the target's standard
    deviation, so predicting the target mean scores exactly 1."""
    a, b = _paired(y, yhat)
    sd = float(a.std())
    if sd == 0.0:
        raise DegenerateVarianceError("nrmse is undefined for a constant target")
    return math.sqrt(float(np.mean((a - b) ** 2))) / sd


def evaluate(y: np.ndarray, yhat: np.ndarray) -> EvalReport:
    """Both benchmark metrics over one target/prediction pair."""
    a, _ = _paired(y, yhat)
    return EvalReport(pearson=pearson(y, yhat), nrmse=nrmse(y, yhat),
                      n_samples=int(a.size))


def _paired(y, yhat) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(y, dtype=float).ravel()
    b = np.asarray(yhat, dtype=float).ravel()
    if a.size != b.size:
        raise DimensionError(f"sequence lengths differ: {a.size} vs {b.size}")
    if a.size < 2:
        raise DimensionError("need at least 2 samples")
    return a, b
