"""Unweighted logistic regression fit by iteratively reweighted least squares.

The lineup is called elite when the estimated probability reaches 1 - thresh,
so smaller thresh demands stronger evidence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .common import TrainingSet

_RIDGE = 1e-8
_GRAD_TOL = 1e-6
_MAX_ITER = 100


@dataclass(frozen=True)
class LogitParams:
    thresh: float = 0.5

    def __post_init__(self):
        if not 0 < self.thresh <= 0.5:
            raise ValueError("thresh must lie in (0, 0.5]")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class LogisticModel:
    coef: np.ndarray  # intercept first
    converged: bool
    grad_norm: float

    def log_odds(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        return self.coef[0] + x @ self.coef[1:]

    def probability(self, x: np.ndarray) -> np.ndarray:
        return _sigmoid(self.log_odds(x))

    def predict(self, x: np.ndarray, params: LogitParams) -> np.ndarray:
        return (self.probability(x) >= 1.0 - params.thresh).astype(int)

    def to_dict(self) -> dict:
        return {"kind": "logit", "coef": self.coef.tolist(),
                "converged": self.converged, "grad_norm": self.grad_norm}

    @staticmethod
    def from_dict(d: dict) -> "LogisticModel":
        return LogisticModel(np.asarray(d["coef"], dtype=float),
                             d["converged"], d["grad_norm"])


def log_likelihood(coef: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    z = coef[0] + x @ coef[1:]
    # log sigma(z) for y=1, log(1 - sigma(z)) for y=0, stably
    return float(np.sum(np.where(y == 1, -np.logaddexp(0, -z),
                                 -np.logaddexp(0, z))))


def fit_logistic(train: TrainingSet, max_iter: int = _MAX_ITER) -> LogisticModel:
    train.require_both_classes()
    x, y = train.x, train.y.astype(float)
    n, d = x.shape
    design = np.hstack([np.ones((n, 1)), x])
    coef = np.zeros(d + 1)

    grad_norm = np.inf
    converged = False
    for _ in range(max_iter):
        p = _sigmoid(design @ coef)
        grad = design.T @ (y - p)
        grad_norm = float(np.max(np.abs(grad)))
        if grad_norm <= _GRAD_TOL:
            converged = True
            break
        w = p * (1.0 - p)
        hess = design.T @ (design * w[:, None])
        try:
            step = np.linalg.solve(hess, grad)
            if not np.all(np.isfinite(step)):
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            hess = hess + _RIDGE * np.eye(d + 1)
            step = np.linalg.solve(hess, grad)

        # plain Newton with halving if the likelihood would decrease
        base = log_likelihood(coef, x, y)
        scale = 1.0
        for _ in range(30):
            trial = coef + scale * step
            if log_likelihood(trial, x, y) >= base - 1e-12:
                break
            scale *= 0.5
        coef = coef + scale * step

    return LogisticModel(coef, converged, grad_norm)


def predict_logistic(model: LogisticModel, x: np.ndarray,
                     params: LogitParams) -> np.ndarray:
    return model.predict(x, params)
