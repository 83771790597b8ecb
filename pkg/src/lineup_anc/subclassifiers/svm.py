"""Soft-margin RBF support vector machine solved by sequential minimal
optimization with maximal-violating-pair working-set selection.

The dual problem is min 1/2 a'Qa - e'a subject to 0 <= a <= cost and
y'a = 0, with Q_ij = y_i y_j K(x_i, x_j). Convergence is declared when the
largest KKT violation m(a) - M(a) drops to the tolerance. Observations are
unweighted."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .common import FitError, TrainingSet

KKT_TOL = 1e-3


class SvmConvergenceError(FitError):
    def __init__(self, max_violation: float, iterations: int):
        self.max_violation = max_violation
        self.iterations = iterations
        super().__init__(
            f"SMO did not converge after {iterations} iterations; "
            f"max KKT violation {max_violation:.3e}")


@dataclass(frozen=True)
class SvmParams:
    cost: float = 1.0
    gamma: float = 0.1

    def __post_init__(self):
        if self.cost <= 0 or self.gamma <= 0:
            raise ValueError("cost and gamma must be positive")


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    a2 = np.sum(a * a, axis=1)[:, None]
    b2 = np.sum(b * b, axis=1)[None, :]
    sq = np.maximum(a2 + b2 - 2.0 * (a @ b.T), 0.0)
    return np.exp(-gamma * sq)


@dataclass
class SvmModel:
    support_x: np.ndarray
    support_alpha_y: np.ndarray  # alpha_i * y_i for the support vectors
    bias: float
    params: SvmParams
    kkt_residual: float
    objective_trace: list[float] = field(default_factory=list, repr=False)

    def decision_value(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        k = rbf_kernel(x, self.support_x, self.params.gamma)
        return k @ self.support_alpha_y + self.bias

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.decision_value(x) > 0).astype(int)

    def to_dict(self) -> dict:
        return {"kind": "svm", "cost": self.params.cost,
                "gamma": self.params.gamma, "bias": self.bias,
                "kkt_residual": self.kkt_residual,
                "support_x": self.support_x.tolist(),
                "support_alpha_y": self.support_alpha_y.tolist()}

    @staticmethod
    def from_dict(d: dict) -> "SvmModel":
        return SvmModel(np.asarray(d["support_x"], dtype=float),
                        np.asarray(d["support_alpha_y"], dtype=float),
                        d["bias"], SvmParams(d["cost"], d["gamma"]),
                        d["kkt_residual"])


def fit_svm_rbf(train: TrainingSet, params: SvmParams,
                tol: float = KKT_TOL, max_iter: int | None = None,
                record_objective: bool = False) -> SvmModel:
    train.require_both_classes()
    x = train.x
    y = np.where(train.y == 1, 1.0, -1.0)
    n = train.n
    c = params.cost
    if max_iter is None:
        max_iter = max(20_000, 200 * n)

    kernel = rbf_kernel(x, x, params.gamma)
    alpha = np.zeros(n)
    f = np.zeros(n)  # f_i = sum_j alpha_j y_j K_ij
    trace: list[float] = []

    def violation_pair():
        grad = y - f  # y_i - f_i; free/boundary SVs satisfy grad_i ~ b
        up = ((y > 0) & (alpha < c)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < c)) | ((y > 0) & (alpha > 0))
        i = int(np.flatnonzero(up)[np.argmax(grad[up])])
        j = int(np.flatnonzero(low)[np.argmin(grad[low])])
        return i, j, grad[i] - grad[j]

    it = 0
    gap = np.inf
    while it < max_iter:
        i, j, gap = violation_pair()
        if gap <= tol:
            break
        eta = kernel[i, i] + kernel[j, j] - 2.0 * kernel[i, j]
        eta = max(eta, 1e-12)
        e_i = f[i] - y[i]
        e_j = f[j] - y[j]
        aj_old, ai_old = alpha[j], alpha[i]
        if y[i] != y[j]:
            lo, hi = max(0.0, aj_old - ai_old), min(c, c + aj_old - ai_old)
        else:
            lo, hi = max(0.0, ai_old + aj_old - c), min(c, ai_old + aj_old)
        aj = np.clip(aj_old + y[j] * (e_i - e_j) / eta, lo, hi)
        ai = ai_old + y[i] * y[j] * (aj_old - aj)
        # snap to the box so rounding residue cannot trap the working set
        snap = 1e-10 * c
        if aj < snap:
            aj = 0.0
        elif aj > c - snap:
            aj = c
        if ai < snap:
            ai = 0.0
        elif ai > c - snap:
            ai = c
        alpha[i], alpha[j] = ai, aj
        f += (ai - ai_old) * y[i] * kernel[:, i] + (aj - aj_old) * y[j] * kernel[:, j]
        if record_objective:
            trace.append(float(alpha.sum() - 0.5 * np.dot(alpha * y, f)))
        it += 1
    else:
        raise SvmConvergenceError(float(gap), it)

    grad = y - f
    up = ((y > 0) & (alpha < c)) | ((y < 0) & (alpha > 0))
    low = ((y < 0) & (alpha < c)) | ((y > 0) & (alpha > 0))
    bias = float((grad[up].max() + grad[low].min()) / 2.0)

    sv = alpha > 0
    return SvmModel(x[sv].copy(), (alpha * y)[sv], bias, params,
                    kkt_residual=float(max(gap, 0.0)), objective_trace=trace)
