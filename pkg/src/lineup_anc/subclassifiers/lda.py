"""Linear discriminant analysis with minutes-weighted means, pooled
covariance, and priors. No tunable parameters; score ties go to not_elite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .common import FitError, TrainingSet

_RIDGE_SCALE = 1e-8


@dataclass
class LdaModel:
    mean_elite: np.ndarray
    mean_not: np.ndarray
    cov_inv: np.ndarray
    prior_elite: float
    prior_not: float

    def scores(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = np.atleast_2d(x)
        out = []
        for mu, prior in ((self.mean_elite, self.prior_elite),
                          (self.mean_not, self.prior_not)):
            a = self.cov_inv @ mu
            out.append(x @ a - 0.5 * mu @ a + np.log(prior))
        return out[0], out[1]

    def predict(self, x: np.ndarray) -> np.ndarray:
        s_elite, s_not = self.scores(x)
        return (s_elite > s_not).astype(int)

    def coefficients(self) -> np.ndarray:
        """Discriminant direction, used for importance reporting."""
        return self.cov_inv @ (self.mean_elite - self.mean_not)

    def to_dict(self) -> dict:
        return {"kind": "lda", "mean_elite": self.mean_elite.tolist(),
                "mean_not": self.mean_not.tolist(),
                "cov_inv": self.cov_inv.tolist(),
                "prior_elite": self.prior_elite, "prior_not": self.prior_not}

    @staticmethod
    def from_dict(d: dict) -> "LdaModel":
        return LdaModel(np.asarray(d["mean_elite"], dtype=float),
                        np.asarray(d["mean_not"], dtype=float),
                        np.asarray(d["cov_inv"], dtype=float),
                        d["prior_elite"], d["prior_not"])


def fit_lda(train: TrainingSet) -> LdaModel:
    train.require_both_classes()
    x, y, w = train.x, train.y, train.w
    d = train.d
    total = w.sum()

    means = {}
    pooled = np.zeros((d, d))
    priors = {}
    for cls in (1, 0):
        mask = y == cls
        wc = w[mask]
        mu = (wc[:, None] * x[mask]).sum(axis=0) / wc.sum()
        centered = x[mask] - mu
        pooled += (wc[:, None] * centered).T @ centered
        means[cls] = mu
        priors[cls] = wc.sum() / total
    pooled /= total

    ridge = _RIDGE_SCALE * np.trace(pooled) / d
    pooled[np.diag_indices(d)] += ridge
    try:
        cov_inv = np.linalg.inv(pooled)
        if not np.all(np.isfinite(cov_inv)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        raise FitError("pooled covariance is singular even after ridge") from None

    return LdaModel(means[1], means[0], cov_inv, priors[1], priors[0])
