"""Discrete AdaBoost.M1 over shallow cp-pruned CART trees.

Observation weights start proportional to lineup minutes. A round with
weighted error >= 0.5 stops boosting early and is discarded; a perfect round
gets a capped stage weight and ends training (it already dominates)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .common import TrainingSet
from .tree import DecisionTreeModel, TreeParams, grow_tree, prune_tree

_ALPHA_CAP = np.log(1e10)


@dataclass(frozen=True)
class BoostParams:
    mfinal: int = 100
    maxdepth: int = 3
    cp: float = 0.01

    def __post_init__(self):
        if self.mfinal < 1 or self.maxdepth < 1:
            raise ValueError("mfinal and maxdepth must be positive")
        if not 0 <= self.cp <= 1:
            raise ValueError("cp must lie in [0, 1]")


@dataclass
class AdaBoostModel:
    stages: list[DecisionTreeModel]
    alphas: list[float]
    params: BoostParams
    n_features: int

    def decision_value(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        score = np.zeros(x.shape[0])
        for alpha, stage in zip(self.alphas, self.stages):
            score += alpha * (2 * stage.predict(x) - 1)
        return score

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.decision_value(x) > 0).astype(int)

    def staged_predictions(self, x: np.ndarray) -> list[np.ndarray]:
        """Cumulative predictions after each retained round."""
        x = np.atleast_2d(x)
        score = np.zeros(x.shape[0])
        out = []
        for alpha, stage in zip(self.alphas, self.stages):
            score += alpha * (2 * stage.predict(x) - 1)
            out.append((score > 0).astype(int))
        return out

    def gini_importance(self) -> np.ndarray:
        imp = np.zeros(self.n_features)
        for stage in self.stages:
            imp += stage.gini_importance()
        return imp

    def to_dict(self) -> dict:
        return {"kind": "boost", "mfinal": self.params.mfinal,
                "maxdepth": self.params.maxdepth, "cp": self.params.cp,
                "n_features": self.n_features, "alphas": list(self.alphas),
                "stages": [s.to_dict() for s in self.stages]}

    @staticmethod
    def from_dict(d: dict) -> "AdaBoostModel":
        params = BoostParams(d["mfinal"], d["maxdepth"], d["cp"])
        stages = [DecisionTreeModel.from_dict(s) for s in d["stages"]]
        return AdaBoostModel(stages, d["alphas"], params, d["n_features"])


def fit_adaboost(train: TrainingSet, params: BoostParams,
                 seed: int = 0) -> AdaBoostModel:
    train.require_both_classes()
    n, d = train.n, train.d
    weights = train.w / train.w.sum()
    stages: list[DecisionTreeModel] = []
    alphas: list[float] = []

    for _ in range(params.mfinal):
        root = grow_tree(train.x, train.y, weights, max_depth=params.maxdepth)
        root = prune_tree(root, params.cp)
        stage = DecisionTreeModel(root, TreeParams(cp=params.cp), d)
        pred = stage.predict(train.x)
        err = float(weights[pred != train.y].sum())
        if err >= 0.5:
            break
        if err == 0.0:
            stages.append(stage)
            alphas.append(_ALPHA_CAP)
            break
        alpha = float(np.log((1 - err) / err))
        stages.append(stage)
        alphas.append(alpha)
        weights = weights * np.exp(alpha * (pred != train.y))
        weights = weights / weights.sum()

    return AdaBoostModel(stages, alphas, params, d)
