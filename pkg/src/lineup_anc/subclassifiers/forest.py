"""Random forest: unpruned CART trees on bootstrap resamples with per-split
feature subsampling, voted through an asymmetric cutoff.

With elite vote fraction p and cutoff c, the forest predicts elite iff
p/c > (1-p)/(1-c); exact ties go to not_elite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .common import TrainingSet
from .tree import DecisionTreeModel, TreeNode, TreeParams, grow_tree


@dataclass(frozen=True)
class ForestParams:
    ntree: int = 100
    cutoff_c: float = 0.5
    mtry: int | None = None  # default floor(sqrt(d)) at fit time

    def __post_init__(self):
        if self.ntree < 1:
            raise ValueError("ntree must be positive")
        if not 0.5 <= self.cutoff_c < 1:
            raise ValueError("cutoff_c must lie in [0.5, 1)")
        if self.mtry is not None and self.mtry < 1:
            raise ValueError("mtry must be positive")


def cutoff_vote(p_elite: float, c: float) -> int:
    return 1 if p_elite / c > (1 - p_elite) / (1 - c) else 0


@dataclass
class RandomForestModel:
    trees: list[DecisionTreeModel]
    params: ForestParams
    seed: int
    n_features: int

    def elite_fraction(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        votes = np.zeros(x.shape[0])
        for tree in self.trees:
            votes += tree.predict(x)
        return votes / len(self.trees)

    def predict(self, x: np.ndarray) -> np.ndarray:
        p = self.elite_fraction(x)
        c = self.params.cutoff_c
        return np.array([cutoff_vote(pi, c) for pi in p])

    def gini_importance(self) -> np.ndarray:
        imp = np.zeros(self.n_features)
        for tree in self.trees:
            imp += tree.gini_importance()
        return imp

    def to_dict(self) -> dict:
        return {"kind": "forest", "ntree": self.params.ntree,
                "cutoff_c": self.params.cutoff_c, "mtry": self.params.mtry,
                "seed": self.seed, "n_features": self.n_features,
                "trees": [t.to_dict() for t in self.trees]}

    @staticmethod
    def from_dict(d: dict) -> "RandomForestModel":
        params = ForestParams(d["ntree"], d["cutoff_c"], d["mtry"])
        trees = [DecisionTreeModel.from_dict(t) for t in d["trees"]]
        return RandomForestModel(trees, params, d["seed"], d["n_features"])


def fit_random_forest(train: TrainingSet, params: ForestParams,
                      seed: int) -> RandomForestModel:
    n, d = train.n, train.d
    mtry = params.mtry if params.mtry is not None else max(1, int(np.sqrt(d)))
    if mtry > d:
        raise ValueError(f"mtry {mtry} exceeds feature count {d}")
    trees = []
    for t in range(params.ntree):
        rng = np.random.default_rng(np.random.SeedSequence((seed, t)))
        idx = rng.integers(0, n, size=n)
        xb, yb = train.x[idx], train.y[idx]
        if len(np.unique(yb)) == 1:
            root = TreeNode(prediction=int(yb[0]), mass_elite=float(yb[0]),
                            mass_not=float(1 - yb[0]))
        else:
            # bootstrap draws are unweighted; lineup minutes are not used here
            root = grow_tree(xb, yb, np.ones(n), mtry=mtry, rng=rng)
        trees.append(DecisionTreeModel(root, TreeParams(cp=-1), d))
    return RandomForestModel(trees, params, seed, d)
