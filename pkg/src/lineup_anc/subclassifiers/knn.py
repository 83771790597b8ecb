"""k-nearest neighbors in standardized feature space. Distance ties break by
lower training index; label ties (even k) go to not_elite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .common import FitError, TrainingSet


@dataclass(frozen=True)
class KnnParams:
    k: int = 5

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")


@dataclass
class KnnModel:
    x: np.ndarray
    y: np.ndarray
    params: KnnParams

    def predict(self, queries: np.ndarray) -> np.ndarray:
        return knn_predict_matrix(self.x, self.y, queries, self.params)

    def to_dict(self) -> dict:
        return {"kind": "knn", "k": self.params.k,
                "x": self.x.tolist(), "y": self.y.tolist()}

    @staticmethod
    def from_dict(d: dict) -> "KnnModel":
        return KnnModel(np.asarray(d["x"], dtype=float),
                        np.asarray(d["y"], dtype=int), KnnParams(d["k"]))


def fit_knn(train: TrainingSet, params: KnnParams) -> KnnModel:
    if params.k > train.n:
        raise FitError(f"k={params.k} exceeds training size {train.n}")
    return KnnModel(train.x.copy(), train.y.copy(), params)


def knn_predict_matrix(x: np.ndarray, y: np.ndarray, queries: np.ndarray,
                       params: KnnParams) -> np.ndarray:
    queries = np.atleast_2d(queries)
    out = np.empty(queries.shape[0], dtype=int)
    for qi, q in enumerate(queries):
        dist = np.sum((x - q) ** 2, axis=1)
        order = np.argsort(dist, kind="stable")[:params.k]
        elite = int(y[order].sum())
        out[qi] = 1 if elite > params.k - elite else 0
    return out


def knn_predict(train: TrainingSet, query: np.ndarray,
                params: KnnParams) -> np.ndarray:
    """Direct form used by the layered model path as well."""
    if train.n == 0:
        raise FitError("empty training set")
    if params.k > train.n:
        raise FitError(f"k={params.k} exceeds training size {train.n}")
    return knn_predict_matrix(train.x, train.y, query, params)
