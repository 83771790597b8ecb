"""Shared training-set container for the seven subclassifiers.

Labels are encoded 1 = elite, 0 = not_elite throughout the numeric code."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import ELITE, NOT_ELITE


class FitError(ValueError):
    """Raised when a subclassifier cannot be fit on the given data."""


@dataclass(frozen=True)
class TrainingSet:
    x: np.ndarray  # (n, d) standardized features
    y: np.ndarray  # (n,) labels in {0, 1}
    w: np.ndarray  # (n,) positive observation weights (lineup minutes)

    def __post_init__(self):
        n = self.x.shape[0]
        if n < 2:
            raise FitError("need at least 2 observations")
        if self.y.shape != (n,) or self.w.shape != (n,):
            raise FitError("x, y, w length mismatch")
        if np.any(self.w <= 0):
            raise FitError("observation weights must be positive")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def require_both_classes(self):
        if len(np.unique(self.y)) < 2:
            raise FitError("both classes must be present")

    @staticmethod
    def from_vectors(vectors) -> "TrainingSet":
        from ..features import matrix
        y = np.array([1 if v.label == ELITE else 0 for v in vectors])
        w = np.array([v.weight if v.weight is not None else 1.0 for v in vectors])
        return TrainingSet(matrix(vectors), y, w)


def labels_from_binary(pred: np.ndarray) -> list[str]:
    return [ELITE if p else NOT_ELITE for p in pred]
