"""Order-statistic predictors: 5 sorted per-player values for each of the 28
statistics (140 columns), leakage-safe standardization, and the reduced
28-column minimum-only mode."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .ingest import Dataset, Lineup, LineupObservation, PlayerSeasonStats, STAT_NAMES

FULL_140 = "full_140"
FIRST_ORDER_28 = "first_order_28"
FEATURE_MODES = (FULL_140, FIRST_ORDER_28)


def feature_names(mode: str = FULL_140) -> list[str]:
    if mode == FULL_140:
        return [f"{s}_{i}" for s in STAT_NAMES for i in range(1, 6)]
    if mode == FIRST_ORDER_28:
        return [f"{s}_1" for s in STAT_NAMES]
    raise ValueError(f"unknown feature mode {mode!r}")


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    lineup: Lineup
    weight: float | None = None
    label: str | None = None


@dataclass(frozen=True)
class StandardizationParams:
    means: np.ndarray
    sds: np.ndarray

    def to_dict(self) -> dict:
        return {"means": self.means.tolist(), "sds": self.sds.tolist()}

    @staticmethod
    def from_dict(d: dict) -> "StandardizationParams":
        return StandardizationParams(np.asarray(d["means"], dtype=float),
                                     np.asarray(d["sds"], dtype=float))


def order_statistics(
    lineup: Lineup,
    stats: dict[str, PlayerSeasonStats],
    weight: float | None = None,
    label: str | None = None,
) -> FeatureVector:
    """Sort each statistic's five player values ascending into positions
    (1)..(5), laid out statistic-major."""
    missing = [p for p in lineup if p not in stats]
    if missing:
        raise KeyError(f"no season stats for player(s): {', '.join(missing)}")
    values = np.empty(140)
    for si, stat in enumerate(STAT_NAMES):
        col = sorted(stats[p].stats[stat] for p in lineup)
        values[si * 5:si * 5 + 5] = col
    return FeatureVector(values, lineup, weight, label)


def vector_for_observation(obs: LineupObservation,
                           stats: dict[str, PlayerSeasonStats]) -> FeatureVector:
    return order_statistics(obs.lineup, stats, weight=obs.minutes, label=obs.label)


def dataset_vectors(dataset: Dataset, mode: str = FULL_140) -> list[FeatureVector]:
    vectors = [vector_for_observation(o, dataset.feature_source)
               for o in dataset.observations]
    return restrict_features(vectors, mode)


def matrix(vectors: Iterable[FeatureVector]) -> np.ndarray:
    return np.stack([v.values for v in vectors])


def fit_standardizer(train: list[FeatureVector]) -> StandardizationParams:
    """Unweighted per-feature mean and sample standard deviation."""
    if len(train) < 2:
        raise ValueError("need at least 2 vectors to fit a standardizer")
    x = matrix(train)
    return StandardizationParams(x.mean(axis=0), x.std(axis=0, ddof=1))


def apply_standardizer(params: StandardizationParams,
                       vectors: list[FeatureVector]) -> list[FeatureVector]:
    """(value - mean) / sd, with sd 0 treated as divisor 1 (constant feature)."""
    divisor = np.where(params.sds > 0, params.sds, 1.0)
    out = []
    for v in vectors:
        if v.values.shape != params.means.shape:
            raise ValueError(
                f"dimension mismatch: vector has {v.values.shape[0]} features, "
                f"standardizer has {params.means.shape[0]}")
        out.append(replace(v, values=(v.values - params.means) / divisor))
    return out


def restrict_features(vectors: list[FeatureVector], mode: str) -> list[FeatureVector]:
    """full_140 is the identity; first_order_28 keeps each statistic's minimum."""
    if mode == FULL_140:
        return vectors
    if mode == FIRST_ORDER_28:
        idx = np.arange(0, 140, 5)
        return [replace(v, values=v.values[idx]) for v in vectors]
    raise ValueError(f"unknown feature mode {mode!r}")


def write_feature_csv(path, vectors: list[FeatureVector], mode: str = FULL_140):
    names = feature_names(mode)
    with open(path, "w") as fh:
        fh.write(",".join(names + ["weight", "label", "lineup"]) + "\n")
        for v in vectors:
            cells = [repr(float(x)) for x in v.values]
            cells += [repr(v.weight) if v.weight is not None else "",
                      v.label or "", "|".join(v.lineup)]
            fh.write(",".join(cells) + "\n")
