"""Confusion-matrix metrics, the elite-vs-not PMM group comparison, and
variable importance for the interpretable subclassifiers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from . import ELITE
from .ingest import LineupObservation


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


def confusion(preds: list[str], truths: list[str]) -> ConfusionMatrix:
    if len(preds) != len(truths):
        raise ValueError(f"length mismatch: {len(preds)} predictions vs "
                         f"{len(truths)} truths")
    tp = fp = fn = tn = 0
    for p, t in zip(preds, truths):
        if p == ELITE:
            tp += t == ELITE
            fp += t != ELITE
        else:
            fn += t == ELITE
            tn += t != ELITE
    return ConfusionMatrix(tp, fp, fn, tn)


def precision(cm: ConfusionMatrix) -> float | None:
    """TP / (TP + FP); undefined (None) when nothing was predicted elite."""
    denom = cm.tp + cm.fp
    return cm.tp / denom if denom else None


def accuracy(cm: ConfusionMatrix) -> float:
    return (cm.tp + cm.tn) / cm.n


@dataclass(frozen=True)
class GroupComparison:
    mean_elite_pred: float
    mean_notelite_pred: float
    p_value: float
    n_elite_pred: int
    n_notelite_pred: int

    def to_dict(self) -> dict:
        return {"mean_elite_pred": self.mean_elite_pred,
                "mean_notelite_pred": self.mean_notelite_pred,
                "p_value": self.p_value,
                "n_elite_pred": self.n_elite_pred,
                "n_notelite_pred": self.n_notelite_pred}


def welch_one_sided(a: np.ndarray, b: np.ndarray) -> float:
    """One-sided Welch t-test p-value for mean(a) > mean(b), with
    Welch-Satterthwaite degrees of freedom."""
    na, nb = len(a), len(b)
    va, vb = a.var(ddof=1) / na, b.var(ddof=1) / nb
    if va + vb == 0:
        raise ValueError("degenerate variance: both groups are constant")
    t = (a.mean() - b.mean()) / np.sqrt(va + vb)
    df = (va + vb) ** 2 / (va ** 2 / (na - 1) + vb ** 2 / (nb - 1))
    return float(sps.t.sf(t, df))


def compare_pmm_groups(observations: list[LineupObservation],
                       predicted: list[str]) -> GroupComparison:
    """Compare realized PMM between lineups the model called elite and the
    rest (one-sided: elite-predicted mean is higher)."""
    if len(observations) != len(predicted):
        raise ValueError("observations and predictions length mismatch")
    pmm = np.array([o.pmm for o in observations])
    mask = np.array([p == ELITE for p in predicted])
    group_e, group_n = pmm[mask], pmm[~mask]
    if len(group_e) < 2 or len(group_n) < 2:
        raise ValueError("each predicted group needs at least 2 lineups")
    p_value = welch_one_sided(group_e, group_n)
    return GroupComparison(float(group_e.mean()), float(group_n.mean()),
                           p_value, int(mask.sum()), int((~mask).sum()))


def variable_importance(model) -> dict:
    """Per-family importance tables for a fitted ensemble.

    Forest and boosting report total Gini decrease per feature normalized to
    a max of 1; LDA and logistic report standardized coefficient magnitudes;
    the tree reports the features used in its retained splits."""
    names = model.feature_names

    def normalized(imp: np.ndarray) -> dict[str, float]:
        top = imp.max()
        if top > 0:
            imp = imp / top
        return {name: float(v) for name, v in zip(names, imp)}

    logit_coef = np.abs(model.models["logit"].coef[1:])
    lda_coef = np.abs(model.models["lda"].coefficients())
    tree_feats = sorted(set(model.models["tree"].split_features()))
    return {
        "forest": normalized(model.models["forest"].gini_importance()),
        "boost": normalized(model.models["boost"].gini_importance()),
        "logit": {name: float(v) for name, v in zip(names, logit_coef)},
        "lda": {name: float(v) for name, v in zip(names, lda_coef)},
        "tree": [names[f] for f in tree_feats],
    }


def write_boxplot_csv(path, observations: list[LineupObservation],
                      predicted: list[str]):
    """Rows of (lineup, predicted_label, pmm, minutes) for box plots."""
    with open(path, "w") as fh:
        fh.write("lineup,predicted_label,pmm,minutes\n")
        for obs, label in zip(observations, predicted):
            fh.write(f"{'|'.join(obs.lineup)},{label},{obs.pmm!r},"
                     f"{obs.minutes!r}\n")
