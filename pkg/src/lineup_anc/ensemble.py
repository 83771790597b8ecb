"""The all-or-nothing ensemble: seven subclassifier votes combined by a
minimum-agreement threshold, grid tuning by 10-fold cross-validation with
per-fold standardization, precision aggregates, frontier selection, and the
final fitted bundle.

Fold tuning fits each subclassifier once per its own parameter combination
and forms every ensemble combination from the stored held-out predictions,
so the per-fold fit count is the sum of the family grid sizes, not their
product."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import ELITE, NOT_ELITE, __version__
from .evaluation import ConfusionMatrix, precision as cm_precision
from .features import (FULL_140, FeatureVector, StandardizationParams,
                       apply_standardizer, dataset_vectors, feature_names,
                       fit_standardizer, matrix, restrict_features)
from .ingest import Dataset
from .subclassifiers import (BoostParams, FitError, ForestParams, KnnParams,
                             LogitParams, SvmParams, TrainingSet, TreeParams,
                             fit_adaboost, fit_decision_tree, fit_knn, fit_lda,
                             fit_logistic, fit_random_forest, fit_svm_rbf)
from .subclassifiers.boost import AdaBoostModel
from .subclassifiers.forest import RandomForestModel
from .subclassifiers.knn import KnnModel
from .subclassifiers.lda import LdaModel
from .subclassifiers.logistic import LogisticModel
from .subclassifiers.tree import DecisionTreeModel

FAMILIES = ("tree", "forest", "boost", "svm", "knn", "logit", "lda")
MODEL_FORMAT_VERSION = 1


def anc_vote(votes: list[str], num_votes: int) -> str:
    """elite iff at least num_votes of the 7 subclassifier votes are elite."""
    if len(votes) != 7:
        raise ValueError(f"expected exactly 7 votes, got {len(votes)}")
    if not 1 <= num_votes <= 7:
        raise ValueError("num_votes must lie in 1..7")
    return ELITE if sum(v == ELITE for v in votes) >= num_votes else NOT_ELITE


def make_folds(n: int, k: int = 10, seed: int = 0) -> np.ndarray:
    """Seeded unstratified fold assignment; sizes differ by at most one."""
    if n < k:
        raise ValueError(f"cannot make {k} folds from {n} observations")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    assignment = np.empty(n, dtype=int)
    sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    pos = 0
    for fold, size in enumerate(sizes):
        assignment[perm[pos:pos + size]] = fold
        pos += size
    return assignment


@dataclass(frozen=True)
class EnsembleConfig:
    tree: TreeParams
    forest: ForestParams
    boost: BoostParams
    svm: SvmParams
    knn: KnnParams
    logit: LogitParams
    num_votes: int = 7
    feature_mode: str = FULL_140

    def __post_init__(self):
        if not 1 <= self.num_votes <= 7:
            raise ValueError("num_votes must lie in 1..7")

    def to_dict(self) -> dict:
        return {
            "tree": {"cp": self.tree.cp, "loss_fp": self.tree.loss_fp},
            "forest": {"ntree": self.forest.ntree, "cutoff_c": self.forest.cutoff_c,
                       "mtry": self.forest.mtry},
            "boost": {"mfinal": self.boost.mfinal, "maxdepth": self.boost.maxdepth,
                      "cp": self.boost.cp},
            "svm": {"cost": self.svm.cost, "gamma": self.svm.gamma},
            "knn": {"k": self.knn.k},
            "logit": {"thresh": self.logit.thresh},
            "num_votes": self.num_votes,
            "feature_mode": self.feature_mode,
        }

    @staticmethod
    def from_dict(d: dict) -> "EnsembleConfig":
        return EnsembleConfig(
            tree=TreeParams(**d["tree"]),
            forest=ForestParams(**d["forest"]),
            boost=BoostParams(**d["boost"]),
            svm=SvmParams(**d["svm"]),
            knn=KnnParams(**d["knn"]),
            logit=LogitParams(**d["logit"]),
            num_votes=d["num_votes"],
            feature_mode=d.get("feature_mode", FULL_140),
        )


# Table-style grid of tuned values used for the final published model.
TABLE6_CONFIG = EnsembleConfig(
    tree=TreeParams(cp=0.05, loss_fp=1.0),
    forest=ForestParams(ntree=500, cutoff_c=0.7),
    boost=BoostParams(mfinal=500, maxdepth=3, cp=0.01),
    svm=SvmParams(cost=1.0, gamma=1.0),
    knn=KnnParams(k=7),
    logit=LogitParams(thresh=0.25),
    num_votes=7,
)


@dataclass(frozen=True)
class GridSpec:
    tree: tuple[TreeParams, ...]
    forest: tuple[ForestParams, ...]
    boost: tuple[BoostParams, ...]
    svm: tuple[SvmParams, ...]
    knn: tuple[KnnParams, ...]
    logit: tuple[LogitParams, ...]
    num_votes: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7)

    def family_combos(self, family: str) -> tuple:
        if family == "lda":
            return (None,)
        return getattr(self, family)

    @property
    def base_shape(self) -> tuple[int, ...]:
        return tuple(len(self.family_combos(f)) for f in FAMILIES[:6])

    @property
    def n_base(self) -> int:
        return int(np.prod(self.base_shape))

    @property
    def n_total(self) -> int:
        return self.n_base * len(self.num_votes)

    def fits_per_fold(self) -> int:
        return sum(len(self.family_combos(f)) for f in FAMILIES)

    def config_at(self, base_index: int, vote_index: int,
                  feature_mode: str = FULL_140) -> EnsembleConfig:
        idx = np.unravel_index(base_index, self.base_shape)
        return EnsembleConfig(
            tree=self.tree[idx[0]], forest=self.forest[idx[1]],
            boost=self.boost[idx[2]], svm=self.svm[idx[3]],
            knn=self.knn[idx[4]], logit=self.logit[idx[5]],
            num_votes=self.num_votes[vote_index], feature_mode=feature_mode,
        )


def paper_grid() -> GridSpec:
    return GridSpec(
        tree=tuple(TreeParams(cp=cp, loss_fp=loss)
                   for cp in (-1, 0.01, 0.05) for loss in (1.0, 1.5, 2.0)),
        forest=tuple(ForestParams(ntree=ntree, cutoff_c=c)
                     for c in (0.5, 0.7) for ntree in (100, 500)),
        boost=tuple(BoostParams(mfinal=m, maxdepth=d, cp=cp)
                    for m in (100, 500) for d in (1, 2, 3) for cp in (0.01, 0.05)),
        svm=tuple(SvmParams(cost=c, gamma=g)
                  for c in (0.1, 1.0, 10.0) for g in (0.01, 0.1, 1.0)),
        knn=tuple(KnnParams(k=k) for k in (3, 5, 7)),
        logit=tuple(LogitParams(thresh=t) for t in (0.05, 0.25, 0.5)),
    )


def mini_grid() -> GridSpec:
    """Desk-scale grid: 16 base combinations x 7 vote levels = 112 total."""
    return GridSpec(
        tree=(TreeParams(cp=-1, loss_fp=1.0), TreeParams(cp=0.05, loss_fp=1.0)),
        forest=(ForestParams(ntree=25, cutoff_c=0.5),
                ForestParams(ntree=25, cutoff_c=0.9)),
        boost=(BoostParams(mfinal=15, maxdepth=2, cp=0.01),),
        svm=(SvmParams(cost=1.0, gamma=0.1),),
        knn=(KnnParams(k=3), KnnParams(k=5)),
        logit=(LogitParams(thresh=0.05), LogitParams(thresh=0.25)),
    )


GRID_PRESETS = {"paper": paper_grid, "mini": mini_grid}


def _task_seed(master: int, fold: int, family_index: int, combo_index: int) -> int:
    seq = np.random.SeedSequence((master, fold + 1, family_index, combo_index))
    return int(seq.generate_state(1)[0])


def _fit_family(family: str, train: TrainingSet, params, seed: int):
    if family == "tree":
        return fit_decision_tree(train, params)
    if family == "forest":
        return fit_random_forest(train, params, seed)
    if family == "boost":
        return fit_adaboost(train, params, seed)
    if family == "svm":
        return fit_svm_rbf(train, params)
    if family == "knn":
        return fit_knn(train, params)
    if family == "logit":
        return fit_logistic(train)
    if family == "lda":
        return fit_lda(train)
    raise ValueError(f"unknown family {family!r}")


def _predict_family(family: str, model, x: np.ndarray, params) -> np.ndarray:
    if family == "logit":
        return model.predict(x, params)
    return model.predict(x)


@dataclass
class TuningTable:
    grid: GridSpec
    feature_mode: str
    k: int
    seed: int
    avg_precision: np.ndarray   # (n_base, n_votes)
    min_precision: np.ndarray
    sd_precision: np.ndarray
    avg_accuracy: np.ndarray
    has_na: np.ndarray          # bool (n_base, n_votes)
    fits_per_fold: list[int]
    fold_assignment: np.ndarray
    fold_standardizers: list[StandardizationParams]
    preds: dict = field(repr=False, default_factory=dict)
    fit_errors: list[dict] = field(default_factory=list)

    @property
    def n_base(self) -> int:
        return self.avg_precision.shape[0]

    @property
    def n_votes(self) -> int:
        return self.avg_precision.shape[1]

    def config_at(self, base_index: int, vote_index: int) -> EnsembleConfig:
        return self.grid.config_at(base_index, vote_index, self.feature_mode)

    def iter_records(self):
        for b in range(self.n_base):
            cfg0 = self.grid.config_at(b, 0, self.feature_mode)
            for v in range(self.n_votes):
                yield {
                    "base_index": b, "vote_index": v,
                    "tree_cp": cfg0.tree.cp, "tree_loss_fp": cfg0.tree.loss_fp,
                    "forest_c": cfg0.forest.cutoff_c,
                    "forest_ntree": cfg0.forest.ntree,
                    "boost_mfinal": cfg0.boost.mfinal,
                    "boost_maxdepth": cfg0.boost.maxdepth,
                    "boost_cp": cfg0.boost.cp,
                    "svm_cost": cfg0.svm.cost, "svm_gamma": cfg0.svm.gamma,
                    "knn_k": cfg0.knn.k, "logit_thresh": cfg0.logit.thresh,
                    "num_votes": self.grid.num_votes[v],
                    "avg_precision": self.avg_precision[b, v],
                    "min_precision": self.min_precision[b, v],
                    "sd_precision": self.sd_precision[b, v],
                    "avg_accuracy": self.avg_accuracy[b, v],
                    "has_na": bool(self.has_na[b, v]),
                }

    def write_csv(self, path):
        cols = ["tree_cp", "tree_loss_fp", "forest_c", "forest_ntree",
                "boost_mfinal", "boost_maxdepth", "boost_cp", "svm_cost",
                "svm_gamma", "knn_k", "logit_thresh", "num_votes",
                "avg_precision", "min_precision", "sd_precision",
                "avg_accuracy", "has_na"]
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for rec in self.iter_records():
                cells = []
                for c in cols:
                    v = rec[c]
                    if isinstance(v, float) and np.isnan(v):
                        cells.append("NA")
                    else:
                        cells.append(str(v))
                fh.write(",".join(cells) + "\n")

    def non_na(self) -> np.ndarray:
        """Flat indices (base * n_votes + vote) of combinations with defined
        precision in every fold."""
        return np.flatnonzero(~self.has_na.ravel())


def fold_precision(cm: ConfusionMatrix) -> float | None:
    """Precision of one fold; undefined when no lineup was predicted elite."""
    return cm_precision(cm)


def cross_validate_vectors(vectors: list[FeatureVector], grid: GridSpec,
                           k: int = 10, seed: int = 0,
                           feature_mode: str = FULL_140) -> TuningTable:
    """Algorithm core: per fold, standardize on the k-1 training folds, fit
    each family once per its own combination, store held-out predictions,
    then aggregate precision/accuracy for every ensemble combination."""
    n = len(vectors)
    assignment = make_folds(n, k, seed)
    y_all = np.array([1 if v.label == ELITE else 0 for v in vectors])

    shape = grid.base_shape
    n_base, n_votes = grid.n_base, len(grid.num_votes)
    votes_arr = np.asarray(grid.num_votes)

    sum_prec = np.zeros((n_base, n_votes))
    sumsq_prec = np.zeros((n_base, n_votes))
    min_prec = np.full((n_base, n_votes), np.inf)
    sum_acc = np.zeros((n_base, n_votes))
    any_na = np.zeros((n_base, n_votes), dtype=bool)

    fits_per_fold: list[int] = []
    standardizers: list[StandardizationParams] = []
    preds_store: dict = {}
    fit_errors: list[dict] = []

    for fold in range(k):
        test_mask = assignment == fold
        train_vecs = [v for v, m in zip(vectors, test_mask) if not m]
        test_vecs = [v for v, m in zip(vectors, test_mask) if m]
        std = fit_standardizer(train_vecs)
        standardizers.append(std)
        train_std = apply_standardizer(std, train_vecs)
        test_x = matrix(apply_standardizer(std, test_vecs))
        train_set = TrainingSet.from_vectors(train_std)
        y_test = y_all[test_mask]
        fold_n = len(y_test)

        fits = 0
        family_preds: dict[str, list] = {}
        for fi, family in enumerate(FAMILIES):
            combos = grid.family_combos(family)
            rows = []
            for ci, params in enumerate(combos):
                task_seed = _task_seed(seed, fold, fi, ci)
                try:
                    model = _fit_family(family, train_set, params, task_seed)
                    rows.append(_predict_family(family, model, test_x, params)
                                .astype(np.int8))
                except FitError as err:
                    rows.append(None)
                    fit_errors.append({"fold": fold, "family": family,
                                       "combo": ci, "error": str(err)})
                fits += 1
            family_preds[family] = rows
            preds_store[(fold, family)] = rows
        fits_per_fold.append(fits)

        # vote counts for every base combination via broadcasting
        counts = np.zeros(shape + (fold_n,), dtype=np.int8)
        errored = np.zeros(shape, dtype=bool)
        for fi, family in enumerate(FAMILIES[:6]):
            rows = family_preds[family]
            stack = np.stack([np.zeros(fold_n, dtype=np.int8) if r is None else r
                              for r in rows])
            bshape = [1] * 6 + [fold_n]
            bshape[fi] = len(rows)
            counts = counts + stack.reshape(bshape)
            if any(r is None for r in rows):
                eshape = [1] * 6
                eshape[fi] = len(rows)
                errored = errored | np.array([r is None for r in rows]).reshape(eshape)
        lda_row = family_preds["lda"][0]
        if lda_row is None:
            errored |= True
        else:
            counts = counts + lda_row.reshape([1] * 6 + [fold_n])

        counts = counts.reshape(n_base, fold_n)
        errored = np.broadcast_to(errored, shape).reshape(n_base)
        truth = y_test.astype(np.int64)
        n_pos = truth.sum()

        for vi, v in enumerate(votes_arr):
            anc = counts >= v
            tp = anc.astype(np.int64) @ truth
            pred_pos = anc.sum(axis=1)
            fp = pred_pos - tp
            tn = fold_n - n_pos - fp
            acc = (tp + tn) / fold_n
            with np.errstate(invalid="ignore", divide="ignore"):
                prec = np.where(pred_pos > 0, tp / np.maximum(pred_pos, 1), np.nan)
            prec[errored] = np.nan

            na = np.isnan(prec)
            any_na[:, vi] |= na
            safe = np.where(na, 0.0, prec)
            sum_prec[:, vi] += safe
            sumsq_prec[:, vi] += safe ** 2
            min_prec[:, vi] = np.where(na, min_prec[:, vi],
                                       np.minimum(min_prec[:, vi], prec))
            sum_acc[:, vi] += acc

    avg = sum_prec / k
    sd = np.sqrt(np.maximum(sumsq_prec - k * avg ** 2, 0.0) / (k - 1))
    avg_acc = sum_acc / k
    avg[any_na] = np.nan
    sd[any_na] = np.nan
    min_prec[any_na] = np.nan

    return TuningTable(grid, feature_mode, k, seed, avg, min_prec, sd, avg_acc,
                       any_na, fits_per_fold, assignment, standardizers,
                       preds_store, fit_errors)


def cross_validate_grid(train: Dataset, grid: GridSpec, k: int = 10,
                        seed: int = 0,
                        feature_mode: str = FULL_140) -> TuningTable:
    vectors = dataset_vectors(train, feature_mode)
    return cross_validate_vectors(vectors, grid, k, seed, feature_mode)


def efficient_frontier(points: list[tuple[float, float]]) -> list[int]:
    """Weak Pareto set (maximize both coordinates): indices of points not
    weakly dominated by any other; exact duplicates keep the first occurrence.

    Sweep over x-groups in descending order: a point survives iff it has the
    top y of its group and beats every y seen at strictly larger x."""
    n = len(points)
    if n == 0:
        return []
    groups: dict[float, list[int]] = {}
    for i, (x, _) in enumerate(points):
        groups.setdefault(x, []).append(i)

    kept = []
    best_y_higher_x = -np.inf
    for x in sorted(groups, reverse=True):
        members = groups[x]
        group_top = max(points[i][1] for i in members)
        for i in members:
            y = points[i][1]
            if y == group_top and y > best_y_higher_x:
                kept.append(i)
        best_y_higher_x = max(best_y_higher_x, group_top)

    kept.sort()
    seen: set[tuple[float, float]] = set()
    out = []
    for i in kept:
        if points[i] not in seen:
            seen.add(points[i])
            out.append(i)
    return out


def frontier_points(table: TuningTable,
                    second_metric: str = "min_precision") -> tuple[np.ndarray, list]:
    """Non-NA (avg_precision, second_metric) pairs and their flat indices."""
    idx = table.non_na()
    avg = table.avg_precision.ravel()[idx]
    second = getattr(table, second_metric).ravel()[idx]
    return idx, list(zip(avg.tolist(), second.tolist()))


def select_configuration(table: TuningTable, policy: str = "max_avg",
                         floor: float | None = None,
                         index: int | None = None) -> EnsembleConfig:
    """Pick a combination from the tuning table.

    max_avg: highest average precision (ties: higher min, lower sd, lower
    num_votes). min_precision_floor: highest average among combinations whose
    worst fold stayed at or above the floor. interactive_index: the i-th
    frontier point by descending average precision, exposing the judgment
    call instead of automating it."""
    flat = table.non_na()
    if flat.size == 0:
        raise ValueError("every combination has an undefined fold precision")
    avg = table.avg_precision.ravel()
    mn = table.min_precision.ravel()
    sd = table.sd_precision.ravel()
    votes = np.array([table.grid.num_votes[i % table.n_votes]
                      for i in range(table.n_base * table.n_votes)])

    def order_key(i):
        return (-avg[i], -mn[i], sd[i], votes[i], i)

    if policy == "max_avg":
        pick = min(flat, key=order_key)
    elif policy == "min_precision_floor":
        if floor is None:
            raise ValueError("min_precision_floor policy needs a floor")
        ok = [i for i in flat if mn[i] >= floor]
        if not ok:
            best = max(mn[i] for i in flat)
            raise ValueError(
                f"no combination has min precision >= {floor}; the best "
                f"achievable minimum is {best:.4f}")
        pick = min(ok, key=order_key)
    elif policy == "interactive_index":
        if index is None:
            raise ValueError("interactive_index policy needs an index")
        idx, pts = frontier_points(table)
        front = [idx[i] for i in efficient_frontier(pts)]
        front.sort(key=order_key)
        if not 0 <= index < len(front):
            raise ValueError(f"frontier has {len(front)} points; "
                             f"index {index} is out of range")
        pick = front[index]
    else:
        raise ValueError(f"unknown selection policy {policy!r}")

    return table.config_at(pick // table.n_votes, pick % table.n_votes)


@dataclass
class TunedEnsembleModel:
    config: EnsembleConfig
    models: dict
    standardizer: StandardizationParams
    seed: int
    data_hash: str
    n_train: int

    @property
    def feature_names(self) -> list[str]:
        return feature_names(self.config.feature_mode)

    def prepare(self, vectors: list[FeatureVector]) -> np.ndarray:
        """Raw order-statistic vectors -> the model's standardized basis."""
        vectors = [v if len(v.values) == len(self.standardizer.means)
                   else restrict_features([v], self.config.feature_mode)[0]
                   for v in vectors]
        return matrix(apply_standardizer(self.standardizer, vectors))

    def vote_matrix(self, x: np.ndarray) -> np.ndarray:
        """(n, 7) binary votes in the fixed family order."""
        x = np.atleast_2d(x)
        cols = []
        for family in FAMILIES:
            params = getattr(self.config, family, None)
            cols.append(_predict_family(family, self.models[family], x, params))
        return np.stack(cols, axis=1)

    def predict_vectors(self, vectors: list[FeatureVector]) -> tuple[list[str], list[list[str]]]:
        votes = self.vote_matrix(self.prepare(vectors))
        vote_labels = [[ELITE if v else NOT_ELITE for v in row] for row in votes]
        labels = [anc_vote(row, self.config.num_votes) for row in vote_labels]
        return labels, vote_labels

    def to_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "artifact_version": __version__,
            "config": self.config.to_dict(),
            "feature_names": self.feature_names,
            "standardizer": self.standardizer.to_dict(),
            "models": {f: self.models[f].to_dict() for f in FAMILIES},
            "metadata": {"seed": self.seed, "data_hash": self.data_hash,
                         "n_train": self.n_train},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @staticmethod
    def from_dict(d: dict) -> "TunedEnsembleModel":
        if d.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError("unsupported model file version")
        from .subclassifiers.svm import SvmModel
        loaders = {"tree": DecisionTreeModel, "forest": RandomForestModel,
                   "boost": AdaBoostModel, "svm": SvmModel, "knn": KnnModel,
                   "logit": LogisticModel, "lda": LdaModel}
        models = {f: loaders[f].from_dict(d["models"][f]) for f in FAMILIES}
        meta = d["metadata"]
        return TunedEnsembleModel(EnsembleConfig.from_dict(d["config"]), models,
                                  StandardizationParams.from_dict(d["standardizer"]),
                                  meta["seed"], meta["data_hash"], meta["n_train"])

    @staticmethod
    def load(path) -> "TunedEnsembleModel":
        with open(path) as fh:
            return TunedEnsembleModel.from_dict(json.load(fh))


def _data_hash(train: TrainingSet) -> str:
    digest = hashlib.sha256()
    digest.update(train.x.tobytes())
    digest.update(train.y.tobytes())
    digest.update(train.w.tobytes())
    return digest.hexdigest()


def fit_ensemble(train: Dataset, config: EnsembleConfig,
                 seed: int = 0) -> TunedEnsembleModel:
    """Standardize the full training set and fit all seven subclassifiers."""
    vectors = dataset_vectors(train, config.feature_mode)
    std = fit_standardizer(vectors)
    train_set = TrainingSet.from_vectors(apply_standardizer(std, vectors))
    models = {}
    for fi, family in enumerate(FAMILIES):
        params = getattr(config, family, None)
        models[family] = _fit_family(family, train_set, params,
                                     _task_seed(seed, -1, fi, 0))
    return TunedEnsembleModel(config, models, std, seed,
                              _data_hash(train_set), train_set.n)


def predict_ensemble(model: TunedEnsembleModel,
                     features: FeatureVector) -> dict:
    """ANC verdict for one raw (unstandardized) order-statistic vector."""
    labels, votes = model.predict_vectors([features])
    return {"label": labels[0], "votes": votes[0]}
