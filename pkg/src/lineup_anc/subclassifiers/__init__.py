from .common import FitError, TrainingSet, labels_from_binary
from .tree import (DecisionTreeModel, TreeParams, fit_decision_tree,
                   predict_tree)
from .forest import ForestParams, RandomForestModel, fit_random_forest
from .boost import AdaBoostModel, BoostParams, fit_adaboost
from .svm import SvmConvergenceError, SvmModel, SvmParams, fit_svm_rbf
from .knn import KnnModel, KnnParams, fit_knn, knn_predict
from .logistic import (LogisticModel, LogitParams, fit_logistic,
                       predict_logistic)
from .lda import LdaModel, fit_lda

__all__ = [
    "FitError", "TrainingSet", "labels_from_binary",
    "DecisionTreeModel", "TreeParams", "fit_decision_tree", "predict_tree",
    "ForestParams", "RandomForestModel", "fit_random_forest",
    "AdaBoostModel", "BoostParams", "fit_adaboost",
    "SvmConvergenceError", "SvmModel", "SvmParams", "fit_svm_rbf",
    "KnnModel", "KnnParams", "fit_knn", "knn_predict",
    "LogisticModel", "LogitParams", "fit_logistic", "predict_logistic",
    "LdaModel", "fit_lda",
]
