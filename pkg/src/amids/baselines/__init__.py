"""Comparison classifiers: Gaussian naive Bayes, random forest, RBF-SVM."""
from .forest import DecisionTree, RandomForestModel, build_tree, gini, predict_forest, predict_forest_batch, train_forest
from .naive_bayes import GaussianNBModel, predict_nb, predict_nb_batch, train_nb
from .svm import SVMModel, kkt_violation, predict_svm, predict_svm_batch, rbf_kernel, rbf_kernel_matrix, train_svm

__all__ = [
    "DecisionTree", "RandomForestModel", "build_tree", "gini", "predict_forest",
    "predict_forest_batch", "train_forest", "GaussianNBModel", "predict_nb",
    "predict_nb_batch", "train_nb", "SVMModel", "kkt_violation", "predict_svm",
    "predict_svm_batch", "rbf_kernel", "rbf_kernel_matrix", "train_svm",
]
