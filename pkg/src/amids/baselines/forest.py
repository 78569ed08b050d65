"""CART trees on Gini impurity and a bagged forest of them."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import ShapeError, TrainingError


def gini(counts):
    counts = np.asarray(counts, dtype=np.float64)
    if np.any(counts < 0):
        raise ValueError("class counts must be non-negative")
    total = counts.sum()
    if total == 0:
        raise ValueError("gini of an empty node")
    p = counts / total
    return float(1.0 - np.sum(p * p))


@dataclass(frozen=True)
class DecisionTree:
    """Array-encoded binary tree; ``left == -1`` marks a leaf.

    Internal nodes send ``x[feature] <= threshold`` to the left child.
    ``counts[i]`` holds the class counts of the training samples at node i.
    """
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray

    @property
    def n_nodes(self):
        return self.feature.shape[0]

    def leaf_class(self):
        return (self.counts[:, 1] > self.counts[:, 0]).astype(np.int64)

    def apply(self, X):
        return kernels.tree_apply(X, self.feature, self.threshold, self.left, self.right)

    def predict(self, X):
        return self.leaf_class()[self.apply(X)]


def build_tree(X, y, rng, max_features=None, min_samples_split=2, max_depth=None, sample_idx=None):
    """Grow one tree to purity (or until no split is possible).

    At each node the features are visited in a fresh random order and the
    best Gini split among the first ``max_features`` non-constant ones wins.
    """
    n, d = X.shape
    max_features = d if max_features is None else int(max_features)
    XT = np.ascontiguousarray(X.T)
    # sorted indices keep column gathers monotone; the split found does not
    # depend on sample order
    idx0 = np.arange(n, dtype=np.int64) if sample_idx is None else np.sort(np.asarray(sample_idx, dtype=np.int64))
    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node(idx):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        c1 = int(y[idx].sum())
        counts.append((idx.shape[0] - c1, c1))
        return len(feature) - 1

    stack = [(new_node(idx0), idx0, 0)]
    while stack:
        node, idx, depth = stack.pop()
        c0, c1 = counts[node]
        if c0 == 0 or c1 == 0 or idx.shape[0] < min_samples_split:
            continue
        if max_depth is not None and depth >= max_depth:
            continue
        order = rng.permutation(d).astype(np.int64)
        f, t, _ = kernels.best_split(XT, y, idx, order, max_features)
        if f < 0:
            continue
        go_left = XT[f, idx] <= t
        li, ri = idx[go_left], idx[~go_left]
        feature[node] = int(f)
        threshold[node] = float(t)
        left[node] = new_node(li)
        right[node] = new_node(ri)
        # right first so the left subtree is expanded first
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))
    return DecisionTree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(counts, dtype=np.int64).reshape(-1, 2),
    )


@dataclass(frozen=True)
class RandomForestModel:
    trees: tuple
    tree_seeds: tuple
    max_features: int
    n_features: int


def tree_seeds(master_seed, count):
    return tuple(int(s) for s in np.random.SeedSequence(master_seed).generate_state(count, dtype=np.uint64))


def train_forest(X, y, tree_count=100, seed=0, max_features=None, min_samples_split=2, max_depth=None):
    """Bagged trees; tree ``i`` draws its bootstrap and feature orders from ``tree_seeds[i]``."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, d = X.shape
    if n == 0:
        raise TrainingError("no training records")
    if tree_count < 1:
        raise TrainingError(f"tree_count must be >= 1, got {tree_count}")
    if max_features is None:
        max_features = math.ceil(math.sqrt(d))
    seeds = tree_seeds(seed, tree_count)
    trees = []
    for s in seeds:
        rng = np.random.default_rng(s)
        boot = rng.integers(0, n, size=n)
        trees.append(build_tree(X, y, rng, max_features, min_samples_split, max_depth, sample_idx=boot))
    return RandomForestModel(tuple(trees), seeds, int(max_features), d)


def forest_votes(model, X):
    X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
    if X.shape[1] != model.n_features:
        raise ShapeError(f"input has {X.shape[1]} features, forest expects {model.n_features}")
    votes = np.zeros(X.shape[0], dtype=np.int64)
    for tree in model.trees:
        votes += tree.predict(X)
    return votes


def predict_forest_batch(model, X):
    """Majority vote (ties to class 0) and the winning class's vote share."""
    votes = forest_votes(model, X)
    T = len(model.trees)
    cls = (2 * votes > T).astype(np.int64)
    share = np.where(cls == 1, votes, T - votes) / T
    return cls, share


def predict_forest(model, x):
    cls, share = predict_forest_batch(model, np.asarray(x, dtype=np.float64)[None, :])
    return int(cls[0]), float(share[0])
