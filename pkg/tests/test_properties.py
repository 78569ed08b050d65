"""Property-based checks of the numeric building blocks."""
import math

import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from amids import dataset, mlp, serialize
from amids.baselines import forest

finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(arrays(np.float64, st.tuples(st.integers(1, 20), st.just(2)), elements=st.floats(-700, 700)))
def test_softmax_rows_sum_to_one(z):
    p = mlp.softmax(z)
    assert np.all(p >= 0)
    assert np.all(np.abs(p.sum(axis=1) - 1.0) <= 1e-9)


@given(st.floats(0.0, 1.0), st.integers(0, 1))
def test_cross_entropy_finite_and_nonnegative(p, y):
    loss = mlp.cross_entropy(y, p)
    assert math.isfinite(loss) and loss >= 0
    # 1 - (1 - 1e-12) rounds to slightly under 1e-12
    assert loss <= -math.log(1e-12) + 1e-4


@given(arrays(np.float64, st.tuples(st.integers(2, 40), st.integers(1, 5)),
              elements=st.floats(-1e4, 1e4, allow_nan=False)))
def test_standardization_moments(X):
    params = dataset.fit_standardization(X)
    Z = dataset.standardize(X, params)
    assert np.all(np.isfinite(Z))
    assert np.all(Z[:, params.constant_mask] == 0)
    for j in np.flatnonzero(~params.constant_mask):
        # tiny spreads relative to the values lose precision in the mean itself
        if params.sigma[j] < 1e-6 * max(1.0, np.abs(X[:, j]).max()):
            continue
        assert abs(Z[:, j].mean()) <= 1e-9
        assert abs(Z[:, j].std() - 1.0) <= 1e-6


@given(st.lists(st.integers(0, 1), min_size=20, max_size=200), st.integers(2, 5), st.integers(0, 2**31))
def test_kfold_partitions(labels, k, seed):
    y = np.array(labels)
    if min(np.bincount(y, minlength=2)[np.unique(y)]) < k:
        return
    folds = dataset.stratified_kfold(y, k, seed)
    sizes = np.bincount(folds.assignment, minlength=k)
    assert sizes.sum() == y.size and sizes.max() - sizes.min() <= 1
    for c in np.unique(y):
        per = np.bincount(folds.assignment[y == c], minlength=k)
        assert per.max() - per.min() <= 1


@given(st.lists(st.integers(0, 1), min_size=1, max_size=200), st.data())
def test_subsample_quota(labels, data):
    y = np.array(labels)
    n = data.draw(st.integers(0, y.size))
    idx = dataset.subsample_indices(y, n, 0)
    assert idx.size == n and np.unique(idx).size == n
    for c in (0, 1):
        share = (y == c).sum() * n / y.size
        assert abs((y[idx] == c).sum() - share) < 1.0 + 1e-9


@given(st.lists(st.integers(0, 1000), min_size=2, max_size=2).filter(lambda c: sum(c) > 0))
def test_gini_bounds(counts):
    g = forest.gini(counts)
    assert 0.0 <= g <= 0.5


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(list(mlp.Activation)),
       st.lists(st.integers(1, 6), min_size=1, max_size=3))
def test_mlp_document_round_trip(seed, act, hidden):
    model = mlp.init_model((4, *hidden, 2), act, seed=seed)
    again = serialize.deserialize_model(serialize.serialize_model(model)).model
    X = np.random.default_rng(seed).normal(size=(10, 4))
    assert np.array_equal(mlp.predict_proba(model, X), mlp.predict_proba(again, X))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.lists(st.floats(-1, 1), min_size=4, max_size=4))
def test_adam_first_step_sign(seed, g):
    g = np.array(g)
    p = np.random.default_rng(seed).normal(size=4)
    new, _ = mlp.adam_step(mlp.adam_init([p]), [p], [g])
    step = new[0] - p
    big = np.abs(g) > 1e-6
    assert np.all(np.sign(step[big]) == -np.sign(g[big]))
    assert np.all(np.abs(step) <= 0.001 + 1e-12)
