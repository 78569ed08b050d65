import math

import numpy as np
import pytest

from amids import experiments, mlp
from amids.errors import BoundsError, ConfigError, ShapeError


def labels(tp, tn, fp, fn):
    pred = [1] * tp + [0] * tn + [1] * fp + [0] * fn
    truth = [1] * tp + [0] * tn + [0] * fp + [1] * fn
    return np.array(pred), np.array(truth)


def test_evaluate_oracle():
    pred, truth = labels(50, 40, 5, 5)
    r = experiments.evaluate(pred, truth)
    assert r.confusion == experiments.ConfusionMatrix(50, 40, 5, 5)
    assert r.accuracy == pytest.approx(0.9, abs=1e-12)
    assert r.p_detection == pytest.approx(50 / 55, abs=1e-12)
    assert round(r.p_detection, 4) == 0.9091
    assert round(r.p_false_alarm, 4) == 0.1111
    assert round(r.p_miss_detection, 4) == 0.0909
    assert r.p_detection + r.p_miss_detection == pytest.approx(1.0, abs=1e-12)
    assert r.loss is None


def test_evaluate_undefined_rates():
    r = experiments.evaluate(np.zeros(4, dtype=int), np.zeros(4, dtype=int))
    assert r.accuracy == 1.0 and r.p_false_alarm == 0.0
    assert r.p_detection is None and r.p_miss_detection is None


def test_evaluate_loss_from_confidences():
    r = experiments.evaluate(np.array([1, 0]), np.array([1, 1]), np.array([0.5, 0.5]))
    assert r.loss == pytest.approx(math.log(2), abs=1e-12)


def test_evaluate_shape_errors():
    with pytest.raises(ShapeError):
        experiments.evaluate([1, 0], [1])
    with pytest.raises(ShapeError):
        experiments.evaluate([], [])


def test_fold_seeds_are_distinct_and_stable():
    seeds = [experiments.fold_seed(42, f) for f in range(10)]
    assert len(set(seeds)) == 10
    assert seeds == [experiments.fold_seed(42, f) for f in range(10)]


def test_cross_validate_nb_on_fixture(fixture_xy):
    X, y = fixture_xy
    res = experiments.cross_validate(experiments.NaiveBayesAlgorithm(), X, y, k=5, seed=0)
    assert len(res.reports) == 5
    assert res.confusion.total == len(y)
    assert 0.5 < res.accuracy <= 1.0
    assert res.std("accuracy") >= 0


def test_cross_validate_standardizes_per_fold(fixture_xy):
    X, y = fixture_xy
    seen = []

    class Probe:
        name = "probe"

        def fit(self, Xtr, ytr, seed):
            seen.append((Xtr.mean(axis=0), seed))
            return None

        def predict(self, model, Xte):
            return np.zeros(len(Xte), dtype=int), np.full(len(Xte), 0.5)

    experiments.cross_validate(Probe(), X, y, k=3, seed=1)
    assert len(seen) == 3
    for means, _ in seen:
        assert np.all(np.abs(means) < 1e-9)
    assert len({s for _, s in seen}) == 3


def test_sweep_epochs_rows_and_flush(fixture_xy):
    X, y = fixture_xy
    flushed = []
    cfg = mlp.TrainConfig(hidden_layers=(4,), epochs=1, seed=0)
    res = experiments.sweep_epochs(X, y, [2, 1], cfg, k=3, seed=0, on_row=lambda r: flushed.append(len(r.rows)))
    assert [r.value for r in res.rows] == [1, 2]
    assert flushed == [1, 2]
    text = experiments.csv_text(res)
    assert text.splitlines()[0] == "param," + ",".join(experiments.METRIC_COLUMNS)
    assert len(text.splitlines()) == 3


def test_sweep_packets_bounds(fixture_xy):
    X, y = fixture_xy
    with pytest.raises(BoundsError):
        experiments.sweep_packets(X, y, [10_000], experiments.NaiveBayesAlgorithm())
    res = experiments.sweep_packets(X, y, [500, 200], experiments.NaiveBayesAlgorithm(), k=2)
    assert [r.value for r in res.rows] == [200, 500]
    assert res.rows[0].result.confusion.total == 200


def test_sweep_architecture_forces_sigmoid(fixture_xy):
    X, y = fixture_xy
    captured = []
    cfg = mlp.TrainConfig(hidden_layers=(3,), activation="relu", epochs=1)
    experiments.sweep_architecture(X[:200], y[:200], [(2, 3), (1, 4)], cfg, k=2,
                                   on_row=lambda r: captured.append(r.rows[-1].value))
    assert captured == ["1x4", "2x3"]
    with pytest.raises(ConfigError):
        experiments.sweep_architecture(X, y, [(0, 5)], cfg)


def small_algorithms():
    return [
        experiments.MLPAlgorithm(mlp.TrainConfig(hidden_layers=(5, 5), epochs=3)),
        experiments.ForestAlgorithm(5),
        experiments.SVMAlgorithm(max_train=200),
        experiments.NaiveBayesAlgorithm(),
    ]


def test_compare_is_byte_identical(fixture_xy):
    X, y = fixture_xy
    a = experiments.compare_algorithms(X, y, seed=7, algorithms=small_algorithms(), k=3)
    b = experiments.compare_algorithms(X, y, seed=7, algorithms=small_algorithms(), k=3)
    ta, tb = experiments.csv_text(a), experiments.csv_text(b)
    assert ta == tb
    lines = ta.splitlines()
    assert [l.split(",")[0] for l in lines[1:]] == ["deep_learning", "random_forest", "svm", "naive_bayes"]
    # the SVM reports margins, not probabilities, so its loss cells stay empty
    svm_row = lines[3].split(",")
    assert svm_row[3] == "" and svm_row[-1] == "0.617000"
    timing = experiments.timing_csv_text(a).splitlines()
    assert timing[0] == "algorithm,train_seconds,inference_seconds" and len(timing) == 5


def test_emit_csv_writes_both_files(tmp_path, fixture_xy):
    X, y = fixture_xy
    res = experiments.sweep_packets(X, y, [100], experiments.NaiveBayesAlgorithm(), k=2)
    main, timing = tmp_path / "s.csv", tmp_path / "s_timing.csv"
    experiments.emit_csv(res, str(main), str(timing))
    assert main.read_text() == experiments.csv_text(res)
    assert timing.read_text().startswith("param,train_seconds")


def test_fold_table(fixture_xy):
    X, y = fixture_xy
    res = experiments.cross_validate(experiments.NaiveBayesAlgorithm(), X, y, k=4, seed=0)
    lines = experiments.fold_table_text(res).splitlines()
    assert len(lines) == 6 and lines[-1].startswith("mean,")
