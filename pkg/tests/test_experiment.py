import hashlib

import numpy as np
import pytest

from ripe.core import InputError, ParameterError
from ripe.experiment import (
    ExperimentConfig,
    circle_target,
    gen_circle,
    gen_linear,
    nmse,
    split_indices,
)

# sha256 of the first run of gen_linear(500, 50, 3, 10.0, seed=42), frozen
LINEAR_X_SHA = "f048f286d4115a0f536f76c0aa477c250fdfdac50cdc24cb299b165508cdcae6"
LINEAR_Y_SHA = "ab8124d5e7f5def18acdae9b19a71c47e86b29640beb554e422cce43333919cb"


class TestCircle:
    def test_target_branches(self):
        X = np.zeros((3, 10))
        X[1, :2] = (1.0, 1.0)
        X[2, :2] = (np.sqrt(0.3), np.sqrt(0.3))
        assert circle_target(X).tolist() == [2.0, -2.0, 0.0]

    def test_shape_and_ranges(self):
        data = gen_circle(1000, seed=3)
        assert data.X.shape == (1000, 10)
        assert np.abs(data.X[:, :2]).max() <= 1.0
        assert data.informative == (0, 1)

    def test_reproducible(self):
        a, b = gen_circle(200, 42), gen_circle(200, 42)
        np.testing.assert_array_equal(a.X, b.X)
        np.testing.assert_array_equal(a.y, b.y)
        assert not np.array_equal(a.y, gen_circle(200, 43).y)


class TestLinear:
    def test_golden(self):
        data = gen_linear(500, 50, 3, 10.0, seed=42)
        assert hashlib.sha256(data.X.tobytes()).hexdigest() == LINEAR_X_SHA
        assert hashlib.sha256(np.round(data.y, 6).tobytes()).hexdigest() == LINEAR_Y_SHA
        assert data.informative == (9, 18, 22)

    def test_no_signal(self):
        data = gen_linear(400, 5, 0, 1.0, seed=1)
        assert data.informative == ()
        assert max(abs(np.corrcoef(data.X[:, k], data.y)[0, 1]) for k in range(5)) < 0.2

    def test_noiseless_monotone(self):
        data = gen_linear(100, 4, 1, 0.0, seed=2)
        k = data.informative[0]
        order = np.argsort(data.X[:, k])
        assert np.all(np.diff(data.y[order]) >= 0)

    def test_p_exceeds_d(self):
        with pytest.raises(ParameterError):
            gen_linear(10, 2, 3)


class TestNmse:
    def test_perfect(self):
        y = np.array([1.0, 2.0, 5.0])
        assert nmse(y, y) == 0.0

    def test_mean_predictor(self):
        y = np.array([1.0, 2.0, 5.0, -3.0])
        assert nmse(np.full(4, y.mean()), y) == pytest.approx(1.0)

    def test_by_hand(self):
        assert nmse(np.zeros(2), np.array([1.0, 3.0])) == 5.0

    def test_constant_target(self):
        with pytest.raises(InputError):
            nmse(np.zeros(3), np.ones(3))


def test_split_disjoint_and_exhaustive():
    train, test = split_indices(101, 0.6, 42)
    assert len(train) == round(0.6 * 101)
    assert set(train).isdisjoint(test)
    assert sorted(np.concatenate([train, test]).tolist()) == list(range(101))


def test_config_validation():
    with pytest.raises(ParameterError):
        ExperimentConfig(kind="spiral")
    with pytest.raises(ParameterError):
        ExperimentConfig(train_fraction=1.0)
    cfg = ExperimentConfig()
    assert (cfg.seed, cfg.train_fraction) == (42, 0.6)


def test_circle_report(circle_report, tmp_path):
    assert circle_report.test_nmse < 1.0
    assert circle_report.grid.shape == (10_000, 3)
    # inner-disc rules predict above the global mean
    for rule in circle_report.model.rules:
        if all(iv.low >= 1 and iv.high <= 3 for _, iv in rule.conditions):
            assert rule.stats.mu > circle_report.model.global_mean
    names = sorted(p.name for p in circle_report.write(tmp_path))
    assert names == ["grid.csv", "metrics.csv", "rules.csv"]


def test_linear_report(linear_report, tmp_path):
    assert linear_report.conditions_on_informative >= 0.6
    assert linear_report.grid is None
    assert sorted(p.name for p in linear_report.write(tmp_path)) == ["metrics.csv", "rules.csv"]
