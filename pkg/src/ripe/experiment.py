"""Synthetic benchmarks: the noisy circle problem and a sparse linear model.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), so a
given seed reproduces the same data on every platform numpy supports.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .core import InputError, ParameterError
from .generate import MiningParams
from .predict import RuleModel, Summary, fit, summarize

log = logging.getLogger(__name__)


@dataclass
class SyntheticData:
    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    informative: tuple[int, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "circle"
    n: int = 5000
    d: int = 10
    p: int = 2
    noise_sd: float = 1.0
    seed: int = 42
    train_fraction: float = 0.6

    def __post_init__(self) -> None:
        if self.kind not in ("circle", "linear"):
            raise ParameterError(f"unknown experiment kind {self.kind!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ParameterError("train_fraction must lie in (0, 1)")
        if self.n < 2:
            raise ParameterError("n must be at least 2")
        if self.kind == "linear" and not 0 <= self.p <= self.d:
            raise ParameterError(f"need 0 <= p <= d, got p={self.p}, d={self.d}")


def circle_target(X: np.ndarray) -> np.ndarray:
    """-2 outside the radius sqrt(0.8), +2 inside radius sqrt(0.5), 0 in between."""
    r2 = X[:, 0] ** 2 + X[:, 1] ** 2
    return -2.0 * (r2 > 0.8) + 2.0 * (r2 < 0.5)


def gen_circle(n: int = 5000, seed: int = 42) -> SyntheticData:
    """Two uniform features on [-1, 1] drive the target; eight N(0, 1) features are noise."""
    if n < 1:
        raise ParameterError("n must be positive")
    rng = np.random.default_rng(seed)
    X = np.empty((n, 10))
    X[:, :2] = rng.uniform(-1.0, 1.0, size=(n, 2))
    X[:, 2:] = rng.standard_normal((n, 8))
    y = circle_target(X) + rng.standard_normal(n)
    return SyntheticData(X, y, tuple(f"X{k}" for k in range(10)), (0, 1))


def gen_linear(n: int = 500, d: int = 50, p: int = 3, noise_sd: float = 10.0, seed: int = 42) -> SyntheticData:
    """Gaussian design with ``p`` informative columns.

    ``y = X[:, informative] @ w + noise_sd * eps`` with weights drawn from
    ``100 * U(0, 1)`` and informative columns chosen at random.
    """
    if not 0 <= p <= d:
        raise ParameterError(f"need 0 <= p <= d, got p={p}, d={d}")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    informative = np.sort(rng.choice(d, size=p, replace=False)) if p else np.array([], dtype=int)
    w = 100.0 * rng.uniform(size=p)
    y = X[:, informative] @ w + noise_sd * rng.standard_normal(n)
    return SyntheticData(X, y, tuple(f"X{k}" for k in range(d)), tuple(int(k) for k in informative))


def nmse(predictions, y_test) -> float:
    """Mean squared error divided by the (population) variance of ``y_test``."""
    predictions = np.asarray(predictions, dtype=float)
    y_test = np.asarray(y_test, dtype=float)
    if predictions.shape != y_test.shape:
        raise InputError("length mismatch")
    var = float(np.var(y_test))
    if var == 0.0:
        raise InputError("NMSE is undefined for a constant target")
    return float(np.mean((predictions - y_test) ** 2)) / var


def split_indices(n: int, train_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(round(train_fraction * n))
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


@dataclass
class Report:
    config: ExperimentConfig
    model: RuleModel
    train_nmse: float
    test_nmse: float
    summary: Summary
    informative: tuple[int, ...]
    rules_on_informative: float
    conditions_on_informative: float
    seconds: float
    grid: Optional[np.ndarray] = field(default=None, repr=False)

    def metrics(self) -> dict:
        return {
            "kind": self.config.kind,
            "n": self.config.n,
            "d": self.config.d,
            "seed": self.config.seed,
            "train_nmse": self.train_nmse,
            "test_nmse": self.test_nmse,
            "n_rules": len(self.model.rules),
            "max_complexity": max((len(r.conditions) for r in self.model.rules), default=0),
            "rules_on_informative": self.rules_on_informative,
            "conditions_on_informative": self.conditions_on_informative,
        }

    def to_text(self) -> str:
        lines = [f"{k}={v}" for k, v in self.metrics().items()]
        return "\n".join(lines) + "\n\n" + self.summary.to_text()

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        path = out / "metrics.csv"
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["metric", "value"])
            for k, v in self.metrics().items():
                writer.writerow([k, v])
        written.append(path)
        path = out / "rules.csv"
        path.write_text(self.summary.to_csv())
        written.append(path)
        if self.grid is not None:
            path = out / "grid.csv"
            with path.open("w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["x1", "x2", "prediction"])
                for row in self.grid:
                    writer.writerow([repr(float(v)) for v in row])
            written.append(path)
        return written


def informative_shares(model: RuleModel, informative) -> tuple[float, float]:
    """Share of rules using only informative features, and share of conditions on them."""
    inf = set(informative)
    if not model.rules:
        return 0.0, 0.0
    rules_ok = sum(all(k in inf for k in r.features) for r in model.rules) / len(model.rules)
    conds = [k for r in model.rules for k in r.features]
    return rules_ok, sum(k in inf for k in conds) / len(conds)


def circle_grid(model: RuleModel, size: int = 100) -> np.ndarray:
    """Predictions on a ``size x size`` grid of the two informative features, noise features at 0."""
    axis = np.linspace(-1.0, 1.0, size)
    g1, g2 = np.meshgrid(axis, axis, indexing="ij")
    X = np.zeros((size * size, model.meta.d))
    X[:, 0], X[:, 1] = g1.ravel(), g2.ravel()
    return np.column_stack([X[:, 0], X[:, 1], model.predict(X)])


def generate(config: ExperimentConfig) -> SyntheticData:
    if config.kind == "circle":
        return gen_circle(config.n, config.seed)
    return gen_linear(config.n, config.d, config.p, config.noise_sd, config.seed)


def run(config: ExperimentConfig, params: Optional[MiningParams] = None, n_jobs: int = 1) -> Report:
    """Generate data, split it, fit on the training part and evaluate both parts."""
    params = params or MiningParams()
    data = generate(config)
    train, test = split_indices(config.n, config.train_fraction, config.seed)
    start = time.perf_counter()
    model = fit(data.X[train], data.y[train], params, data.feature_names, n_jobs=n_jobs)
    seconds = time.perf_counter() - start
    log.info("fit took %.2f s", seconds)
    train_nmse = nmse(model.predict(data.X[train]), data.y[train])
    test_nmse = nmse(model.predict(data.X[test]), data.y[test])
    rules_ok, conds_ok = informative_shares(model, data.informative)
    grid = circle_grid(model) if config.kind == "circle" else None
    return Report(config, model, train_nmse, test_nmse, summarize(model), data.informative,
                  rules_ok, conds_ok, seconds, grid)
