"""Rule algebra and the empirical statistics shared by every stage of RIPE.

A rule is a hyperrectangle over the discretized feature space.  Only the
constrained features are stored, so the complexity of a rule is simply the
number of its conditions.  Activations over a sample are boolean vectors
(one entry per row); intersections are computed with ``&`` and counts with
``np.count_nonzero``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np


class InputError(ValueError):
    """Malformed data handed to an operation (shapes, ranges, lengths)."""


class ParameterError(ValueError):
    """Invalid hyperparameter value."""


class InvariantError(RuntimeError):
    """An internal consistency check failed."""


class Interval(NamedTuple):
    """Closed interval of modality indices ``[low, high]``."""

    low: int
    high: int

    def contains(self, modality: int) -> bool:
        return self.low <= modality <= self.high

    def __str__(self) -> str:
        if self.low == self.high:
            return f"= {self.low}"
        return f"in [{self.low}, {self.high}]"


@dataclass(frozen=True, eq=False)
class RuleStats:
    """Activation statistics of a rule on the training sample."""

    activation_bits: np.ndarray
    n_activated: int
    coverage: float
    mu: float
    z_value: float
    single_rule_risk: float


@dataclass(frozen=True)
class Rule:
    """Hyperrectangle rule.

    ``conditions`` is a tuple of ``(feature, Interval)`` pairs sorted by
    feature index; unconstrained features are absent.  Equality and hashing
    only look at the conditions, so the label and cached statistics do not
    influence deduplication.
    """

    conditions: tuple[tuple[int, Interval], ...]
    label: str = field(default="", compare=False)
    stats: Optional[RuleStats] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        conds = tuple(sorted((int(k), Interval(int(iv[0]), int(iv[1]))) for k, iv in self.conditions))
        keys = [k for k, _ in conds]
        if len(set(keys)) != len(keys):
            raise InputError(f"duplicate feature in rule conditions: {keys}")
        for k, iv in conds:
            if k < 0:
                raise InputError(f"negative feature index {k}")
            if not 0 <= iv.low <= iv.high:
                raise InputError(f"invalid interval {tuple(iv)} on feature {k}")
        object.__setattr__(self, "conditions", conds)

    @classmethod
    def from_dict(cls, conditions: Mapping[int, Sequence[int]], label: str = "") -> "Rule":
        return cls(tuple((k, Interval(*iv)) for k, iv in conditions.items()), label=label)

    @property
    def features(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.conditions)

    def as_dict(self) -> dict[int, Interval]:
        return dict(self.conditions)

    def key(self) -> tuple[tuple[int, int, int], ...]:
        """Flat encoding used for deterministic ordering."""
        return tuple((k, iv.low, iv.high) for k, iv in self.conditions)

    def with_stats(self, stats: RuleStats) -> "Rule":
        return Rule(self.conditions, label=self.label, stats=stats)

    def with_label(self, label: str) -> "Rule":
        return Rule(self.conditions, label=label, stats=self.stats)

    def describe(self, feature_names: Optional[Sequence[str]] = None) -> str:
        parts = []
        for k, iv in self.conditions:
            name = feature_names[k] if feature_names is not None else f"X{k}"
            parts.append(f"{name} {iv}")
        return " & ".join(parts)

    def __str__(self) -> str:
        return self.describe()


@dataclass(frozen=True, eq=False)
class Dataset:
    """Row-aligned raw features, their modalities and the target."""

    raw: np.ndarray
    disc: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.raw.ndim != 2 or self.disc.shape != self.raw.shape:
            raise InputError("raw and discretized matrices must be 2-D and of equal shape")
        if self.y.shape != (self.raw.shape[0],):
            raise InputError(f"target length {self.y.shape} does not match {self.raw.shape[0]} rows")
        if self.raw.shape[0] < 2:
            raise InputError("a dataset needs at least 2 rows")
        if len(self.feature_names) != self.raw.shape[1]:
            raise InputError("one feature name per column is required")
        if self.disc.size and self.disc.min() < 0:
            raise InputError("modalities must be non-negative")

    @property
    def n(self) -> int:
        return self.raw.shape[0]

    @property
    def d(self) -> int:
        return self.raw.shape[1]

    @classmethod
    def from_arrays(cls, raw, y, discretizer, feature_names: Optional[Iterable[str]] = None) -> "Dataset":
        raw = np.asarray(raw, dtype=float)
        y = np.asarray(y, dtype=float)
        if raw.ndim != 2:
            raise InputError("feature matrix must be 2-D")
        names = tuple(feature_names) if feature_names is not None else default_feature_names(raw.shape[1])
        return cls(raw, discretizer.transform(raw), y, names)


def default_feature_names(d: int) -> tuple[str, ...]:
    return tuple(f"X{k}" for k in range(d))


def activation_vector(rule: Rule, disc: np.ndarray) -> np.ndarray:
    """Boolean vector whose entry ``j`` tells whether row ``j`` lies in ``rule``."""
    disc = np.asarray(disc)
    if disc.ndim != 2:
        raise InputError("discretized matrix must be 2-D")
    bits = np.ones(disc.shape[0], dtype=bool)
    for k, iv in rule.conditions:
        if k >= disc.shape[1]:
            raise InputError(f"feature index {k} out of range for d={disc.shape[1]}")
        col = disc[:, k]
        bits &= (col >= iv.low) & (col <= iv.high)
    return bits


def activation_matrix(rules: Sequence[Rule], disc: np.ndarray) -> np.ndarray:
    """``n x R`` boolean matrix of activations, one column per rule."""
    disc = np.asarray(disc)
    out = np.empty((disc.shape[0], len(rules)), dtype=bool)
    for i, rule in enumerate(rules):
        out[:, i] = activation_vector(rule, disc)
    return out


def conditional_mean(bits: np.ndarray, y: np.ndarray) -> float:
    """Mean of ``y`` over the set bits, with the convention 0/0 = 0."""
    bits = np.asarray(bits, dtype=bool)
    y = np.asarray(y, dtype=float)
    if bits.shape != y.shape:
        raise InputError(f"length mismatch: {bits.shape} vs {y.shape}")
    count = np.count_nonzero(bits)
    if count == 0:
        return 0.0
    return float(y[bits].sum() / count)


def complexity(rule: Rule) -> int:
    return len(rule.conditions)


def empirical_risk(predictions, y) -> float:
    """Mean squared error of ``predictions`` against ``y``.

    The sum is correctly rounded, so the result does not depend on row order.
    """
    predictions = np.asarray(predictions, dtype=float)
    y = np.asarray(y, dtype=float)
    if predictions.shape != y.shape:
        raise InputError(f"length mismatch: {predictions.shape} vs {y.shape}")
    if y.size == 0:
        raise InputError("empirical risk of an empty sample")
    return math.fsum(((predictions - y) ** 2).tolist()) / y.size


def two_cell_predictions(bits: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Predictions of the partition {rule, complement} given the rule's activations."""
    inside = conditional_mean(bits, y)
    outside = conditional_mean(~bits, y)
    return np.where(bits, inside, outside)


def single_rule_risk(rule: Rule, dataset: Dataset) -> float:
    """Empirical risk of the predictor built on the single rule ``rule``.

    Rows inside the rule are predicted by the rule's mean and the remaining
    rows (the no-rule-satisfied cell) by their own mean.
    """
    bits = activation_vector(rule, dataset.disc)
    return empirical_risk(two_cell_predictions(bits, dataset.y), dataset.y)


def constant_risk(y: np.ndarray) -> float:
    y = np.asarray(y, dtype=float)
    return empirical_risk(np.full_like(y, y.mean()), y)
