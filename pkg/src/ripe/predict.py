"""The fitted RIPE model: prediction, explanation and rule summaries.

Predictions use the cell table built at fit time: a query is discretized,
its rule-activation signature is computed and the mean of the training
cell with the same signature is returned.  Cells never seen in training
predict 0 (the 0/0 = 0 convention) unless the model falls back to the
global mean.  :func:`kernel_predict` evaluates the same quantity through
the explicit kernel sum over training rows and is kept as a reference path.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import discretize
from .core import (
    Dataset,
    InputError,
    Rule,
    activation_matrix,
    constant_risk,
    default_feature_names,
    empirical_risk,
)
from .discretize import Discretizer
from .generate import MiningParams, Scorer, mine, sort_by_risk
from .select import CellTable, SelectionTrace, cell_predictions, select, signature_strings

log = logging.getLogger(__name__)

NO_RULE = "no rule satisfied"


@dataclass(frozen=True)
class TrainingMeta:
    n: int
    d: int
    feature_names: tuple[str, ...]
    constant_risk: float
    train_risk: float


@dataclass(frozen=True)
class NoRuleCell:
    """Training statistics of the cell where no selected rule is active."""

    count: int
    coverage: float
    mean: float
    z_value: float


@dataclass(eq=False)
class RuleModel:
    discretizer: Discretizer
    rules: list[Rule]
    cell_table: CellTable
    global_mean: float
    params: MiningParams
    meta: TrainingMeta
    prefix_risks: list[float] = field(default_factory=list)
    no_rule: Optional[NoRuleCell] = None
    fallback_mean: bool = False

    @property
    def empty_value(self) -> float:
        return self.global_mean if self.fallback_mean else 0.0

    def activations(self, X) -> np.ndarray:
        disc = self.discretizer.transform(np.atleast_2d(np.asarray(X, dtype=float)))
        return activation_matrix(self.rules, disc)

    def signatures(self, X) -> np.ndarray:
        return signature_strings(self.activations(X))

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = self.cell_table.lookup(self.signatures(X), self.empty_value)
        return out[0] if X.ndim == 1 else out

    def explain(self, x) -> list["Explanation"]:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise InputError("explain takes a single row")
        active = self.activations(x)[0]
        return [self._explanation(rule) for rule, on in zip(self.rules, active) if on]

    def _explanation(self, rule: Rule) -> "Explanation":
        names = self.meta.feature_names
        conds = " & ".join(self.discretizer.describe(k, iv.low, iv.high, names[k]) for k, iv in rule.conditions)
        return Explanation(rule.label, conds, rule.stats.mu if rule.stats is not None else math.nan)


@dataclass(frozen=True)
class Explanation:
    label: str
    conditions: str
    mu: float


def rule_label(index: int, rule: Rule, global_mean: float) -> str:
    sign = "+" if rule.stats.mu > global_mean else "-"
    return f"R {index}({len(rule.conditions)}){sign}"


def build_model(discretizer: Discretizer, rules: Sequence[Rule], dataset: Dataset,
                params: Optional[MiningParams] = None, fallback_mean: bool = False) -> RuleModel:
    """Assemble a model from an ordered rule list and its training data.

    Rule statistics are (re)computed on ``dataset`` and labels are assigned
    from the position of each rule in ``rules``.
    """
    params = params or MiningParams(m_n=discretizer.m_n)
    scorer = Scorer(dataset, params)
    bits = activation_matrix(rules, dataset.disc)
    global_mean = float(dataset.y.mean())
    labelled = []
    for i, rule in enumerate(rules):
        stats = scorer.stats(bits[:, i])
        with_stats = rule.with_stats(stats)
        labelled.append(with_stats.with_label(rule_label(i, with_stats, global_mean)))
    prefix = [empirical_risk(cell_predictions(bits[:, : k + 1], dataset.y), dataset.y) for k in range(len(rules))]
    table = CellTable.from_bits(bits, dataset.y)
    none_sig = "0" * len(rules)
    no_rule = None
    if none_sig in table.cells:
        count, mean = table.cells[none_sig]
        no_rule = NoRuleCell(count, count / dataset.n, mean, scorer.threshold(count))
    train_risk = empirical_risk(cell_predictions(bits, dataset.y), dataset.y)
    meta = TrainingMeta(dataset.n, dataset.d, dataset.feature_names, constant_risk(dataset.y), train_risk)
    return RuleModel(discretizer, labelled, table, global_mean, params, meta, prefix, no_rule, fallback_mean)


def fit(X, y, params: Optional[MiningParams] = None, feature_names: Optional[Sequence[str]] = None,
        fallback_mean: bool = False, n_jobs: int = 1, trace: Optional[SelectionTrace] = None) -> RuleModel:
    """Discretize, mine suitable rules, select a subset and build the model."""
    params = params or MiningParams()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise InputError(f"feature matrix {X.shape} and target {y.shape} are not row-aligned")
    if not np.isfinite(y).all():
        raise InputError("target contains non-finite values")
    disc = discretize.fit(X, params.m_n)
    names = tuple(feature_names) if feature_names is not None else default_feature_names(X.shape[1])
    dataset = Dataset(X, disc.transform(X), y, names)
    candidates = mine(dataset, params, n_jobs=n_jobs)
    log.info("%d suitable rules mined", len(candidates))
    selected = select(candidates, dataset, trace) if candidates else []
    log.info("%d rules selected", len(selected))
    return build_model(disc, sort_by_risk(selected), dataset, params, fallback_mean)


def kernel_predict(rules: Sequence[Rule], query_disc: np.ndarray, train_disc: np.ndarray, y_train) -> np.ndarray:
    """Cell means through the explicit kernel sum over training rows.

    ``k(x, x_j) = prod_i (1{x in r_i} 1{x_j in r_i} + 1{x not in r_i} 1{x_j not in r_i})``
    and the prediction is ``sum_j y_j k(x, x_j) / sum_j k(x, x_j)`` with 0/0 = 0.
    Costs ``O(n R)`` per query.
    """
    y_train = np.asarray(y_train, dtype=float)
    query_disc = np.atleast_2d(query_disc)
    a = activation_matrix(rules, query_disc).astype(np.int64)
    # rule-major so that each rule's training activations are contiguous
    b = np.ascontiguousarray(activation_matrix(rules, train_disc).T, dtype=np.int64)
    out = np.empty(a.shape[0], dtype=float)
    for q in range(a.shape[0]):
        k = np.ones(b.shape[1], dtype=np.int64)
        for i in range(b.shape[0]):
            k *= a[q, i] * b[i] + (1 - a[q, i]) * (1 - b[i])
        denom = k.sum()
        out[q] = float((y_train * k).sum() / denom) if denom else 0.0
    return out


def variable_counts(rules: Sequence[Rule], feature_names: Sequence[str]) -> list[tuple[str, int]]:
    """Occurrences of each feature in rule conditions, most frequent first."""
    counts = Counter(k for rule in rules for k in rule.features)
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(feature_names[k], c) for k, c in ordered]


@dataclass
class Summary:
    rows: list[dict]
    variables: list[tuple[str, int]]

    COLUMNS = ("rule", "conditions", "coverage", "prediction", "z", "mse")

    def to_text(self) -> str:
        table = [list(self.COLUMNS)]
        for row in self.rows:
            table.append([
                row["rule"], row["conditions"], f"{row['coverage']:.2f}",
                f"{row['prediction']:.4g}", f"{row['z']:.4g}", f"{row['mse']:.4g}",
            ])
        widths = [max(len(r[c]) for r in table) for c in range(len(self.COLUMNS))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in table]
        if self.variables:
            lines.append("")
            lines.append("variable occurrences: " + ", ".join(f"{name}:{c}" for name, c in self.variables))
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: row[k] if isinstance(row[k], str) else repr(row[k]) for k in self.COLUMNS})
        return buf.getvalue()


def summarize(model: RuleModel) -> Summary:
    """One row per selected rule plus the no-rule cell, and feature occurrence counts.

    The ``mse`` column is the training risk of the predictor built from the
    rules up to and including that row.  Conditions are written in modalities.
    """
    names = model.meta.feature_names
    rows = []
    for rule, risk in zip(model.rules, model.prefix_risks):
        s = rule.stats
        rows.append({"rule": rule.label, "conditions": rule.describe(names), "coverage": s.coverage,
                     "prediction": s.mu, "z": s.z_value, "mse": risk})
    if not model.rules:
        rows.append({"rule": "R 0", "conditions": "global mean", "coverage": 1.0,
                     "prediction": model.global_mean, "z": 0.0, "mse": model.meta.constant_risk})
    elif model.no_rule is not None:
        nr = model.no_rule
        rows.append({"rule": f"R {len(model.rules)}", "conditions": NO_RULE, "coverage": nr.coverage,
                     "prediction": nr.mean, "z": nr.z_value, "mse": model.meta.train_risk})
    return Summary(rows, variable_counts(model.rules, names))
