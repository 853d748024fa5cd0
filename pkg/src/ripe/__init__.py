"""RIPE: rule induction partitioning estimator.

Mines hyperrectangle rules on quantile-discretized features, keeps the ones
that are both narrow enough and significantly different from the global
mean, selects a subset greedily and predicts with the mean of the cell of
the partition spanned by the selected rules.
"""

from .core import Dataset, InputError, Interval, InvariantError, ParameterError, Rule, RuleStats
from .discretize import Discretizer
from .generate import MiningParams, mine
from .predict import RuleModel, build_model, fit, kernel_predict, summarize
from .select import CellTable, select, set_risk
from .significance import SignificanceSpec

__all__ = [
    "CellTable",
    "Dataset",
    "Discretizer",
    "InputError",
    "Interval",
    "InvariantError",
    "MiningParams",
    "ParameterError",
    "Rule",
    "RuleModel",
    "RuleStats",
    "SignificanceSpec",
    "build_model",
    "fit",
    "kernel_predict",
    "mine",
    "select",
    "set_risk",
    "summarize",
]
