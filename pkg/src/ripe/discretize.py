"""Quantile discretization of features into ordered modalities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import InputError, ParameterError


def quantile_edges(values: np.ndarray, m_n: int) -> np.ndarray:
    """Cut points that split ``values`` into at most ``m_n`` ordered classes.

    A column with at most ``m_n`` distinct values gets one class per distinct
    value.  Otherwise the cut points are the lower empirical quantiles at
    levels ``j / m_n``, i.e. the order statistics at index
    ``ceil(j * n / m_n) - 1``.  Duplicated cut points are merged and a cut
    equal to the column maximum is dropped, so every class is non-empty on
    the fitting data.
    """
    values = np.sort(np.asarray(values, dtype=float))
    n = values.size
    distinct = np.unique(values)
    if distinct.size <= m_n:
        return distinct[:-1].copy()
    idx = [math.ceil(j * n / m_n) - 1 for j in range(1, m_n)]
    edges = np.unique(values[idx])
    return edges[edges < values[-1]]


@dataclass(frozen=True, eq=False)
class Discretizer:
    """Per-feature quantile cut points.

    A raw value ``v`` of feature ``k`` maps to the number of cut points of
    that feature strictly below ``v``; values outside the training range are
    thereby clipped to the first or last class.
    """

    m_n: int
    edges: tuple[np.ndarray, ...]

    @property
    def d(self) -> int:
        return len(self.edges)

    def n_classes(self, feature: int) -> int:
        """Effective number of classes of ``feature`` (at most ``m_n``)."""
        return len(self.edges[feature]) + 1

    def transform(self, raw) -> np.ndarray:
        raw = np.asarray(raw, dtype=float)
        single = raw.ndim == 1
        if single:
            raw = raw[None, :]
        if raw.ndim != 2 or raw.shape[1] != self.d:
            raise InputError(f"expected {self.d} features, got shape {raw.shape}")
        if np.isnan(raw).any():
            raise InputError("missing values are not supported")
        out = np.empty(raw.shape, dtype=np.intp)
        for k, e in enumerate(self.edges):
            out[:, k] = np.searchsorted(e, raw[:, k], side="left")
        return out[0] if single else out

    def bounds(self, feature: int, low: int, high: int) -> tuple[float, float]:
        """Raw-value interval ``(lower, upper]`` covered by modalities ``low..high``."""
        e = self.edges[feature]
        lower = -math.inf if low == 0 else float(e[low - 1])
        upper = math.inf if high >= len(e) else float(e[high])
        return lower, upper

    def describe(self, feature: int, low: int, high: int, name: Optional[str] = None) -> str:
        name = name if name is not None else f"X{feature}"
        lower, upper = self.bounds(feature, low, high)
        if math.isinf(lower) and math.isinf(upper):
            return f"{name} any"
        if math.isinf(lower):
            return f"{name} <= {upper:.6g}"
        if math.isinf(upper):
            return f"{name} > {lower:.6g}"
        return f"{lower:.6g} < {name} <= {upper:.6g}"


def fit(raw, m_n: int = 5) -> Discretizer:
    """Fit per-feature quantile edges on an ``n x d`` matrix."""
    if int(m_n) != m_n or m_n < 2:
        raise ParameterError(f"m_n must be an integer >= 2, got {m_n}")
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2 or raw.shape[0] == 0 or raw.shape[1] == 0:
        raise InputError(f"cannot discretize an empty matrix of shape {raw.shape}")
    if np.isnan(raw).any():
        raise InputError("missing values are not supported")
    return Discretizer(int(m_n), tuple(quantile_edges(raw[:, k], int(m_n)) for k in range(raw.shape[1])))


def from_edges(m_n: int, edges: Sequence[Sequence[float]]) -> Discretizer:
    arrays = []
    for e in edges:
        a = np.asarray(e, dtype=float)
        if a.size and np.any(np.diff(a) <= 0):
            raise InputError("discretizer edges must be strictly ascending")
        if a.size > m_n - 1:
            raise InputError(f"at most {m_n - 1} edges allowed per feature")
        arrays.append(a)
    return Discretizer(int(m_n), tuple(arrays))
