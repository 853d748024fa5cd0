"""Partition cells via activation signatures and greedy rule selection.

The cell of the partition spanned by a rule set that contains an observation
is identified by the observation's *signature*: the vector of activations of
every rule.  Two observations share a cell iff their signatures are equal,
so cell means are group-by means over signatures and the partition never
has to be built geometrically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .core import Dataset, InputError, Rule, activation_vector, empirical_risk


def signature_strings(bit_matrix: np.ndarray) -> np.ndarray:
    """One ``'0'/'1'`` string per row; character ``i`` is rule ``i``'s activation."""
    bit_matrix = np.asarray(bit_matrix, dtype=bool)
    n, r = bit_matrix.shape
    if r == 0:
        return np.full(n, "", dtype="<U1")
    chars = np.ascontiguousarray(bit_matrix.astype(np.uint8) + ord("0"))
    return chars.view(f"S{r}").ravel().astype(f"<U{r}")


def cell_ids(bit_matrix: np.ndarray) -> tuple[np.ndarray, int]:
    """Dense cell index of every row and the number of distinct cells."""
    bit_matrix = np.asarray(bit_matrix, dtype=bool)
    n, r = bit_matrix.shape
    if r == 0:
        return np.zeros(n, dtype=np.intp), 1 if n else 0
    if r <= 62:
        keys = bit_matrix.astype(np.int64) @ (np.int64(1) << np.arange(r, dtype=np.int64))
        uniq, inv = np.unique(keys, return_inverse=True)
    else:
        packed = np.packbits(bit_matrix, axis=1)
        uniq, inv = np.unique(packed, axis=0, return_inverse=True)
    return inv.ravel(), len(uniq)


def cell_predictions(bit_matrix: np.ndarray, y) -> np.ndarray:
    """In-sample prediction of each row: the mean of ``y`` over its cell."""
    y = np.asarray(y, dtype=float)
    inv, n_cells = cell_ids(bit_matrix)
    counts = np.bincount(inv, minlength=n_cells)
    sums = np.bincount(inv, weights=y, minlength=n_cells)
    return (sums / counts)[inv]


def set_risk(rules_or_bits: Union[Sequence[Rule], np.ndarray], data: Union[Dataset, np.ndarray]) -> float:
    """Empirical risk of the partition-based predictor of a rule set.

    Accepts either a list of rules together with a :class:`Dataset`, or an
    ``n x R`` activation matrix together with the target vector.  An empty
    rule set gives the constant global-mean predictor.
    """
    if isinstance(data, Dataset):
        bits = np.empty((data.n, len(rules_or_bits)), dtype=bool)
        for i, rule in enumerate(rules_or_bits):
            bits[:, i] = activation_vector(rule, data.disc)
        y = data.y
    else:
        bits, y = np.asarray(rules_or_bits, dtype=bool), np.asarray(data, dtype=float)
    if bits.ndim != 2 or bits.shape[0] != y.shape[0]:
        raise InputError(f"activation matrix {bits.shape} does not match {y.shape[0]} targets")
    return empirical_risk(cell_predictions(bits, y), y)


@dataclass
class CellTable:
    """Size and mean of ``y`` for every non-empty training cell, keyed by signature."""

    n_rules: int
    cells: dict[str, tuple[int, float]] = field(default_factory=dict)

    @classmethod
    def from_bits(cls, bit_matrix: np.ndarray, y) -> "CellTable":
        bit_matrix = np.asarray(bit_matrix, dtype=bool)
        y = np.asarray(y, dtype=float)
        sigs = signature_strings(bit_matrix)
        inv, n_cells = cell_ids(bit_matrix)
        counts = np.bincount(inv, minlength=n_cells)
        sums = np.bincount(inv, weights=y, minlength=n_cells)
        first = np.full(n_cells, -1, dtype=np.intp)
        first[inv[::-1]] = np.arange(len(inv))[::-1]
        cells = {}
        for c in np.argsort(sigs[first], kind="stable"):
            cells[str(sigs[first[c]])] = (int(counts[c]), float(sums[c] / counts[c]))
        return cls(bit_matrix.shape[1], cells)

    @property
    def n(self) -> int:
        return sum(c for c, _ in self.cells.values())

    def lookup(self, signatures: np.ndarray, empty_value: float = 0.0) -> np.ndarray:
        out = np.empty(len(signatures), dtype=float)
        for j, sig in enumerate(signatures):
            hit = self.cells.get(str(sig))
            out[j] = hit[1] if hit is not None else empty_value
        return out


@dataclass
class SelectionTrace:
    """Bookkeeping of a greedy selection run."""

    risks: list[float] = field(default_factory=list)
    sizes: list[int] = field(default_factory=list)
    n_evaluations: int = 0


def greedy_select(bit_matrix: np.ndarray, y, trace: Optional[SelectionTrace] = None) -> list[int]:
    """Greedy subset selection over the columns of ``bit_matrix``.

    Columns must be sorted by increasing single-rule risk.  Starting from the
    first column, each following column ``i`` is examined once: the current
    set ``S``, ``S + {i}`` and every ``S + {i} - {s}`` are scored and the
    lowest risk wins.  Exact ties go to the smaller set, then to the earlier
    candidate.  Returns the selected column indices in ascending order.
    """
    bit_matrix = np.asarray(bit_matrix, dtype=bool)
    y = np.asarray(y, dtype=float)
    n_rules = bit_matrix.shape[1]
    if n_rules == 0:
        return []
    current = [0]
    current_risk = set_risk(bit_matrix[:, current], y)
    if trace is not None:
        trace.n_evaluations += 1
        trace.risks.append(current_risk)
        trace.sizes.append(1)
    for i in range(1, n_rules):
        candidates = [current, current + [i]]
        candidates += [[s for s in current if s != drop] + [i] for drop in current]
        best, best_key = current, (current_risk, len(current), 0)
        for order, cand in enumerate(candidates[1:], start=1):
            risk = set_risk(bit_matrix[:, cand], y)
            key = (risk, len(cand), order)
            if key < best_key:
                best, best_key = cand, key
        if trace is not None:
            trace.n_evaluations += len(candidates)
        current, current_risk = sorted(best), best_key[0]
        if trace is not None:
            trace.risks.append(current_risk)
            trace.sizes.append(len(current))
    return current


def rule_bits(rules: Sequence[Rule], dataset: Dataset) -> np.ndarray:
    """Activation matrix of ``rules``, reusing cached bits when present."""
    bits = np.empty((dataset.n, len(rules)), dtype=bool)
    for i, rule in enumerate(rules):
        cached = rule.stats.activation_bits if rule.stats is not None else None
        bits[:, i] = cached if cached is not None and cached.shape == (dataset.n,) else activation_vector(rule, dataset.disc)
    return bits


def select(rules: Sequence[Rule], dataset: Dataset, trace: Optional[SelectionTrace] = None) -> list[Rule]:
    """Greedy selection of a low-risk subset of risk-sorted ``rules``."""
    chosen = greedy_select(rule_bits(rules, dataset), dataset.y, trace)
    return [rules[i] for i in chosen]
