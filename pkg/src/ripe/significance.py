"""Significance thresholds and the suitable-rule predicate.

A rule is *suitable* when it covers at most a ``1 / ln(m_n)`` share of the
sample and its conditional mean departs from the global mean by at least a
threshold ``z``.  Two thresholds derive from concentration inequalities
(Hoeffding, Bernstein) and only depend on the rule through its activation
count.  The variance-based threshold depends on the final partition, so it
is only offered for auditing an already selected rule set.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import InputError, ParameterError, conditional_mean

KINDS = ("hoeffding", "bernstein", "variance")
MINING_KINDS = ("hoeffding", "bernstein")


@dataclass(frozen=True)
class SignificanceSpec:
    kind: str = "bernstein"
    alpha: float = 0.05

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ParameterError(f"unknown significance function {self.kind!r}; expected one of {KINDS}")
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0, 1), got {self.alpha}")


def hoeffding_bound(n_r: int, y_range: float, alpha: float) -> float:
    """``(M - m) sqrt(ln(2/alpha)) / sqrt(2 n_r)``; infinite when ``n_r == 0``."""
    if n_r <= 0:
        return math.inf
    return y_range * math.sqrt(math.log(2.0 / alpha)) / math.sqrt(2.0 * n_r)


def bernstein_bound(n_r: int, y_max: float, y_sq_sum: float, alpha: float) -> float:
    """``(M L + sqrt(M^2 L^2 + 72 v L)) / (6 n_r)`` with ``L = ln(2/alpha)``."""
    if n_r <= 0:
        return math.inf
    log_term = math.log(2.0 / alpha)
    root = math.sqrt(y_max ** 2 * log_term ** 2 + 72.0 * y_sq_sum * log_term)
    # non-negative in exact arithmetic; rounding can dip below 0 when y_max < 0
    return max(0.0, (y_max * log_term + root) / (6.0 * n_r))


def hoeffding_z(n_r: int, y, alpha: float) -> float:
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise InputError("empty target vector")
    return hoeffding_bound(n_r, float(y.max() - y.min()), alpha)


def bernstein_z(n_r: int, y, alpha: float) -> float:
    # v sums over the whole sample, not only the rule's rows
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise InputError("empty target vector")
    return bernstein_bound(n_r, float(y.max()), float(np.dot(y, y)), alpha)


def threshold_function(spec: SignificanceSpec, y) -> Callable[[int], float]:
    """Return ``n_r -> z`` for ``spec`` with the sample summaries of ``y`` precomputed."""
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise InputError("empty target vector")
    if spec.kind == "hoeffding":
        y_range = float(y.max() - y.min())
        return lambda n_r: hoeffding_bound(n_r, y_range, spec.alpha)
    if spec.kind == "bernstein":
        y_max, v = float(y.max()), float(np.dot(y, y))
        return lambda n_r: bernstein_bound(n_r, y_max, v, spec.alpha)
    raise ParameterError("the variance threshold depends on the selected rule set and cannot screen candidates")


def coverage_bound(m_n: int) -> float:
    """Maximal coverage ratio ``1 / ln(m_n)`` of a suitable rule."""
    return 1.0 / math.log(m_n)


def check_conditions(n_r: int, n: int, mu_r: float, mu_all: float, z: float, m_n: int) -> bool:
    if n_r == 0:
        return False
    return n_r / n <= coverage_bound(m_n) and abs(mu_r - mu_all) >= z


def is_suitable(bits, y, m_n: int, spec: SignificanceSpec) -> bool:
    """Coverage and significance conditions for a rule given its activations."""
    bits = np.asarray(bits, dtype=bool)
    y = np.asarray(y, dtype=float)
    if m_n == 2:
        warnings.warn("m_n = 2 gives a coverage bound above 1", stacklevel=2)
    n_r = int(np.count_nonzero(bits))
    if n_r == 0:
        return False
    z = threshold_function(spec, y)(n_r)
    return check_conditions(n_r, y.size, conditional_mean(bits, y), float(y.mean()), z, m_n)


def variance_beta(rule_index: int, signature_counts: Mapping[str, int], rule_counts: Sequence[int], n: int) -> float:
    """Overlap factor of rule ``rule_index`` within a selected rule set.

    ``signature_counts`` maps the bit string of every non-empty training cell
    (bit ``i`` set when rule ``i`` is active) to its size.  The factor is
    ``n / sum_r n(r)`` times the largest number of rules active on a cell
    lying inside the rule.
    """
    total = sum(rule_counts)
    if total == 0:
        raise InputError("selected rules have no activations")
    overlaps = [sig.count("1") for sig, c in signature_counts.items() if c > 0 and sig[rule_index] == "1"]
    if not overlaps:
        raise InputError(f"rule {rule_index} has no training cell")
    return n / total * max(overlaps)


def variance_z(rule_index: int, bit_matrix: np.ndarray, y) -> float:
    """Variance-based threshold of one rule of a selected set.

    ``bit_matrix`` is the ``n x R`` activation matrix of the selected rules
    on the training sample.  A negative radicand is clamped to zero.
    """
    from .select import signature_strings

    bit_matrix = np.asarray(bit_matrix, dtype=bool)
    y = np.asarray(y, dtype=float)
    bits = bit_matrix[:, rule_index]
    n_r = int(np.count_nonzero(bits))
    if n_r < 2:
        raise InputError("within-rule variance needs at least 2 activated rows")
    sigs, counts = np.unique(signature_strings(bit_matrix), return_counts=True)
    beta = variance_beta(rule_index, dict(zip(sigs.tolist(), counts.tolist())),
                         bit_matrix.sum(axis=0).tolist(), y.size)
    radicand = beta * float(np.var(y, ddof=1)) - float(np.var(y[bits], ddof=1))
    return math.sqrt(radicand) if radicand > 0 else 0.0


def audit_variance(bit_matrix: np.ndarray, y) -> list[tuple[int, float, bool]]:
    """Re-screen a selected rule set with the variance threshold.

    Returns ``(rule index, z, passes)`` for each rule; rules with fewer than
    two activations are reported with an infinite threshold.
    """
    bit_matrix = np.asarray(bit_matrix, dtype=bool)
    y = np.asarray(y, dtype=float)
    mu_all = float(y.mean())
    report = []
    for i in range(bit_matrix.shape[1]):
        bits = bit_matrix[:, i]
        try:
            z = variance_z(i, bit_matrix, y)
        except InputError:
            report.append((i, math.inf, False))
            continue
        report.append((i, z, abs(conditional_mean(bits, y) - mu_all) >= z))
    return report
