"""Mining of suitable rules.

Complexity-1 rules are enumerated exhaustively: one interval of modalities
per feature.  Rules of complexity ``c`` are intersections of one of the
``M`` best complexity-1 rules with one of the ``M`` best complexity-``c-1``
rules, kept when the intersection is non-trivial on the sample and the
result is itself suitable.  Mining stops at the first complexity that
yields nothing.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from .core import Dataset, Interval, ParameterError, Rule, RuleStats, empirical_risk, two_cell_predictions
from .significance import MINING_KINDS, SignificanceSpec, check_conditions, coverage_bound, threshold_function

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MiningParams:
    m_n: int = 5
    spec: SignificanceSpec = field(default_factory=SignificanceSpec)
    M: int = 300
    max_complexity: Optional[int] = None

    def __post_init__(self) -> None:
        if int(self.m_n) != self.m_n or self.m_n < 2:
            raise ParameterError(f"m_n must be an integer >= 2, got {self.m_n}")
        if self.M < 1:
            raise ParameterError(f"beam width M must be >= 1, got {self.M}")
        if self.max_complexity is not None and self.max_complexity < 1:
            raise ParameterError("max_complexity must be >= 1")
        if self.spec.kind not in MINING_KINDS:
            raise ParameterError(f"significance function {self.spec.kind!r} cannot be used while mining")


class Scorer:
    """Per-dataset constants needed to score candidate rules."""

    def __init__(self, dataset: Dataset, params: MiningParams):
        self.y = dataset.y
        self.n = dataset.n
        self.m_n = params.m_n
        self.mu_all = float(dataset.y.mean())
        self.threshold: Callable[[int], float] = threshold_function(params.spec, dataset.y)

    def stats(self, bits: np.ndarray) -> RuleStats:
        n_r = int(np.count_nonzero(bits))
        mu = float(self.y[bits].sum() / n_r) if n_r else 0.0
        risk = empirical_risk(two_cell_predictions(bits, self.y), self.y)
        return RuleStats(bits, n_r, n_r / self.n, mu, self.threshold(n_r), risk)

    def suitable(self, stats: RuleStats) -> bool:
        return check_conditions(stats.n_activated, self.n, stats.mu, self.mu_all, stats.z_value, self.m_n)


def sort_key(rule: Rule):
    """Total order used everywhere rules are ranked by risk."""
    s = rule.stats
    return (s.single_rule_risk, -s.coverage, len(rule.conditions), rule.key())


def sort_by_risk(rules: Iterable[Rule]) -> list[Rule]:
    return sorted(rules, key=sort_key)


def n_classes(dataset: Dataset, feature: int) -> int:
    return int(dataset.disc[:, feature].max()) + 1


def cp1_candidates(dataset: Dataset) -> Iterator[tuple[int, int, int]]:
    """``(feature, b_min, b_max)`` for every interval of every feature's modalities."""
    for k in range(dataset.d):
        q = n_classes(dataset, k)
        for lo in range(q):
            for hi in range(lo, q):
                yield k, lo, hi


def _cp1_feature(scorer: Scorer, dataset: Dataset, k: int) -> list[Rule]:
    col = dataset.disc[:, k]
    q = n_classes(dataset, k)
    found = []
    for lo in range(q):
        for hi in range(lo, q):
            if lo == 0 and hi == q - 1:
                # the full range is no constraint at all
                continue
            bits = (col >= lo) & (col <= hi)
            stats = scorer.stats(bits)
            if scorer.suitable(stats):
                found.append(Rule(((k, Interval(lo, hi)),), stats=stats))
    return found


def _map(fn, items: Sequence, n_jobs: int) -> list:
    if n_jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, items))


def calc_cp1(dataset: Dataset, params: MiningParams, n_jobs: int = 1) -> list[Rule]:
    """All suitable complexity-1 rules, ordered by feature, then ``b_min``, then ``b_max``."""
    scorer = Scorer(dataset, params)
    per_feature = _map(lambda k: _cp1_feature(scorer, dataset, k), list(range(dataset.d)), n_jobs)
    return [rule for rules in per_feature for rule in rules]


def _intersect(r1: Rule, r2: Rule, scorer: Scorer) -> Optional[Rule]:
    keys1 = set(r1.features)
    if any(k in keys1 for k in r2.features):
        return None
    bits = r1.stats.activation_bits & r2.stats.activation_bits
    n_r = int(np.count_nonzero(bits))
    if n_r == 0 or n_r == r1.stats.n_activated or n_r == r2.stats.n_activated:
        return None
    return Rule(r1.conditions + r2.conditions, stats=scorer.stats(bits))


def intersect(r1: Rule, r2: Rule, dataset: Dataset, params: Optional[MiningParams] = None) -> Optional[Rule]:
    """Suitable intersection of two rules, or ``None``.

    The rules must constrain disjoint sets of features, and the intersection
    must be non-empty on the sample and strictly smaller than both parents.
    Both rules must carry cached activation bits.
    """
    return _intersect(r1, r2, Scorer(dataset, params or MiningParams()))


def calc_cpc(dataset: Dataset, rules_so_far: Sequence[Rule], c: int, params: MiningParams,
             n_jobs: int = 1) -> list[Rule]:
    """Suitable complexity-``c`` rules from the top-``M`` rules of complexity 1 and ``c-1``."""
    ranked = sort_by_risk(rules_so_far)
    beam_1 = [r for r in ranked if len(r.conditions) == 1][: params.M]
    beam_prev = [r for r in ranked if len(r.conditions) == c - 1][: params.M]
    if not beam_1 or not beam_prev:
        return []
    scorer = Scorer(dataset, params)

    def expand(r1: Rule) -> list[Rule]:
        out = []
        for r2 in beam_prev:
            cand = _intersect(r1, r2, scorer)
            if cand is not None and scorer.suitable(cand.stats):
                out.append(cand)
        return out

    seen: dict[Rule, Rule] = {}
    for batch in _map(expand, beam_1, n_jobs):
        for rule in batch:
            seen.setdefault(rule, rule)
    return list(seen.values())


def mine(dataset: Dataset, params: MiningParams, n_jobs: int = 1) -> list[Rule]:
    """All suitable rules of every complexity, sorted by single-rule risk."""
    log.debug("maximal coverage ratio %.5f", coverage_bound(params.m_n))
    rules = calc_cp1(dataset, params, n_jobs)
    log.info("complexity 1: %d suitable rules", len(rules))
    max_c = dataset.d if params.max_complexity is None else min(params.max_complexity, dataset.d)
    for c in range(2, max_c + 1):
        new = calc_cpc(dataset, rules, c, params, n_jobs)
        log.info("complexity %d: %d suitable rules", c, len(new))
        if not new:
            break
        rules = rules + new
    return sort_by_risk(rules)
