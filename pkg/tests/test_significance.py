import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ripe.core import InputError, ParameterError
from ripe.significance import (
    SignificanceSpec,
    audit_variance,
    bernstein_bound,
    bernstein_z,
    coverage_bound,
    hoeffding_bound,
    hoeffding_z,
    is_suitable,
    variance_z,
)

# mpmath at 30 digits: 2 sqrt(ln 40) / sqrt(400) and (ln 40 + sqrt(ln^2 40 + 3600 ln 40)) / 600
HOEFFDING_REF = 0.192064558263984
BERNSTEIN_REF = 0.198311068687092
# statistics.variance on (1, 2, 3, 10, 11, 12) minus variance of (1, 2, 3), square-rooted
VARIANCE_TOY_REF = 4.909175083453431


class TestHoeffding:
    def test_hand_value(self):
        y = np.array([-1.0, 0.3, 1.0])
        assert hoeffding_z(200, y, 0.05) == pytest.approx(HOEFFDING_REF, abs=1e-12)

    def test_alpha_two_gives_zero(self):
        assert hoeffding_bound(50, 3.0, 2.0) == 0.0

    def test_constant_target(self):
        assert hoeffding_z(10, np.full(5, 2.5), 0.05) == 0.0

    def test_no_activation_is_infinite(self):
        assert hoeffding_z(0, np.array([0.0, 1.0]), 0.05) == math.inf


class TestBernstein:
    def test_hand_value(self):
        assert bernstein_bound(100, 1.0, 50.0, 0.05) == pytest.approx(BERNSTEIN_REF, abs=1e-12)

    def test_zero_sample(self):
        assert bernstein_z(10, np.zeros(8), 0.05) == 0.0

    def test_doubling_count_halves(self):
        assert bernstein_bound(40, 2.0, 30.0, 0.1) == pytest.approx(2 * bernstein_bound(80, 2.0, 30.0, 0.1))

    def test_uses_whole_sample(self):
        y = np.array([1.0, -2.0, 0.5, 3.0])
        assert bernstein_z(2, y, 0.05) == bernstein_bound(2, 3.0, float(np.dot(y, y)), 0.05)

    def test_no_activation_is_infinite(self):
        assert bernstein_z(0, np.array([1.0]), 0.05) == math.inf


@settings(max_examples=60)
@given(st.lists(st.floats(-100, 100), min_size=1, max_size=40), st.integers(1, 500), st.floats(0.001, 0.999))
def test_thresholds_non_negative_and_non_increasing(ys, n_r, alpha):
    y = np.array(ys)
    for fn in (hoeffding_z, bernstein_z):
        z1, z2 = fn(n_r, y, alpha), fn(n_r + 1, y, alpha)
        assert z1 >= 0 and z2 >= 0
        assert z2 <= z1


@settings(max_examples=40)
@given(st.lists(st.floats(-100, 100), min_size=2, max_size=40), st.randoms())
def test_thresholds_permutation_invariant(ys, rnd):
    shuffled = list(ys)
    rnd.shuffle(shuffled)
    assert hoeffding_z(7, np.array(ys), 0.05) == hoeffding_z(7, np.array(shuffled), 0.05)
    assert bernstein_z(7, np.array(ys), 0.05) == pytest.approx(bernstein_z(7, np.array(shuffled), 0.05), rel=1e-12)


class TestSpec:
    def test_defaults(self):
        spec = SignificanceSpec()
        assert (spec.kind, spec.alpha) == ("bernstein", 0.05)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
    def test_alpha_range(self, alpha):
        with pytest.raises(ParameterError):
            SignificanceSpec("hoeffding", alpha)

    def test_unknown_kind(self):
        with pytest.raises(ParameterError):
            SignificanceSpec("chernoff")


class TestSuitability:
    def test_coverage_bound_value(self):
        assert coverage_bound(5) == pytest.approx(0.6213349, abs=1e-7)
        assert 0.36 <= coverage_bound(5)

    def test_full_coverage_fails(self):
        y = np.array([0.0, 10.0, 0.0, 10.0])
        assert not is_suitable(np.ones(4, dtype=bool), y, 5, SignificanceSpec("hoeffding", 0.5))

    def test_zero_deviation_fails(self):
        y = np.array([1.0, 3.0, 1.0, 3.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0])
        bits = np.array([1, 1, 0, 0, 0, 0, 0, 0, 0, 0], dtype=bool)
        assert not is_suitable(bits, y, 5, SignificanceSpec("hoeffding", 0.05))

    def test_empty_rule_fails(self):
        assert not is_suitable(np.zeros(5, dtype=bool), np.arange(5.0), 5, SignificanceSpec())

    def test_strong_rule_passes(self):
        y = np.concatenate([np.full(200, 5.0), np.zeros(800)])
        bits = np.arange(1000) < 200
        assert is_suitable(bits, y, 5, SignificanceSpec())


class TestVarianceThreshold:
    def test_single_rule_covering_everything(self):
        y = np.array([1.0, 4.0, 2.0, 8.0])
        assert variance_z(0, np.ones((4, 1), dtype=bool), y) == 0.0

    def test_two_disjoint_rules(self):
        y = np.array([1.0, 2.0, 3.0, 10.0, 11.0, 12.0])
        bits = np.zeros((6, 2), dtype=bool)
        bits[:3, 0] = True
        bits[3:, 1] = True
        assert variance_z(0, bits, y) == pytest.approx(VARIANCE_TOY_REF, rel=1e-12)

    def test_negative_radicand_clamped(self):
        y = np.array([0.0, 0.0, 0.0, 10.0, -10.0, 0.0])
        bits = np.zeros((6, 1), dtype=bool)
        bits[3:5, 0] = True
        assert variance_z(0, bits, y) == 0.0

    def test_single_activation_rejected(self):
        bits = np.zeros((4, 1), dtype=bool)
        bits[0, 0] = True
        with pytest.raises(InputError):
            variance_z(0, bits, np.arange(4.0))

    def test_audit_reports_every_rule(self):
        y = np.array([1.0, 2.0, 3.0, 10.0, 11.0, 12.0])
        bits = np.zeros((6, 2), dtype=bool)
        bits[:3, 0] = True
        bits[3:, 1] = True
        report = audit_variance(bits, y)
        assert [r[0] for r in report] == [0, 1]
        assert report[0][1] == pytest.approx(VARIANCE_TOY_REF)
        assert not report[0][2]  # |2 - 6.5| = 4.5 < 4.909

    def test_not_allowed_while_mining(self):
        from ripe.generate import MiningParams

        with pytest.raises(ParameterError):
            MiningParams(spec=SignificanceSpec("variance", 0.05))
