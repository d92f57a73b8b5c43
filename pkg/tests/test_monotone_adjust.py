import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from csci.data_model import ConfidenceCurve
from csci.monotone_adjust import (
    PRESETS,
    AdjustmentPlan,
    apply_plan,
    check_combination,
    edge_adjust,
    lower_upper_adjust,
    middle_value_adjust,
)

seeds = st.integers(0, 2**32 - 1)


def curve(lo, hi=None):
    lo = np.asarray(lo, dtype=float)
    hi = np.ones_like(lo) if hi is None else np.asarray(hi, dtype=float)
    return ConfidenceCurve(np.arange(lo.size, dtype=float), lo, hi, "x", 0.95)


def random_curve(rng, k):
    a = rng.uniform(size=k)
    b = rng.uniform(size=k)
    return curve(np.minimum(a, b), np.maximum(a, b))


def edge_oracle(x):
    k = len(x)
    mid = math.ceil(k / 2)  # 1-based middle index
    i_min = max(range(1, mid + 1), key=lambda i: (-x[i - 1], i))
    i_max = min(range(mid, k + 1), key=lambda i: (-x[i - 1], i))
    out = list(x)
    for i in range(1, k + 1):
        if i < i_min:
            out[i - 1] = x[i_min - 1]
        if i > i_max:
            out[i - 1] = x[i_max - 1]
    return np.array(out)


def fold_up(x):
    out = [x[0]]
    for v in x[1:]:
        out.append(out[-1] if v < out[-1] else v)
    return np.array(out)


def fold_down(x):
    out = [x[-1]]
    for v in x[-2::-1]:
        out.append(out[-1] if v > out[-1] else v)
    return np.array(out[::-1])


class TestPlan:
    def test_parse(self):
        assert AdjustmentPlan.parse("edge,lower-upper").steps == ("edge", "lower_upper")
        assert AdjustmentPlan.parse("none").steps == ()
        assert AdjustmentPlan.parse(" edge , middle ").steps == ("edge", "middle_value")

    @pytest.mark.parametrize("steps", [("lower_upper", "middle_value"), ("edge", "edge"), ("foo",)])
    def test_rejects(self, steps):
        with pytest.raises(ValueError):
            AdjustmentPlan(steps)

    def test_presets(self):
        assert PRESETS["cp-lu"] == ("clopper_pearson", AdjustmentPlan(("edge", "lower_upper")))
        assert PRESETS["midp-mv"] == ("mid_p", AdjustmentPlan(("edge", "middle_value")))

    def test_forbidden_combination(self):
        plan = AdjustmentPlan(("edge", "lower_upper"))
        with pytest.raises(ValueError):
            check_combination("mid_p", plan)
        check_combination("mid_p", plan, override=True)
        check_combination("clopper_pearson", plan)


class TestEdge:
    def test_single_point(self):
        c = curve([0.4], [0.6])
        assert edge_adjust(c).lower.tolist() == [0.4]

    def test_monotone_unchanged(self):
        x = np.linspace(0.0, 0.8, 9)
        np.testing.assert_array_equal(edge_adjust(curve(x)).lower, x)

    def test_v_shape(self):
        lo = [0.3, 0.2, 0.1, 0.2, 0.4, 0.5, 0.6]
        np.testing.assert_allclose(edge_adjust(curve(lo)).lower, [0.1, 0.1, 0.1, 0.2, 0.4, 0.5, 0.6])

    def test_empty(self):
        with pytest.raises(ValueError):
            edge_adjust(ConfidenceCurve([], [], [], "x", 0.95))

    @given(seeds, st.integers(1, 30))
    def test_oracle(self, seed, k):
        rng = np.random.default_rng(seed)
        c = random_curve(rng, k)
        # coarse values force ties at the anchors
        c = c.replace(lower=np.round(c.lower, 1), upper=np.round(c.upper, 1))
        e = edge_adjust(c)
        np.testing.assert_array_equal(e.lower, edge_oracle(c.lower.tolist()))
        np.testing.assert_array_equal(e.upper, edge_oracle(c.upper.tolist()))


class TestSweeps:
    def test_single_replacement(self):
        c = lower_upper_adjust(curve([0.3, 0.2], [0.9, 0.8]))
        assert c.lower.tolist() == [0.3, 0.3] and c.upper.tolist() == [0.8, 0.8]

    def test_middle_value_two_points(self):
        c = middle_value_adjust(curve([0.3, 0.2], [0.9, 0.8]))
        np.testing.assert_allclose(c.lower, [0.25, 0.25])
        np.testing.assert_allclose(c.upper, [0.85, 0.85])

    def test_monotone_identity(self):
        x = np.linspace(0.1, 0.5, 6)
        for f in (lower_upper_adjust, middle_value_adjust):
            np.testing.assert_array_equal(f(curve(x, x + 0.3)).lower, x)

    @given(seeds, st.integers(1, 40))
    def test_fold_oracles(self, seed, k):
        c = random_curve(np.random.default_rng(seed), k)
        lu = lower_upper_adjust(c)
        np.testing.assert_array_equal(lu.lower, fold_up(c.lower))
        np.testing.assert_array_equal(lu.upper, fold_down(c.upper))
        mv = middle_value_adjust(c)
        np.testing.assert_allclose(mv.lower, 0.5 * (fold_up(c.lower) + fold_down(c.lower)))
        np.testing.assert_allclose(mv.upper, 0.5 * (fold_up(c.upper) + fold_down(c.upper)))

    @given(seeds, st.integers(1, 40))
    def test_lower_upper_never_widens(self, seed, k):
        c = random_curve(np.random.default_rng(seed), k)
        lu = lower_upper_adjust(c)
        assert np.all(lu.lower >= c.lower) and np.all(lu.upper <= c.upper)


class TestInvariants:
    @given(seeds, st.integers(1, 40),
           st.sampled_from(["lower_upper", "middle_value", "edge,lower_upper", "edge,middle_value"]))
    def test_monotone_output(self, seed, k, plan):
        out = apply_plan(random_curve(np.random.default_rng(seed), k), plan)
        assert np.all(np.diff(out.lower) >= 0) and np.all(np.diff(out.upper) >= 0)
        assert np.all(out.lower <= out.upper)

    @given(seeds, st.integers(1, 40))
    def test_idempotent(self, seed, k):
        c = random_curve(np.random.default_rng(seed), k)
        for f in (edge_adjust, lower_upper_adjust, middle_value_adjust):
            once = f(c)
            twice = f(once)
            np.testing.assert_array_equal(once.lower, twice.lower)
            np.testing.assert_array_equal(once.upper, twice.upper)

    def test_clip_counter(self, caplog):
        c = curve([0.1, 0.6, 0.7], [0.9, 0.5, 0.95])
        out = apply_plan(c, AdjustmentPlan(()))
        assert out.meta["clipped"] == 1
        assert out.lower[1] == 0.5
        assert "clipped" in caplog.text

    def test_meta_records_plan(self):
        out = apply_plan(curve([0.1, 0.2], [0.5, 0.6]), "edge,middle-value")
        assert out.meta["adjust"] == "edge,middle_value" and out.meta["clipped"] == 0
