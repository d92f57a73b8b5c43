import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from csci.length_planner import (
    PlannerInput,
    approx_ps,
    expected_length,
    floor_n34,
    length_curve,
    m_min_search,
    resolve_m_max,
    planner_grid,
)
from csci.valid_ci import default_m


def scipy_length(n, m, F, r, level):
    a = 1 - level
    pm, pp = max(F - m * r / (2 * n), 0), min(F + m * r / (2 * n), 1)
    y = np.arange(m + 1)
    up = np.where(y == m, 1.0, stats.beta.ppf(1 - a / 2, y + 1, np.maximum(m - y, 1)))
    lo = np.where(y == 0, 0.0, stats.beta.ppf(a / 2, np.maximum(y, 1), m - y + 1))
    return np.dot(stats.binom.pmf(y, m, pp), up) - np.dot(stats.binom.pmf(y, m, pm), lo)


class TestApproxPs:
    def test_no_drift(self):
        assert approx_ps(100, 5, 0.3, 0.0) == (0.3, 0.3)

    def test_plug_in(self):
        lo, hi = approx_ps(100, 22, 0.5, 1.0)
        assert lo == pytest.approx(0.39) and hi == pytest.approx(0.61)

    def test_clamped(self):
        assert approx_ps(10, 10, 0.2, 2.0) == (0.0, 1.0)

    def test_rejects(self):
        with pytest.raises(ValueError):
            approx_ps(10, 0, 0.5, 1.0)


class TestExpectedLength:
    def test_hand_enumeration(self):
        # y in {0, 1}: upper limits 0.975, 1; lower limits 0, 0.025
        e = expected_length(PlannerInput(10, 0.5, 0.0), 1)
        assert e == pytest.approx(0.5 * (0.975 + 1.0) - 0.5 * (0.0 + 0.025), abs=1e-14)

    def test_table_neighbourhood(self):
        inp = PlannerInput(100, 0.5, 1.0)
        e = length_curve(inp, 30)
        assert e[21] <= e[20] and e[21] <= e[22]

    @given(st.integers(5, 400), st.floats(0.05, 0.95), st.floats(0.0, 3.0))
    def test_scipy_oracle(self, n, F, r):
        m = max(1, n // 3)
        got = expected_length(PlannerInput(n, F, r), m)
        assert got == pytest.approx(scipy_length(n, m, F, r, 0.95), abs=1e-9)

    @given(st.integers(5, 300), st.floats(0.05, 0.95), st.floats(0.0, 3.0))
    def test_bounded_and_level_monotone(self, n, F, r):
        m = max(1, n // 4)
        e95 = expected_length(PlannerInput(n, F, r, 0.95), m)
        e90 = expected_length(PlannerInput(n, F, r, 0.90), m)
        assert 0 <= e90 <= e95 <= 1

    def test_input_rejects(self):
        for bad in [(0, 0.5, 1), (10, 0.0, 1), (10, 0.5, -1), (10, 0.5, 1, 0.3)]:
            with pytest.raises(ValueError):
                PlannerInput(*bad)


class TestSearch:
    @pytest.mark.parametrize(
        "n,F,r,m_min,ratio,tol",
        [(100, 0.5, 1.0, 22, 1.00, 0.005), (500, 0.5, 0.5, 103, 1.06, 0.01),
         (10000, 0.75, 2.0, 272, 1.08, 0.01)],
    )
    def test_reference_cells(self, n, F, r, m_min, ratio, tol):
        got_m, got_ratio = m_min_search(PlannerInput(n, F, r), "n34")
        assert got_m == m_min
        assert abs(got_ratio - ratio) <= tol

    def test_ratio_at_least_one(self):
        for n, F, r, m, ratio, ref in planner_grid(ns=(100, 200)):
            assert ratio >= 1.0 and ref == default_m(n)

    def test_full_scan_agrees_on_small_n(self):
        inp = PlannerInput(100, 0.5, 1.0)
        assert m_min_search(inp) == m_min_search(inp, "n34")

    def test_r1_close_to_rule(self):
        for n in (100, 200, 500, 1000):
            m, _ = m_min_search(PlannerInput(n, 0.5, 1.0), "n34")
            assert abs(m - default_m(n)) / n ** (2 / 3) <= 0.06

    @given(st.integers(1, 10**6))
    def test_floor_n34(self, n):
        m = floor_n34(n)
        assert m**4 <= n**3 < (m + 1) ** 4

    def test_resolve(self):
        assert resolve_m_max(100) == 100
        assert resolve_m_max(100, "n34") == 31
        with pytest.raises(ValueError):
            resolve_m_max(10, 11)
