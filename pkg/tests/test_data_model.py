import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from csci.data_model import (
    ConfidenceCurve,
    CurrentStatusSample,
    DataError,
    GroupedCounts,
    WindowCount,
    count_window,
    expand_grouped,
    from_pairs,
    read_grouped_csv,
    read_individual_csv,
    read_sample,
)

DATA = "data/grouped_age_synthetic.csv"

grouped_rows = st.lists(
    st.tuples(st.integers(0, 30), st.integers(0, 6)).flatmap(
        lambda tn: st.tuples(st.just(float(tn[0])), st.just(tn[1]), st.integers(0, tn[1]))
    ),
    min_size=1,
    max_size=12,
)


class TestSample:
    def test_sorts_by_time(self):
        s = from_pairs([(2, 1), (1, 0)])
        assert s.times.tolist() == [1.0, 2.0]
        assert s.events.tolist() == [0, 1]

    def test_ties_kept_in_input_order(self):
        s = from_pairs([(1, 0), (1, 1)])
        assert s.n == 2 and s.events.tolist() == [0, 1]
        assert s.has_ties

    @pytest.mark.parametrize("raw", [[], [(1.0, 2)], [(float("nan"), 1)]])
    def test_rejects(self, raw):
        with pytest.raises(DataError):
            from_pairs(raw)

    def test_constructor_checks(self):
        with pytest.raises(DataError):
            CurrentStatusSample([2.0, 1.0], [0, 1])
        with pytest.raises(DataError):
            CurrentStatusSample([-1.0], [0])
        with pytest.raises(DataError):
            CurrentStatusSample([1.0, 2.0], [0])

    def test_immutable(self):
        s = from_pairs([(1, 0), (2, 1)])
        with pytest.raises(ValueError):
            s.times[0] = 5.0

    def test_cells(self):
        s = from_pairs([(1, 0), (1, 1), (3, 1), (2, 0)])
        t, nt, ny = s.cells
        assert t.tolist() == [1.0, 2.0, 3.0]
        assert nt.tolist() == [2, 1, 1]
        assert ny.tolist() == [1, 0, 1]


class TestGrouped:
    def test_expand_single_row(self):
        s = expand_grouped([(5, 3, 2)])
        assert s.times.tolist() == [5.0] * 3
        assert sorted(s.events.tolist()) == [0, 1, 1]

    def test_expand_two_rows(self):
        s = expand_grouped([(1, 2, 0), (2, 2, 2)])
        assert s.n == 4 and s.events.tolist() == [0, 0, 1, 1]

    def test_expand_empty(self):
        with pytest.raises(DataError):
            expand_grouped([])

    def test_positive_exceeds_tested(self):
        with pytest.raises(DataError):
            GroupedCounts([(1, 2, 3)])

    def test_canonical_form(self):
        g = GroupedCounts([(3, 2, 1), (1, 0, 0), (3, 1, 1), (2, 4, 0)])
        assert g.rows == ((2.0, 4, 0), (3.0, 3, 2))
        assert g.total == 7

    @given(grouped_rows)
    def test_round_trip(self, rows):
        g = GroupedCounts(rows)
        if g.total == 0:
            return
        assert expand_grouped(g).to_grouped() == g

    def test_grouped_age_file(self):
        s = read_sample(DATA, "grouped")
        assert s.n == 850
        assert s.times.min() >= 1 and s.times.max() <= 86


class TestCountWindow:
    def test_empty_window(self):
        s = from_pairs([(1, 1), (2, 0)])
        w = count_window(s, 5, 6)
        assert (w.n_in, w.y_in) == (0, 0)

    def test_all(self):
        s = from_pairs([(1, 1), (2, 1), (3, 1)])
        w = count_window(s, 0, 10)
        assert (w.n_in, w.y_in) == (3, 3)

    def test_closed_ends(self):
        s = from_pairs([(1, 1), (2, 0), (2, 1), (3, 1)])
        assert count_window(s, 2, 2).n_in == 2
        assert count_window(s, 1, 3).n_in == 4

    def test_bad_order(self):
        s = from_pairs([(1, 1)])
        with pytest.raises(ValueError):
            count_window(s, 2, 1)

    @given(st.integers(0, 2**32 - 1), st.floats(0, 3), st.floats(0, 3))
    def test_linear_scan_oracle(self, seed, a, b):
        a, b = min(a, b), max(a, b)
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 40))
        t = np.round(rng.exponential(size=n), 1)
        d = rng.integers(0, 2, size=n)
        s = from_pairs(zip(t.tolist(), d.tolist()))
        inside = [(ti, di) for ti, di in zip(t, d) if a <= ti <= b]
        w = count_window(s, a, b)
        assert w.n_in == len(inside)
        assert w.y_in == sum(di for _, di in inside)

    @given(st.integers(0, 2**32 - 1))
    def test_additive(self, seed):
        rng = np.random.default_rng(seed)
        t = np.sort(rng.uniform(0, 10, size=30))
        s = CurrentStatusSample(t, rng.integers(0, 2, size=30))
        cut = rng.uniform(0, 10)
        # split [0, 10] at a point that is not an assessment time
        left = count_window(s, 0, cut)
        right = count_window(s, np.nextafter(cut, np.inf), 10)
        whole = count_window(s, 0, 10)
        if cut not in t:
            assert left.n_in + right.n_in == whole.n_in
            assert left.y_in + right.y_in == whole.y_in

    def test_window_count_invariants(self):
        with pytest.raises(ValueError):
            WindowCount(2, 1, 0, 0)
        with pytest.raises(ValueError):
            WindowCount(0, 1, 1, 2)


class TestCsv:
    def test_individual(self):
        s = read_individual_csv(io.StringIO("time,status\r\n2,1\r\n1,0\r\n"))
        assert s.times.tolist() == [1.0, 2.0]

    def test_bom_and_blank_lines(self):
        s = read_individual_csv(io.StringIO("﻿time,status\n\n1.5,1\n"))
        assert s.n == 1

    @pytest.mark.parametrize(
        "text,line",
        [
            ("time,status\n1,0\n2,x\n", "line 3"),
            ("time,status\n1,0,4\n", "line 2"),
            ("t,d\n1,0\n", "line 1"),
            ("time,status\n-1,0\n", "line 2"),
            ("time,status\nnan,0\n", "line 2"),
        ],
    )
    def test_individual_errors(self, text, line):
        with pytest.raises(DataError, match=line):
            read_individual_csv(io.StringIO(text))

    def test_grouped(self):
        g = read_grouped_csv(io.StringIO("time,tested,positive\n1,3,1\n2,0,0\n"))
        assert g.rows == ((1.0, 3, 1),)

    def test_grouped_errors(self):
        with pytest.raises(DataError, match="line 2"):
            read_grouped_csv(io.StringIO("time,tested,positive\n1,2,3\n"))
        with pytest.raises(DataError, match="line 3"):
            read_grouped_csv(io.StringIO("time,tested,positive\n1,2,1\n2,1.5,1\n"))

    def test_no_rows(self):
        with pytest.raises(DataError):
            read_individual_csv(io.StringIO("time,status\n"))

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            read_sample(DATA, "wide")


class TestConfidenceCurve:
    def test_grid_must_increase(self):
        with pytest.raises(ValueError):
            ConfidenceCurve([1, 1], [0, 0], [1, 1], "x", 0.95)

    def test_replace_keeps_meta(self):
        c = ConfidenceCurve([1, 2], [0, 0.1], [0.5, 0.6], "x", 0.95, meta={"a": 1})
        d = c.replace(lower=np.array([0.0, 0.0]), b=2)
        assert d.meta == {"a": 1, "b": 2}
        np.testing.assert_allclose(d.length, [0.5, 0.6])
