import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from csci.data_model import from_pairs
from csci.npmle import StepCdf, loglik, npmle_fit, pava, restricted_npmle, segment_fit

from conftest import random_sample


def minmax_isotonic(y, w):
    """Isotonic regression by the max-min formula over weighted block means."""
    k = len(y)
    out = np.empty(k)
    for i in range(k):
        best = -np.inf
        for j in range(i + 1):
            worst = np.inf
            for l in range(i, k):
                worst = min(worst, np.dot(w[j:l + 1], y[j:l + 1]) / w[j:l + 1].sum())
            best = max(best, worst)
        out[i] = best
    return out


seeds = st.integers(0, 2**32 - 1)


class TestPava:
    def test_examples(self):
        np.testing.assert_allclose(pava([1, 3, 2, 4]), [1, 2.5, 2.5, 4])
        np.testing.assert_allclose(pava([3, 2, 1]), [2, 2, 2])
        np.testing.assert_allclose(pava([1, 0], [3, 1]), [0.75, 0.75])
        assert pava([]).size == 0

    def test_rejects(self):
        with pytest.raises(ValueError):
            pava([1, 2], [1, 0])
        with pytest.raises(ValueError):
            pava([1, 2], [1])

    @given(seeds)
    def test_minmax_oracle(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(1, 15))
        y = rng.normal(size=k)
        w = rng.uniform(0.1, 3, size=k)
        np.testing.assert_allclose(pava(y, w), minmax_isotonic(y, w), atol=1e-12)

    @given(seeds)
    def test_idempotent_and_sum(self, seed):
        rng = np.random.default_rng(seed)
        y = rng.normal(size=20)
        w = rng.uniform(0.5, 2, size=20)
        f = pava(y, w)
        assert np.all(np.diff(f) >= -1e-12)
        np.testing.assert_allclose(pava(f, w), f, atol=1e-12)
        assert np.isclose(np.dot(w, f), np.dot(w, y))


class TestNpmle:
    def test_step_function(self):
        F = StepCdf([1.0, 2.0], [0.25, 0.5])
        assert F(0.5) == 0.0 and F(1.0) == 0.25 and F(3.0) == 0.5
        np.testing.assert_allclose(F([1.5, 2.0]), [0.25, 0.5])
        x, sz = F.jumps()
        assert x.tolist() == [1.0, 2.0] and sz.tolist() == [0.25, 0.25]

    def test_step_rejects(self):
        with pytest.raises(ValueError):
            StepCdf([1.0, 1.0], [0.1, 0.2])
        with pytest.raises(ValueError):
            StepCdf([1.0, 2.0], [0.3, 0.2])

    def test_small_example(self):
        s = from_pairs([(1, 1), (2, 0), (3, 1), (4, 0)])
        F = npmle_fit(s)
        np.testing.assert_allclose(F.values, [0.5, 0.5, 0.5, 0.5])

    def test_ties_collapse(self):
        s = from_pairs([(1, 0), (1, 1), (2, 1)])
        np.testing.assert_allclose(npmle_fit(s).values, [0.5, 1.0])

    @given(seeds)
    def test_matches_minmax_on_cells(self, seed):
        s = random_sample(np.random.default_rng(seed), 25, ties=True)
        t, nt, ny = s.cells
        expect = minmax_isotonic(ny / nt, nt.astype(float))
        np.testing.assert_allclose(npmle_fit(s).values, expect, atol=1e-12)

    @given(seeds)
    def test_maximises_loglik(self, seed):
        rng = np.random.default_rng(seed)
        s = random_sample(rng, 15)
        F = npmle_fit(s)
        best = loglik(s, F)
        t = s.support()
        for _ in range(30):
            v = np.sort(rng.uniform(size=t.size))
            assert loglik(s, StepCdf(t, v)) <= best + 1e-9


class TestRestricted:
    def test_pins_value(self, rng):
        s = random_sample(rng, 40)
        t = float(np.median(s.times)) + 1e-3
        G = restricted_npmle(s, t, 0.3)
        assert G(t) == 0.3
        assert np.all(G(s.times[s.times < t]) <= 0.3)
        assert np.all(G(s.times[s.times > t]) >= 0.3)

    def test_at_npmle_value_matches(self, rng):
        s = random_sample(rng, 40)
        F = npmle_fit(s)
        t = float(s.times[17])
        G = restricted_npmle(s, t, F(t))
        assert np.isclose(loglik(s, G), loglik(s, F))

    def test_rejects_theta(self, rng):
        with pytest.raises(ValueError):
            restricted_npmle(random_sample(rng, 5), 1.0, 1.5)

    @given(seeds, st.floats(0.01, 0.99))
    def test_beats_random_restricted(self, seed, theta):
        rng = np.random.default_rng(seed)
        s = random_sample(rng, 12)
        t = float(rng.uniform(s.times[0], s.times[-1]))
        best = loglik(s, restricted_npmle(s, t, theta))
        sup = s.support()
        lo = sup[sup < t]
        hi = sup[sup >= t]
        for _ in range(30):
            v = np.concatenate([np.sort(rng.uniform(0, theta, lo.size)),
                                np.sort(rng.uniform(theta, 1, hi.size))])
            assert loglik(s, StepCdf(sup, v)) <= best + 1e-9

    def test_segment_full_loglik(self, rng):
        s = random_sample(rng, 30)
        seg = segment_fit(s, float(s.times[10]))
        assert np.isclose(seg.full_loglik, loglik(s, npmle_fit(s)))
        assert seg.at_n == 1
