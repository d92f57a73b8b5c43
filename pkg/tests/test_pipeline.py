import numpy as np
import pytest

from csci.abf_ci import AbfConfig, abf_curve
from csci.monotone_adjust import apply_plan
from csci.pipeline import RECOMMENDED, method_curve, parse_method

from conftest import random_sample


def test_parse():
    spec = parse_method("abf-midp-mv")
    assert spec.kind == "abf" and spec.variant == "mid_p"
    assert spec.plan.steps == ("edge", "middle_value")
    assert parse_method("abf-cp-raw").plan.steps == ()
    assert parse_method("valid").kind == "valid"
    assert set(RECOMMENDED) == {"valid", "abf-cp-lu", "abf-midp-mv", "lrt"}


@pytest.mark.parametrize("name", ["abf", "abf-cp", "abf-x-lu", "abf-cp-zz", "wald"])
def test_parse_rejects(name):
    with pytest.raises(ValueError):
        parse_method(name)


def test_forbidden_needs_override():
    with pytest.raises(ValueError):
        parse_method("abf-midp-lu")
    assert parse_method("abf-midp-lu", override=True).variant == "mid_p"


def test_grid_adjust_matches_direct(rng):
    s = random_sample(rng, 60)
    grid = s.support()[::3]
    cur = method_curve(s, "abf-cp-lu", grid, adjust_on="grid")
    ref = apply_plan(abf_curve(s, grid, AbfConfig()), "edge,lower_upper")
    np.testing.assert_array_equal(cur.lower, ref.lower)
    np.testing.assert_array_equal(cur.upper, ref.upper)


def test_support_adjust_reads_off_grid(rng):
    s = random_sample(rng, 60)
    full = s.support()
    grid = full[10:40:4]
    whole = method_curve(s, "abf-midp-mv", full)
    part = method_curve(s, "abf-midp-mv", grid)
    idx = np.searchsorted(full, grid)
    np.testing.assert_array_equal(part.lower, whole.lower[idx])
    np.testing.assert_array_equal(part.meta["m_dagger"], whole.meta["m_dagger"][idx])


def test_lrt_needs_critical(rng):
    with pytest.raises(ValueError):
        method_curve(random_sample(rng, 10), "lrt", [0.5])


def test_bad_adjust_on(rng):
    with pytest.raises(ValueError):
        method_curve(random_sample(rng, 10), "abf-cp-lu", [0.5], adjust_on="all")
