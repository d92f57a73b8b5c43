"""Guaranteed-coverage pointwise intervals for F(t).

The lower limit uses the m closest assessments at or before t, the upper
limit the m closest at or after t, each through a one-sided Clopper-Pearson
limit. If the two limits cross, both are recomputed from one proportion over
a combined window of about m/2 assessments on each side of t.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._accel import jit
from .binom_ci import _cp_lower, _cp_upper
from .data_model import ConfidenceCurve, WindowCount

__all__ = [
    "ValidCiConfig",
    "default_m",
    "window_below",
    "window_above",
    "fallback_window",
    "valid_interval",
    "valid_curve",
]

CONTINUOUS = 0
DISCRETE = 1


def default_m(n):
    """ceil(n^(2/3)), computed exactly as the least m with m^3 >= n^2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m = max(1, int(round(n ** (2.0 / 3.0))) - 2)
    while m**3 < n * n:
        m += 1
    while m > 1 and (m - 1) ** 3 >= n * n:
        m -= 1
    return m


@dataclass(frozen=True)
class ValidCiConfig:
    m: object = "auto"
    level: float = 0.95
    fallback: str = "combined_window"
    support: str = None  # "continuous", "discrete" or None to infer from ties

    def __post_init__(self):
        if not (0.5 < self.level < 1.0):
            raise ValueError("level must lie in (0.5, 1)")
        if self.m != "auto" and (int(self.m) != self.m or self.m < 1):
            raise ValueError(f"m must be a positive integer or 'auto', got {self.m!r}")
        if self.fallback != "combined_window":
            raise ValueError("only the combined_window fallback is available")
        if self.support not in (None, "continuous", "discrete"):
            raise ValueError("support must be 'continuous', 'discrete' or None")

    def resolve_m(self, n):
        return default_m(n) if self.m == "auto" else int(self.m)

    def support_code(self, sample):
        if self.support is None:
            return DISCRETE if sample.has_ties else CONTINUOUS
        return DISCRETE if self.support == "discrete" else CONTINUOUS


# --------------------------------------------------------------------------
# kernels on sorted times (0-based indexing; C_i of the 1-based text is times[i-1])


@jit
def _count(times, cum, a, b):
    lo = np.searchsorted(times, a, side="left")
    hi = np.searchsorted(times, b, side="right")
    if hi < lo:
        hi = lo
    return hi - lo, cum[hi] - cum[lo]


@jit
def _below_bound(times, t, m):
    l = np.searchsorted(times, t, side="right")
    if l < m:
        return 0.0
    return times[l - m]


@jit
def _above_bound(times, t, m):
    n = times.size
    g = np.searchsorted(times, t, side="left") + 1
    if n - g + 1 < m:
        return math.inf
    return times[g + m - 2]


@jit
def _c(times, i):
    # C_i with C_0 = 0 (and below) and C_{n+1} = inf (and above)
    if i <= 0:
        return 0.0
    if i > times.size:
        return math.inf
    return times[i - 1]


@jit
def _fallback_bounds(times, t, m, support):
    n = times.size
    l = np.searchsorted(times, t, side="right")
    g = np.searchsorted(times, t, side="left") + 1
    if support == CONTINUOUS:
        k = (m + 1) // 2
        a = 0.0 if l < k else times[l - k]
        b = math.inf if n - g + 1 < k else times[g + k - 2]
        return a, b
    J = l - (g - 1)
    k = -((J - m) // 2)  # ceil((m - J) / 2)
    if _c(times, k) >= _c(times, g):
        a = 0.0
    elif m > J:
        a = times[l - k - J]
    else:
        a = t
    if _c(times, n - k + 1) <= _c(times, l):
        b = math.inf
    elif m > J:
        b = times[g + k - 2 + J]
    else:
        b = t
    return a, b


@jit
def _valid_point(times, cum, t, m, level, support):
    """(L, U, used_fallback) at one time point."""
    q = 1.0 - 0.5 * (1.0 - level)
    a = _below_bound(times, t, m)
    n_lo, y_lo = _count(times, cum, a, t)
    b = _above_bound(times, t, m)
    n_hi, y_hi = _count(times, cum, t, b)
    lower = 0.0 if n_lo == 0 else _cp_lower(q, y_lo, n_lo)
    upper = 1.0 if n_hi == 0 else _cp_upper(q, y_hi, n_hi)
    if lower <= upper:
        return lower, upper, False
    a2, b2 = _fallback_bounds(times, t, m, support)
    left_n, _ = _count(times, cum, a2, t)
    right_n, _ = _count(times, cum, t, b2)
    if left_n == 0 or right_n == 0:
        return 0.0, 1.0, True
    n_all, y_all = _count(times, cum, a2, b2)
    return _cp_lower(q, y_all, n_all), _cp_upper(q, y_all, n_all), True


@jit
def _valid_curve(times, cum, grid, m, level, support):
    k = grid.size
    lo = np.empty(k)
    hi = np.empty(k)
    fb = np.zeros(k, dtype=np.bool_)
    for i in range(k):
        lo[i], hi[i], fb[i] = _valid_point(times, cum, grid[i], m, level, support)
    return lo, hi, fb


# --------------------------------------------------------------------------
# public API


def _check_m(m):
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    return int(m)


def window_below(s, t, m):
    """Window [a, t] holding the m closest assessments at or before t (ties at a included)."""
    m = _check_m(m)
    a = _below_bound(s.times, float(t), m)
    n_in, y_in = _count(s.times, s.cum_events, a, float(t))
    return WindowCount(float(a), float(t), int(n_in), int(y_in))


def window_above(s, t, m):
    """Window [t, b] holding the m closest assessments at or after t; b is inf if too few."""
    m = _check_m(m)
    b = _above_bound(s.times, float(t), m)
    n_in, y_in = _count(s.times, s.cum_events, float(t), b)
    return WindowCount(float(t), float(b), int(n_in), int(y_in))


def fallback_window(s, t, m, support="continuous"):
    """Combined window [a*, b*] used when the one-sided limits cross."""
    m = _check_m(m)
    code = DISCRETE if support == "discrete" else CONTINUOUS
    a, b = _fallback_bounds(s.times, float(t), m, code)
    n_in, y_in = _count(s.times, s.cum_events, a, b)
    return WindowCount(float(a), float(b), int(n_in), int(y_in))


def valid_interval(s, t, cfg=ValidCiConfig()):
    """Central interval with coverage >= cfg.level for every sample size."""
    m = cfg.resolve_m(s.n)
    lo, hi, _ = _valid_point(
        s.times, s.cum_events, float(t), m, float(cfg.level), cfg.support_code(s)
    )
    return lo, hi


def valid_curve(s, grid=None, cfg=ValidCiConfig()):
    """Valid limits over ``grid`` (default: the distinct assessment times)."""
    grid = s.support() if grid is None else np.asarray(grid, dtype=np.float64)
    m = cfg.resolve_m(s.n)
    lo, hi, fb = _valid_curve(
        s.times, s.cum_events, grid, m, float(cfg.level), cfg.support_code(s)
    )
    return ConfidenceCurve(grid, lo, hi, "valid", cfg.level, meta={"m": m, "fallback_points": int(fb.sum())})
