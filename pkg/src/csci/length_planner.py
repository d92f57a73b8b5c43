"""Expected-length planner for the window size of the valid interval.

The counts in the one-sided windows are modelled as binomials whose success
probabilities drift away from F(t) by ``m * r / (2n)`` with
``r = f(t) / g(t)``. The expected interval length under that model is then
scanned over every window size to find the minimiser.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._accel import jit
from .binom_ci import _cp_lower, _cp_upper
from .stat_kernel import _binom_logpmf
from .valid_ci import default_m

__all__ = [
    "PlannerInput",
    "approx_ps",
    "expected_length",
    "length_curve",
    "m_min_search",
    "resolve_m_max",
    "GRID_N",
    "planner_grid",
]

# pmf terms below this are dropped; the neglected mass is < 1e-17
_PMF_FLOOR = 1e-20
_LOG_PMF_FLOOR = math.log(_PMF_FLOOR)

GRID_N = (100, 200, 500, 1000, 2000, 5000, 10000)
GRID_COLUMNS = ((1.0, 0.5), (1.0, 0.75), (0.5, 0.5), (0.5, 0.75), (2.0, 0.5), (2.0, 0.75))


@dataclass(frozen=True)
class PlannerInput:
    n: int
    F_t: float
    r_t: float
    level: float = 0.95

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not (0.0 < self.F_t < 1.0):
            raise ValueError("F_t must lie in (0, 1)")
        if not self.r_t >= 0:
            raise ValueError("r_t must be nonnegative")
        if not (0.5 < self.level < 1.0):
            raise ValueError("level must lie in (0.5, 1)")


@jit
def _approx_ps(n, m, F_t, r_t):
    shift = m * r_t / (2.0 * n)
    return max(F_t - shift, 0.0), min(F_t + shift, 1.0)


def approx_ps(n, m, F_t, r_t):
    """Success probabilities of the lower and upper window counts."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return _approx_ps(float(n), float(m), float(F_t), float(r_t))


@jit
def _weighted_limit(q, m, p, upper):
    # sum_y pmf(y; m, p) * limit(y), walking out from the mode
    if p <= 0.0:
        return _cp_upper(q, 0, m) if upper else _cp_lower(q, 0, m)
    if p >= 1.0:
        return _cp_upper(q, m, m) if upper else _cp_lower(q, m, m)
    mode = min(int((m + 1) * p), m)
    total = 0.0
    for y in range(mode, -1, -1):
        lp = _binom_logpmf(y, m, p)
        if lp < _LOG_PMF_FLOOR:
            break
        lim = _cp_upper(q, y, m) if upper else _cp_lower(q, y, m)
        total += math.exp(lp) * lim
    for y in range(mode + 1, m + 1):
        lp = _binom_logpmf(y, m, p)
        if lp < _LOG_PMF_FLOOR:
            break
        lim = _cp_upper(q, y, m) if upper else _cp_lower(q, y, m)
        total += math.exp(lp) * lim
    return total


@jit
def _expected_length(n, m, F_t, r_t, level):
    q = 1.0 - 0.5 * (1.0 - level)
    p_minus, p_plus = _approx_ps(float(n), float(m), F_t, r_t)
    return _weighted_limit(q, m, p_plus, True) - _weighted_limit(q, m, p_minus, False)


@jit
def _length_curve(n, m_max, F_t, r_t, level):
    out = np.empty(m_max)
    for m in range(1, m_max + 1):
        out[m - 1] = _expected_length(n, m, F_t, r_t, level)
    return out


def expected_length(inp, m):
    """Expected central CP interval length for window size ``m``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return _expected_length(inp.n, int(m), float(inp.F_t), float(inp.r_t), float(inp.level))


def length_curve(inp, m_max=None):
    """Expected length for m = 1..m_max (default n)."""
    m_max = inp.n if m_max is None else int(m_max)
    return _length_curve(inp.n, m_max, float(inp.F_t), float(inp.r_t), float(inp.level))


def floor_n34(n):
    """floor(n^(3/4)), exact for integers."""
    m = int(n**0.75)
    while (m + 1) ** 4 <= n**3:
        m += 1
    while m**4 > n**3:
        m -= 1
    return m


def resolve_m_max(n, m_max=None):
    """Upper end of the scan: ``None``/"n" -> n, "n34" -> floor(n^(3/4)), or an int."""
    if m_max is None or m_max == "n":
        return n
    if m_max == "n34":
        return max(floor_n34(n), 1)
    m_max = int(m_max)
    if not 1 <= m_max <= n:
        raise ValueError(f"m_max must lie in [1, n], got {m_max}")
    return m_max


def m_min_search(inp, m_max=None):
    """Exhaustive scan of m in [1, m_max] (all of [1, n] by default).

    Returns ``(m_min, e_ratio)`` where ties go to the smaller m and
    ``e_ratio`` is the length at ceil(n^(2/3)) over the minimum length.
    The standard grid uses ``m_max="n34"``.
    """
    upper = resolve_m_max(inp.n, m_max)
    m_ref = min(default_m(inp.n), inp.n)
    curve = length_curve(inp, max(upper, m_ref))
    m_min = int(np.argmin(curve[:upper])) + 1
    return m_min, float(curve[m_ref - 1] / curve[m_min - 1])


def planner_grid(level=0.95, ns=GRID_N, columns=GRID_COLUMNS, m_max="n34"):
    """Rows ``(n, F, r, m_min, e_ratio, ceil_n23)`` over the grid of inputs."""
    rows = []
    for n in ns:
        for r, F in columns:
            m_min, ratio = m_min_search(PlannerInput(n, F, r, level), m_max)
            rows.append((n, F, r, m_min, ratio, default_m(n)))
    return rows
