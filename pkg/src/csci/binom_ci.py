"""Clopper-Pearson and mid-P binomial confidence limits."""

from dataclasses import dataclass

import numpy as np

from ._accel import jit
from .stat_kernel import _beta_ppf, _betainc, _binom_pmf

__all__ = [
    "BinomLimits",
    "cp_lower",
    "cp_upper",
    "cp_interval",
    "midp_limits",
    "midp_lower",
    "midp_upper",
]

MIDP_TOL = 1e-10


@dataclass(frozen=True)
class BinomLimits:
    lower: float
    upper: float
    level: float
    variant: str = "clopper_pearson"

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise ValueError(f"limits out of order: {self.lower} > {self.upper}")


@jit
def _cp_lower(q, y, n):
    if y <= 0:
        return 0.0
    return _beta_ppf(1.0 - q, float(y), float(n - y + 1), -1.0)


@jit
def _cp_upper(q, y, n):
    if y >= n:
        return 1.0
    return _beta_ppf(q, float(y + 1), float(n - y), -1.0)


@jit
def _midp_excess(half_alpha, y, n, th):
    # P(Y > y; th) + P(Y = y; th)/2 - alpha/2, increasing in th (0 <= y < n)
    return _betainc(th, y + 1.0, float(n - y)) + 0.5 * _binom_pmf(y, n, th) - half_alpha


@jit
def _midp_lower(half_alpha, y, n):
    if y <= 0:
        return 0.0
    if y >= n:
        # P(Y = n)/2 = alpha/2 has a closed form
        return (2.0 * half_alpha) ** (1.0 / n)
    # the root lies between the one-sided CP lower limits at y and y + 1
    q = 1.0 - half_alpha
    a = _cp_lower(q, y, n)
    b = _cp_lower(q, y + 1, n)
    fa = _midp_excess(half_alpha, y, n, a)
    fb = _midp_excess(half_alpha, y, n, b)
    if fa >= 0.0:
        return a
    if fb <= 0.0:
        return b
    # Illinois false position keeps the bracket; a bisection step is forced
    # whenever three steps fail to halve it
    side = 0
    width = b - a
    it = 0
    while b - a > MIDP_TOL * 0.25:
        it += 1
        if it % 3 == 0:
            if b - a > 0.5 * width:
                c = 0.5 * (a + b)
            else:
                c = (a * fb - b * fa) / (fb - fa)
            width = b - a
        else:
            c = (a * fb - b * fa) / (fb - fa)
        if not (a < c < b):
            c = 0.5 * (a + b)
        fc = _midp_excess(half_alpha, y, n, c)
        if fc == 0.0:
            return c
        if fc < 0.0:
            a, fa = c, fc
            if side == -1:
                fb *= 0.5
            side = -1
        else:
            b, fb = c, fc
            if side == 1:
                fa *= 0.5
            side = 1
    return 0.5 * (a + b)


@jit
def _midp_upper(half_alpha, y, n):
    # mirror image: Y -> n - Y, th -> 1 - th
    if y >= n:
        return 1.0
    return 1.0 - _midp_lower(half_alpha, n - y, n)


@jit
def _interval(variant, level, y, n):
    """Central two-sided limits; ``n == 0`` is the vacuous (0, 1)."""
    if n <= 0:
        return 0.0, 1.0
    half = 0.5 * (1.0 - level)
    if variant == 1:
        return _midp_lower(half, y, n), _midp_upper(half, y, n)
    q = 1.0 - half
    return _cp_lower(q, y, n), _cp_upper(q, y, n)


def _check(y, n):
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if int(y) != y or not (0 <= y <= n):
        raise ValueError(f"y must be an integer in [0, n], got y={y!r}, n={n!r}")


def _check_q(q):
    if not (0.0 < q < 1.0):
        raise ValueError(f"q must lie in (0, 1), got {q!r}")


def _check_level(level):
    if not (0.5 < level < 1.0):
        raise ValueError(f"level must lie in (0.5, 1), got {level!r}")


def cp_lower(q, y, n):
    """Lower limit of the one-sided ``100q%`` Clopper-Pearson interval.

    Equals the ``1 - q`` quantile of Beta(y, n - y + 1), and 0 when y = 0.
    """
    _check_q(q)
    _check(y, n)
    return _cp_lower(float(q), int(y), int(n))


def cp_upper(q, y, n):
    """Upper limit of the one-sided ``100q%`` Clopper-Pearson interval.

    Equals the ``q`` quantile of Beta(y + 1, n - y), and 1 when y = n.
    """
    _check_q(q)
    _check(y, n)
    return _cp_upper(float(q), int(y), int(n))


def cp_interval(level, y, n):
    """Central Clopper-Pearson interval built from two one-sided limits."""
    _check_level(level)
    _check(y, n)
    q = 1.0 - (1.0 - level) / 2.0
    lo, hi = _cp_lower(q, int(y), int(n)), _cp_upper(q, int(y), int(n))
    return BinomLimits(lo, hi, level, "clopper_pearson")


def midp_lower(level, y, n):
    _check_level(level)
    _check(y, n)
    return _midp_lower(0.5 * (1.0 - level), int(y), int(n))


def midp_upper(level, y, n):
    _check_level(level)
    _check(y, n)
    return _midp_upper(0.5 * (1.0 - level), int(y), int(n))


def midp_limits(level, y, n):
    """Central mid-P limits at confidence ``level``.

    Each limit solves its tail equation (tail beyond y plus half the point
    probability at y equals alpha/2) by bracketed root finding to 1e-10.
    The bracket is the pair of one-sided CP limits at y and y + 1.
    """
    _check_level(level)
    _check(y, n)
    half = 0.5 * (1.0 - level)
    return BinomLimits(
        _midp_lower(half, int(y), int(n)), _midp_upper(half, int(y), int(n)), level, "mid_p"
    )


VARIANTS = {"clopper_pearson": 0, "cp": 0, "mid_p": 1, "midp": 1}


def variant_code(variant):
    try:
        return VARIANTS[str(variant).lower().replace("-", "_")]
    except KeyError:
        raise ValueError(f"unknown binomial variant {variant!r}") from None


def limits_table(level, n, variant="clopper_pearson"):
    """Central limits for every y in 0..n as two arrays."""
    _check_level(level)
    code = variant_code(variant)
    return _limits_table(code, float(level), int(n))


@jit
def _limits_table(code, level, n):
    lo = np.empty(n + 1)
    hi = np.empty(n + 1)
    for y in range(n + 1):
        lo[y], hi[y] = _interval(code, level, y, n)
    return lo, hi
