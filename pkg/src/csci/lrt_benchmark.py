"""Likelihood-ratio confidence intervals for F(t) by test inversion.

The statistic compares the unrestricted NPMLE with the NPMLE constrained to
F(t) = theta. The interval is every theta whose statistic does not exceed a
critical value of the nonstandard limit law, which the caller supplies.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._accel import jit
from .data_model import ConfidenceCurve
from .npmle import _restricted_loglik, npmle_fit, segment_fit

__all__ = ["LRT_CRITICAL_95", "LrtConfig", "lrt_stat", "lrt_interval", "lrt_curve"]

# Upper 5% point of the limiting null law of the current status LR statistic
# (approximate, 4 significant digits).
LRT_CRITICAL_95 = 2.269

_BISECT_TOL = 1e-12


@dataclass(frozen=True)
class LrtConfig:
    critical_value: float
    grid_tol: float = 1e-4
    level: float = 0.95  # label only; coverage is set by critical_value

    def __post_init__(self):
        if not (self.critical_value > 0 and math.isfinite(self.critical_value)):
            raise ValueError("critical_value must be a positive finite number")
        if not 0 < self.grid_tol < 0.5:
            raise ValueError("grid_tol must lie in (0, 0.5)")


@jit
def _stat(seg_args, full, theta):
    ln, ly, rn, ry, an, ay = seg_args
    r = _restricted_loglik(ln, ly, rn, ry, an, ay, theta)
    if r == -math.inf:
        return math.inf
    return max(2.0 * (full - r), 0.0)


@jit
def _bisect(seg_args, full, crit, inside, outside):
    # stat(inside) <= crit < stat(outside)
    while abs(outside - inside) > _BISECT_TOL:
        mid = 0.5 * (inside + outside)
        if _stat(seg_args, full, mid) <= crit:
            inside = mid
        else:
            outside = mid
    return inside


@jit
def _invert(seg_args, full, crit, theta_hat, grid_tol):
    """(L, U, verified) by bisection, checked against a theta grid scan."""
    if _stat(seg_args, full, 0.0) <= crit:
        lo = 0.0
    else:
        lo = _bisect(seg_args, full, crit, theta_hat, 0.0)
    if _stat(seg_args, full, 1.0) <= crit:
        hi = 1.0
    else:
        hi = _bisect(seg_args, full, crit, theta_hat, 1.0)
    # the accepted grid points must form one run whose ends sit within
    # grid_tol of the bisection endpoints
    k = int(math.ceil(1.0 / grid_tol))
    first = -1
    last = -1
    gaps = False
    for i in range(k + 1):
        th = min(i * grid_tol, 1.0)
        if _stat(seg_args, full, th) <= crit:
            if first < 0:
                first = i
            elif last < i - 1:
                gaps = True
            last = i
    if first < 0:
        return lo, hi, True
    g_lo = min(first * grid_tol, 1.0)
    g_hi = min(last * grid_tol, 1.0)
    ok = (not gaps) and g_lo - lo < grid_tol + 1e-12 and g_lo >= lo - 1e-12
    ok = ok and hi - g_hi < grid_tol + 1e-12 and g_hi <= hi + 1e-12
    if ok:
        return lo, hi, True
    return min(g_lo, theta_hat), max(g_hi, theta_hat), False


def _seg_args(seg):
    return (seg.left_n, seg.left_y, seg.right_n, seg.right_y, seg.at_n, seg.at_y)


def lrt_stat(s, t, theta0, seg=None):
    """2 * (unrestricted - restricted) log-likelihood; ``inf`` if the restriction is impossible."""
    if not 0.0 <= theta0 <= 1.0:
        raise ValueError(f"theta0 must lie in [0, 1], got {theta0!r}")
    if seg is None:
        seg = segment_fit(s, t)
    return float(_stat(_seg_args(seg), seg.full_loglik, float(theta0)))


def lrt_interval(s, t, cfg, F_step=None, return_verified=False):
    """All theta with ``lrt_stat <= cfg.critical_value``, found by bisection from the NPMLE value."""
    if F_step is None:
        F_step = npmle_fit(s)
    seg = segment_fit(s, t)
    theta_hat = float(F_step(t))
    lo, hi, ok = _invert(
        _seg_args(seg), seg.full_loglik, float(cfg.critical_value), theta_hat, float(cfg.grid_tol)
    )
    if return_verified:
        return lo, hi, bool(ok)
    return lo, hi


def lrt_curve(s, grid=None, cfg=None, F_step=None):
    """LR limits over ``grid`` (default: distinct assessment times)."""
    if cfg is None:
        raise ValueError("lrt_curve needs an LrtConfig with an explicit critical value")
    grid = s.support() if grid is None else np.asarray(grid, dtype=np.float64)
    if F_step is None:
        F_step = npmle_fit(s)
    lo = np.empty(grid.size)
    hi = np.empty(grid.size)
    fallbacks = 0
    for i, t in enumerate(grid.tolist()):
        lo[i], hi[i], ok = lrt_interval(s, t, cfg, F_step, return_verified=True)
        fallbacks += not ok
    est = np.asarray(F_step(grid), dtype=np.float64).reshape(grid.shape)
    return ConfidenceCurve(
        grid, lo, hi, "lrt", cfg.level, estimate=est,
        meta={"critical_value": cfg.critical_value, "grid_fallbacks": fallbacks},
    )
