"""Approximate binomial-framework (ABF) intervals.

One pooled proportion over a symmetric window of m-dagger assessments around
t gives both limits. The window size can be chosen per point by minimising an
approximate MSE, which needs plug-in estimates of F(t), f(t) and g(t) from
smoothed NPMLE functionals and a kernel density estimate.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._accel import jit
from .binom_ci import _interval, variant_code
from .data_model import ConfidenceCurve
from .npmle import npmle_fit
from .stat_kernel import KernelKind, _kernel_scaled, kernel_constants

__all__ = [
    "NuisanceEstimates",
    "AbfConfig",
    "silverman_bandwidth",
    "smle_eval",
    "kde_g",
    "amse_bandwidth",
    "estimate_nuisances",
    "cardano_root",
    "mdagger_star",
    "abf_window",
    "abf_interval",
    "abf_curve",
]

F_CLAMP = (0.01, 0.99)
FPRIME_SQ_FLOOR = 1e-3
DENSITY_FLOOR = 1e-4


@dataclass(frozen=True)
class NuisanceEstimates:
    F_hat: float
    f_hat: float
    g_hat: float
    h_F: float
    h_g: float


@dataclass(frozen=True)
class AbfConfig:
    m_dagger: object = "auto"
    level: float = 0.95
    variant: str = "clopper_pearson"
    kernel: str = "gaussian"

    def __post_init__(self):
        if not (0.5 < self.level < 1.0):
            raise ValueError("level must lie in (0.5, 1)")
        if self.m_dagger != "auto":
            m = self.m_dagger
            if int(m) != m or m < 2 or m % 2:
                raise ValueError(f"m_dagger must be an even integer >= 2 or 'auto', got {m!r}")
        variant_code(self.variant)
        KernelKind.parse(self.kernel)


# --------------------------------------------------------------------------
# bandwidths and smoothing


def silverman_bandwidth(times):
    """0.9 * min(sd, IQR/1.34) * n^(-1/5).

    When the IQR collapses to zero on heavily tied data the standard
    deviation alone is used.
    """
    x = np.asarray(times, dtype=np.float64)
    n = x.size
    if n < 2:
        raise ValueError("bandwidth needs at least two observations")
    sd = float(np.std(x, ddof=1))
    if not sd > 0:
        raise ValueError("bandwidth undefined: all assessment times are equal")
    q75, q25 = np.percentile(x, [75.0, 25.0])
    spread = min(sd, (q75 - q25) / 1.34)
    if not spread > 0:
        spread = sd
    return 0.9 * spread * n ** (-0.2)


@jit
def _smle(jump_u, jump_w, t, h, kind):
    F = 0.0
    f = 0.0
    fp = 0.0
    for j in range(jump_u.size):
        k, K, dk = _kernel_scaled(kind, t - jump_u[j], h)
        F += jump_w[j] * K
        f += jump_w[j] * k
        fp += jump_w[j] * dk
    return F, f, fp


@jit
def _kde(times, t, h):
    total = 0.0
    for i in range(times.size):
        k, _, _ = _kernel_scaled(0, t - times[i], h)
        total += k
    return total / times.size


@jit
def _amse_bandwidth(F, fprime, g, n, roughness, mu2):
    F = min(max(F, 0.01), 0.99)
    fp2 = max(fprime * fprime, FPRIME_SQ_FLOOR)
    g = max(g, DENSITY_FLOOR)
    c = (F * (1.0 - F) / g * roughness) ** 0.2 * (mu2 * mu2 * fp2) ** -0.2
    return c * n ** -0.2


@jit
def _nuisances(times, jump_u, jump_w, t, h_g, kind, roughness, mu2):
    n = times.size
    g = _kde(times, t, h_g)
    F0, _, fp = _smle(jump_u, jump_w, t, h_g, kind)
    h_F = _amse_bandwidth(F0, fp, g, n, roughness, mu2)
    F1, f1, _ = _smle(jump_u, jump_w, t, h_F, kind)
    F1 = min(max(F1, 0.01), 0.99)
    f1 = max(f1, DENSITY_FLOOR)
    g = max(g, DENSITY_FLOOR)
    return F1, f1, g, h_F


def smle_eval(s, F_step, t, h, kernel="gaussian"):
    """Smoothed NPMLE functionals at t: ``(F_sm, f_sm, f'_sm)``.

    Each is a Stieltjes sum over the jumps of ``F_step`` (the NPMLE of ``s``
    when None), using K_h, k_h and k'_h.
    """
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    if F_step is None:
        F_step = npmle_fit(s)
    u, w = F_step.jumps()
    return _smle(u, w, float(t), float(h), int(KernelKind.parse(kernel)))


def kde_g(s, t, h=None):
    """Gaussian kernel density estimate of the assessment density at t."""
    if h is None:
        h = silverman_bandwidth(s.times)
    return _kde(s.times, float(t), float(h))


def amse_bandwidth(F_hat, fprime_hat, g_hat, n, kernel="gaussian"):
    """Plug-in aMSE-optimal bandwidth c_F * n^(-1/5) after clamping the inputs."""
    roughness, mu2 = kernel_constants(kernel)
    return _amse_bandwidth(float(F_hat), float(fprime_hat), float(g_hat), float(n), roughness, mu2)


def estimate_nuisances(s, t, kernel="gaussian", F_step=None, h_g=None):
    """Single-pass plug-in estimates of F(t), f(t), g(t).

    Silverman bandwidth for g, a pilot smooth at that bandwidth for F and f',
    then F and f re-smoothed at the aMSE bandwidth. Values are clamped to
    keep the window-size formula finite; there is no iteration.
    """
    if s.n < 2:
        raise ValueError("nuisance estimation needs at least two observations")
    if h_g is None:
        h_g = silverman_bandwidth(s.times)
    if F_step is None:
        F_step = npmle_fit(s)
    u, w = F_step.jumps()
    roughness, mu2 = kernel_constants(kernel)
    F1, f1, g, h_F = _nuisances(
        s.times, u, w, float(t), float(h_g), int(KernelKind.parse(kernel)), roughness, mu2
    )
    return NuisanceEstimates(F1, f1, g, h_F, float(h_g))


# --------------------------------------------------------------------------
# MSE-optimal window size


@jit
def _cardano_root(P):
    """Largest real root of m^3 - m^2 - P = 0."""
    A = 1.0 / 27.0 + 0.5 * P
    D = A * A - 1.0 / 729.0
    if D >= 0.0:
        u = (A + math.sqrt(D)) ** (1.0 / 3.0)
        # second cube root is 1/(9u) since the product of the two radicands is 1/729
        return u + 1.0 / (9.0 * u) + 1.0 / 3.0
    # three real roots (only when P < 0); take the largest
    r = math.sqrt(1.0 / 9.0)
    phi = math.acos(max(-1.0, min(1.0, A / (r * r * r))))
    return 2.0 * r * math.cos(phi / 3.0) + 1.0 / 3.0


def cardano_root(P):
    return _cardano_root(float(P))


@jit
def _round_even(x, n):
    m = 2 * math.floor(x / 2.0 + 0.5)
    cap = n - (n % 2)
    if m > cap:
        m = cap
    if m < 2:
        m = 2
    return int(m)


@jit
def _mdagger_star(n, F, f, g):
    c = (f / (4.0 * n * g)) ** 2
    return _round_even(_cardano_root(F * (1.0 - F) / c), n)


def mdagger_star(n, est):
    """Even window size minimising the approximate two-sided MSE.

    The real root of c m^3 - c m^2 - F(1-F) = 0 with c = (f / (4 n g))^2,
    rounded to the nearest even integer (ties upward), at least 2 and at
    most n.
    """
    return _mdagger_star(int(n), float(est.F_hat), float(est.f_hat), float(est.g_hat))


# --------------------------------------------------------------------------
# the interval


@jit
def _abf_window(times, cum, t, m):
    """Boundary-reduced size m_dag and the (N, Y) counts of the symmetric window."""
    n = times.size
    l = np.searchsorted(times, t, side="right")
    g = np.searchsorted(times, t, side="left") + 1
    half = min((m + 1) // 2, l, n - g + 1)
    if half <= 0:
        return 0, 0, 0, 0.0, 0.0
    a = times[l - half]
    b = times[g + half - 2]
    lo = np.searchsorted(times, a, side="left")
    hi = np.searchsorted(times, b, side="right")
    return 2 * half, hi - lo, cum[hi] - cum[lo], a, b


@jit
def _abf_point(times, cum, t, m, level, variant, F_npmle):
    m_dag, n_in, y_in, _, _ = _abf_window(times, cum, t, m)
    if m_dag == 0:
        return 0.0, 1.0, 0
    lo, hi = _interval(variant, level, y_in, n_in)
    if F_npmle <= 0.0:
        lo = 0.0
    if F_npmle >= 1.0:
        hi = 1.0
    return lo, hi, m_dag


@jit
def _abf_curve(times, cum, jump_u, jump_w, grid, F_grid, level, variant, kind,
               roughness, mu2, h_g, m_fixed):
    k = grid.size
    n = times.size
    lo = np.empty(k)
    hi = np.empty(k)
    used = np.empty(k, dtype=np.int64)
    for i in range(k):
        t = grid[i]
        m = m_fixed
        if m <= 0:
            F1, f1, g1, _ = _nuisances(times, jump_u, jump_w, t, h_g, kind, roughness, mu2)
            m = _mdagger_star(n, F1, f1, g1)
        lo[i], hi[i], used[i] = _abf_point(times, cum, t, m, level, variant, F_grid[i])
    return lo, hi, used


def abf_window(s, t, m):
    """``(m_dag, WindowCount)`` for the symmetric window of nominal size m."""
    from .data_model import WindowCount

    m_dag, n_in, y_in, a, b = _abf_window(s.times, s.cum_events, float(t), int(m))
    if m_dag == 0:
        return 0, WindowCount(float(t), float(t), 0, 0)
    return int(m_dag), WindowCount(float(a), float(b), int(n_in), int(y_in))


def _resolve(s, t, cfg, F_step):
    if cfg.m_dagger != "auto":
        return int(cfg.m_dagger)
    est = estimate_nuisances(s, t, cfg.kernel, F_step)
    return mdagger_star(s.n, est)


def abf_interval(s, t, cfg=AbfConfig(), F_step=None):
    """ABF limits at t, pinned to 0 / 1 where the NPMLE is 0 / 1."""
    if F_step is None:
        F_step = npmle_fit(s)
    m = _resolve(s, t, cfg, F_step)
    lo, hi, _ = _abf_point(
        s.times, s.cum_events, float(t), m, float(cfg.level),
        variant_code(cfg.variant), float(F_step(t)),
    )
    return lo, hi


def abf_curve(s, grid=None, cfg=AbfConfig(), F_step=None, h_g=None):
    """Unadjusted ABF limits over ``grid`` (default: distinct assessment times)."""
    grid = s.support() if grid is None else np.asarray(grid, dtype=np.float64)
    if F_step is None:
        F_step = npmle_fit(s)
    u, w = F_step.jumps()
    roughness, mu2 = kernel_constants(cfg.kernel)
    if cfg.m_dagger == "auto":
        m_fixed = 0
        if h_g is None:
            h_g = silverman_bandwidth(s.times)
    else:
        m_fixed = int(cfg.m_dagger)
        h_g = 1.0
    F_grid = np.asarray(F_step(grid), dtype=np.float64).reshape(grid.shape)
    lo, hi, used = _abf_curve(
        s.times, s.cum_events, u, w, grid, F_grid, float(cfg.level),
        variant_code(cfg.variant), int(KernelKind.parse(cfg.kernel)),
        roughness, mu2, float(h_g), m_fixed,
    )
    variant = "midp" if variant_code(cfg.variant) == 1 else "cp"
    return ConfidenceCurve(
        grid, lo, hi, f"abf-{variant}", cfg.level, estimate=F_grid, meta={"m_dagger": used}
    )
