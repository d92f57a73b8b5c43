"""Special functions and smoothing kernels.

Everything here is written in the numba-compatible subset of Python so the
same source serves the compiled path and the pure-Python fallback. The
public wrappers validate arguments; the underscore kernels do not.
"""

import enum
import math

import numpy as np

from ._accel import jit

__all__ = [
    "KernelKind",
    "reg_inc_beta",
    "beta_quantile",
    "binom_pmf",
    "binom_cdf",
    "kernel_funcs",
    "kernel_constants",
]

_LOG_2PI = math.log(2.0 * math.pi)
_HALF_LOG_2PI = 0.5 * _LOG_2PI
_FPMIN = 1e-300
_CF_EPS = 1e-16
_CF_MAXIT = 100000


class KernelKind(enum.IntEnum):
    GAUSSIAN = 0
    TRIWEIGHT = 1

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls[str(value).upper()]
        except KeyError:
            raise ValueError(f"unknown kernel {value!r}; expected gaussian or triweight") from None


# --------------------------------------------------------------------------
# log-gamma helpers


@jit
def _lgammacor(x):
    # Stirling remainder lgamma(x) - ((x-0.5)log x - x + 0.5 log 2pi), x >= 10
    x2 = 1.0 / (x * x)
    return (
        1.0 / 12.0
        - x2 * (1.0 / 360.0 - x2 * (1.0 / 1260.0 - x2 * (1.0 / 1680.0 - x2 * (1.0 / 1188.0))))
    ) / x


@jit
def _lbeta(a, b):
    p = min(a, b)
    q = max(a, b)
    if p >= 10.0:
        corr = _lgammacor(p) + _lgammacor(q) - _lgammacor(p + q)
        return (
            -0.5 * math.log(q)
            + _HALF_LOG_2PI
            + corr
            + (p - 0.5) * math.log(p / (p + q))
            + q * math.log1p(-p / (p + q))
        )
    if q >= 10.0:
        corr = _lgammacor(q) - _lgammacor(p + q)
        return (
            math.lgamma(p)
            + corr
            + p
            - p * math.log(p + q)
            + (q - 0.5) * math.log1p(-p / (p + q))
        )
    return math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q)


# --------------------------------------------------------------------------
# regularized incomplete beta


@jit
def _betacf(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2.0 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            break
    return h


@jit
def _log_beta_front(x, a, b):
    return a * math.log(x) + b * math.log1p(-x) - _lbeta(a, b)


@jit
def _betainc(x, a, b):
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = math.exp(_log_beta_front(x, a, b))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


@jit
def _beta_logpdf(x, a, b):
    return (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - _lbeta(a, b)


@jit
def _beta_guess(q, a, b):
    if a >= 1.0 and b >= 1.0:
        pp = q if q < 0.5 else 1.0 - q
        t = math.sqrt(-2.0 * math.log(pp))
        x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t
        if q < 0.5:
            x = -x
        al = (x * x - 3.0) / 6.0
        h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0))
        w = x * math.sqrt(al + h) / h - (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (
            al + 5.0 / 6.0 - 2.0 / (3.0 * h)
        )
        return a / (a + b * math.exp(2.0 * w))
    lna = math.log(a / (a + b))
    lnb = math.log(b / (a + b))
    t = math.exp(a * lna) / a
    u = math.exp(b * lnb) / b
    w = t + u
    if q < t / w:
        return math.pow(a * w * q, 1.0 / a)
    return 1.0 - math.pow(b * w * (1.0 - q), 1.0 / b)


@jit
def _log_betainc(x, a, b):
    # log I_x(a, b) without underflow deep in the lower tail
    if x <= 0.0:
        return -math.inf
    if x >= 1.0:
        return 0.0
    lf = _log_beta_front(x, a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        return lf + math.log(_betacf(a, b, x) / a)
    return math.log1p(-math.exp(lf) * _betacf(b, a, 1.0 - x) / b)


@jit
def _beta_ppf_lower(q, a, b, x0):
    # q <= 0.5: Newton on log I_x(a, b) = log q in the variable log x, which
    # is nearly linear in the tail; geometric bisection safeguards the step
    lq = math.log(q)
    lo = 0.0
    hi = 1.0
    x = x0
    if not (0.0 < x < 1.0):
        x = _beta_guess(q, a, b)
        if not (0.0 < x < 1.0):
            x = 0.5
    for _ in range(400):
        li = _log_betainc(x, a, b)
        f = li - lq
        if f == 0.0:
            return x
        if f < 0.0:
            lo = x
        else:
            hi = x
        # d log I / d log x = x * pdf(x) / I(x)
        slope = math.exp(math.log(x) + _beta_logpdf(x, a, b) - li)
        xn = -1.0
        if slope > 0.0 and math.isfinite(slope):
            xn = x * math.exp(-f / slope) if abs(f / slope) < 700.0 else -1.0
        if not (lo < xn < hi):
            xn = math.sqrt(lo * hi) if lo > 0.0 else 0.0625 * hi
        if abs(xn - x) <= 4e-16 * xn or hi - lo <= 4e-16 * hi:
            return xn
        x = xn
    return x


@jit
def _beta_ppf(q, a, b, x0):
    """Quantile of Beta(a, b); shapes of zero give point masses at 0 / 1.

    ``x0`` is a starting point in (0, 1); pass a value outside to use the
    built-in guess.
    """
    if a <= 0.0:
        return 0.0
    if b <= 0.0:
        return 1.0
    if q <= 0.0:
        return 0.0
    if q >= 1.0:
        return 1.0
    if q <= 0.5:
        return _beta_ppf_lower(q, a, b, x0)
    # upper half through the mirror image, 1 - q is exact here
    y0 = 1.0 - x0 if 0.0 < x0 < 1.0 else -1.0
    return 1.0 - _beta_ppf_lower(1.0 - q, b, a, y0)


# --------------------------------------------------------------------------
# binomial distribution (saddle-point pmf, accurate for large n)

_SFERR = (
    0.0,
    0.0810614667953272582196702,
    0.0413406959554092940938221,
    0.02767792568499833914878929,
    0.02079067210376509311152277,
    0.01664469118982119216319487,
    0.01387612882307074799874573,
    0.01189670994589177009505572,
    0.010411265261972096497478567,
    0.009255462182712732917728637,
    0.008330563433362871256469318,
    0.007573675487951840794972024,
    0.006942840107209529865664152,
    0.006408994188004207068439631,
    0.005951370112758847735624416,
    0.005554733551962801371038690,
)


@jit
def _stirlerr(n):
    # n integral; log(n!) - log(sqrt(2 pi n) (n/e)^n)
    if n <= 15.0:
        return _SFERR[int(n)]
    nn = n * n
    s0 = 1.0 / 12.0
    s1 = 1.0 / 360.0
    s2 = 1.0 / 1260.0
    s3 = 1.0 / 1680.0
    s4 = 1.0 / 1188.0
    if n > 500.0:
        return (s0 - s1 / nn) / n
    if n > 80.0:
        return (s0 - (s1 - s2 / nn) / nn) / n
    if n > 35.0:
        return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n


@jit
def _bd0(x, npr):
    # x log(x/np) + np - x, computed without cancellation
    if abs(x - npr) < 0.1 * (x + npr):
        v = (x - npr) / (x + npr)
        s = (x - npr) * v
        ej = 2.0 * x * v
        v2 = v * v
        for j in range(1, 1000):
            ej *= v2
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
        return s
    return x * math.log(x / npr) + npr - x


@jit
def _binom_logpmf(k, n, p):
    q = 1.0 - p
    if k < 0 or k > n:
        return -math.inf
    if p == 0.0:
        return 0.0 if k == 0 else -math.inf
    if q == 0.0:
        return 0.0 if k == n else -math.inf
    fk = float(k)
    fn = float(n)
    if k == 0:
        if n == 0:
            return 0.0
        if p < 0.1:
            return -_bd0(fn, fn * q) - fn * p
        return fn * math.log(q)
    if k == n:
        if q < 0.1:
            return -_bd0(fn, fn * p) - fn * q
        return fn * math.log(p)
    lc = (
        _stirlerr(fn)
        - _stirlerr(fk)
        - _stirlerr(fn - fk)
        - _bd0(fk, fn * p)
        - _bd0(fn - fk, fn * q)
    )
    lf = _LOG_2PI + math.log(fk) + math.log1p(-fk / fn)
    return lc - 0.5 * lf


@jit
def _binom_pmf(k, n, p):
    return math.exp(_binom_logpmf(k, n, p))


@jit
def _binom_cdf(y, n, p):
    if y < 0:
        return 0.0
    if y >= n:
        return 1.0
    if y <= n * p:
        s = 0.0
        for k in range(y, -1, -1):
            term = _binom_pmf(k, n, p)
            s += term
            if term < 1e-300 and k < n * p:
                break
        return min(s, 1.0)
    s = 0.0
    for k in range(y + 1, n + 1):
        term = _binom_pmf(k, n, p)
        s += term
        if term < 1e-300 and k > n * p:
            break
    return max(1.0 - s, 0.0)


@jit
def _binom_sf(y, n, p):
    # P(Y > y), summed directly so small upper tails keep relative accuracy
    if y < 0:
        return 1.0
    if y >= n:
        return 0.0
    if y >= n * p:
        s = 0.0
        for k in range(y + 1, n + 1):
            term = _binom_pmf(k, n, p)
            s += term
            if term < 1e-300 and k > n * p:
                break
        return min(s, 1.0)
    return max(1.0 - _binom_cdf(y, n, p), 0.0)


# --------------------------------------------------------------------------
# kernels

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_TRI_C = 35.0 / 32.0


@jit
def _kernel_eval(kind, u):
    """(k(u), K(u), k'(u)) for the unscaled kernel."""
    if kind == 0:
        dens = _INV_SQRT_2PI * math.exp(-0.5 * u * u)
        return dens, 0.5 * math.erfc(-u / math.sqrt(2.0)), -u * dens
    if u <= -1.0:
        return 0.0, 0.0, 0.0
    if u >= 1.0:
        return 0.0, 1.0, 0.0
    w = 1.0 - u * u
    u2 = u * u
    cdf = 0.5 + _TRI_C * u * (1.0 - u2 + 0.6 * u2 * u2 - u2 * u2 * u2 / 7.0)
    return _TRI_C * w * w * w, cdf, -6.0 * _TRI_C * u * w * w


@jit
def _kernel_scaled(kind, u, h):
    k, cdf, dk = _kernel_eval(kind, u / h)
    return k / h, cdf, dk / (h * h)


# --------------------------------------------------------------------------
# public API


def _check_prob(name, x):
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")


def reg_inc_beta(x, a, b):
    """Regularized incomplete beta function I_x(a, b).

    Continued-fraction evaluation (modified Lentz) with the symmetry
    I_x(a, b) = 1 - I_{1-x}(b, a) used on the slowly converging side.
    """
    _check_prob("x", x)
    if not (a > 0 and b > 0):
        raise ValueError(f"shape parameters must be positive, got a={a!r}, b={b!r}")
    return _betainc(float(x), float(a), float(b))


def beta_quantile(q, v, w):
    """``q``-th quantile of Beta(v, w).

    Zero shapes follow the point-mass convention: ``v == 0`` gives 0 and
    ``w == 0`` gives 1 regardless of ``q``.
    """
    _check_prob("q", q)
    if v < 0 or w < 0:
        raise ValueError(f"shape parameters must be nonnegative, got v={v!r}, w={w!r}")
    return _beta_ppf(float(q), float(v), float(w), -1.0)


def _check_binom(y, n, p):
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    if int(y) != y:
        raise ValueError(f"y must be an integer, got {y!r}")
    _check_prob("p", p)


def binom_pmf(y, n, p):
    _check_binom(y, n, p)
    return _binom_pmf(int(y), int(n), float(p))


def binom_cdf(y, n, p):
    """P(Y <= y) for Y ~ Binomial(n, p), summed from exact pmf terms."""
    _check_binom(y, n, p)
    if not (0 <= y <= n):
        raise ValueError(f"y must satisfy 0 <= y <= n, got y={y!r}, n={n!r}")
    return _binom_cdf(int(y), int(n), float(p))


def kernel_funcs(kind, u, h):
    """Scaled kernel values ``(k_h(u), K_h(u), k'_h(u))``.

    ``k_h(u) = k(u/h)/h``, ``K_h(u) = K(u/h)`` and ``k'_h(u) = k'(u/h)/h**2``.
    """
    if not h > 0:
        raise ValueError(f"bandwidth must be positive, got {h!r}")
    return _kernel_scaled(int(KernelKind.parse(kind)), float(u), float(h))


def kernel_constants(kind):
    """``(int k^2, int u^2 k)`` for the given kernel."""
    kind = KernelKind.parse(kind)
    if kind is KernelKind.GAUSSIAN:
        return 1.0 / (2.0 * math.sqrt(math.pi)), 1.0
    return 350.0 / 429.0, 1.0 / 9.0


def binom_pmf_vector(n, p):
    """pmf of Binomial(n, p) over 0..n as an array."""
    _check_binom(0, n, p)
    return _pmf_vector(int(n), float(p))


@jit
def _pmf_vector(n, p):
    out = np.empty(n + 1)
    for k in range(n + 1):
        out[k] = _binom_pmf(k, n, p)
    return out
