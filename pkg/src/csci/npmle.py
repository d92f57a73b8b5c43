"""NPMLE of the event-time distribution by pool-adjacent-violators.

For current status data the maximum likelihood estimate over nondecreasing F
is the weighted isotonic regression of the event indicators on assessment
time. Only the tie-collapsed cells (time, tested, positive) matter.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._accel import jit

__all__ = [
    "StepCdf",
    "npmle_fit",
    "restricted_npmle",
    "loglik",
    "pava",
    "SegmentFit",
    "segment_fit",
]


@dataclass(frozen=True)
class StepCdf:
    """Right-continuous step function: 0 before the first knot, flat after the last."""

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if knots.shape != values.shape or knots.ndim != 1:
            raise ValueError("knots and values must be aligned 1-d arrays")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if np.any(np.diff(values) < 0) or np.any(values < 0) or np.any(values > 1):
            raise ValueError("values must be nondecreasing in [0, 1]")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        idx = np.searchsorted(self.knots, t, side="right") - 1
        out = np.where(idx >= 0, self.values[np.maximum(idx, 0)], 0.0)
        return float(out) if out.ndim == 0 else out

    def jumps(self):
        """Jump locations and sizes of the measure dF."""
        sizes = np.diff(self.values, prepend=0.0)
        keep = sizes > 0
        return self.knots[keep], sizes[keep]


@jit
def _pava(y, w):
    """Weighted isotonic (nondecreasing) regression of ``y``.

    Returns the fitted value of every input position.
    """
    k = y.size
    val = np.empty(k)
    wt = np.empty(k)
    length = np.empty(k, dtype=np.int64)
    top = -1
    for i in range(k):
        top += 1
        val[top] = y[i]
        wt[top] = w[i]
        length[top] = 1
        while top > 0 and val[top - 1] >= val[top]:
            tot = wt[top - 1] + wt[top]
            val[top - 1] = (wt[top - 1] * val[top - 1] + wt[top] * val[top]) / tot
            wt[top - 1] = tot
            length[top - 1] += length[top]
            top -= 1
    out = np.empty(k)
    pos = 0
    for b in range(top + 1):
        for _ in range(length[b]):
            out[pos] = val[b]
            pos += 1
    return out


@jit
def _pava_counts(tested, positive):
    """PAVA on binomial cells, pooling counts exactly.

    Returns per-block (tested, positive) sums and the block index of each cell.
    """
    k = tested.size
    bn = np.empty(k, dtype=np.int64)
    by = np.empty(k, dtype=np.int64)
    length = np.empty(k, dtype=np.int64)
    top = -1
    for i in range(k):
        top += 1
        bn[top] = tested[i]
        by[top] = positive[i]
        length[top] = 1
        # merge while previous block mean >= current block mean
        while top > 0 and by[top - 1] * bn[top] >= by[top] * bn[top - 1]:
            bn[top - 1] += bn[top]
            by[top - 1] += by[top]
            length[top - 1] += length[top]
            top -= 1
    nb = top + 1
    owner = np.empty(k, dtype=np.int64)
    pos = 0
    for b in range(nb):
        for _ in range(length[b]):
            owner[pos] = b
            pos += 1
    return bn[:nb].copy(), by[:nb].copy(), owner


def pava(y, w=None):
    """Weighted isotonic regression (nondecreasing) of a 1-d sequence."""
    y = np.asarray(y, dtype=np.float64)
    w = np.ones_like(y) if w is None else np.asarray(w, dtype=np.float64)
    if y.shape != w.shape or y.ndim != 1:
        raise ValueError("y and w must be aligned 1-d arrays")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    if y.size == 0:
        return y.copy()
    return _pava(y, w)


def _cell_fit(tested, positive):
    bn, by, owner = _pava_counts(tested, positive)
    means = by / bn
    return means[owner]


def npmle_fit(s):
    """Unrestricted NPMLE as a step function on the distinct assessment times."""
    t, nt, ny = s.cells
    return StepCdf(t, _cell_fit(nt, ny))


@dataclass(frozen=True)
class SegmentFit:
    """Pooled blocks on either side of ``t`` for constrained fits at ``t``.

    ``left`` covers cells strictly before ``t``, ``right`` cells strictly
    after; a cell sitting exactly at ``t`` is kept apart because the
    constraint pins its value.
    """

    t: float
    left_n: np.ndarray
    left_y: np.ndarray
    right_n: np.ndarray
    right_y: np.ndarray
    at_n: int
    at_y: int
    full_loglik: float


def segment_fit(s, t):
    times, nt, ny = s.cells
    lo = int(np.searchsorted(times, t, side="left"))
    hi = int(np.searchsorted(times, t, side="right"))
    empty = np.zeros(0, dtype=np.int64)
    if lo > 0:
        ln, ly, _ = _pava_counts(nt[:lo], ny[:lo])
    else:
        ln, ly = empty, empty
    if hi < times.size:
        rn, ry, _ = _pava_counts(nt[hi:], ny[hi:])
    else:
        rn, ry = empty, empty
    at_n = int(nt[lo:hi].sum())
    at_y = int(ny[lo:hi].sum())
    bn, by, _ = _pava_counts(nt, ny)
    full = _blocks_loglik(bn, by)
    return SegmentFit(float(t), ln, ly, rn, ry, at_n, at_y, full)


@jit
def _xlogy(x, y):
    if x == 0:
        return 0.0
    if y <= 0.0:
        return -math.inf
    return x * math.log(y)


@jit
def _cell_loglik(n, y, p):
    return _xlogy(y, p) + _xlogy(n - y, 1.0 - p)


@jit
def _blocks_loglik(bn, by):
    total = 0.0
    for b in range(bn.size):
        total += _cell_loglik(bn[b], by[b], by[b] / bn[b])
    return total


@jit
def _restricted_loglik(left_n, left_y, right_n, right_y, at_n, at_y, theta):
    total = _cell_loglik(at_n, at_y, theta)
    for b in range(left_n.size):
        p = min(left_y[b] / left_n[b], theta)
        total += _cell_loglik(left_n[b], left_y[b], p)
    for b in range(right_n.size):
        p = max(right_y[b] / right_n[b], theta)
        total += _cell_loglik(right_n[b], right_y[b], p)
    return total


def restricted_npmle(s, t, theta0):
    """NPMLE subject to F(t) = theta0.

    Cells before ``t`` get their own isotonic fit capped at ``theta0``, cells
    after ``t`` their own fit floored at ``theta0``, and a cell at ``t`` takes
    ``theta0``. The returned step function carries a knot at ``t``.
    """
    if not 0.0 <= theta0 <= 1.0:
        raise ValueError(f"theta0 must lie in [0, 1], got {theta0!r}")
    times, nt, ny = s.cells
    lo = int(np.searchsorted(times, t, side="left"))
    hi = int(np.searchsorted(times, t, side="right"))
    values = np.empty(times.size)
    if lo > 0:
        values[:lo] = np.minimum(_cell_fit(nt[:lo], ny[:lo]), theta0)
    values[lo:hi] = theta0
    if hi < times.size:
        values[hi:] = np.maximum(_cell_fit(nt[hi:], ny[hi:]), theta0)
    if lo == hi:
        times = np.insert(times, lo, float(t))
        values = np.insert(values, lo, float(theta0))
    return StepCdf(times, values)


def loglik(s, F):
    """Bernoulli log-likelihood of the sample under ``F`` (0 log 0 = 0).

    Returns ``-inf`` when some observation has probability zero.
    """
    times, nt, ny = s.cells
    p = np.asarray(F(times), dtype=np.float64)
    total = 0.0
    for n, y, pi in zip(nt.tolist(), ny.tolist(), np.atleast_1d(p).tolist()):
        total += _cell_loglik(n, y, pi)
    return float(total)
