"""Brute-force reference implementations shared by the test modules."""

import itertools
import math

import numpy as np


def cell_loglik(n, y, p):
    total = 0.0
    for k, q in ((y, p), (n - y, 1.0 - p)):
        if k:
            if q <= 0.0:
                return -math.inf
            total += k * math.log(q)
    return total


def _partitions(k):
    for cuts in itertools.product((False, True), repeat=k - 1):
        blocks, start = [], 0
        for i, c in enumerate(cuts, start=1):
            if c:
                blocks.append((start, i))
                start = i
        blocks.append((start, k))
        yield blocks


def partition_mle(nt, ny, theta=None, lo=None, hi=None):
    """Max log-likelihood over nondecreasing cell probabilities.

    Every contiguous partition of the cells is tried, each block taking its
    pooled mean or, when ``theta`` is given, the value ``theta``. With
    ``theta`` set, cells before index ``lo`` must sit at or below it, cells
    from ``hi`` on at or above it and cells in ``[lo, hi)`` equal it.
    Returns ``(best_loglik, values)``.
    """
    k = len(nt)
    best, arg = -math.inf, None
    for blocks in _partitions(k):
        means = [sum(ny[a:b]) / sum(nt[a:b]) for a, b in blocks]
        choices = [(m,) if theta is None else (m, theta) for m in means]
        for pick in itertools.product(*choices):
            vals = np.empty(k)
            for (a, b), v in zip(blocks, pick):
                vals[a:b] = v
            if np.any(np.diff(vals) < 0):
                continue
            if theta is not None:
                if np.any(vals[:lo] > theta) or np.any(vals[hi:] < theta):
                    continue
                if np.any(vals[lo:hi] != theta):
                    continue
            ll = sum(cell_loglik(n, y, p) for n, y, p in zip(nt, ny, vals))
            if ll > best:
                best, arg = ll, vals
    return best, arg
