"""Current status samples, grouped counts, window counts and curves."""

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._accel import jit

__all__ = [
    "DataError",
    "CurrentStatusSample",
    "GroupedCounts",
    "WindowCount",
    "ConfidenceCurve",
    "from_pairs",
    "expand_grouped",
    "count_window",
    "read_individual_csv",
    "read_grouped_csv",
    "read_sample",
]


class DataError(ValueError):
    """Malformed or inconsistent input data."""


def _frozen(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


class CurrentStatusSample:
    """Assessment times sorted nondecreasing with aligned 0/1 event indicators.

    Instances are immutable. Use :func:`from_pairs` or
    :func:`expand_grouped` for unsorted input.
    """

    def __init__(self, times, events):
        times = np.asarray(times, dtype=np.float64)
        events = np.asarray(events)
        if times.ndim != 1 or events.shape != times.shape:
            raise DataError("times and events must be 1-d sequences of equal length")
        if times.size == 0:
            raise DataError("a sample needs at least one observation")
        if not np.all(np.isfinite(times)):
            raise DataError("assessment times must be finite")
        if np.any(times < 0):
            raise DataError("assessment times must be nonnegative")
        if np.any(np.diff(times) < 0):
            raise DataError("assessment times must be sorted nondecreasing")
        if not np.all((events == 0) | (events == 1)):
            raise DataError("event indicators must be 0 or 1")
        self.times = _frozen(times)
        self.events = _frozen(events.astype(np.int64))

    @property
    def n(self):
        return int(self.times.size)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"CurrentStatusSample(n={self.n}, events={int(self.events.sum())})"

    def __eq__(self, other):
        if not isinstance(other, CurrentStatusSample):
            return NotImplemented
        return np.array_equal(self.times, other.times) and np.array_equal(self.events, other.events)

    @cached_property
    def cum_events(self):
        """Prefix sums of the indicators with a leading zero."""
        out = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.events, out=out[1:])
        return _frozen(out)

    @cached_property
    def cells(self):
        """Tie-collapsed ``(time, tested, positive)`` arrays."""
        uniq, start, counts = np.unique(self.times, return_index=True, return_counts=True)
        pos = self.cum_events[start + counts] - self.cum_events[start]
        return _frozen(uniq), _frozen(counts.astype(np.int64)), _frozen(pos.astype(np.int64))

    @property
    def has_ties(self):
        return self.cells[0].size < self.n

    def support(self):
        """Distinct assessment times (the default evaluation grid)."""
        return self.cells[0]

    def to_grouped(self):
        t, n, y = self.cells
        return GroupedCounts(list(zip(t.tolist(), n.tolist(), y.tolist())))


@dataclass(frozen=True)
class GroupedCounts:
    """Rows of (time, tested, positive).

    Canonical form sorts by time, merges repeated times and drops rows with
    nobody tested.
    """

    rows: tuple

    def __init__(self, rows):
        merged = {}
        for i, row in enumerate(rows):
            try:
                time, tested, positive = row
            except (TypeError, ValueError):
                raise DataError(f"row {i}: expected (time, tested, positive)") from None
            time = float(time)
            if not math.isfinite(time) or time < 0:
                raise DataError(f"row {i}: time must be finite and nonnegative, got {time!r}")
            if int(tested) != tested or int(positive) != positive:
                raise DataError(f"row {i}: counts must be integers")
            tested, positive = int(tested), int(positive)
            if tested < 0 or positive < 0:
                raise DataError(f"row {i}: counts must be nonnegative")
            if positive > tested:
                raise DataError(f"row {i}: positive ({positive}) exceeds tested ({tested})")
            old = merged.get(time, (0, 0))
            merged[time] = (old[0] + tested, old[1] + positive)
        canon = tuple((t, nt, ny) for t, (nt, ny) in sorted(merged.items()) if nt > 0)
        object.__setattr__(self, "rows", canon)

    def __len__(self):
        return len(self.rows)

    @property
    def total(self):
        return sum(r[1] for r in self.rows)


@dataclass(frozen=True)
class WindowCount:
    a: float
    b: float
    n_in: int
    y_in: int

    def __post_init__(self):
        if self.a > self.b:
            raise ValueError("window requires a <= b")
        if not 0 <= self.y_in <= self.n_in:
            raise ValueError("window requires 0 <= y_in <= n_in")


@dataclass
class ConfidenceCurve:
    """Pointwise limits over an increasing grid of times."""

    grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    method: str
    level: float
    estimate: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=np.float64)
        self.lower = np.asarray(self.lower, dtype=np.float64)
        self.upper = np.asarray(self.upper, dtype=np.float64)
        if self.grid.ndim != 1 or self.lower.shape != self.grid.shape or self.upper.shape != self.grid.shape:
            raise ValueError("grid, lower and upper must be aligned 1-d arrays")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if self.estimate is not None:
            self.estimate = np.asarray(self.estimate, dtype=np.float64)

    def __len__(self):
        return self.grid.size

    def replace(self, lower=None, upper=None, method=None, **meta):
        new_meta = dict(self.meta)
        new_meta.update(meta)
        return ConfidenceCurve(
            self.grid,
            self.lower if lower is None else lower,
            self.upper if upper is None else upper,
            self.method if method is None else method,
            self.level,
            self.estimate,
            new_meta,
        )

    @property
    def length(self):
        return self.upper - self.lower


def from_pairs(raw):
    """Build a sample from ``(time, indicator)`` pairs; stable sort by time."""
    pairs = list(raw)
    if not pairs:
        raise DataError("empty input")
    times = np.empty(len(pairs))
    events = np.empty(len(pairs), dtype=np.int64)
    for i, pair in enumerate(pairs):
        t, d = pair
        t = float(t)
        if math.isnan(t):
            raise DataError(f"observation {i}: time is NaN")
        if d not in (0, 1):
            raise DataError(f"observation {i}: indicator must be 0 or 1, got {d!r}")
        times[i] = t
        events[i] = int(d)
    order = np.argsort(times, kind="stable")
    return CurrentStatusSample(times[order], events[order])


def expand_grouped(g):
    """One observation per person tested: ``positive`` events, the rest non-events."""
    if not isinstance(g, GroupedCounts):
        g = GroupedCounts(g)
    if len(g) == 0:
        raise DataError("grouped data contain no tested subjects")
    times = []
    events = []
    for t, tested, positive in g.rows:
        times.extend([t] * tested)
        # non-events first so ties follow a fixed order
        events.extend([0] * (tested - positive) + [1] * positive)
    return CurrentStatusSample(times, events)


@jit
def _window_counts(times, cum_events, a, b):
    lo = np.searchsorted(times, a, side="left")
    hi = np.searchsorted(times, b, side="right")
    if hi < lo:
        hi = lo
    return hi - lo, cum_events[hi] - cum_events[lo]


def count_window(s, a, b):
    """Counts over the closed window [a, b]."""
    if a > b:
        raise ValueError(f"window requires a <= b, got a={a!r}, b={b!r}")
    n_in, y_in = _window_counts(s.times, s.cum_events, float(a), float(b))
    return WindowCount(float(a), float(b), int(n_in), int(y_in))


# --------------------------------------------------------------------------
# CSV ingestion


def _read_rows(source, expected):
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    reader = csv.reader(io.StringIO(text.lstrip("﻿"), newline=""))
    header = None
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        cells = [c.strip() for c in row]
        if header is None:
            header = [c.lower() for c in cells]
            if header != list(expected):
                raise DataError(
                    f"line {lineno}: header must be {','.join(expected)}, got {','.join(cells)}"
                )
            continue
        if len(cells) != len(expected):
            raise DataError(f"line {lineno}: expected {len(expected)} fields, got {len(cells)}")
        yield lineno, cells
    if header is None:
        raise DataError("line 1: missing header")


def _parse_float(value, lineno, name):
    try:
        x = float(value)
    except ValueError:
        raise DataError(f"line {lineno}: {name} is not a number: {value!r}") from None
    if not math.isfinite(x):
        raise DataError(f"line {lineno}: {name} must be finite")
    if x < 0:
        raise DataError(f"line {lineno}: {name} must be nonnegative")
    return x


def _parse_int(value, lineno, name):
    try:
        x = int(value)
    except ValueError:
        raise DataError(f"line {lineno}: {name} is not an integer: {value!r}") from None
    if x < 0:
        raise DataError(f"line {lineno}: {name} must be nonnegative")
    return x


def read_individual_csv(source):
    """``time,status`` rows -> CurrentStatusSample."""
    pairs = []
    for lineno, (t, d) in _read_rows(source, ("time", "status")):
        t = _parse_float(t, lineno, "time")
        if d not in ("0", "1"):
            raise DataError(f"line {lineno}: status must be 0 or 1, got {d!r}")
        pairs.append((t, int(d)))
    if not pairs:
        raise DataError("no data rows")
    return from_pairs(pairs)


def read_grouped_csv(source):
    """``time,tested,positive`` rows -> GroupedCounts."""
    rows = []
    for lineno, (t, nt, ny) in _read_rows(source, ("time", "tested", "positive")):
        t = _parse_float(t, lineno, "time")
        nt = _parse_int(nt, lineno, "tested")
        ny = _parse_int(ny, lineno, "positive")
        if ny > nt:
            raise DataError(f"line {lineno}: positive ({ny}) exceeds tested ({nt})")
        rows.append((t, nt, ny))
    if not rows:
        raise DataError("no data rows")
    return GroupedCounts(rows)


def read_sample(source, fmt="individual"):
    if fmt == "individual":
        return read_individual_csv(source)
    if fmt == "grouped":
        return expand_grouped(read_grouped_csv(source))
    raise ValueError(f"unknown format {fmt!r}; expected individual or grouped")
