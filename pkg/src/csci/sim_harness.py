"""Seeded Monte Carlo coverage and length studies.

Replication ``r`` draws its sample from a generator seeded by
``SeedSequence([seed, r])``, so every replication is reproducible on its own
and results do not depend on how replications are scheduled across threads.
"""

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats

from .data_model import CurrentStatusSample
from .npmle import npmle_fit
from .pipeline import method_curve, parse_method
from .valid_ci import _valid_point

__all__ = [
    "ScenarioSpec",
    "builtin_scenarios",
    "get_scenario",
    "SimConfig",
    "SimResult",
    "DEFAULT_EVAL_Q",
    "thread_count",
    "run_coverage",
    "length_sweep",
]

DEFAULT_EVAL_Q = tuple(round(0.05 * i, 2) for i in range(1, 20))
CSV_COLUMNS = ("method", "scenario", "n", "eval_q", "coverage", "mc_se", "mean_length", "reps", "seed")


@dataclass(frozen=True)
class ScenarioSpec:
    """Event-time law F and assessment-time law G of one simulation design."""

    name: str
    F_cdf: object
    F_ppf: object
    F_sampler: object
    G_sampler: object
    G_cdf: object
    G_upper: float = math.inf
    description: str = ""

    def sample(self, rng, n):
        """Sorted current status sample: assessment times first, then event times."""
        c = np.asarray(self.G_sampler(rng, n), dtype=np.float64)
        x = np.asarray(self.F_sampler(rng, n), dtype=np.float64)
        order = np.argsort(c, kind="stable")
        return CurrentStatusSample(c[order], (x[order] <= c[order]).astype(np.int64))


# --------------------------------------------------------------------------
# catalogue


def _exp_scale(scale):
    return (
        lambda t: -np.expm1(-np.maximum(np.asarray(t, dtype=np.float64), 0.0) / scale),
        lambda q: -scale * np.log1p(-np.asarray(q, dtype=np.float64)),
        lambda rng, n: rng.exponential(scale, n),
    )


def _uniform(upper):
    return (
        lambda rng, n: rng.uniform(0.0, upper, n),
        lambda t: np.clip(np.asarray(t, dtype=np.float64) / upper, 0.0, 1.0),
    )


def _case3_cdf(t):
    t = np.maximum(np.asarray(t, dtype=np.float64), 0.0)
    return 0.5 * -np.expm1(-t / 3.0) + 0.5 * -np.expm1(-((t / 10.0) ** 8))


def _case3_ppf(q):
    q = np.asarray(q, dtype=np.float64)
    out = np.array([optimize.brentq(lambda t: _case3_cdf(t) - qi, 0.0, 200.0, xtol=1e-14, rtol=1e-14)
                    for qi in np.atleast_1d(q)])
    return out.reshape(q.shape) if q.ndim else float(out[0])


def _case3_sample(rng, n):
    pick = rng.random(n) < 0.5
    return np.where(pick, rng.exponential(3.0, n), 10.0 * rng.weibull(8.0, n))


_STEEP_KNOT = 0.25 + 1.0 / 200.0
_STEEP_SLOPE = 0.25 / (0.75 - 1.0 / 200.0)


def _steep_cdf(t):
    t = np.clip(np.asarray(t, dtype=np.float64), 0.0, 1.0)
    return np.where(
        t <= 0.25, t,
        np.where(t <= _STEEP_KNOT, 0.25 + 20000.0 * (t - 0.25) ** 2,
                 0.75 + _STEEP_SLOPE * (t - _STEEP_KNOT)),
    )


def _steep_ppf(q):
    q = np.asarray(q, dtype=np.float64)
    return np.where(
        q <= 0.25, q,
        np.where(q <= 0.75, 0.25 + np.sqrt(np.maximum(q - 0.25, 0.0) / 20000.0),
                 _STEEP_KNOT + (q - 0.75) / _STEEP_SLOPE),
    )


BETA_PAIRS = ((1, 50), (1, 7), (1, 2), (1, 1), (2, 1), (7, 1), (50, 1), (100, 100), (0.1, 0.1))


def _beta_name(a, b):
    return f"beta({a:g},{b:g})"


def builtin_scenarios():
    """Catalogue: case1-case3, nine Beta(a, b) scenarios with G = U(0, 1), and steep."""
    cat = {}
    F1, P1, S1 = _exp_scale(1.0)
    cat["case1"] = ScenarioSpec("case1", F1, P1, S1, S1, F1, math.inf,
                                "F = Exp(1), G = Exp(1)")
    F2, P2, S2 = _exp_scale(3.0)
    gs, gc = _uniform(5.0)
    cat["case2"] = ScenarioSpec("case2", F2, P2, S2, gs, gc, 5.0,
                                "F = 1 - exp(-t/3), G = U(0, 5)")
    gs, gc = _uniform(15.0)
    cat["case3"] = ScenarioSpec(
        "case3", _case3_cdf, _case3_ppf, _case3_sample, gs, gc, 15.0,
        "F = .5 (1 - exp(-t/3)) + .5 (1 - exp(-(t/10)^8)), G = U(0, 15)",
    )
    gs, gc = _uniform(1.0)
    for a, b in BETA_PAIRS:
        law = stats.beta(a, b)
        cat[_beta_name(a, b)] = ScenarioSpec(
            _beta_name(a, b), law.cdf, law.ppf,
            (lambda a, b: lambda rng, n: rng.beta(a, b, n))(a, b),
            gs, gc, 1.0, f"F = Beta({a:g}, {b:g}), G = U(0, 1)",
        )
    cat["steep"] = ScenarioSpec(
        "steep", _steep_cdf, _steep_ppf,
        lambda rng, n: _steep_ppf(rng.random(n)), gs, gc, 1.0,
        "piecewise F rising from .25 to .75 on (.25, .255], G = U(0, 1)",
    )
    return cat


_CATALOG = None


def get_scenario(name):
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = builtin_scenarios()
    try:
        return _CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; available: {', '.join(_CATALOG)}") from None


# --------------------------------------------------------------------------
# coverage runs


def thread_count(threads=None):
    """Worker count: explicit value, else CSCI_THREADS, else the CPU count."""
    if threads is None:
        env = os.environ.get("CSCI_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    if threads < 1:
        raise ValueError("thread count must be >= 1")
    return int(threads)


@dataclass(frozen=True)
class SimConfig:
    scenario: str
    n: int
    reps: int = 1000
    level: float = 0.95
    methods: tuple = ("valid",)
    eval_q: tuple = None
    eval_times: tuple = None
    seed: int = 0
    m: object = "auto"
    m_dagger: object = "auto"
    lrt_critical: float = None
    override: bool = False
    adjust_on: str = "support"

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.eval_q is not None and self.eval_times is not None:
            raise ValueError("give eval_q or eval_times, not both")
        if not self.methods:
            raise ValueError("at least one method is required")
        for name in self.methods:
            parse_method(name, self.override)
            if name == "lrt" and self.lrt_critical is None:
                raise ValueError("method lrt needs lrt_critical")
        get_scenario(self.scenario)

    def eval_points(self):
        """``(eval_q, eval_t, dropped_q)``; default quantiles outside G's support are dropped."""
        spec = get_scenario(self.scenario)
        if self.eval_times is not None:
            t = np.asarray(self.eval_times, dtype=np.float64)
            if np.any(t <= 0) or np.any(t >= spec.G_upper):
                raise ValueError("eval times must lie inside the assessment-time support")
            order = np.argsort(t)
            t = t[order]
            return np.asarray(spec.F_cdf(t), dtype=np.float64), t, ()
        explicit = self.eval_q is not None
        q = np.asarray(DEFAULT_EVAL_Q if not explicit else self.eval_q, dtype=np.float64)
        if np.any(q <= 0) or np.any(q >= 1):
            raise ValueError("eval quantiles must lie in (0, 1)")
        q = np.sort(q)
        t = np.asarray(spec.F_ppf(q), dtype=np.float64)
        inside = t < spec.G_upper
        if explicit and not inside.all():
            raise ValueError(f"eval quantiles {q[~inside].tolist()} fall outside the assessment-time support")
        return q[inside], t[inside], tuple(q[~inside].tolist())


@dataclass
class SimResult:
    config: SimConfig
    methods: tuple
    eval_q: np.ndarray
    eval_t: np.ndarray
    coverage: np.ndarray
    mean_length: np.ndarray
    mc_se: np.ndarray
    meta: dict = field(default_factory=dict)

    def rows(self):
        cfg = self.config
        for i, method in enumerate(self.methods):
            for j, q in enumerate(self.eval_q.tolist()):
                yield (method, cfg.scenario, cfg.n, q, float(self.coverage[i, j]),
                       float(self.mc_se[i, j]), float(self.mean_length[i, j]), cfg.reps, cfg.seed)

    def write_csv(self, path_or_file):
        own = not hasattr(path_or_file, "write")
        fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for row in self.rows():
                w.writerow([f"{v:.10g}" if isinstance(v, float) else v for v in row])
        finally:
            if own:
                fh.close()


def _rep_generator(seed, r):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(r)]))


def _one_rep(cfg, spec, eval_t, F_true, r):
    s = spec.sample(_rep_generator(cfg.seed, r), cfg.n)
    F_step = npmle_fit(s)
    out = np.empty((len(cfg.methods), eval_t.size, 2))
    for i, name in enumerate(cfg.methods):
        cur = method_curve(
            s, name, eval_t, cfg.level, cfg.m, cfg.m_dagger, cfg.lrt_critical,
            cfg.override, F_step, cfg.adjust_on,
        )
        out[i, :, 0] = (cur.lower <= F_true) & (F_true <= cur.upper)
        out[i, :, 1] = cur.upper - cur.lower
    return out


def _map_reps(func, reps, threads):
    """Results stacked in replication order whatever the schedule."""
    threads = min(thread_count(threads), reps)
    if threads == 1:
        return np.stack([func(r) for r in range(reps)])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.stack(list(pool.map(func, range(reps), chunksize=1)))


def run_coverage(cfg, threads=None):
    """Coverage fraction, mean length and MC standard error per (method, eval point)."""
    spec = get_scenario(cfg.scenario)
    eval_q, eval_t, dropped = cfg.eval_points()
    if eval_t.size == 0:
        raise ValueError("no evaluation points inside the assessment-time support")
    F_true = np.asarray(spec.F_cdf(eval_t), dtype=np.float64)
    res = _map_reps(lambda r: _one_rep(cfg, spec, eval_t, F_true, r), cfg.reps, threads)
    coverage = res[..., 0].sum(axis=0) / cfg.reps
    mean_length = res[..., 1].sum(axis=0) / cfg.reps
    mc_se = np.sqrt(coverage * (1.0 - coverage) / cfg.reps)
    meta = {"scenario": spec.description, "dropped_eval_q": list(dropped)}
    return SimResult(cfg, tuple(cfg.methods), eval_q, eval_t, coverage, mean_length, mc_se, meta)


def length_sweep(scenario, n, m_list, level=0.95, reps=1000, seed=0, eval_q=0.5, threads=None):
    """Mean valid-CI length at the ``eval_q`` quantile for each m in ``m_list``.

    All window sizes see the same simulated samples.
    """
    m_list = np.asarray(list(m_list), dtype=np.int64)
    if m_list.size == 0 or np.any(m_list < 1) or np.any(m_list > n):
        raise ValueError("window sizes must lie in [1, n]")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    spec = get_scenario(scenario)
    t = float(spec.F_ppf(eval_q))

    def one(r):
        s = spec.sample(_rep_generator(seed, r), n)
        code = 1 if s.has_ties else 0
        out = np.empty(m_list.size)
        for j, m in enumerate(m_list.tolist()):
            lo, hi, _ = _valid_point(s.times, s.cum_events, t, m, level, code)
            out[j] = hi - lo
        return out

    res = _map_reps(one, reps, threads)
    return m_list, res.sum(axis=0) / reps
