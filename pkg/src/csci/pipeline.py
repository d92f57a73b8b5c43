"""Method names to confidence curves, shared by the simulator and the CLI.

Recognised names are ``valid``, ``lrt`` and ``abf-<variant>-<plan>`` where
variant is ``cp`` or ``midp`` and plan is ``lu`` (edge + lower-upper),
``mv`` (edge + middle-value), ``edge`` or ``raw``.
"""

from dataclasses import dataclass

import numpy as np

from .abf_ci import AbfConfig, abf_curve
from .lrt_benchmark import LrtConfig, lrt_curve
from .monotone_adjust import AdjustmentPlan, apply_plan, check_combination
from .npmle import npmle_fit
from .valid_ci import ValidCiConfig, valid_curve

__all__ = ["MethodSpec", "parse_method", "method_curve", "RECOMMENDED"]

RECOMMENDED = ("valid", "abf-cp-lu", "abf-midp-mv", "lrt")

_VARIANTS = {"cp": "clopper_pearson", "midp": "mid_p"}
_PLANS = {
    "lu": ("edge", "lower_upper"),
    "mv": ("edge", "middle_value"),
    "edge": ("edge",),
    "raw": (),
}


@dataclass(frozen=True)
class MethodSpec:
    name: str
    kind: str
    variant: str = None
    plan: AdjustmentPlan = None


def parse_method(name, override=False):
    """Validate a method name; mid-P with lower-upper needs ``override``."""
    if name in ("valid", "lrt"):
        return MethodSpec(name, name)
    parts = name.split("-")
    if len(parts) != 3 or parts[0] != "abf" or parts[1] not in _VARIANTS or parts[2] not in _PLANS:
        raise ValueError(
            f"unknown method {name!r}; expected valid, lrt or abf-<cp|midp>-<lu|mv|edge|raw>"
        )
    variant = _VARIANTS[parts[1]]
    plan = AdjustmentPlan(_PLANS[parts[2]])
    check_combination(variant, plan, override)
    return MethodSpec(name, "abf", variant, plan)


def method_curve(s, method, grid, level=0.95, m="auto", m_dagger="auto",
                 lrt_critical=None, override=False, F_step=None, adjust_on="support"):
    """Confidence curve of one method over ``grid``.

    ABF limits are adjusted over the union of ``grid`` and the distinct
    assessment times when ``adjust_on="support"`` and over ``grid`` alone when
    ``adjust_on="grid"``; they are then read off at ``grid``.
    """
    spec = method if isinstance(method, MethodSpec) else parse_method(method, override)
    grid = np.asarray(grid, dtype=np.float64)
    if F_step is None:
        F_step = npmle_fit(s)
    if spec.kind == "valid":
        cur = valid_curve(s, grid, ValidCiConfig(m=m, level=level))
        cur.estimate = np.asarray(F_step(grid), dtype=np.float64).reshape(grid.shape)
        return cur
    if spec.kind == "lrt":
        if lrt_critical is None:
            raise ValueError("method lrt needs an explicit critical value")
        return lrt_curve(s, grid, LrtConfig(float(lrt_critical), level=level), F_step)
    cfg = AbfConfig(m_dagger=m_dagger, level=level, variant=spec.variant)
    if adjust_on == "support":
        full = np.union1d(s.support(), grid)
    elif adjust_on == "grid":
        full = grid
    else:
        raise ValueError("adjust_on must be 'support' or 'grid'")
    cur = apply_plan(abf_curve(s, full, cfg, F_step), spec.plan)
    cur.method = spec.name
    if full.size == grid.size:
        return cur
    idx = np.searchsorted(full, grid)
    meta = dict(cur.meta)
    meta["m_dagger"] = meta["m_dagger"][idx]
    return type(cur)(grid, cur.lower[idx], cur.upper[idx], spec.name, level,
                     cur.estimate[idx], meta)
