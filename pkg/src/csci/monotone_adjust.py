"""Monotone post-processing of pointwise confidence limits.

Three adjustments are available. The edge adjustment flattens both tails of
each limit at their extreme values. The lower-upper adjustment raises L by a
running maximum from the left and lowers U by a running minimum from the
right. The middle-value adjustment averages the left and right sweeps.
"""

import logging
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EDGE",
    "LOWER_UPPER",
    "MIDDLE_VALUE",
    "AdjustmentPlan",
    "PRESETS",
    "edge_adjust",
    "lower_upper_adjust",
    "middle_value_adjust",
    "check_combination",
    "apply_plan",
]

log = logging.getLogger(__name__)

EDGE = "edge"
LOWER_UPPER = "lower_upper"
MIDDLE_VALUE = "middle_value"
_STEPS = (EDGE, LOWER_UPPER, MIDDLE_VALUE)
_ALIASES = {"lower-upper": LOWER_UPPER, "middle": MIDDLE_VALUE, "middle-value": MIDDLE_VALUE}


@dataclass(frozen=True)
class AdjustmentPlan:
    steps: tuple = (EDGE, LOWER_UPPER)

    def __post_init__(self):
        steps = tuple(_ALIASES.get(s, s) for s in self.steps)
        for s in steps:
            if s not in _STEPS:
                raise ValueError(f"unknown adjustment {s!r}; expected one of {', '.join(_STEPS)}")
        if LOWER_UPPER in steps and MIDDLE_VALUE in steps:
            raise ValueError("lower_upper and middle_value adjustments are mutually exclusive")
        if len(set(steps)) != len(steps):
            raise ValueError("an adjustment may appear only once in a plan")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def parse(cls, text):
        """``"edge,lower-upper"`` style spec; empty or "none" gives no steps."""
        text = text.strip()
        if text in ("", "none"):
            return cls(())
        return cls(tuple(p.strip() for p in text.split(",")))


# preset name -> (binomial variant, plan)
PRESETS = {
    "cp-lu": ("clopper_pearson", AdjustmentPlan((EDGE, LOWER_UPPER))),
    "midp-mv": ("mid_p", AdjustmentPlan((EDGE, MIDDLE_VALUE))),
}


def check_combination(variant, plan, override=False):
    """Reject mid-P limits combined with the lower-upper adjustment unless overridden."""
    if variant in ("mid_p", "midp") and LOWER_UPPER in plan.steps and not override:
        raise ValueError(
            "mid-P limits with the lower-upper adjustment are not recommended; pass override to force"
        )


# --------------------------------------------------------------------------
# array kernels


def _edge(x):
    k = x.size
    if k <= 1:
        return x.copy()
    mid = (k + 1) // 2 - 1
    out = x.copy()
    left = x[: mid + 1]
    # last minimiser on the left half, first maximiser on the right half
    i_min = mid - int(np.argmin(left[::-1]))
    i_max = mid + int(np.argmax(x[mid:]))
    out[:i_min] = x[i_min]
    out[i_max + 1 :] = x[i_max]
    return out


def _sweep_up(x):
    return np.maximum.accumulate(x)


def _sweep_down(x):
    return np.minimum.accumulate(x[::-1])[::-1]


def _checked(curve):
    if len(curve) == 0:
        raise ValueError("cannot adjust an empty curve")
    return curve.lower, curve.upper


def edge_adjust(curve):
    """Flatten L and U left of their left-half minimum and right of their right-half maximum."""
    lo, hi = _checked(curve)
    return curve.replace(lower=_edge(lo), upper=_edge(hi))


def lower_upper_adjust(curve):
    """Running max of L from the left, running min of U from the right."""
    lo, hi = _checked(curve)
    return curve.replace(lower=_sweep_up(lo), upper=_sweep_down(hi))


def middle_value_adjust(curve):
    """Average of the left-to-right and right-to-left monotone sweeps, for L and for U."""
    lo, hi = _checked(curve)
    return curve.replace(
        lower=0.5 * (_sweep_up(lo) + _sweep_down(lo)),
        upper=0.5 * (_sweep_up(hi) + _sweep_down(hi)),
    )


_APPLY = {EDGE: edge_adjust, LOWER_UPPER: lower_upper_adjust, MIDDLE_VALUE: middle_value_adjust}


def apply_plan(curve, plan):
    """Run the plan's steps in order, then clip L to U.

    Crossed limits can survive only where the raw curve was already crossed;
    they are clipped to ``L = min(L, U)`` and counted in ``meta["clipped"]``.
    """
    if isinstance(plan, str):
        plan = AdjustmentPlan.parse(plan)
    for step in plan.steps:
        curve = _APPLY[step](curve)
    crossed = curve.lower > curve.upper
    n_clip = int(crossed.sum())
    if n_clip:
        log.warning("clipped %d crossed limit(s) after adjustment", n_clip)
    return curve.replace(lower=np.minimum(curve.lower, curve.upper), clipped=n_clip,
                         adjust=",".join(plan.steps))
