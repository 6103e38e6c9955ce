"""Energy-consistent sizing of the active uplink phase.

The active powers and the phase length are coupled: each device may spend
at most its energy budget, so p_a[k] = min(Pa_max, E_max / t_a) while
t_a = residual / R_a(p_a).  The map t -> residual / R_a(p(t)) is
non-decreasing, which makes the fixed point solvable by bracketing and
bisection.
"""

from __future__ import annotations

import math

import numpy as np

from .model import ChannelRealization, ScenarioConfig
from .rates import sum_active_rate

__all__ = ["settle_active_phase"]

_BISECT_REL_TOL = 1e-10
_BISECT_MAX_ITER = 200


def settle_active_phase(
    chan: ChannelRealization, config: ScenarioConfig, residual_bits: float
) -> tuple[float, np.ndarray]:
    """Solve t = residual / R_a(p(t)) with p_k(t) = min(Pa_max, E_max / t).

    Returns ``(t_a, p_active)``.  A non-positive residual needs no active
    phase; when no finite fixed point exists (zero rate, or the energy-
    starved rate decays as fast as 1/t) the infinite-delay sentinel is
    returned with zero powers.
    """
    k = chan.num_bds
    zeros = np.zeros(k)
    if residual_bits <= 0.0:
        return 0.0, zeros

    pa_max = config.pa_max_watts
    e_max = config.energy_budget_joules
    full = np.full(k, pa_max)
    ra_full = sum_active_rate(chan, full)
    if ra_full <= 0.0 or e_max <= 0.0:
        return math.inf, zeros

    t_lo = residual_bits / ra_full
    if t_lo * pa_max <= e_max:
        return t_lo, full  # the budget never binds at the unconstrained optimum

    # the bisection uses a scalar evaluation of the pooled rate (the power
    # level is common to all devices); the reported pair goes back through
    # the canonical rate function so downstream reports match exactly
    h_over_sigma2 = float(np.sum(chan.h_gain_sq)) / chan.noise_power_watts
    b_over_ln2 = chan.bandwidth_hz / math.log(2.0)

    def rhs(t: float) -> float:
        level = min(pa_max, e_max / t)
        return residual_bits / (b_over_ln2 * math.log1p(level * h_over_sigma2))

    # rhs(t_lo) >= t_lo here; double until the identity line is crossed
    t_hi = t_lo
    for _ in range(_BISECT_MAX_ITER):
        t_hi *= 2.0
        if rhs(t_hi) <= t_hi:
            break
    else:
        return math.inf, zeros

    lo, hi = t_lo, t_hi
    for _ in range(_BISECT_MAX_ITER):
        if hi - lo <= _BISECT_REL_TOL * hi:
            break
        mid = 0.5 * (lo + hi)
        if rhs(mid) > mid:
            lo = mid
        else:
            hi = mid

    # report from the feasible side: p(hi) keeps t * p <= E exactly
    p_final = np.full(k, min(pa_max, e_max / hi))
    return residual_bits / sum_active_rate(chan, p_final), p_final
