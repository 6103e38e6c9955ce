"""Feasibility of delivering the whole payload by backscatter alone.

The payload fits in the downlink slot iff reflect powers exist with

    sum_k p_r[k] |h_k|^4  =  gamma * (si*P0 + sigma^2),        (payload, equality)
    P0 |h_0|^2 - g0t * (sum_k p_r[k] |g_k|^2 |h_k|^2 + sigma^2) >= 0,   (QoS)
    0 <= p_r[k] <= P0 <= P0_max,

where gamma = 2^(L / (t0 B)) - 1 and g0t = 2^(gamma_0 / B) - 1.  For fixed
P0 the best achievable payload-side sum is a fractional knapsack; its value
is concave in P0, so a golden-section search over P0 decides feasibility,
and the knapsack witness is scaled down to hit the payload equality exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import ChannelRealization, ScenarioConfig
from .rates import PowerAllocation
from .search import golden_section_max

__all__ = [
    "FeasibilityThresholds",
    "compute_thresholds",
    "density_order",
    "greedy_take",
    "greedy_reflect_sum",
    "max_reflect_sum",
    "solve_pure_feasibility",
    "qos_attainable",
    "min_qos_downlink_power",
]

GOLDEN_ITERATIONS = 80


@dataclass(frozen=True)
class FeasibilityThresholds:
    gamma: float         # linear SNR the pooled reflect signal must reach
    gamma0_tilde: float  # linear SINR floor of the downlink user

    def __post_init__(self) -> None:
        assert self.gamma >= 0.0 and self.gamma0_tilde >= 0.0


def compute_thresholds(config: ScenarioConfig) -> FeasibilityThresholds:
    """Linear thresholds from the payload and the QoS rate floor."""
    gamma = math.expm1(
        config.total_bits / (config.t0_seconds * config.bandwidth_hz) * math.log(2.0)
    )
    gamma0_tilde = math.expm1(config.qos_rate_bps / config.bandwidth_hz * math.log(2.0))
    return FeasibilityThresholds(gamma=gamma, gamma0_tilde=gamma0_tilde)


def min_qos_downlink_power(chan: ChannelRealization, gamma0_tilde: float) -> float:
    """Smallest P0 whose QoS budget is non-negative with zero reflections."""
    if gamma0_tilde <= 0.0:
        return 0.0
    if chan.h0_gain_sq <= 0.0:
        return math.inf
    return gamma0_tilde * chan.noise_power_watts / chan.h0_gain_sq


def qos_attainable(chan: ChannelRealization, config: ScenarioConfig) -> bool:
    """True when some P0 <= P0_max can serve the downlink user at the QoS floor."""
    g0t = compute_thresholds(config).gamma0_tilde
    return min_qos_downlink_power(chan, g0t) <= config.p0_max_watts


def density_order(v: list, w: list) -> list:
    """Greedy fill order: descending value/weight ratio, ties to the lower index."""
    return sorted(
        range(len(v)), key=lambda i: (-(v[i] / w[i] if w[i] > 0.0 else math.inf), i)
    )


def greedy_take(v: list, w: list, order: list, budget: float, cap: float) -> tuple[float, list]:
    """Knapsack fill along a precomputed order; see greedy_reflect_sum."""
    x = [0.0] * len(v)
    if cap <= 0.0 or budget <= 0.0:
        return 0.0, x
    s = 0.0
    remaining = budget
    for i in order:
        if v[i] <= 0.0:
            continue
        if w[i] <= 0.0:
            take = cap
        else:
            if remaining <= 0.0:
                continue
            take = min(cap, remaining / w[i])
            remaining -= take * w[i]
        x[i] = take
        s += take * v[i]
    return s, x


def greedy_reflect_sum(values, weights, budget: float, cap: float) -> tuple[float, np.ndarray]:
    """Exact fractional knapsack: max sum(v*x) s.t. sum(w*x) <= budget, 0 <= x <= cap.

    Greedy on the value/weight ratio; ties break toward the lower index so
    the witness is deterministic.  Zero-weight items cost no budget and are
    taken in full; a non-positive budget returns zero with a zero witness.
    """
    v = [float(x) for x in values]
    w = [float(x) for x in weights]
    s, x = greedy_take(v, w, density_order(v, w), budget, cap)
    return s, np.array(x)


def max_reflect_sum(
    chan: ChannelRealization, p0_watts: float, gamma0_tilde: float
) -> tuple[float, np.ndarray]:
    """Maximize S = sum_k p_r[k] |h_k|^4 under the QoS budget and p_r <= P0.

    The budget is P0 |h_0|^2 - g0t * sigma^2 against per-device costs
    g0t |g_k|^2 |h_k|^2; the ratio ordering reduces to
    |h_k|^2 / (g0t |g_k|^2).
    """
    return greedy_reflect_sum(
        values=chan.h_gain_sq**2,
        weights=gamma0_tilde * chan.g_gain_sq * chan.h_gain_sq,
        budget=p0_watts * chan.h0_gain_sq - gamma0_tilde * chan.noise_power_watts,
        cap=p0_watts,
    )


def solve_pure_feasibility(
    chan: ChannelRealization, config: ScenarioConfig
) -> Optional[PowerAllocation]:
    """Witness allocation finishing the payload within the downlink slot, or None.

    Feasible iff max_P0 [S_max(P0) - gamma*(si*P0 + sigma^2)] >= 0 over the
    QoS-admissible range of P0.  The concave scan uses golden-section
    search; on success the knapsack witness is scaled by one scalar so the
    payload condition holds with equality, and active powers are zero.
    """
    th = compute_thresholds(config)
    sigma2 = chan.noise_power_watts
    zeros = np.zeros(chan.num_bds)

    p0_min = min_qos_downlink_power(chan, th.gamma0_tilde)
    if p0_min > config.p0_max_watts:
        return None  # the QoS floor is out of reach even without reflections
    if th.gamma <= 0.0:
        # empty payload: the minimal QoS-feasible downlink power suffices
        return PowerAllocation(p0_min, zeros, zeros)

    v = [float(x) for x in chan.h_gain_sq**2]
    w = [float(x) for x in th.gamma0_tilde * chan.g_gain_sq * chan.h_gain_sq]
    order = density_order(v, w)
    h0 = chan.h0_gain_sq
    g0t_sigma2 = th.gamma0_tilde * sigma2

    def headroom(p0: float) -> float:
        s, _ = greedy_take(v, w, order, p0 * h0 - g0t_sigma2, p0)
        return s - th.gamma * (chan.si_per_watt * p0 + sigma2)

    p0_star, best = golden_section_max(
        headroom, p0_min, config.p0_max_watts, GOLDEN_ITERATIONS
    )
    if best < 0.0:
        return None

    s, p_reflect = max_reflect_sum(chan, p0_star, th.gamma0_tilde)
    target = th.gamma * (chan.si_per_watt * p0_star + sigma2)
    p_reflect = p_reflect * (target / s)
    return PowerAllocation(p0_star, p_reflect, zeros)
