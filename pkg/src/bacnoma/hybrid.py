"""Delay-minimizing resource allocation for the hybrid offloading protocol.

If the payload fits in the downlink slot, the pure-backscatter witness is
returned with a zero active phase.  Otherwise the total delay t0 + t_a is
minimized by an iterative scheme on the ratio t_a = (L - t0*R_b) / R_a:

* an auxiliary ratio value mu turns the objective into the parametric form
  F(mu) = L - t0*R_b - mu*R_a (bits), driven to zero as mu approaches the
  optimal ratio;
* the reflect-power term is handled through a quadratic-transform surrogate
  with auxiliary y: for fixed y the inner problem over (P0, p_r) is a
  fractional knapsack inside a concave one-dimensional search over P0;
* for fixed mu the active powers sit at the per-device box corner
  min(Pa_max, E_max / mu).

Every kept iterate is re-settled against the energy coupling (the budget
uses the actual phase length, not mu) before it can become the incumbent,
so returned solutions always satisfy the original constraint set.

The per-device reflection split that would equalize individual finish
times is not derived here; the solver reports the aggregate reflect powers
and the pooled-delay formula (see README, Limitations).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .energy import settle_active_phase
from .errors import InvalidParameterError
from .model import ChannelRealization, ScenarioConfig
from .purebac import (
    compute_thresholds,
    density_order,
    greedy_take,
    max_reflect_sum,
    min_qos_downlink_power,
    solve_pure_feasibility,
)
from .rates import (
    PowerAllocation,
    RateReport,
    make_rate_report,
    remaining_delay,
    sum_active_rate,
    sum_backscatter_rate,
)
from .search import golden_section_max

__all__ = [
    "DinkelbachState",
    "DelaySolution",
    "optimal_y",
    "optimal_active_powers",
    "solve_reflect_subproblem",
    "dinkelbach_objective",
    "update_mu",
    "minimize_delay",
    "audit_solution",
    "build_instance_document",
    "instance_for_iteration",
    "solve_p3_instance",
]

GOLDEN_ITERATIONS = 80
_POLISH_MAX_ROUNDS = 200
_POLISH_REL_TOL = 1e-13

SCHEME_PURE = "pure-bac"
SCHEME_HYBRID = "hybrid"
SCHEME_BASELINE = "baseline"


@dataclass(frozen=True)
class DinkelbachState:
    """One outer-iteration record of the ratio scheme."""

    iteration: int
    mu: float          # ratio value after this iteration's update (s)
    y: float           # quadratic-transform auxiliary used this iteration
    f_value: float     # parametric objective before the ratio update (bits)
    best_delay_s: float  # incumbent total delay after this iteration
    mu_in: float       # ratio value fed into this iteration's subproblems (s)


@dataclass(frozen=True)
class DelaySolution:
    """Outcome of one solver run (any scheme)."""

    scheme: str
    total_delay_s: float
    t_a_s: float
    allocation: PowerAllocation
    rates: RateReport
    converged: bool
    iterations: int
    trace: tuple
    qos_attainable: bool = True

    @property
    def sentinel(self) -> bool:
        """True when no finite-delay solution exists (infinite-delay report)."""
        return math.isinf(self.total_delay_s)


def optimal_y(chan: ChannelRealization, p0_watts: float, p_reflect_watts) -> float:
    """Surrogate-optimal auxiliary: sqrt(S) over the interference floor."""
    s = float(np.dot(np.asarray(p_reflect_watts, dtype=float), chan.h_gain_sq**2))
    return math.sqrt(s) / (chan.si_per_watt * p0_watts + chan.noise_power_watts)


def optimal_active_powers(mu: float, config: ScenarioConfig) -> np.ndarray:
    """Box-corner active powers min(Pa_max, E_max / mu) for every device.

    Optimal because the parametric objective strictly decreases in every
    p_a[k] coefficient and the constraints are per-device boxes.
    """
    if not mu > 0.0:
        raise InvalidParameterError("mu must be positive")
    cap = config.pa_max_watts if math.isinf(mu) else min(
        config.pa_max_watts, config.energy_budget_joules / mu
    )
    return np.full(config.num_bds, cap)


def _solve_reflect_raw(
    values: np.ndarray,
    qos_weights: np.ndarray,
    h0_sq: float,
    sigma2: float,
    si_per_watt: float,
    p0_max: float,
    gamma0_tilde: float,
    y: float,
) -> tuple[float, np.ndarray]:
    """Reflect subproblem on raw arrays; see solve_reflect_subproblem."""
    k = len(values)
    zeros = np.zeros(k)
    if gamma0_tilde <= 0.0:
        p0_min = 0.0
    elif h0_sq <= 0.0:
        return 0.0, zeros  # no downlink power can meet the QoS floor
    else:
        p0_min = gamma0_tilde * sigma2 / h0_sq
    if p0_min > p0_max:
        return 0.0, zeros

    v = [float(x) for x in values]
    w = [gamma0_tilde * float(x) for x in qos_weights]
    order = density_order(v, w)
    g0t_sigma2 = gamma0_tilde * sigma2

    def smax(p0: float) -> tuple[float, list]:
        return greedy_take(v, w, order, p0 * h0_sq - g0t_sigma2, p0)

    if y <= 0.0:
        # the surrogate is flat; hand back the max-S point at the power cap
        return p0_max, np.array(smax(p0_max)[1])

    def surrogate(p0: float) -> float:
        s, _ = smax(p0)
        arg = 2.0 * y * math.sqrt(s) - y * y * (si_per_watt * p0 + sigma2)
        return arg if arg > -1.0 else -math.inf  # log argument must stay positive

    p0_star, best = golden_section_max(surrogate, p0_min, p0_max, GOLDEN_ITERATIONS)
    if math.isinf(best) and best < 0.0:
        return p0_min, zeros
    return p0_star, np.array(smax(p0_star)[1])


def solve_reflect_subproblem(
    chan: ChannelRealization, y: float, config: ScenarioConfig
) -> tuple[float, np.ndarray]:
    """Maximize 2y*sqrt(S) - y^2*(si*P0 + sigma^2) under QoS and power boxes.

    For fixed P0 the best S is the fractional knapsack of
    :func:`bacnoma.purebac.max_reflect_sum`; the resulting one-dimensional
    objective is concave in P0 and scanned by golden-section search over the
    QoS-admissible range.  Candidates whose surrogate log argument would be
    non-positive are rejected.  When no P0 has a positive QoS budget a zero
    allocation is returned.
    """
    if y < 0.0:
        raise InvalidParameterError("y must be non-negative")
    th = compute_thresholds(config)
    return _solve_reflect_raw(
        values=chan.h_gain_sq**2,
        qos_weights=chan.g_gain_sq * chan.h_gain_sq,
        h0_sq=chan.h0_gain_sq,
        sigma2=chan.noise_power_watts,
        si_per_watt=chan.si_per_watt,
        p0_max=config.p0_max_watts,
        gamma0_tilde=th.gamma0_tilde,
        y=y,
    )


def dinkelbach_objective(
    chan: ChannelRealization, config: ScenarioConfig, mu: float, alloc: PowerAllocation
) -> float:
    """Parametric objective F(mu) = L - t0*R_b - mu*R_a in bits (closed forms)."""
    rb = sum_backscatter_rate(chan, alloc.p0_watts, alloc.p_reflect_watts)
    ra = sum_active_rate(chan, alloc.p_active_watts)
    value = config.total_bits - config.t0_seconds * rb
    if ra > 0.0:
        value -= mu * ra
    return value


def update_mu(chan: ChannelRealization, config: ScenarioConfig, alloc: PowerAllocation) -> float:
    """Current ratio (L - t0*R_b) / R_a, unclamped; +inf when R_a is zero."""
    rb = sum_backscatter_rate(chan, alloc.p0_watts, alloc.p_reflect_watts)
    ra = sum_active_rate(chan, alloc.p_active_watts)
    residual = config.total_bits - config.t0_seconds * rb
    if ra <= 0.0:
        return math.inf if residual > 0.0 else 0.0
    return residual / ra


@dataclass(frozen=True)
class _Candidate:
    p0: float
    p_reflect: np.ndarray
    rb: float
    t_a: float
    p_active: np.ndarray
    delay: float


def _finalize_reflect(
    chan: ChannelRealization, config: ScenarioConfig, p0: float, p_reflect: np.ndarray
) -> _Candidate:
    """Settle the energy-consistent active phase for fixed reflect powers."""
    rb = sum_backscatter_rate(chan, p0, p_reflect)
    residual = config.total_bits - config.t0_seconds * rb
    _, p_active = settle_active_phase(chan, config, residual)
    t_a = remaining_delay(
        config.total_bits, config.t0_seconds, rb, sum_active_rate(chan, p_active)
    )
    return _Candidate(p0, p_reflect, rb, t_a, p_active, config.t0_seconds + t_a)


def _initial_reflect(
    chan: ChannelRealization, config: ScenarioConfig, gamma0_tilde: float
) -> tuple[float, np.ndarray]:
    """Feasible start: power cap with the max-S knapsack witness."""
    if min_qos_downlink_power(chan, gamma0_tilde) > config.p0_max_watts:
        return 0.0, np.zeros(chan.num_bds)
    _, p_reflect = max_reflect_sum(chan, config.p0_max_watts, gamma0_tilde)
    return config.p0_max_watts, p_reflect


def minimize_delay(chan: ChannelRealization, config: ScenarioConfig) -> DelaySolution:
    """Full solver: pure-backscatter branch, else the iterative hybrid scheme.

    The hybrid loop seeds mu from the initial reflect allocation evaluated
    at full active power (a +inf start would zero the active powers), then
    alternates: update y from the previous reflect powers, solve the
    reflect subproblem, set the box-corner active powers for the current
    mu, evaluate F, update mu.  It stops once F <= epsilon or after
    max_iterations, keeping the best energy-settled iterate throughout;
    the kept reflect allocation is polished to a stationary point of the
    true pooled backscatter rate before the final report.
    """
    t0 = config.t0_seconds
    k = chan.num_bds

    pure = solve_pure_feasibility(chan, config)
    if pure is not None:
        return DelaySolution(
            scheme=SCHEME_PURE,
            total_delay_s=t0,
            t_a_s=0.0,
            allocation=pure,
            rates=make_rate_report(chan, pure),
            converged=True,
            iterations=0,
            trace=(),
        )

    th = compute_thresholds(config)
    qos_ok = min_qos_downlink_power(chan, th.gamma0_tilde) <= config.p0_max_watts
    p0_cur, pr_cur = _initial_reflect(chan, config, th.gamma0_tilde)
    mu = update_mu(
        chan, config, PowerAllocation(p0_cur, pr_cur, np.full(k, config.pa_max_watts))
    )
    if math.isinf(mu):
        # no device can ever transmit actively: the residual never drains
        alloc = PowerAllocation(p0_cur, pr_cur, np.zeros(k))
        return DelaySolution(
            scheme=SCHEME_HYBRID,
            total_delay_s=math.inf,
            t_a_s=math.inf,
            allocation=alloc,
            rates=make_rate_report(chan, alloc),
            converged=False,
            iterations=0,
            trace=(),
            qos_attainable=qos_ok,
        )

    best = _finalize_reflect(chan, config, p0_cur, pr_cur)
    trace: list[DinkelbachState] = []
    converged = False
    iterations = 0
    memo_y: Optional[float] = None
    memo_reflect: Optional[tuple[float, np.ndarray]] = None

    for it in range(1, config.max_iterations + 1):
        iterations = it
        y = optimal_y(chan, p0_cur, pr_cur)
        if memo_y is not None and y == memo_y:
            p0_cur, pr_cur = memo_reflect
        else:
            p0_cur, pr_cur = solve_reflect_subproblem(chan, y, config)
            memo_y, memo_reflect = y, (p0_cur, pr_cur)
        p_active = optimal_active_powers(mu, config)
        rb = sum_backscatter_rate(chan, p0_cur, pr_cur)
        ra = sum_active_rate(chan, p_active)
        residual = config.total_bits - t0 * rb
        f_value = residual - mu * ra if ra > 0.0 else residual
        if ra > 0.0:
            mu_next = residual / ra
        else:
            mu_next = math.inf if residual > 0.0 else 0.0

        if rb > best.rb:
            cand = _finalize_reflect(chan, config, p0_cur, pr_cur)
            if cand.delay < best.delay:
                best = cand
        trace.append(
            DinkelbachState(
                iteration=it, mu=mu_next, y=y, f_value=f_value,
                best_delay_s=best.delay, mu_in=mu,
            )
        )
        if f_value <= config.epsilon_tolerance:
            converged = True
            break
        if mu_next <= 0.0:
            # the residual payload is non-positive at this iterate: the
            # downlink slot already covers everything, nothing left to tune
            converged = True
            break
        mu = mu_next

    p0_b, pr_b, rb_b = best.p0, best.p_reflect, best.rb
    for _ in range(_POLISH_MAX_ROUNDS):
        y_p = optimal_y(chan, p0_b, pr_b)
        p0_n, pr_n = solve_reflect_subproblem(chan, y_p, config)
        rb_n = sum_backscatter_rate(chan, p0_n, pr_n)
        settled = rb_n <= rb_b * (1.0 + _POLISH_REL_TOL)
        if rb_n > rb_b:
            p0_b, pr_b, rb_b = p0_n, pr_n, rb_n
        if settled:
            break
    if rb_b > best.rb:
        cand = _finalize_reflect(chan, config, p0_b, pr_b)
        if cand.delay < best.delay:
            best = cand

    alloc = PowerAllocation(best.p0, best.p_reflect, best.p_active)
    rates = make_rate_report(chan, alloc)
    t_a = remaining_delay(config.total_bits, t0, rates.sum_rb_bps, rates.sum_ra_bps)
    return DelaySolution(
        scheme=SCHEME_HYBRID,
        total_delay_s=t0 + t_a,
        t_a_s=t_a,
        allocation=alloc,
        rates=rates,
        converged=converged,
        iterations=iterations,
        trace=tuple(trace),
        qos_attainable=qos_ok,
    )


def audit_solution(
    chan: ChannelRealization, config: ScenarioConfig, solution: DelaySolution
) -> dict:
    """Constraint slacks of a solution against the original problem.

    Positive slacks mean satisfied.  The QoS entry is meaningful only when
    ``qos_attainable`` is set (otherwise no allocation can reach the floor
    and the solver keeps the reflect powers at zero); the baseline scheme
    never reflects, so its downlink entry is vacuous by construction.
    """
    alloc = solution.allocation
    t_a = solution.t_a_s
    if math.isinf(t_a):
        energy_used = np.where(alloc.p_active_watts > 0.0, math.inf, 0.0)
    else:
        energy_used = t_a * alloc.p_active_watts
    return {
        "r0_bps": solution.rates.r0_bps,
        "qos_slack_bps": solution.rates.r0_bps - config.qos_rate_bps,
        "qos_attainable": solution.qos_attainable,
        "energy_slack_joules": float(
            np.min(config.energy_budget_joules - energy_used)
        ),
        "p0_headroom_watts": config.p0_max_watts - alloc.p0_watts,
        "pa_headroom_watts": float(
            np.min(config.pa_max_watts - alloc.p_active_watts)
        ),
        "eta_max": float(np.max(alloc.eta, initial=0.0)),
        "reflect_headroom_watts": float(
            np.min(alloc.p0_watts - alloc.p_reflect_watts, initial=alloc.p0_watts)
        ),
        "t_a_nonnegative": t_a >= 0.0,
    }


def build_instance_document(
    chan: ChannelRealization, config: ScenarioConfig, y: float, mu: float
) -> dict:
    """Self-contained JSON document of one reflect/active subproblem instance.

    Field names and units are the exchange contract with external checkers:
    everything is linear SI, ``w_qos`` holds the per-device products
    |g_k|^2 |h_k|^2 (the threshold multiplier is applied by the reader).
    """
    th = compute_thresholds(config)
    return {
        "y": float(y),
        "mu": float(mu),
        "sigma2": chan.noise_power_watts,
        "alpha": config.si_residual_alpha,
        "h_si_sq": config.si_channel_gain,
        "p0_max": config.p0_max_watts,
        "pa_max": config.pa_max_watts,
        "e_max": config.energy_budget_joules,
        "gamma0_tilde": th.gamma0_tilde,
        "h4": (chan.h_gain_sq**2).tolist(),
        "h2": chan.h_gain_sq.tolist(),
        "w_qos": (chan.g_gain_sq * chan.h_gain_sq).tolist(),
        "h0_sq": chan.h0_gain_sq,
        "L_tilde": config.total_bits,
        "t0": config.t0_seconds,
        "B": config.bandwidth_hz,
    }


def instance_for_iteration(
    chan: ChannelRealization,
    config: ScenarioConfig,
    solution: DelaySolution,
    iteration: int,
) -> dict:
    """Instance document for one outer iteration of a finished run.

    Iteration 0 is the pre-loop state (for pure-backscatter runs: the
    witness allocation with mu = 0, since no active phase exists); higher
    iterations replay the (y, mu) pair that iteration's subproblems used.
    """
    if iteration < 0:
        raise InvalidParameterError("iteration must be >= 0")
    if iteration == 0:
        if solution.scheme == SCHEME_PURE:
            alloc = solution.allocation
            y = optimal_y(chan, alloc.p0_watts, alloc.p_reflect_watts)
            return build_instance_document(chan, config, y, 0.0)
        th = compute_thresholds(config)
        p0, p_reflect = _initial_reflect(chan, config, th.gamma0_tilde)
        mu = update_mu(
            chan, config,
            PowerAllocation(p0, p_reflect, np.full(chan.num_bds, config.pa_max_watts)),
        )
        y = optimal_y(chan, p0, p_reflect)
        return build_instance_document(chan, config, y, mu)
    if iteration > len(solution.trace):
        raise InvalidParameterError(
            f"iteration {iteration} not available: the run recorded "
            f"{len(solution.trace)} outer iterations"
        )
    state = solution.trace[iteration - 1]
    return build_instance_document(chan, config, state.y, state.mu_in)


def solve_p3_instance(instance: dict) -> dict:
    """Solve one dumped subproblem instance with the specialized solvers.

    Returns the same result schema external checkers write:
    ``{objective_bits, p0, p_r, p_a, status}``.  Status is ``infeasible``
    when no downlink power can reach the QoS floor, ``degenerate_log`` when
    the surrogate argument is non-positive at the optimum (objective null
    in both cases), else ``ok``.
    """
    h4 = np.asarray(instance["h4"], dtype=float)
    h2 = np.asarray(instance["h2"], dtype=float)
    w_qos = np.asarray(instance["w_qos"], dtype=float)
    k = len(h4)
    sigma2 = float(instance["sigma2"])
    si_per_watt = float(instance["alpha"]) * float(instance["h_si_sq"])
    g0t = float(instance["gamma0_tilde"])
    h0_sq = float(instance["h0_sq"])
    p0_max = float(instance["p0_max"])
    y = float(instance["y"])
    mu = float(instance["mu"])

    failed = {"objective_bits": None, "p0": 0.0, "p_r": [0.0] * k, "p_a": [0.0] * k}
    if g0t > 0.0 and (h0_sq <= 0.0 or g0t * sigma2 / h0_sq > p0_max):
        return {**failed, "status": "infeasible"}

    p0, p_reflect = _solve_reflect_raw(
        values=h4, qos_weights=w_qos, h0_sq=h0_sq, sigma2=sigma2,
        si_per_watt=si_per_watt, p0_max=p0_max, gamma0_tilde=g0t, y=y,
    )
    arg = (
        1.0
        + 2.0 * y * math.sqrt(float(np.dot(p_reflect, h4)))
        - y * y * (si_per_watt * p0 + sigma2)
    )
    if arg <= 0.0:
        return {**failed, "status": "degenerate_log"}

    pa_cap = float(instance["pa_max"])
    if mu > 0.0:
        pa_cap = min(pa_cap, float(instance["e_max"]) / mu)
    p_active = np.full(k, pa_cap)
    bandwidth = float(instance["B"])
    ra = bandwidth * math.log2(1.0 + float(np.dot(p_active, h2)) / sigma2)
    objective = (
        float(instance["L_tilde"])
        - mu * ra
        - float(instance["t0"]) * bandwidth * math.log2(arg)
    )
    return {
        "objective_bits": objective,
        "p0": float(p0),
        "p_r": p_reflect.tolist(),
        "p_a": p_active.tolist(),
        "status": "ok",
    }
