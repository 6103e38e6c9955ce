"""Pydantic request/response models for the HTTP service.

``ScenarioConfigModel`` mirrors the config-file keys one-to-one, so a JSON
body and a ``key = value`` file describe scenarios identically.  Non-finite
floats (infinite-delay sentinels, ratio values on degenerate runs) are
serialized as ``null`` with the ``sentinel`` flag set where relevant.
"""

from __future__ import annotations

import math
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from ..hybrid import DelaySolution, audit_solution
from ..model import ChannelRealization, ScenarioConfig

_DEFAULTS = ScenarioConfig()


def _nullable(x: float) -> Optional[float]:
    return float(x) if math.isfinite(x) else None


class ScenarioConfigModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    bandwidth_hz: float = _DEFAULTS.bandwidth_hz
    noise_density_dbm_per_hz: float = _DEFAULTS.noise_density_dbm_per_hz
    num_bds: int = _DEFAULTS.num_bds
    data_bits_per_bd: Union[float, List[float]] = 1e6
    t0_seconds: float = _DEFAULTS.t0_seconds
    p0_max_watts: float = _DEFAULTS.p0_max_watts
    pa_max_watts: float = _DEFAULTS.pa_max_watts
    energy_budget_joules: float = _DEFAULTS.energy_budget_joules
    qos_rate_bps: float = _DEFAULTS.qos_rate_bps
    si_residual_alpha: float = _DEFAULTS.si_residual_alpha
    si_channel_gain: float = _DEFAULTS.si_channel_gain
    path_loss_exponent: float = _DEFAULTS.path_loss_exponent
    cell_radius_m: float = _DEFAULTS.cell_radius_m
    min_distance_m: float = _DEFAULTS.min_distance_m
    epsilon_tolerance: float = _DEFAULTS.epsilon_tolerance
    max_iterations: int = _DEFAULTS.max_iterations

    def to_domain(self) -> ScenarioConfig:
        data = self.model_dump()
        if isinstance(data["data_bits_per_bd"], list):
            data["data_bits_per_bd"] = tuple(data["data_bits_per_bd"])
        return ScenarioConfig(**data)


class SingleRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: ScenarioConfigModel = Field(default_factory=ScenarioConfigModel)
    seed: int = Field(default=0, ge=0)


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: ScenarioConfigModel = Field(default_factory=ScenarioConfigModel)
    from_bits: float = Field(gt=0.0)
    to_bits: float = Field(gt=0.0)
    steps: int = Field(ge=1)
    realizations: int = Field(ge=1)
    master_seed: int = Field(default=0, ge=0)


class ConvergenceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: ScenarioConfigModel = Field(default_factory=ScenarioConfigModel)
    seed: int = Field(default=0, ge=0)
    alpha: Optional[float] = Field(default=None, ge=0.0, le=1.0)


class DumpInstanceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: ScenarioConfigModel = Field(default_factory=ScenarioConfigModel)
    seed: int = Field(default=0, ge=0)
    iteration: int = Field(default=0, ge=0)


class InstanceModel(BaseModel):
    """Subproblem instance exchanged with external checkers (exact field set)."""

    model_config = ConfigDict(extra="forbid")
    y: float
    mu: float
    sigma2: float
    alpha: float
    h_si_sq: float
    p0_max: float
    pa_max: float
    e_max: float
    gamma0_tilde: float
    h4: List[float]
    h2: List[float]
    w_qos: List[float]
    h0_sq: float
    L_tilde: float
    t0: float
    B: float


class SolveInstanceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    instance: InstanceModel


class InstanceResultModel(BaseModel):
    objective_bits: Optional[float]
    p0: float
    p_r: List[float]
    p_a: List[float]
    status: str


class AllocationModel(BaseModel):
    p0_watts: float
    p_reflect_watts: List[float]
    p_active_watts: List[float]
    eta: List[float]


class RatesModel(BaseModel):
    r_b_bps: List[float]
    r_a_bps: List[float]
    r0_bps: float
    sum_rb_bps: float
    sum_ra_bps: float


class TraceRowModel(BaseModel):
    iteration: int
    mu_s: Optional[float]
    y: float
    f_value_bits: Optional[float]
    best_delay_s: Optional[float]


class ChannelModel(BaseModel):
    h_gain_sq: List[float]
    g_gain_sq: List[float]
    h0_gain_sq: float
    bd_distances_m: List[float]
    u0_distance_m: float
    noise_power_watts: float
    permutation: List[int]


class SolutionModel(BaseModel):
    scheme: str
    total_delay_s: Optional[float]
    t_a_s: Optional[float]
    t0_seconds: float
    sentinel: bool
    converged: bool
    iterations: int
    qos_attainable: bool
    allocation: AllocationModel
    rates: RatesModel
    constraint_slacks: dict
    trace: List[TraceRowModel]
    channel: ChannelModel


def solution_to_model(
    chan: ChannelRealization, config: ScenarioConfig, solution: DelaySolution
) -> SolutionModel:
    alloc = solution.allocation
    slacks = {
        key: (_nullable(value) if isinstance(value, float) else value)
        for key, value in audit_solution(chan, config, solution).items()
    }
    return SolutionModel(
        scheme=solution.scheme,
        total_delay_s=_nullable(solution.total_delay_s),
        t_a_s=_nullable(solution.t_a_s),
        t0_seconds=config.t0_seconds,
        sentinel=solution.sentinel,
        converged=solution.converged,
        iterations=solution.iterations,
        qos_attainable=solution.qos_attainable,
        allocation=AllocationModel(
            p0_watts=alloc.p0_watts,
            p_reflect_watts=alloc.p_reflect_watts.tolist(),
            p_active_watts=alloc.p_active_watts.tolist(),
            eta=alloc.eta.tolist(),
        ),
        rates=RatesModel(
            r_b_bps=solution.rates.r_b_bps.tolist(),
            r_a_bps=solution.rates.r_a_bps.tolist(),
            r0_bps=solution.rates.r0_bps,
            sum_rb_bps=solution.rates.sum_rb_bps,
            sum_ra_bps=solution.rates.sum_ra_bps,
        ),
        constraint_slacks=slacks,
        trace=[
            TraceRowModel(
                iteration=s.iteration,
                mu_s=_nullable(s.mu),
                y=s.y,
                f_value_bits=_nullable(s.f_value),
                best_delay_s=_nullable(s.best_delay_s),
            )
            for s in solution.trace
        ],
        channel=ChannelModel(
            h_gain_sq=chan.h_gain_sq.tolist(),
            g_gain_sq=chan.g_gain_sq.tolist(),
            h0_gain_sq=chan.h0_gain_sq,
            bd_distances_m=chan.bd_distances_m.tolist(),
            u0_distance_m=chan.u0_distance_m,
            noise_power_watts=chan.noise_power_watts,
            permutation=chan.permutation.tolist(),
        ),
    )
