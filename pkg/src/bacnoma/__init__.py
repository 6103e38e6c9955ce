"""Delay-minimizing resource allocation for hybrid backscatter-NOMA offloading.

Devices reflect the downlink signal to offload during the downlink slot,
then finish over an active NOMA uplink; this package models the rates,
decides pure-backscatter feasibility, optimizes the hybrid allocation,
benchmarks against a pure uplink, and runs seeded Monte Carlo experiments.
"""

from .baseline import pure_noma_delay
from .energy import settle_active_phase
from .errors import (
    BacnomaError,
    ConfigError,
    InternalConsistencyError,
    InvalidParameterError,
)
from .experiments import (
    SweepResult,
    convergence_trace,
    mix_seed,
    render_sweep_csv,
    render_trace_csv,
    run_monte_carlo,
    splitmix64,
    sweep_data_length,
)
from .hybrid import (
    DelaySolution,
    DinkelbachState,
    audit_solution,
    build_instance_document,
    dinkelbach_objective,
    instance_for_iteration,
    minimize_delay,
    optimal_active_powers,
    optimal_y,
    solve_p3_instance,
    solve_reflect_subproblem,
    update_mu,
)
from .model import (
    ChannelRealization,
    ScenarioConfig,
    dbm_per_hz_to_watts,
    load_config,
    parse_config_text,
    sample_channels,
)
from .purebac import (
    FeasibilityThresholds,
    compute_thresholds,
    greedy_reflect_sum,
    max_reflect_sum,
    min_qos_downlink_power,
    qos_attainable,
    solve_pure_feasibility,
)
from .rates import (
    PowerAllocation,
    RateReport,
    active_rates,
    backscatter_rates,
    downlink_rate,
    make_rate_report,
    remaining_delay,
    sum_active_rate,
    sum_backscatter_rate,
)

__version__ = "0.1.0"
