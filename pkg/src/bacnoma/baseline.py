"""Pure active-uplink benchmark: no backscatter during the downlink slot.

With all reflection coefficients at zero the whole payload moves in the
active phase, whose length and powers are coupled through the per-device
energy budget; :func:`bacnoma.energy.settle_active_phase` solves that fixed
point.  The downlink QoS constraint is vacuous here (zero reflections only
help the downlink user), so the benchmark ignores it.
"""

from __future__ import annotations

import numpy as np

from .energy import settle_active_phase
from .hybrid import SCHEME_BASELINE, DelaySolution
from .model import ChannelRealization, ScenarioConfig
from .rates import PowerAllocation, make_rate_report, remaining_delay, sum_active_rate

__all__ = ["pure_noma_delay"]


def pure_noma_delay(chan: ChannelRealization, config: ScenarioConfig) -> DelaySolution:
    """Benchmark delay t0 + L / R_a(p_a) at the energy-consistent power level."""
    _, p_active = settle_active_phase(chan, config, config.total_bits)
    alloc = PowerAllocation(0.0, np.zeros(chan.num_bds), p_active)
    t_a = remaining_delay(
        config.total_bits, config.t0_seconds, 0.0, sum_active_rate(chan, p_active)
    )
    return DelaySolution(
        scheme=SCHEME_BASELINE,
        total_delay_s=config.t0_seconds + t_a,
        t_a_s=t_a,
        allocation=alloc,
        rates=make_rate_report(chan, alloc),
        converged=not np.isinf(t_a),
        iterations=0,
        trace=(),
    )
