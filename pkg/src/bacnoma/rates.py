"""Achievable-rate kernels and the remaining-delay formula.

Backscatter decode order follows the channel sort: the BS decodes stronger
devices first and treats weaker ones as interference, so device k sees the
reflect powers of devices j > k plus residual self-interference plus noise:

    r_b[k] = B log2(1 + p_r[k] |h_k|^4 / (sum_{j>k} p_r[j] |h_j|^4 + si*P0 + sigma^2))

The active uplink uses |h_k|^2 and no self-interference term.  The pooled
sum rates collapse to single-log closed forms (the per-device rates
telescope), which the invariant suite checks against the per-device sums:

    R_b = B log2(1 + sum_k p_r[k] |h_k|^4 / (si*P0 + sigma^2))
    R_a = B log2(1 + sum_k p_a[k] |h_k|^2 / sigma^2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InternalConsistencyError, InvalidParameterError
from .model import ChannelRealization, ScenarioConfig

__all__ = [
    "PowerAllocation",
    "RateReport",
    "backscatter_rates",
    "active_rates",
    "downlink_rate",
    "sum_backscatter_rate",
    "sum_active_rate",
    "make_rate_report",
    "remaining_delay",
]

_LN2 = math.log(2.0)
# SNR arguments below this indicate a solver bug, not roundoff
_SNR_GUARD = -1e-12
# treat the residual payload as zero below this relative level
_RESIDUAL_REL_TOL = 1e-12


def _log2_capacity(snr):
    """log2(1 + snr) via log1p; raises if snr is negative beyond roundoff."""
    if isinstance(snr, float):
        if snr < _SNR_GUARD:
            raise InternalConsistencyError(f"negative SNR argument: {snr}")
        return math.log1p(snr if snr > 0.0 else 0.0) / _LN2
    if np.any(np.asarray(snr) < _SNR_GUARD):
        raise InternalConsistencyError(f"negative SNR argument: {snr}")
    return np.log1p(np.maximum(snr, 0.0)) / _LN2


@dataclass(frozen=True)
class PowerAllocation:
    """Decision variables: downlink power, per-device reflect and active powers.

    Reflect powers are ``p_r[k] = eta_k * P0`` in sorted device order, so the
    reflection coefficients are recoverable as ``eta``.
    """

    p0_watts: float
    p_reflect_watts: np.ndarray
    p_active_watts: np.ndarray

    def __post_init__(self) -> None:
        pr = np.asarray(self.p_reflect_watts, dtype=float)
        pa = np.asarray(self.p_active_watts, dtype=float)
        if pr.shape != pa.shape:
            raise InvalidParameterError("reflect and active power vectors differ in length")
        if not (math.isfinite(self.p0_watts) and np.all(np.isfinite(pr)) and np.all(np.isfinite(pa))):
            raise InvalidParameterError("powers must be finite")
        if self.p0_watts < 0.0 or np.any(pr < 0.0) or np.any(pa < 0.0):
            raise InvalidParameterError("powers must be non-negative")
        if np.any(pr > self.p0_watts * (1.0 + 1e-9) + 1e-300):
            raise InvalidParameterError("reflect power exceeds downlink power (eta > 1)")
        pr.setflags(write=False)
        pa.setflags(write=False)
        object.__setattr__(self, "p_reflect_watts", pr)
        object.__setattr__(self, "p_active_watts", pa)

    @property
    def eta(self) -> np.ndarray:
        """Reflection coefficients p_r / P0 (zeros when the downlink is off)."""
        if self.p0_watts <= 0.0:
            return np.zeros_like(self.p_reflect_watts)
        return self.p_reflect_watts / self.p0_watts

    def validate_bounds(self, config: ScenarioConfig) -> None:
        """Check the box constraints against a scenario config."""
        tol = 1e-9
        if self.p0_watts > config.p0_max_watts * (1.0 + tol):
            raise InvalidParameterError("p0 exceeds p0_max_watts")
        if np.any(self.p_active_watts > config.pa_max_watts * (1.0 + tol) + 1e-300):
            raise InvalidParameterError("active power exceeds pa_max_watts")


@dataclass(frozen=True)
class RateReport:
    """Per-device and pooled rates for one allocation."""

    r_b_bps: np.ndarray
    r_a_bps: np.ndarray
    r0_bps: float
    sum_rb_bps: float
    sum_ra_bps: float

    def __post_init__(self) -> None:
        for name in ("r_b_bps", "r_a_bps"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        ok = (
            np.all(np.isfinite(self.r_b_bps)) and np.all(self.r_b_bps >= 0.0)
            and np.all(np.isfinite(self.r_a_bps)) and np.all(self.r_a_bps >= 0.0)
            and math.isfinite(self.r0_bps) and self.r0_bps >= 0.0
            and math.isfinite(self.sum_rb_bps) and self.sum_rb_bps >= 0.0
            and math.isfinite(self.sum_ra_bps) and self.sum_ra_bps >= 0.0
        )
        if not ok:
            raise InvalidParameterError("rates must be finite and non-negative")


def _suffix_interference(terms: np.ndarray) -> np.ndarray:
    """out[k] = sum of terms[j] for j > k (zero for the last device)."""
    out = np.zeros_like(terms)
    if terms.shape[0] > 1:
        out[:-1] = np.cumsum(terms[::-1])[::-1][1:]
    return out


def backscatter_rates(chan: ChannelRealization, alloc: PowerAllocation) -> np.ndarray:
    """Per-device backscatter rates (bit/s) during the downlink slot."""
    num = alloc.p_reflect_watts * chan.h_gain_sq**2
    floor = chan.si_per_watt * alloc.p0_watts + chan.noise_power_watts
    snr = num / (_suffix_interference(num) + floor)
    return chan.bandwidth_hz * _log2_capacity(snr)


def active_rates(chan: ChannelRealization, alloc: PowerAllocation) -> np.ndarray:
    """Per-device active uplink rates (bit/s) after the downlink slot."""
    num = alloc.p_active_watts * chan.h_gain_sq
    snr = num / (_suffix_interference(num) + chan.noise_power_watts)
    return chan.bandwidth_hz * _log2_capacity(snr)


def downlink_rate(chan: ChannelRealization, alloc: PowerAllocation) -> float:
    """Downlink user rate (bit/s); reflections act as interference."""
    interference = float(np.dot(alloc.p_reflect_watts, chan.g_gain_sq * chan.h_gain_sq))
    snr = alloc.p0_watts * chan.h0_gain_sq / (interference + chan.noise_power_watts)
    return float(chan.bandwidth_hz * _log2_capacity(snr))


def sum_backscatter_rate(chan: ChannelRealization, p0_watts: float, p_reflect_watts) -> float:
    """Pooled backscatter rate R_b (bit/s), closed form."""
    s = float(np.dot(np.asarray(p_reflect_watts, dtype=float), chan.h_gain_sq**2))
    floor = chan.si_per_watt * p0_watts + chan.noise_power_watts
    return float(chan.bandwidth_hz * _log2_capacity(s / floor))


def sum_active_rate(chan: ChannelRealization, p_active_watts) -> float:
    """Pooled active uplink rate R_a (bit/s), closed form."""
    s = float(np.dot(np.asarray(p_active_watts, dtype=float), chan.h_gain_sq))
    return float(chan.bandwidth_hz * _log2_capacity(s / chan.noise_power_watts))


def make_rate_report(chan: ChannelRealization, alloc: PowerAllocation) -> RateReport:
    return RateReport(
        r_b_bps=backscatter_rates(chan, alloc),
        r_a_bps=active_rates(chan, alloc),
        r0_bps=downlink_rate(chan, alloc),
        sum_rb_bps=sum_backscatter_rate(chan, alloc.p0_watts, alloc.p_reflect_watts),
        sum_ra_bps=sum_active_rate(chan, alloc.p_active_watts),
    )


def remaining_delay(total_bits: float, t0_seconds: float, sum_rb_bps: float,
                    sum_ra_bps: float) -> float:
    """Active-phase duration t_a = max(0, (L - t0*R_b) / R_a).

    The clamp covers the boundary where backscatter alone delivers the
    payload (residuals within roundoff of zero count as delivered).  A zero
    active rate with a genuinely positive residual yields the infinite-delay
    sentinel, reported rather than raised.
    """
    residual = total_bits - t0_seconds * sum_rb_bps
    if residual <= _RESIDUAL_REL_TOL * max(total_bits, t0_seconds * sum_rb_bps):
        return 0.0
    if sum_ra_bps <= 0.0:
        return math.inf
    return residual / sum_ra_bps
