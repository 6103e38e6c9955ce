"""Scenario parameters, unit conversion, and seeded channel generation.

All internal computation uses linear SI units (watts, Hz, bits, seconds);
decibel quantities appear only at the config boundary.  A channel
realization is self-contained for rate evaluation: it carries the
bandwidth, the noise power sigma^2 = B * N0 (linear), and the residual
self-interference level per watt of downlink power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import ConfigError, InvalidParameterError

__all__ = [
    "ScenarioConfig",
    "ChannelRealization",
    "dbm_per_hz_to_watts",
    "sample_channels",
    "parse_config_text",
    "load_config",
]


def dbm_per_hz_to_watts(density_dbm_per_hz: float, bandwidth_hz: float) -> float:
    """Total noise power in watts for a spectral density given in dBm/Hz."""
    if not (math.isfinite(density_dbm_per_hz) and math.isfinite(bandwidth_hz)):
        raise InvalidParameterError("noise density and bandwidth must be finite")
    if bandwidth_hz <= 0.0:
        raise InvalidParameterError("bandwidth must be positive")
    return bandwidth_hz * 10.0 ** ((density_dbm_per_hz - 30.0) / 10.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """All physical and algorithmic knobs of one offloading scenario.

    ``data_bits_per_bd`` accepts a scalar (broadcast to every device) or a
    sequence with one entry per device.
    """

    bandwidth_hz: float = 5e6            # B
    noise_density_dbm_per_hz: float = -94.0  # N0
    num_bds: int = 2                     # K
    data_bits_per_bd: Union[float, Sequence[float]] = 1e6  # L_k
    t0_seconds: float = 0.5              # downlink slot length
    p0_max_watts: float = 10.0           # downlink power cap
    pa_max_watts: float = 0.5            # per-device active uplink power cap
    energy_budget_joules: float = 0.1    # per-device energy for the active phase
    qos_rate_bps: float = 2e6            # downlink rate floor gamma_0
    si_residual_alpha: float = 1e-6      # residual self-interference fraction
    si_channel_gain: float = 1.0         # |h_SI|^2, kept at 1; alpha carries the level
    path_loss_exponent: float = 3.76
    cell_radius_m: float = 50.0
    min_distance_m: float = 1.0
    epsilon_tolerance: float = 1e-4      # stopping threshold on the parametric objective (bits)
    max_iterations: int = 50

    def __post_init__(self) -> None:
        bits = self.data_bits_per_bd
        if isinstance(bits, (int, float)):
            bits = (float(bits),) * int(self.num_bds)
        else:
            bits = tuple(float(b) for b in bits)
        object.__setattr__(self, "data_bits_per_bd", bits)
        self._validate()

    def _validate(self) -> None:
        numeric = {
            f.name: getattr(self, f.name)
            for f in fields(self)
            if f.name != "data_bits_per_bd"
        }
        for name, value in numeric.items():
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value!r}")
        if self.bandwidth_hz <= 0.0:
            raise InvalidParameterError("bandwidth_hz must be positive")
        if self.t0_seconds <= 0.0:
            raise InvalidParameterError("t0_seconds must be positive")
        if int(self.num_bds) < 1:
            raise InvalidParameterError("num_bds must be at least 1")
        if len(self.data_bits_per_bd) != self.num_bds:
            raise InvalidParameterError(
                f"data_bits_per_bd has {len(self.data_bits_per_bd)} entries "
                f"for {self.num_bds} devices"
            )
        if any(not math.isfinite(b) or b < 0.0 for b in self.data_bits_per_bd):
            raise InvalidParameterError("data_bits_per_bd entries must be >= 0")
        for name in ("p0_max_watts", "pa_max_watts", "energy_budget_joules",
                     "qos_rate_bps", "si_channel_gain", "path_loss_exponent"):
            if getattr(self, name) < 0.0:
                raise InvalidParameterError(f"{name} must be >= 0")
        if not 0.0 <= self.si_residual_alpha <= 1.0:
            raise InvalidParameterError("si_residual_alpha must lie in [0, 1]")
        if self.min_distance_m <= 0.0:
            raise InvalidParameterError("min_distance_m must be positive")
        if self.cell_radius_m <= self.min_distance_m:
            raise InvalidParameterError("cell_radius_m must exceed min_distance_m")
        if self.epsilon_tolerance <= 0.0:
            raise InvalidParameterError("epsilon_tolerance must be positive")
        if int(self.max_iterations) < 1:
            raise InvalidParameterError("max_iterations must be at least 1")

    @property
    def total_bits(self) -> float:
        """Pooled payload over all devices."""
        return float(sum(self.data_bits_per_bd))

    @property
    def noise_power_watts(self) -> float:
        """sigma^2 = bandwidth times linearized noise density."""
        return dbm_per_hz_to_watts(self.noise_density_dbm_per_hz, self.bandwidth_hz)

    @property
    def si_per_watt(self) -> float:
        """Residual self-interference power per watt of downlink power."""
        return self.si_residual_alpha * self.si_channel_gain


@dataclass(frozen=True)
class ChannelRealization:
    """One sampled geometry plus fading draw, sorted for SIC decoding.

    Devices are stored in descending order of the BS-link gain ``|h_k|^2``
    (the decode order); ``permutation[orig]`` gives the sorted position of
    the device drawn at index ``orig``.
    """

    h_gain_sq: np.ndarray     # |h_k|^2, BS <-> device, descending
    g_gain_sq: np.ndarray     # |g_k|^2, downlink user <-> device, same order
    h0_gain_sq: float         # |h_0|^2, BS <-> downlink user
    bd_distances_m: np.ndarray
    u0_distance_m: float
    noise_power_watts: float  # sigma^2
    permutation: np.ndarray   # original index -> sorted position
    bandwidth_hz: float
    si_per_watt: float        # alpha * |h_SI|^2

    def __post_init__(self) -> None:
        for name in ("h_gain_sq", "g_gain_sq", "bd_distances_m", "permutation"):
            arr = np.asarray(getattr(self, name))
            arr = arr.astype(np.intp if name == "permutation" else float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.noise_power_watts <= 0.0:
            raise InvalidParameterError("noise power must be positive")
        if np.any(self.h_gain_sq[:-1] < self.h_gain_sq[1:]):
            raise InvalidParameterError("devices must be sorted by descending |h_k|^2")

    @property
    def num_bds(self) -> int:
        return int(self.h_gain_sq.shape[0])


def _annulus_radii(rng: np.random.Generator, r_min: float, r_max: float, n: int) -> np.ndarray:
    # area-uniform radius over the annulus [r_min, r_max]
    u = rng.uniform(0.0, 1.0, n)
    return np.sqrt(r_min**2 + u * (r_max**2 - r_min**2))


def sample_channels(config: ScenarioConfig, seed: int) -> ChannelRealization:
    """Draw one channel realization; identical (config, seed) pairs match bit-for-bit.

    Positions are area-uniform over the annulus between ``min_distance_m``
    and ``cell_radius_m`` around the BS.  Squared gains are unit-mean
    exponential fades scaled by ``d^-chi``; the device-to-user distances are
    derived from the sampled positions and floored at ``min_distance_m`` to
    avoid the path-loss singularity.

    Draw order (part of the determinism contract): device radii (K
    uniforms), device angles (K), user radius (1), user angle (1), then
    exponential fades for the BS-device links (K), the user-device links
    (K), and the BS-user link (1), all from ``numpy.random.default_rng(seed)``.
    """
    if int(seed) < 0:
        raise InvalidParameterError("seed must be a non-negative integer")
    rng = np.random.default_rng(int(seed))
    k = config.num_bds
    chi = config.path_loss_exponent

    bd_r = _annulus_radii(rng, config.min_distance_m, config.cell_radius_m, k)
    bd_theta = rng.uniform(0.0, 2.0 * np.pi, k)
    u0_r = float(_annulus_radii(rng, config.min_distance_m, config.cell_radius_m, 1)[0])
    u0_theta = float(rng.uniform(0.0, 2.0 * np.pi))
    h_fade = rng.exponential(1.0, k)
    g_fade = rng.exponential(1.0, k)
    h0_fade = float(rng.exponential(1.0))

    bd_xy = np.stack([bd_r * np.cos(bd_theta), bd_r * np.sin(bd_theta)], axis=1)
    u0_xy = np.array([u0_r * math.cos(u0_theta), u0_r * math.sin(u0_theta)])
    u0_bd = np.maximum(
        np.hypot(bd_xy[:, 0] - u0_xy[0], bd_xy[:, 1] - u0_xy[1]),
        config.min_distance_m,
    )

    h = h_fade * bd_r ** (-chi)
    g = g_fade * u0_bd ** (-chi)
    h0 = h0_fade * u0_r ** (-chi)

    order = np.argsort(-h, kind="stable")
    permutation = np.empty(k, dtype=np.intp)
    permutation[order] = np.arange(k)

    return ChannelRealization(
        h_gain_sq=h[order],
        g_gain_sq=g[order],
        h0_gain_sq=float(h0),
        bd_distances_m=bd_r[order],
        u0_distance_m=u0_r,
        noise_power_watts=config.noise_power_watts,
        permutation=permutation,
        bandwidth_hz=config.bandwidth_hz,
        si_per_watt=config.si_per_watt,
    )


_INT_KEYS = {"num_bds", "max_iterations"}


def parse_config_text(text: str) -> ScenarioConfig:
    """Parse flat ``key = value`` lines; unknown keys are an error, missing keys default."""
    known = {f.name for f in fields(ScenarioConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key == "data_bits_per_bd" and "," in value:
                values[key] = tuple(float(v) for v in value.split(","))
            else:
                values[key] = float(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {value!r}") from exc
    try:
        return ScenarioConfig(**values)
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ScenarioConfig:
    """Read a scenario config file (UTF-8 ``key = value`` lines)."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {p}: {exc}") from exc
    return parse_config_text(text)
