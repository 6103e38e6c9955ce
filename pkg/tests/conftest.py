import numpy as np
import pytest

from bacnoma import ChannelRealization, ScenarioConfig


@pytest.fixture
def default_config() -> ScenarioConfig:
    return ScenarioConfig()


def make_chan(
    h_gain_sq,
    g_gain_sq=None,
    h0_gain_sq=1e-5,
    noise_power_watts=2e-6,
    bandwidth_hz=5e6,
    si_per_watt=0.0,
) -> ChannelRealization:
    """Hand-built realization for kernel tests (already sorted descending)."""
    h = np.asarray(h_gain_sq, dtype=float)
    k = len(h)
    g = np.full(k, 1e-6) if g_gain_sq is None else np.asarray(g_gain_sq, dtype=float)
    return ChannelRealization(
        h_gain_sq=h,
        g_gain_sq=g,
        h0_gain_sq=h0_gain_sq,
        bd_distances_m=np.ones(k),
        u0_distance_m=1.0,
        noise_power_watts=noise_power_watts,
        permutation=np.arange(k),
        bandwidth_hz=bandwidth_hz,
        si_per_watt=si_per_watt,
    )


def random_chan(rng: np.random.Generator, k: int, si_per_watt=None) -> ChannelRealization:
    """Random realization with realistic scales (path-loss-like gain spread)."""
    d = rng.uniform(1.0, 50.0, k)
    h = rng.exponential(1.0, k) * d**-3.76
    order = np.argsort(-h)
    g = rng.exponential(1.0, k) * rng.uniform(1.0, 50.0, k) ** -3.76
    if si_per_watt is None:
        si_per_watt = float(rng.choice([0.0, 1e-8, 1e-6, 1e-4]))
    return ChannelRealization(
        h_gain_sq=h[order],
        g_gain_sq=g[order],
        h0_gain_sq=float(rng.exponential(1.0) * rng.uniform(1.0, 50.0) ** -3.76),
        bd_distances_m=d[order],
        u0_distance_m=float(rng.uniform(1.0, 50.0)),
        noise_power_watts=1.9905358527674846e-06,
        permutation=np.arange(k),
        bandwidth_hz=5e6,
        si_per_watt=si_per_watt,
    )
