import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bacnoma import (
    InternalConsistencyError,
    PowerAllocation,
    RateReport,
    InvalidParameterError,
    active_rates,
    backscatter_rates,
    compute_thresholds,
    downlink_rate,
    make_rate_report,
    remaining_delay,
    sum_active_rate,
    sum_backscatter_rate,
)
from bacnoma.rates import _log2_capacity

from conftest import make_chan, random_chan


def _alloc(p0, pr, pa):
    return PowerAllocation(p0, np.asarray(pr, dtype=float), np.asarray(pa, dtype=float))


class TestBackscatterRates:
    def test_zero_reflect_power_zero_rates(self):
        chan = make_chan([1e-4, 1e-5, 1e-6])
        alloc = _alloc(2.0, [0, 0, 0], [0, 0, 0])
        assert np.all(backscatter_rates(chan, alloc) == 0.0)

    def test_single_device_log2_value(self):
        # snr = p_r * h^4 / (si*P0 + sigma^2) = 6 / (1 + 1) = 3  ->  rate = 2B
        chan = make_chan([1.0], noise_power_watts=1.0, si_per_watt=0.1)
        alloc = _alloc(10.0, [6.0], [0.0])
        rate = backscatter_rates(chan, alloc)[0]
        assert rate == pytest.approx(2.0 * chan.bandwidth_hz, rel=1e-12)

    def test_decode_order_interference(self):
        # strongest device sees both weaker ones as interference
        chan = make_chan([1.0, 1.0, 1.0], noise_power_watts=1.0)
        alloc = _alloc(3.0, [1.0, 1.0, 1.0], [0, 0, 0])
        rates = backscatter_rates(chan, alloc)
        assert rates[0] == pytest.approx(chan.bandwidth_hz * math.log2(1 + 1 / 3), rel=1e-12)
        assert rates[2] == pytest.approx(chan.bandwidth_hz * math.log2(2.0), rel=1e-12)


class TestActiveRates:
    def test_zero_power_zero_rates(self):
        chan = make_chan([1e-4, 1e-5])
        assert np.all(active_rates(chan, _alloc(0.0, [0, 0], [0, 0])) == 0.0)

    def test_single_device_unit_snr(self):
        chan = make_chan([2e-6], noise_power_watts=2e-6)
        rate = active_rates(chan, _alloc(0.0, [0.0], [1.0]))[0]
        assert rate == pytest.approx(chan.bandwidth_hz, rel=1e-12)


class TestDownlinkRate:
    def test_downlink_off(self):
        chan = make_chan([1e-4])
        assert downlink_rate(chan, _alloc(0.0, [0.0], [0.0])) == 0.0

    def test_three_noise_units(self):
        chan = make_chan([1e-4], h0_gain_sq=3e-6, noise_power_watts=1e-6)
        rate = downlink_rate(chan, _alloc(1.0, [0.0], [0.0]))
        assert rate == pytest.approx(2.0 * chan.bandwidth_hz, rel=1e-12)

    def test_qos_threshold_equivalence(self, default_config):
        # r_0 >= gamma_0 iff P0|h0|^2 - g0t*(sum p_r |g|^2 |h|^2 + sigma^2) >= 0
        rng = np.random.default_rng(5)
        g0t = compute_thresholds(default_config).gamma0_tilde
        for _ in range(200):
            chan = random_chan(rng, int(rng.integers(1, 5)))
            p0 = float(rng.uniform(0.0, 10.0))
            pr = rng.uniform(0.0, p0, chan.num_bds)
            alloc = _alloc(p0, pr, np.zeros(chan.num_bds))
            lhs = downlink_rate(chan, alloc) >= default_config.qos_rate_bps
            budget = p0 * chan.h0_gain_sq - g0t * (
                float(np.dot(pr, chan.g_gain_sq * chan.h_gain_sq))
                + chan.noise_power_watts
            )
            # strict-inequality side only: equality is a measure-zero knife edge
            if abs(budget) > 1e-18:
                assert lhs == (budget >= 0.0)


@st.composite
def _chan_and_alloc(draw):
    k = draw(st.integers(min_value=1, max_value=8))
    seed = draw(st.integers(min_value=0, max_value=2**31 - 1))
    rng = np.random.default_rng(seed)
    chan = random_chan(rng, k)
    p0 = float(rng.uniform(0.0, 10.0))
    pr = rng.uniform(0.0, 1.0, k) * p0
    pa = rng.uniform(0.0, 0.5, k)
    return chan, _alloc(p0, pr, pa)


class TestTelescoping:
    @given(_chan_and_alloc())
    @settings(max_examples=150, deadline=None)
    def test_backscatter_sum_matches_closed_form(self, pair):
        chan, alloc = pair
        per_bd = float(np.sum(backscatter_rates(chan, alloc)))
        pooled = sum_backscatter_rate(chan, alloc.p0_watts, alloc.p_reflect_watts)
        assert abs(per_bd - pooled) <= 1e-9 * max(pooled, 1e-30)

    @given(_chan_and_alloc())
    @settings(max_examples=150, deadline=None)
    def test_active_sum_matches_closed_form(self, pair):
        chan, alloc = pair
        per_bd = float(np.sum(active_rates(chan, alloc)))
        pooled = sum_active_rate(chan, alloc.p_active_watts)
        assert abs(per_bd - pooled) <= 1e-9 * max(pooled, 1e-30)


class TestMonotonicity:
    def test_rates_monotone_in_powers(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            chan = random_chan(rng, 3)
            p0 = 5.0
            pr = rng.uniform(0.0, p0, 3)
            pa = rng.uniform(0.0, 0.5, 3)
            base_rb = sum_backscatter_rate(chan, p0, pr)
            base_ra = sum_active_rate(chan, pa)
            base_r0 = downlink_rate(chan, _alloc(p0, pr, pa))
            k = int(rng.integers(0, 3))
            pr2, pa2 = pr.copy(), pa.copy()
            pr2[k] += 0.1
            pa2[k] += 0.1
            assert sum_backscatter_rate(chan, p0, pr2) >= base_rb
            assert sum_active_rate(chan, pa2) >= base_ra
            assert downlink_rate(chan, _alloc(p0, pr2, pa)) <= base_r0

    def test_bandwidth_scaling_with_pinned_noise(self):
        chan1 = make_chan([1e-4, 1e-6], noise_power_watts=1e-6, bandwidth_hz=5e6)
        chan2 = make_chan([1e-4, 1e-6], noise_power_watts=1e-6, bandwidth_hz=1e7)
        alloc = _alloc(2.0, [1.0, 0.5], [0.2, 0.1])
        assert sum_backscatter_rate(chan2, 2.0, alloc.p_reflect_watts) == pytest.approx(
            2.0 * sum_backscatter_rate(chan1, 2.0, alloc.p_reflect_watts), rel=1e-12
        )
        assert np.allclose(
            active_rates(chan2, alloc), 2.0 * active_rates(chan1, alloc), rtol=1e-12
        )


class TestRemainingDelay:
    def test_arithmetic_example(self):
        assert remaining_delay(2e6, 1.0, 1e6, 1e6) == pytest.approx(1.0, rel=1e-12)

    def test_clamp_when_backscatter_suffices(self):
        assert remaining_delay(1e6, 0.5, 3e6, 1e6) == 0.0

    def test_sentinel_on_zero_active_rate(self):
        assert remaining_delay(2e6, 0.5, 1e6, 0.0) == math.inf

    def test_equal_finish_time_construction(self):
        # build per-device payloads finishing simultaneously and check the
        # pooled formula reproduces the common finish time
        rng = np.random.default_rng(17)
        for _ in range(50):
            chan = random_chan(rng, 4)
            p0 = float(rng.uniform(0.1, 10.0))
            alloc = _alloc(
                p0, rng.uniform(0.0, p0, 4), rng.uniform(1e-3, 0.5, 4)
            )
            r_b = backscatter_rates(chan, alloc)
            r_a = active_rates(chan, alloc)
            t0 = 0.5
            t_target = float(rng.uniform(0.01, 2.0))
            payloads = t0 * r_b + t_target * r_a
            per_bd = (payloads - t0 * r_b) / r_a
            assert np.allclose(per_bd, t_target, rtol=1e-9)
            pooled = remaining_delay(
                float(np.sum(payloads)),
                t0,
                sum_backscatter_rate(chan, p0, alloc.p_reflect_watts),
                sum_active_rate(chan, alloc.p_active_watts),
            )
            assert pooled == pytest.approx(t_target, rel=1e-9)


class TestGuards:
    def test_negative_snr_is_solver_bug(self):
        with pytest.raises(InternalConsistencyError):
            _log2_capacity(-1e-6)

    def test_tiny_negative_snr_clamped(self):
        assert _log2_capacity(-1e-13) == 0.0

    def test_allocation_rejects_eta_above_one(self):
        with pytest.raises(InvalidParameterError):
            _alloc(1.0, [1.5], [0.0])

    def test_rate_report_rejects_negative(self):
        with pytest.raises(InvalidParameterError):
            RateReport(
                r_b_bps=np.array([-1.0]),
                r_a_bps=np.array([0.0]),
                r0_bps=0.0,
                sum_rb_bps=0.0,
                sum_ra_bps=0.0,
            )

    def test_eta_recovered(self):
        alloc = _alloc(2.0, [1.0, 0.5], [0.0, 0.0])
        assert np.allclose(alloc.eta, [0.5, 0.25])

    def test_report_assembles(self):
        chan = make_chan([1e-4, 1e-5])
        report = make_rate_report(chan, _alloc(1.0, [0.5, 0.1], [0.2, 0.2]))
        assert report.sum_rb_bps == pytest.approx(
            float(np.sum(backscatter_rates(chan, _alloc(1.0, [0.5, 0.1], [0.2, 0.2])))),
            rel=1e-9,
        )
