import dataclasses

import numpy as np
import pytest

from bacnoma import (
    compute_thresholds,
    downlink_rate,
    greedy_reflect_sum,
    max_reflect_sum,
    min_qos_downlink_power,
    sample_channels,
    solve_pure_feasibility,
)
from bacnoma.purebac import density_order, greedy_take

from conftest import make_chan, random_chan
from oracles import grid_max_reflect, grid_pure_feasible


class TestThresholds:
    def test_zero_payload(self, default_config):
        cfg = dataclasses.replace(default_config, data_bits_per_bd=0.0)
        assert compute_thresholds(cfg).gamma == 0.0

    def test_default_qos_threshold(self, default_config):
        # 2^(2e6/5e6) - 1
        th = compute_thresholds(default_config)
        assert th.gamma0_tilde == pytest.approx(0.3195079107728942, rel=1e-12)

    def test_payload_exactly_one_slot(self, default_config):
        cfg = dataclasses.replace(
            default_config, num_bds=1, data_bits_per_bd=0.5 * 5e6
        )
        assert compute_thresholds(cfg).gamma == pytest.approx(1.0, rel=1e-14)


class TestMaxReflectSum:
    def test_zero_downlink_power(self):
        chan = make_chan([1e-4, 1e-5])
        s, pr = max_reflect_sum(chan, 0.0, 0.3)
        assert s == 0.0 and np.all(pr == 0.0)

    def test_negative_budget(self):
        chan = make_chan([1e-4], h0_gain_sq=1e-9, noise_power_watts=1.0)
        s, pr = max_reflect_sum(chan, 1.0, 0.5)
        assert s == 0.0 and np.all(pr == 0.0)

    def test_single_device_fills_to_cap_or_budget(self):
        chan = make_chan([1e-3], g_gain_sq=[1e-4], h0_gain_sq=1e-2, noise_power_watts=1e-6)
        g0t = 0.5
        p0 = 2.0
        s, pr = max_reflect_sum(chan, p0, g0t)
        budget = p0 * chan.h0_gain_sq - g0t * chan.noise_power_watts
        weight = g0t * 1e-4 * 1e-3
        assert pr[0] == pytest.approx(min(p0, budget / weight), rel=1e-12)
        assert s == pytest.approx(pr[0] * 1e-6, rel=1e-12)

    def test_tie_break_prefers_lower_index(self):
        # identical densities, budget for one and a half items: the lower
        # index fills first, deterministically
        s, x = greedy_reflect_sum([1.0, 1.0], [1.0, 1.0], 1.5, 1.0)
        assert x.tolist() == [1.0, 0.5]
        assert s == pytest.approx(1.5, rel=1e-15)

    def test_matches_grid_oracle(self, default_config):
        rng = np.random.default_rng(31)
        g0t = compute_thresholds(default_config).gamma0_tilde
        for _ in range(10):
            chan = random_chan(rng, 3)
            p0 = float(rng.uniform(0.5, 10.0))
            s, pr = max_reflect_sum(chan, p0, g0t)
            s_grid = grid_max_reflect(chan, p0, g0t, steps=201)
            if s_grid <= 0.0:
                assert s == 0.0
            else:
                assert s >= s_grid - 1e-12 * s_grid  # exact LP dominates the grid
                assert abs(s - s_grid) <= 0.01 * s

    def test_zero_weight_items_taken_in_full(self):
        s, x = greedy_reflect_sum([2.0, 1.0], [0.0, 1.0], 0.5, 3.0)
        assert x[0] == 3.0 and x[1] == 0.5
        assert s == pytest.approx(6.5)

    def test_greedy_take_respects_order(self):
        v = [1.0, 10.0]
        w = [1.0, 1.0]
        order = density_order(v, w)
        assert order == [1, 0]
        s, x = greedy_take(v, w, order, 1.0, 5.0)
        assert x == [0.0, 1.0] and s == 10.0


class TestPureFeasibility:
    def test_zero_payload_returns_minimal_power(self, default_config):
        cfg = dataclasses.replace(default_config, data_bits_per_bd=0.0)
        chan = make_chan([1e-4, 1e-5], h0_gain_sq=1e-5)
        witness = solve_pure_feasibility(chan, cfg)
        th = compute_thresholds(cfg)
        assert witness is not None
        assert witness.p0_watts == pytest.approx(
            th.gamma0_tilde * chan.noise_power_watts / chan.h0_gain_sq, rel=1e-12
        )
        assert np.all(witness.p_reflect_watts == 0.0)

    def test_dead_downlink_channel_infeasible(self, default_config):
        chan = make_chan([1e-3, 1e-4], h0_gain_sq=0.0)
        assert solve_pure_feasibility(chan, default_config) is None

    def test_witness_satisfies_equality_and_qos(self, default_config):
        rng = np.random.default_rng(77)
        th = compute_thresholds(default_config)
        found = 0
        for _ in range(400):
            chan = random_chan(rng, 2)
            witness = solve_pure_feasibility(chan, default_config)
            if witness is None:
                continue
            found += 1
            s = float(np.dot(witness.p_reflect_watts, chan.h_gain_sq**2))
            target = th.gamma * (
                chan.si_per_watt * witness.p0_watts + chan.noise_power_watts
            )
            assert abs(s - target) <= 1e-8 * th.gamma * chan.noise_power_watts
            r0 = downlink_rate(chan, witness)
            assert r0 >= default_config.qos_rate_bps * (1.0 - 1e-6)
            assert witness.p0_watts <= default_config.p0_max_watts * (1.0 + 1e-12)
            assert np.all(witness.p_reflect_watts <= witness.p0_watts * (1.0 + 1e-12))
            assert np.all(witness.p_active_watts == 0.0)
        assert found >= 10  # the sampler must hit feasible geometries

    def test_verdict_matches_grid_oracle(self, default_config):
        cfg = dataclasses.replace(default_config, data_bits_per_bd=5e5)
        solver, grid = [], []
        for seed in range(25):
            chan = sample_channels(cfg, seed)
            solver.append(solve_pure_feasibility(chan, cfg) is not None)
            grid.append(grid_pure_feasible(chan, cfg, steps=100))
        # the grid only certifies feasibility, never the converse
        for s_ok, g_ok in zip(solver, grid):
            if g_ok:
                assert s_ok
        assert solver == grid  # chosen seeds have no borderline instances

    def test_headroom_concave_on_admissible_range(self, default_config):
        from bacnoma.purebac import max_reflect_sum as mrs

        rng = np.random.default_rng(13)
        th = compute_thresholds(default_config)
        for _ in range(10):
            chan = random_chan(rng, 3)
            lo = min_qos_downlink_power(chan, th.gamma0_tilde)
            if lo > default_config.p0_max_watts:
                continue
            xs = np.linspace(lo, default_config.p0_max_watts, 50)

            def headroom(p0):
                s, _ = mrs(chan, p0, th.gamma0_tilde)
                return s - th.gamma * (chan.si_per_watt * p0 + chan.noise_power_watts)

            values = [headroom(x) for x in xs]
            for i in range(1, 49):
                mid = headroom(0.5 * (xs[i - 1] + xs[i + 1]))
                assert mid >= 0.5 * (values[i - 1] + values[i + 1]) - 1e-9
