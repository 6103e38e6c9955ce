"""Seeded Monte Carlo harness: paired sweeps and convergence traces.

Per-realization seeds derive from the master seed through a splitmix64
mix (constants below), so independent implementations can reproduce the
streams.  Aggregation reduces realizations in index order, which makes the
output byte-identical regardless of how many workers computed them; the
``BACNOMA_THREADS`` environment variable caps the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .baseline import pure_noma_delay
from .hybrid import DinkelbachState, minimize_delay
from .model import ScenarioConfig, sample_channels

__all__ = [
    "SweepResult",
    "mix_seed",
    "splitmix64",
    "run_monte_carlo",
    "sweep_data_length",
    "convergence_trace",
    "render_sweep_csv",
    "render_trace_csv",
    "SWEEP_CSV_COLUMNS",
    "TRACE_CSV_COLUMNS",
]

_MASK64 = (1 << 64) - 1
_MIN_N_FOR_CI = 30
_Z_95 = 1.959963984540054  # two-sided 95% normal quantile

SWEEP_CSV_COLUMNS = (
    "sweep_value",
    "mean_hybrid_s",
    "ci_hybrid_s",
    "mean_baseline_s",
    "ci_baseline_s",
    "converged_frac",
    "n",
)
TRACE_CSV_COLUMNS = ("iteration", "mu_s", "y", "f_value_bits", "delay_s")


def splitmix64(x: int) -> int:
    """One splitmix64 output step (Vigna's constants), on 64-bit state."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(master_seed: int, index: int) -> int:
    """Per-realization seed: splitmix64(splitmix64(master) + index)."""
    return splitmix64((splitmix64(master_seed & _MASK64) + index) & _MASK64)


@dataclass(frozen=True)
class SweepResult:
    """Aggregate of one sweep point over n paired realizations."""

    sweep_value: float
    mean_hybrid_s: float
    ci_hybrid_s: float       # 95% half-width; nan below the n >= 30 floor
    mean_baseline_s: float
    ci_baseline_s: float
    converged_frac: float
    n: int


def _solve_realization(args: tuple[ScenarioConfig, int]) -> tuple[float, float, bool]:
    config, seed = args
    chan = sample_channels(config, seed)
    hybrid = minimize_delay(chan, config)
    benchmark = pure_noma_delay(chan, config)
    return hybrid.total_delay_s, benchmark.total_delay_s, hybrid.converged


def _worker_count() -> int:
    return max(1, int(os.environ.get("BACNOMA_THREADS", "1")))


def _solve_many(config: ScenarioConfig, seeds: Sequence[int]) -> list[tuple[float, float, bool]]:
    jobs = [(config, seed) for seed in seeds]
    workers = _worker_count()
    if workers == 1 or len(jobs) < 2:
        return [_solve_realization(job) for job in jobs]
    chunk = max(1, len(jobs) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_realization, jobs, chunksize=chunk))


def _half_width(values: np.ndarray) -> float:
    n = len(values)
    if n < _MIN_N_FOR_CI or not np.all(np.isfinite(values)):
        return math.nan
    return float(_Z_95 * values.std(ddof=1) / math.sqrt(n))


def _aggregate(config: ScenarioConfig, rows: list[tuple[float, float, bool]]) -> SweepResult:
    hybrid = np.array([r[0] for r in rows])
    benchmark = np.array([r[1] for r in rows])
    converged = np.array([r[2] for r in rows])
    return SweepResult(
        sweep_value=float(np.mean(config.data_bits_per_bd)),
        mean_hybrid_s=float(hybrid.mean()),
        ci_hybrid_s=_half_width(hybrid),
        mean_baseline_s=float(benchmark.mean()),
        ci_baseline_s=_half_width(benchmark),
        converged_frac=float(converged.mean()),
        n=len(rows),
    )


def run_monte_carlo(config: ScenarioConfig, n: int, master_seed: int) -> SweepResult:
    """Solve n seeded realizations (hybrid and benchmark) and aggregate."""
    seeds = [mix_seed(master_seed, i) for i in range(n)]
    return _aggregate(config, _solve_many(config, seeds))


def sweep_data_length(
    config: ScenarioConfig, bits_grid: Iterable[float], n: int, master_seed: int
) -> list[SweepResult]:
    """One aggregate per payload value, reusing the same seeds across the grid."""
    seeds = [mix_seed(master_seed, i) for i in range(n)]
    results = []
    for bits in bits_grid:
        point = replace(config, data_bits_per_bd=float(bits))
        results.append(_aggregate(point, _solve_many(point, seeds)))
    return results


def convergence_trace(config: ScenarioConfig, seed: int) -> tuple[DinkelbachState, ...]:
    """Verbatim per-iteration trace of one solver run (empty for pure runs)."""
    chan = sample_channels(config, seed)
    return minimize_delay(chan, config).trace


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def render_sweep_csv(results: Sequence[SweepResult]) -> str:
    lines = [",".join(SWEEP_CSV_COLUMNS)]
    for r in results:
        lines.append(
            ",".join(
                [
                    _fmt(r.sweep_value),
                    _fmt(r.mean_hybrid_s),
                    _fmt(r.ci_hybrid_s),
                    _fmt(r.mean_baseline_s),
                    _fmt(r.ci_baseline_s),
                    _fmt(r.converged_frac),
                    str(r.n),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def render_trace_csv(trace: Sequence[DinkelbachState]) -> str:
    lines = [",".join(TRACE_CSV_COLUMNS)]
    for s in trace:
        lines.append(
            ",".join(
                [str(s.iteration), _fmt(s.mu), _fmt(s.y), _fmt(s.f_value), _fmt(s.best_delay_s)]
            )
        )
    return "\n".join(lines) + "\n"
