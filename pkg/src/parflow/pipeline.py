"""Full frame-pair flow: setup, data-parallel POI matching, serial aggregation."""

from __future__ import annotations

import dataclasses
import logging
import statistics
import time
from dataclasses import dataclass

import numba
import numpy as np

from .aggregate import GlobalFlow, aggregate_flow
from .image import FlowConfig, Frame, PoiAnchor, Variant
from .interp import WorkCounters, build_planes
from .matcher import NO_PLANES, PoiFlow, match_blocks_parallel

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhaseTiming:
    setup_ns: int
    parallel_ns: int
    serial_ns: int
    total_ns: int


@dataclass(frozen=True, eq=False)
class FlowResult:
    global_flow: GlobalFlow
    per_poi: tuple[PoiFlow, ...]
    counters: WorkCounters
    timing: PhaseTiming
    variant: Variant
    workers: int

    def same_flow(self, other: "FlowResult") -> bool:
        """True if both results carry identical flows and work counters."""
        return (
            self.per_poi == other.per_poi
            and self.global_flow == other.global_flow
            and self.counters == other.counters
        )


def block_bounds(n: int, workers: int) -> np.ndarray:
    """Start offsets of ``workers`` contiguous blocks of ``ceil(n / workers)`` items."""
    size = -(-n // workers)
    return np.minimum(np.arange(workers + 1, dtype=np.int64) * size, n)


def effective_threads(workers: int) -> int:
    return max(1, min(workers, numba.config.NUMBA_NUM_THREADS))


def compute_flow(frame1: Frame, frame2: Frame, config: FlowConfig) -> FlowResult:
    """Estimate the global flow between two frames.

    The POIs are split into ``config.workers`` contiguous blocks, each matched
    as one parallel task with its own counter row; results land in
    per-POI slots, so the output does not depend on the worker count.
    """
    for name, frame in (("frame1", frame1), ("frame2", frame2)):
        if (frame.width, frame.height) != (config.width, config.height):
            raise ValueError(
                f"{name} is {frame.width}x{frame.height}, config expects {config.width}x{config.height}"
            )

    t0 = time.perf_counter_ns()
    setup_counters = WorkCounters()
    if config.variant is Variant.GLOBAL:
        planes = build_planes(frame2, setup_counters).stack
    else:
        planes = NO_PLANES
    anchors = config.anchor_array()
    n = len(anchors)
    bounds = block_bounds(n, config.workers)
    out = np.zeros((n, 4), dtype=np.int64)
    block_counters = np.zeros((config.workers, 3), dtype=np.int64)
    numba.set_num_threads(effective_threads(config.workers))

    t1 = time.perf_counter_ns()
    match_blocks_parallel(
        frame1.data, frame2.data, anchors, bounds, config.patch, config.search_radius,
        config.variant.code, planes, out, block_counters,
    )
    t2 = time.perf_counter_ns()

    per_poi = tuple(
        PoiFlow(PoiAnchor(int(x), int(y)), int(dx), int(dy), int(s), bool(r))
        for (x, y), (dx, dy, s, r) in zip(anchors, out)
    )
    counters = setup_counters + WorkCounters.from_array(block_counters.sum(axis=0))
    global_flow = aggregate_flow(per_poi, max_hp=config.max_displacement_hp)
    t3 = time.perf_counter_ns()

    timing = PhaseTiming(t1 - t0, t2 - t1, t3 - t2, t3 - t0)
    return FlowResult(global_flow, per_poi, counters, timing, config.variant, config.workers)


@dataclass(frozen=True)
class TimingSummary:
    """Median phase times (ns) at ``workers`` and for a single worker.

    ``parallel_speedup`` compares the parallel section alone,
    ``total_speedup`` whole runs.
    """

    variant: Variant
    workers: int
    threads: int
    repetitions: int
    phases: PhaseTiming
    baseline: PhaseTiming
    parallel_speedup: float
    total_speedup: float


def _median_timing(timings: list[PhaseTiming]) -> PhaseTiming:
    return PhaseTiming(
        *(int(statistics.median(getattr(t, f.name) for t in timings)) for f in dataclasses.fields(PhaseTiming))
    )


def _timed_runs(frame1, frame2, config, repetitions, warmup):
    for _ in range(warmup):
        compute_flow(frame1, frame2, config)
    return [compute_flow(frame1, frame2, config).timing for _ in range(repetitions)]


def run_phases_timed(
    frame1: Frame, frame2: Frame, config: FlowConfig, repetitions: int = 20, warmup: int = 2
) -> TimingSummary:
    """Time each phase over ``repetitions`` runs and report the parallel speedup.

    The speedup is the median single-worker parallel time divided by the
    median parallel time at ``config.workers``.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    phases = _median_timing(_timed_runs(frame1, frame2, config, repetitions, warmup))
    if config.workers == 1:
        baseline, speedup, total_speedup = phases, 1.0, 1.0
    else:
        single = dataclasses.replace(config, workers=1)
        baseline = _median_timing(_timed_runs(frame1, frame2, single, repetitions, warmup))
        speedup = baseline.parallel_ns / max(phases.parallel_ns, 1)
        total_speedup = baseline.total_ns / max(phases.total_ns, 1)
    log.debug("workers=%d parallel=%dns speedup=%.3f", config.workers, phases.parallel_ns, speedup)
    return TimingSummary(
        config.variant, config.workers, effective_threads(config.workers), repetitions,
        phases, baseline, speedup, total_speedup,
    )
