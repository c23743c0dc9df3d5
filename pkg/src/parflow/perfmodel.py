"""Amdahl's-law limits and speedup reports.

Work units are abstract: cycle counts, nanoseconds or counter totals all work
as long as one report uses a single unit throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pipeline import TimingSummary


@dataclass(frozen=True)
class AmdahlInput:
    total_work: float
    parallel_work: float
    cores: int

    def __post_init__(self):
        if self.cores < 1:
            raise ValueError(f"cores must be >= 1, got {self.cores}")
        if self.parallel_work < 0 or self.total_work < 0:
            raise ValueError("work figures must be non-negative")
        if self.parallel_work > self.total_work:
            raise ValueError(
                f"parallel work {self.parallel_work} exceeds total work {self.total_work}"
            )

    @property
    def serial_work(self) -> float:
        return self.total_work - self.parallel_work


def amdahl_limit(inp: AmdahlInput) -> float:
    """Upper bound on speedup when only ``parallel_work`` scales with cores."""
    if inp.total_work == 0:
        return 1.0
    return inp.total_work / (inp.serial_work + inp.parallel_work / inp.cores)


def ideal_parallel_work(parallel_work: float, cores: int) -> float:
    if cores < 1:
        raise ValueError(f"cores must be >= 1, got {cores}")
    return parallel_work / cores


@dataclass(frozen=True)
class SpeedupReport:
    cores: int
    measured_speedup: float
    amdahl_limit: float
    efficiency: float

    def as_dict(self) -> dict:
        return {
            "cores": self.cores,
            "measured_speedup": round(self.measured_speedup, 3),
            "limit": round(self.amdahl_limit, 3),
            "efficiency": round(self.efficiency, 3),
        }


def speedup_report(measured: TimingSummary | float, modeled: AmdahlInput) -> SpeedupReport:
    """Compare a measured speedup with the Amdahl limit of ``modeled``.

    ``measured`` is either a bare speedup factor or a timing summary from
    :func:`parflow.pipeline.run_phases_timed`, whose whole-run speedup is
    used since the limit bounds whole runs.
    """
    speedup = measured.total_speedup if isinstance(measured, TimingSummary) else float(measured)
    limit = amdahl_limit(modeled)
    return SpeedupReport(modeled.cores, speedup, limit, speedup / limit)


def amdahl_from_summary(summary: TimingSummary) -> AmdahlInput:
    """Model built from the single-worker phase times of a timing summary."""
    base = summary.baseline
    total = base.setup_ns + base.parallel_ns + base.serial_ns
    return AmdahlInput(total, base.parallel_ns, summary.workers)
