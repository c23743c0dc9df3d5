"""Frame-level flow from per-POI displacements via per-axis histograms."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .matcher import PoiFlow

DEFAULT_MAX_HP = 9
WINDOW = 2


class NoFlowError(ValueError):
    """Raised when there is no displacement evidence to aggregate."""


class Axis(enum.Enum):
    X = "x"
    Y = "y"


@dataclass(frozen=True, eq=False)
class FlowHistogram:
    """Counts of POIs per displacement; bin ``b`` holds displacement ``b - max_hp``."""

    bins: np.ndarray
    axis: Axis

    @property
    def max_hp(self) -> int:
        return (len(self.bins) - 1) // 2

    @property
    def total(self) -> int:
        return int(self.bins.sum())

    def __eq__(self, other):
        if not isinstance(other, FlowHistogram):
            return NotImplemented
        return self.axis == other.axis and np.array_equal(self.bins, other.bins)

    __hash__ = None


@dataclass(frozen=True)
class GlobalFlow:
    fx: float
    fy: float
    contributing: int


def build_histogram(flows: Sequence[PoiFlow], axis: Axis, max_hp: int = DEFAULT_MAX_HP) -> FlowHistogram:
    axis = Axis(axis)
    bins = np.zeros(2 * max_hp + 1, dtype=np.int64)
    for f in flows:
        d = f.dx_hp if axis is Axis.X else f.dy_hp
        if not -max_hp <= d <= max_hp:
            raise ValueError(f"displacement {d} hp outside [-{max_hp}, {max_hp}]")
        bins[d + max_hp] += 1
    bins.setflags(write=False)
    return FlowHistogram(bins, axis)


def peak_refine(hist: FlowHistogram) -> float:
    """Count-weighted mean displacement (pixels) within two bins of the peak.

    The peak is the lowest-index bin holding the maximum count.
    """
    bins = hist.bins
    if bins.sum() == 0:
        raise NoFlowError(f"empty {hist.axis.value} histogram")
    peak = int(np.argmax(bins))
    lo, hi = max(peak - WINDOW, 0), min(peak + WINDOW, len(bins) - 1)
    window = bins[lo : hi + 1]
    offsets = np.arange(lo, hi + 1) - hist.max_hp
    # exact integer sums, a single division at the end
    weighted = int((window * offsets).sum())
    count = int(window.sum())
    return weighted / (2 * count)


def aggregate_flow(flows: Sequence[PoiFlow], max_hp: int = DEFAULT_MAX_HP) -> GlobalFlow:
    if not flows:
        raise NoFlowError("no per-POI flows to aggregate")
    fx = peak_refine(build_histogram(flows, Axis.X, max_hp))
    fy = peak_refine(build_histogram(flows, Axis.Y, max_hp))
    return GlobalFlow(fx, fy, len(flows))
