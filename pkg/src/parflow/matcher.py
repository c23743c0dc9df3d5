"""SAD block matching with half-pixel refinement, one point of interest at a time."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
    import numba

    # skips probing an outdated TBB, which only emits a warning
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

from numba import njit, prange

from .image import FlowConfig, Frame, PoiAnchor, Variant
from .interp import (
    SAD_EVALS,
    STEP_X,
    STEP_Y,
    Direction,
    HalfPixelPlanes,
    LocalCache,
    WorkCounters,
    build_planes,
    fill_local_kernel,
    half_local,
    half_original,
    half_plane,
)

ORIGINAL, LOCAL, GLOBAL = 0, 1, 2
_NO_SAD = np.iinfo(np.int64).max


@dataclass(frozen=True)
class PoiFlow:
    """Best displacement of one reference patch, in half-pixel units."""

    anchor: PoiAnchor
    dx_hp: int
    dy_hp: int
    sad: int
    refined: bool

    @property
    def dx_px(self) -> float:
        return self.dx_hp / 2

    @property
    def dy_px(self) -> float:
        return self.dy_hp / 2


@njit(cache=True, nogil=True)
def sad_kernel(f1, ax, ay, f2, px, py, patch, cnt):
    total = 0
    for r in range(patch):
        for c in range(patch):
            total += abs(np.int64(f1[ay + r, ax + c]) - np.int64(f2[py + r, px + c]))
    cnt[SAD_EVALS] += 1
    return total


@njit(cache=True, nogil=True)
def _sad_half_original(f1, ax, ay, f2, bx, by, d, patch, cnt):
    total = 0
    for r in range(patch):
        for c in range(patch):
            v = half_original(f2, d, by + r, bx + c, cnt)
            total += abs(np.int64(f1[ay + r, ax + c]) - v)
    cnt[SAD_EVALS] += 1
    return total


@njit(cache=True, nogil=True)
def _sad_half_local(f1, ax, ay, bx, by, d, patch, cvals, oy, ox, cnt):
    total = 0
    for r in range(patch):
        for c in range(patch):
            v = half_local(cvals, oy, ox, d, by + r, bx + c)
            total += abs(np.int64(f1[ay + r, ax + c]) - v)
    cnt[SAD_EVALS] += 1
    return total


@njit(cache=True, nogil=True)
def _sad_half_plane(f1, ax, ay, planes, bx, by, d, patch, cnt):
    total = 0
    for r in range(patch):
        for c in range(patch):
            v = half_plane(planes, d, by + r, bx + c)
            total += abs(np.int64(f1[ay + r, ax + c]) - v)
    cnt[SAD_EVALS] += 1
    return total


@njit(cache=True, nogil=True)
def sad_half_kernel(f1, ax, ay, f2, bx, by, d, patch, variant, planes, cvals, oy, ox, cnt):
    if variant == ORIGINAL:
        return _sad_half_original(f1, ax, ay, f2, bx, by, d, patch, cnt)
    if variant == LOCAL:
        return _sad_half_local(f1, ax, ay, bx, by, d, patch, cvals, oy, ox, cnt)
    return _sad_half_plane(f1, ax, ay, planes, bx, by, d, patch, cnt)


@njit(cache=True, nogil=True)
def integer_search_kernel(f1, f2, ax, ay, patch, radius, cnt):
    """Best whole-pixel offset; the first strict minimum in row-major scan wins."""
    best = _NO_SAD
    best_dx = 0
    best_dy = 0
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            s = sad_kernel(f1, ax, ay, f2, ax + dx, ay + dy, patch, cnt)
            if s < best:
                best = s
                best_dx = dx
                best_dy = dy
    return best_dx, best_dy, best


@njit(cache=True, nogil=True)
def match_poi_kernel(f1, f2, ax, ay, patch, radius, variant, planes, cvals, cnt):
    best_dx, best_dy, best = integer_search_kernel(f1, f2, ax, ay, patch, radius, cnt)

    bx = ax + best_dx
    by = ay + best_dy
    # the local cache window starts one cell up-left of the matched patch
    oy = by - 1
    ox = bx - 1
    if variant == LOCAL:
        fill_local_kernel(f2, cvals, oy, ox, patch, cnt)

    half_best = _NO_SAD
    half_dir = -1
    for d in range(8):
        s = sad_half_kernel(f1, ax, ay, f2, bx, by, d, patch, variant, planes, cvals, oy, ox, cnt)
        if s < half_best:
            half_best = s
            half_dir = d

    dx_hp = 2 * best_dx
    dy_hp = 2 * best_dy
    if half_best < best:
        return dx_hp + STEP_X[half_dir], dy_hp + STEP_Y[half_dir], half_best, True
    return dx_hp, dy_hp, best, False


@njit(cache=True, nogil=True)
def match_block_kernel(f1, f2, anchors, start, stop, patch, radius, variant, planes, out, cnt):
    cvals = np.zeros((3, patch + 1, patch + 1), dtype=np.int64)
    for k in range(start, stop):
        if patch == 8:
            # constant patch lets the compiler unroll and vectorise the SAD rows
            dx_hp, dy_hp, s, refined = match_poi_kernel(
                f1, f2, anchors[k, 0], anchors[k, 1], 8, radius, variant, planes, cvals, cnt
            )
        else:
            dx_hp, dy_hp, s, refined = match_poi_kernel(
                f1, f2, anchors[k, 0], anchors[k, 1], patch, radius, variant, planes, cvals, cnt
            )
        out[k, 0] = dx_hp
        out[k, 1] = dy_hp
        out[k, 2] = s
        out[k, 3] = 1 if refined else 0


@njit(cache=True, parallel=True)
def match_blocks_parallel(f1, f2, anchors, bounds, patch, radius, variant, planes, out, counters):
    """Run each contiguous POI block ``bounds[b]:bounds[b+1]`` as one task.

    Every block owns its output rows and its own counter row, so no state is
    shared between tasks.
    """
    for b in prange(bounds.shape[0] - 1):
        match_block_kernel(
            f1, f2, anchors, bounds[b], bounds[b + 1], patch, radius, variant, planes, out, counters[b]
        )


NO_PLANES = np.zeros((3, 1, 1), dtype=np.uint8)


def _counter_array(counters: WorkCounters | None) -> np.ndarray:
    return counters.values if counters is not None else np.zeros(3, dtype=np.int64)


def _check_patch(frame: Frame, x: int, y: int, patch: int, margin: int = 0) -> None:
    if x - margin < 0 or y - margin < 0 or x + patch + margin > frame.width or y + patch + margin > frame.height:
        raise IndexError(f"{patch}x{patch} patch at ({x}, {y}) leaves the {frame.width}x{frame.height} frame")


def sad(
    frame1: Frame,
    anchor1: PoiAnchor,
    frame2: Frame,
    pos2: tuple[int, int],
    patch: int = 8,
    counters: WorkCounters | None = None,
) -> int:
    """Sum of absolute differences between two equally sized patches.

    ``pos2`` is the ``(x, y)`` top-left of the candidate patch in ``frame2``.
    """
    _check_patch(frame1, anchor1.x, anchor1.y, patch)
    _check_patch(frame2, pos2[0], pos2[1], patch)
    return int(sad_kernel(frame1.data, anchor1.x, anchor1.y, frame2.data, pos2[0], pos2[1], patch, _counter_array(counters)))


def sad_half(
    frame1: Frame,
    anchor1: PoiAnchor,
    frame2: Frame,
    base_pos: tuple[int, int],
    direction: Direction | int,
    source: HalfPixelPlanes | LocalCache | None = None,
    counters: WorkCounters | None = None,
    patch: int = 8,
) -> int:
    """SAD against the candidate patch shifted half a pixel from ``base_pos``.

    ``source`` picks the interpolation backend exactly as in
    :func:`parflow.interp.half_pixel`.  A :class:`LocalCache` must already be
    anchored on ``base_pos`` of ``frame2``.
    """
    direction = Direction(direction)
    bx, by = base_pos
    _check_patch(frame1, anchor1.x, anchor1.y, patch)
    _check_patch(frame2, bx, by, patch, margin=1)
    cnt = _counter_array(counters)
    if source is None:
        variant, planes, cache = ORIGINAL, NO_PLANES, LocalCache(patch)
    elif isinstance(source, LocalCache):
        if source.patch != patch:
            raise ValueError("local cache was sized for a different patch")
        if source.frame is not frame2 or (source.origin_x, source.origin_y) != (bx - 1, by - 1):
            raise ValueError("local cache is not anchored on this base position of frame2")
        variant, planes, cache = LOCAL, NO_PLANES, source
    elif isinstance(source, HalfPixelPlanes):
        if source.stack.shape[1:] != frame2.data.shape:
            raise ValueError("planes were built for a different frame size")
        variant, planes, cache = GLOBAL, source.stack, LocalCache(patch)
    else:
        raise TypeError(f"unsupported interpolation source {type(source).__name__}")
    return int(
        sad_half_kernel(
            frame1.data, anchor1.x, anchor1.y, frame2.data, bx, by, int(direction), patch,
            variant, planes, cache.values, cache.origin_y, cache.origin_x, cnt,
        )
    )


def _check_margins(frame: Frame, anchor: PoiAnchor, config: FlowConfig) -> None:
    for coord, length in ((anchor.x, frame.width), (anchor.y, frame.height)):
        lo, hi = config.margin(length)
        if not lo <= coord <= hi:
            raise IndexError(f"anchor {anchor} violates the search margin of a {frame.width}x{frame.height} frame")


def match_poi(
    frame1: Frame,
    frame2: Frame,
    anchor: PoiAnchor,
    config: FlowConfig,
    planes: HalfPixelPlanes | None = None,
    counters: WorkCounters | None = None,
) -> PoiFlow:
    """Estimate the displacement of the patch at ``anchor``.

    All ``(2R+1)^2`` integer offsets are scanned row by row (first strict
    minimum wins), then the eight half-pixel neighbours of the winner are
    tried in :class:`Direction` order.  A half-pixel candidate is taken only
    if it strictly beats the integer score.

    For the global variant ``planes`` are built from ``frame2`` (and charged
    to ``counters``) when not supplied.
    """
    if frame1.data.shape != frame2.data.shape:
        raise ValueError("frames differ in size")
    _check_margins(frame2, anchor, config)
    cnt = _counter_array(counters)
    variant = config.variant.code
    stack = NO_PLANES
    if config.variant is Variant.GLOBAL:
        if planes is None:
            planes = build_planes(frame2, counters)
        stack = planes.stack
    cvals = np.zeros((3, config.patch + 1, config.patch + 1), dtype=np.int64)
    dx_hp, dy_hp, s, refined = match_poi_kernel(
        frame1.data, frame2.data, anchor.x, anchor.y, config.patch, config.search_radius,
        variant, stack, cvals, cnt,
    )
    return PoiFlow(anchor, int(dx_hp), int(dy_hp), int(s), bool(refined))
