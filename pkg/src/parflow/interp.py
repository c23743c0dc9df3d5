"""Half-pixel bilinear interpolation.

Three backends produce bit-identical half-pixel samples and differ only in
how much interpolation work they repeat:

* original -- every sample is recomputed from the four (or two) pixels,
* local    -- unique samples around one matched patch are computed once,
* global   -- full-frame horizontal/vertical/diagonal planes built up front.

Counter convention: an axis sample counts as one interpolation, a diagonal
sample computed from pixels counts as two, and a diagonal plane cell composed
from the horizontal plane counts as one.  ``interp_raw`` counts the two-input
averages actually executed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numba import njit

from .image import Frame

INTERP_PAPER, INTERP_RAW, SAD_EVALS = 0, 1, 2

H_KIND, V_KIND, D_KIND = 0, 1, 2


class Direction(enum.IntEnum):
    """Half-step directions, in refinement order."""

    W = 0
    E = 1
    N = 2
    S = 3
    NW = 4
    NE = 5
    SW = 6
    SE = 7

    @property
    def step(self) -> tuple[int, int]:
        """Displacement (dx, dy) in half-pixel units."""
        return int(STEP_X[self]), int(STEP_Y[self])

    @property
    def is_diagonal(self) -> bool:
        return self >= Direction.NW


STEP_X = np.array([-1, 1, 0, 0, -1, 1, -1, 1], dtype=np.int64)
STEP_Y = np.array([0, 0, -1, 1, -1, -1, 1, 1], dtype=np.int64)
# which plane a direction samples, and the cell offset from the base pixel
DIR_KIND = np.array([H_KIND, H_KIND, V_KIND, V_KIND, D_KIND, D_KIND, D_KIND, D_KIND], dtype=np.int64)
DIR_DI = np.array([0, 0, -1, 0, -1, -1, 0, 0], dtype=np.int64)
DIR_DJ = np.array([-1, 0, 0, 0, -1, 0, -1, 0], dtype=np.int64)


class WorkCounters:
    """Interpolation and SAD work tallies.

    Backed by a small int64 array so compiled kernels can bump the counts in
    place; the attributes are views onto that array.
    """

    __slots__ = ("values",)

    def __init__(self, interp_paper: int = 0, interp_raw: int = 0, sad_evals: int = 0):
        self.values = np.array([interp_paper, interp_raw, sad_evals], dtype=np.int64)

    @classmethod
    def from_array(cls, arr) -> "WorkCounters":
        c = cls()
        c.values[:] = arr
        return c

    @property
    def interp_paper(self) -> int:
        return int(self.values[INTERP_PAPER])

    @property
    def interp_raw(self) -> int:
        return int(self.values[INTERP_RAW])

    @property
    def sad_evals(self) -> int:
        return int(self.values[SAD_EVALS])

    def as_dict(self) -> dict[str, int]:
        return {
            "interp_paper": self.interp_paper,
            "interp_raw": self.interp_raw,
            "sad_evals": self.sad_evals,
        }

    def copy(self) -> "WorkCounters":
        return WorkCounters.from_array(self.values)

    def __iadd__(self, other: "WorkCounters"):
        self.values += other.values
        return self

    def __add__(self, other: "WorkCounters") -> "WorkCounters":
        return WorkCounters.from_array(self.values + other.values)

    def __eq__(self, other):
        if not isinstance(other, WorkCounters):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values))

    __hash__ = None

    def __repr__(self):
        return "WorkCounters(interp_paper={}, interp_raw={}, sad_evals={})".format(
            self.interp_paper, self.interp_raw, self.sad_evals
        )


def avg2(a: int, b: int) -> int:
    """Round-half-up mean of two intensities."""
    if not (0 <= a <= 255 and 0 <= b <= 255):
        raise ValueError(f"intensities out of range: {a}, {b}")
    return (a + b + 1) >> 1


def diag4(tl: int, tr: int, bl: int, br: int) -> int:
    """Centre of a 2x2 block: horizontal pairs first, then vertical."""
    return avg2(avg2(tl, tr), avg2(bl, br))


@dataclass(frozen=True, eq=False)
class HalfPixelPlanes:
    """Precomputed half-pixel rasters for a whole frame.

    ``stack[0]`` is the horizontal plane, ``stack[1]`` vertical and
    ``stack[2]`` diagonal, each ``(height, width)`` uint8.  Border cells use
    clamped neighbour indices.
    """

    stack: np.ndarray

    @property
    def h_plane(self) -> np.ndarray:
        return self.stack[H_KIND]

    @property
    def v_plane(self) -> np.ndarray:
        return self.stack[V_KIND]

    @property
    def d_plane(self) -> np.ndarray:
        return self.stack[D_KIND]


class LocalCache:
    """Unique half-pixel samples around one matched patch.

    The window spans ``(patch + 1) x (patch + 1)`` cells per plane kind with
    its top-left one cell up and left of the base pixel.  :meth:`anchor_on`
    computes every cell the eight half-pixel shifts of the patch can read
    (each charged once, as a fresh computation); later lookups are free.
    """

    def __init__(self, patch: int = 8):
        self.patch = patch
        self.values = np.zeros((3, patch + 1, patch + 1), dtype=np.int64)
        self.filled = np.zeros((3, patch + 1, patch + 1), dtype=np.bool_)
        self.origin_y = 0
        self.origin_x = 0
        self.frame: Frame | None = None

    def anchor_on(self, frame: Frame, base_x: int, base_y: int, counters: "WorkCounters | None" = None) -> None:
        p = self.patch
        if base_x < 1 or base_y < 1 or base_x + p + 1 > frame.width or base_y + p + 1 > frame.height:
            raise IndexError(f"patch at ({base_x}, {base_y}) has no half-pixel margin in the frame")
        cnt = counters.values if counters is not None else np.zeros(3, dtype=np.int64)
        self.origin_x, self.origin_y = base_x - 1, base_y - 1
        fill_local_kernel(frame.data, self.values, self.origin_y, self.origin_x, p, cnt)
        self.filled[:] = False
        self.filled[H_KIND, 1:, :] = True
        self.filled[V_KIND, :, 1:] = True
        self.filled[D_KIND] = True
        self.frame = frame

    @property
    def unique_count(self) -> int:
        return int(self.filled.sum())


# ---------------------------------------------------------------------------
# compiled kernels


@njit(cache=True, nogil=True, inline="always")
def _avg2(a, b):
    return (a + b + 1) >> 1


@njit(cache=True, nogil=True)
def cell_from_pixels(img, kind, i, j, cnt):
    """Half-pixel cell ``(i, j)`` of the given plane kind, computed afresh."""
    if kind == H_KIND:
        cnt[INTERP_PAPER] += 1
        cnt[INTERP_RAW] += 1
        return _avg2(np.int64(img[i, j]), np.int64(img[i, j + 1]))
    if kind == V_KIND:
        cnt[INTERP_PAPER] += 1
        cnt[INTERP_RAW] += 1
        return _avg2(np.int64(img[i, j]), np.int64(img[i + 1, j]))
    cnt[INTERP_PAPER] += 2
    cnt[INTERP_RAW] += 3
    top = _avg2(np.int64(img[i, j]), np.int64(img[i, j + 1]))
    bottom = _avg2(np.int64(img[i + 1, j]), np.int64(img[i + 1, j + 1]))
    return _avg2(top, bottom)


@njit(cache=True, nogil=True)
def half_original(img, d, i, j, cnt):
    return cell_from_pixels(img, DIR_KIND[d], i + DIR_DI[d], j + DIR_DJ[d], cnt)


@njit(cache=True, nogil=True)
def fill_local_kernel(img, cvals, oy, ox, patch, cnt):
    """Compute the unique cells read by the eight half-pixel shifts of a patch."""
    for li in range(1, patch + 1):
        for lj in range(patch + 1):
            cvals[H_KIND, li, lj] = cell_from_pixels(img, H_KIND, oy + li, ox + lj, cnt)
    for li in range(patch + 1):
        for lj in range(1, patch + 1):
            cvals[V_KIND, li, lj] = cell_from_pixels(img, V_KIND, oy + li, ox + lj, cnt)
    for li in range(patch + 1):
        for lj in range(patch + 1):
            cvals[D_KIND, li, lj] = cell_from_pixels(img, D_KIND, oy + li, ox + lj, cnt)


@njit(cache=True, nogil=True)
def half_local(cvals, oy, ox, d, i, j):
    return cvals[DIR_KIND[d], i + DIR_DI[d] - oy, j + DIR_DJ[d] - ox]


@njit(cache=True, nogil=True)
def half_plane(planes, d, i, j):
    return np.int64(planes[DIR_KIND[d], i + DIR_DI[d], j + DIR_DJ[d]])


@njit(cache=True, nogil=True)
def build_planes_kernel(img, planes, cnt):
    height, width = img.shape
    for i in range(height):
        for j in range(width):
            j1 = min(j + 1, width - 1)
            planes[H_KIND, i, j] = _avg2(np.int64(img[i, j]), np.int64(img[i, j1]))
            cnt[INTERP_PAPER] += 1
            cnt[INTERP_RAW] += 1
    for i in range(height):
        i1 = min(i + 1, height - 1)
        for j in range(width):
            planes[V_KIND, i, j] = _avg2(np.int64(img[i, j]), np.int64(img[i1, j]))
            cnt[INTERP_PAPER] += 1
            cnt[INTERP_RAW] += 1
    for i in range(height):
        i1 = min(i + 1, height - 1)
        for j in range(width):
            planes[D_KIND, i, j] = _avg2(np.int64(planes[H_KIND, i, j]), np.int64(planes[H_KIND, i1, j]))
            cnt[INTERP_PAPER] += 1
            cnt[INTERP_RAW] += 1


# ---------------------------------------------------------------------------
# Python surface


def build_planes(frame: Frame, counters: WorkCounters | None = None) -> HalfPixelPlanes:
    """Compute every half-pixel value of ``frame`` once."""
    cnt = counters.values if counters is not None else np.zeros(3, dtype=np.int64)
    stack = np.empty((3, frame.height, frame.width), dtype=np.uint8)
    build_planes_kernel(frame.data, stack, cnt)
    stack.setflags(write=False)
    return HalfPixelPlanes(stack)


def _cell(frame: Frame, direction: Direction, i: int, j: int) -> tuple[int, int, int]:
    kind = int(DIR_KIND[direction])
    ci, cj = i + int(DIR_DI[direction]), j + int(DIR_DJ[direction])
    last_i = frame.height - (1 if kind == H_KIND else 2)
    last_j = frame.width - (1 if kind == V_KIND else 2)
    if not (0 <= ci <= last_i and 0 <= cj <= last_j):
        raise IndexError(
            f"half-pixel {direction.name} of ({i}, {j}) leaves the {frame.width}x{frame.height} frame"
        )
    return kind, ci, cj


def half_pixel(
    frame: Frame,
    source: HalfPixelPlanes | LocalCache | None,
    direction: Direction | int,
    i: int,
    j: int,
    counters: WorkCounters | None = None,
) -> int:
    """Sample half a pixel from row ``i``, column ``j`` towards ``direction``.

    ``source`` selects the backend: ``None`` recomputes from pixels, a
    :class:`LocalCache` (already anchored on ``frame``) is a lookup, and
    :class:`HalfPixelPlanes` is a plain lookup (free, since the planes were
    paid for when built).
    """
    direction = Direction(direction)
    kind, ci, cj = _cell(frame, direction, i, j)
    cnt = counters.values if counters is not None else np.zeros(3, dtype=np.int64)
    if source is None:
        return int(half_original(frame.data, int(direction), i, j, cnt))
    if isinstance(source, HalfPixelPlanes):
        if source.stack.shape[1:] != frame.data.shape:
            raise ValueError("planes were built for a different frame size")
        return int(half_plane(source.stack, int(direction), i, j))
    if isinstance(source, LocalCache):
        if source.frame is not frame:
            raise ValueError("local cache was filled from a different frame")
        li, lj = ci - source.origin_y, cj - source.origin_x
        if not (0 <= li <= source.patch and 0 <= lj <= source.patch and source.filled[kind, li, lj]):
            raise IndexError(f"cell ({ci}, {cj}) outside the local cache window")
        return int(half_local(source.values, source.origin_y, source.origin_x, int(direction), i, j))
    raise TypeError(f"unsupported interpolation source {type(source).__name__}")
