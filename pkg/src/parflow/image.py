"""Frames, points of interest and flow configuration."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class Variant(enum.Enum):
    """Interpolation reuse strategy used during half-pixel refinement."""

    ORIGINAL = "original"
    LOCAL = "local"
    GLOBAL = "global"

    @property
    def code(self) -> int:
        # integer tag understood by the compiled kernels
        return _VARIANT_CODES[self]

    @classmethod
    def parse(cls, value: "str | Variant") -> "Variant":
        if isinstance(value, Variant):
            return value
        key = value.strip().lower()
        aliases = {"localoptim": "local", "globaloptim": "global"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown variant {value!r}") from None


_VARIANT_CODES = {Variant.ORIGINAL: 0, Variant.LOCAL: 1, Variant.GLOBAL: 2}


@dataclass(frozen=True, eq=False)
class Frame:
    """Immutable 8-bit grayscale raster.

    ``data`` may be given as a flat row-major sequence of ``width * height``
    values or as a ``(height, width)`` array; it is stored as a read-only
    ``uint8`` array of shape ``(height, width)``.
    """

    width: int
    height: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"frame dimensions must be positive, got {self.width}x{self.height}")
        arr = np.asarray(self.data)
        if arr.size != self.width * self.height:
            raise ValueError(
                f"frame data has {arr.size} values, expected {self.width * self.height}"
            )
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("intensities must lie in [0, 255]")
            if np.issubdtype(arr.dtype, np.floating) and not np.all(arr == np.floor(arr)):
                raise ValueError("intensities must be integers")
        arr = np.array(arr, dtype=np.uint8).reshape(self.height, self.width)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_array(cls, arr) -> "Frame":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        return cls(arr.shape[1], arr.shape[0], arr)

    @classmethod
    def constant(cls, width: int, height: int, value: int) -> "Frame":
        return cls(width, height, np.full((height, width), value, dtype=np.uint8))

    def with_pixel(self, x: int, y: int, value: int) -> "Frame":
        """Return a copy with one pixel replaced."""
        _check_bounds(self, x, y)
        if not 0 <= value <= 255:
            raise ValueError(f"intensity {value} outside [0, 255]")
        arr = self.data.copy()
        arr[y, x] = value
        return Frame(self.width, self.height, arr)

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and np.array_equal(
            self.data, other.data
        )

    __hash__ = None


def _check_bounds(frame: Frame, x: int, y: int) -> None:
    if not (0 <= x < frame.width and 0 <= y < frame.height):
        raise IndexError(f"pixel ({x}, {y}) outside {frame.width}x{frame.height} frame")


def pixel(frame: Frame, x: int, y: int) -> int:
    _check_bounds(frame, x, y)
    return int(frame.data[y, x])


@dataclass(frozen=True)
class PoiAnchor:
    """Top-left corner of a reference patch in the first frame."""

    x: int
    y: int


DEFAULT_ANCHORS = (8, 14, 20, 26, 32, 38, 44, 50)


@dataclass(frozen=True)
class FlowConfig:
    width: int = 64
    height: int = 64
    patch: int = 8
    search_radius: int = 4
    poi_anchors_x: Sequence[int] = DEFAULT_ANCHORS
    poi_anchors_y: Sequence[int] = DEFAULT_ANCHORS
    variant: Variant = Variant.LOCAL
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "poi_anchors_x", tuple(int(a) for a in self.poi_anchors_x))
        object.__setattr__(self, "poi_anchors_y", tuple(int(a) for a in self.poi_anchors_y))
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if self.width <= 0 or self.height <= 0:
            raise ValueError("frame dimensions must be positive")
        if self.patch <= 0:
            raise ValueError("patch size must be positive")
        if self.search_radius < 0:
            raise ValueError("search radius must be non-negative")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if not self.poi_anchors_x or not self.poi_anchors_y:
            raise ValueError("at least one anchor per axis is required")
        for axis, anchors, length in (
            ("x", self.poi_anchors_x, self.width),
            ("y", self.poi_anchors_y, self.height),
        ):
            lo, hi = self.margin(length)
            for a in anchors:
                if not lo <= a <= hi:
                    raise ValueError(
                        f"{axis} anchor {a} violates the search margin: "
                        f"must lie in [{lo}, {hi}] for axis length {length}"
                    )

    def margin(self, axis_length: int) -> tuple[int, int]:
        """Inclusive range of valid anchor coordinates along an axis.

        Integer search plus the half-pixel step on either side must stay
        inside the frame.
        """
        lo = self.search_radius + 1
        hi = axis_length - 1 - (self.patch - 1) - self.search_radius - 1
        return lo, hi

    @property
    def poi_count(self) -> int:
        return len(self.poi_anchors_x) * len(self.poi_anchors_y)

    @property
    def max_displacement_hp(self) -> int:
        return 2 * self.search_radius + 1

    def anchors(self) -> list[PoiAnchor]:
        # POI index order: rows of anchors, top to bottom
        return [PoiAnchor(x, y) for y in self.poi_anchors_y for x in self.poi_anchors_x]

    def anchor_array(self) -> np.ndarray:
        return np.array([(a.x, a.y) for a in self.anchors()], dtype=np.int64).reshape(-1, 2)


def grid_anchors(length: int, count: int = 8, patch: int = 8, search_radius: int = 4) -> tuple[int, ...]:
    """Evenly spaced anchors inside the search margin of an axis.

    64-pixel axes get the default layout (8, 14, ..., 50).
    """
    if (length, count, patch, search_radius) == (64, 8, 8, 4):
        return DEFAULT_ANCHORS
    lo = search_radius + 1
    hi = length - patch - search_radius - 1
    if hi < lo:
        raise ValueError(f"axis of {length} px is too short for a {patch} px patch and +/-{search_radius} search")
    if count == 1:
        return ((lo + hi) // 2,)
    step = (hi - lo) // (count - 1)
    if step == 0:
        raise ValueError(f"cannot place {count} distinct anchors on a {length} px axis")
    start = lo + (hi - lo - step * (count - 1)) // 2
    return tuple(start + k * step for k in range(count))


def config_for_frame(width: int, height: int, **kwargs) -> FlowConfig:
    """Configuration with an evenly spaced POI grid for the given frame size."""
    patch = kwargs.get("patch", 8)
    radius = kwargs.get("search_radius", 4)
    kwargs.setdefault("poi_anchors_x", grid_anchors(width, patch=patch, search_radius=radius))
    kwargs.setdefault("poi_anchors_y", grid_anchors(height, patch=patch, search_radius=radius))
    return FlowConfig(width=width, height=height, **kwargs)


def default_config() -> FlowConfig:
    """64x64 frames, 8x8 patches, +/-4 search, 8x8 grid of anchors."""
    return FlowConfig()
