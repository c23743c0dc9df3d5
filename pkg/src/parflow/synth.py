"""Synthetic frame pairs with known displacement, and brute-force reference matchers.

Nothing here shares code with the compiled matcher: the oracle works on
half-pixel coordinates with plain numpy arithmetic and recomputes every
interpolated sample from pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .image import FlowConfig, Frame, PoiAnchor, Variant
from .interp import WorkCounters
from .matcher import PoiFlow

TEXTURES = ("uniform", "flat", "periodic")

# refinement order: W, E, N, S, NW, NE, SW, SE as (dx, dy) half steps
HALF_STEPS = ((-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (1, -1), (-1, 1), (1, 1))


@dataclass(frozen=True)
class SynthSpec:
    width: int = 64
    height: int = 64
    shift_x_hp: int = 0
    shift_y_hp: int = 0
    noise_amplitude: int = 0
    seed: int = 0
    search_radius: int = 4
    texture: str = "uniform"

    def __post_init__(self):
        limit = 2 * self.search_radius + 1
        if abs(self.shift_x_hp) > limit or abs(self.shift_y_hp) > limit:
            raise ValueError(
                f"shift ({self.shift_x_hp}, {self.shift_y_hp}) hp exceeds the recoverable +/-{limit} hp"
            )
        if not 0 <= self.noise_amplitude <= 255:
            raise ValueError("noise amplitude must lie in [0, 255]")
        if self.texture not in TEXTURES:
            raise ValueError(f"unknown texture {self.texture!r}, expected one of {TEXTURES}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("frame dimensions must be positive")

    @property
    def pad(self) -> int:
        return self.search_radius + 2


def _canvas(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    shape = (spec.height + 2 * spec.pad, spec.width + 2 * spec.pad)
    if spec.texture == "flat":
        return np.full(shape, 128, dtype=np.int64)
    if spec.texture == "periodic":
        yy, xx = np.indices(shape)
        return ((xx + 2 * yy) % 4) * 60 + 20
    return rng.integers(0, 256, size=shape, dtype=np.int64)


def _split_shift(s: int) -> tuple[int, int]:
    """Whole-pixel part and half-step (0 or 1) with ``s == 2 * whole + half``."""
    return s // 2, s % 2


def _half_avg(a, b):
    return (a + b + 1) // 2


def generate_pair(spec: SynthSpec) -> tuple[Frame, Frame]:
    """Build a pair where frame 2 content sits ``shift`` half-pixels from frame 1.

    A seeded PCG64 stream fills a padded canvas.  Frame 2 is a crop of the
    canvas offset by the whole-pixel part of the shift.  Frame 1 is the
    centred crop, resampled half a pixel right and/or down when the shift has
    a half-pixel component, using the same rounding as the matcher.  The
    reference patch therefore has an exact zero-SAD match at the true shift.
    Noise, when requested, perturbs frame 2 only.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    canvas = _canvas(spec, rng)
    p, w, h = spec.pad, spec.width, spec.height
    kx, hx = _split_shift(spec.shift_x_hp)
    ky, hy = _split_shift(spec.shift_y_hp)

    f2 = canvas[p - ky : p - ky + h, p - kx : p - kx + w]

    def crop(dy, dx):
        return canvas[p + dy : p + dy + h, p + dx : p + dx + w]

    top = _half_avg(crop(0, 0), crop(0, 1)) if hx else crop(0, 0)
    if hy:
        bottom = _half_avg(crop(1, 0), crop(1, 1)) if hx else crop(1, 0)
        f1 = _half_avg(top, bottom)
    else:
        f1 = top

    if spec.noise_amplitude:
        noise = rng.integers(-spec.noise_amplitude, spec.noise_amplitude + 1, size=f2.shape)
        f2 = np.clip(f2 + noise, 0, 255)
    return Frame.from_array(f1), Frame.from_array(f2)


def _half_patch(img: np.ndarray, x_hp: int, y_hp: int, patch: int) -> np.ndarray:
    """Patch whose top-left sits at half-pixel coordinates ``(x_hp, y_hp)``."""
    x0, fx = divmod(x_hp, 2)
    y0, fy = divmod(y_hp, 2)

    def rows(y):
        a = img[y : y + patch, x0 : x0 + patch]
        if fx:
            a = _half_avg(a, img[y : y + patch, x0 + 1 : x0 + 1 + patch])
        return a

    out = rows(y0)
    if fy:
        out = _half_avg(out, rows(y0 + 1))
    return out


def oracle_candidates(frame1: Frame, frame2: Frame, anchor: PoiAnchor, config: FlowConfig) -> list[tuple[int, int, int]]:
    """Every candidate the matcher considers, as ``(dx_hp, dy_hp, sad)``.

    The first ``(2R+1)^2`` entries are the integer offsets in scan order
    (rows top to bottom, left to right), followed by the eight half-pixel
    neighbours of the best integer offset.
    """
    f1 = frame1.data.astype(np.int64)
    f2 = frame2.data.astype(np.int64)
    p, r = config.patch, config.search_radius
    ax, ay = anchor.x, anchor.y
    ref = f1[ay : ay + p, ax : ax + p]

    region = f2[ay - r : ay + r + p, ax - r : ax + r + p]
    windows = sliding_window_view(region, (p, p))
    sads = np.abs(windows - ref).sum(axis=(2, 3))
    cands = [
        (2 * dx, 2 * dy, int(sads[dy + r, dx + r]))
        for dy in range(-r, r + 1)
        for dx in range(-r, r + 1)
    ]

    best = min(range(len(cands)), key=lambda k: (cands[k][2], k))
    bx_hp, by_hp, _ = cands[best]
    for sx, sy in HALF_STEPS:
        x_hp, y_hp = 2 * ax + bx_hp + sx, 2 * ay + by_hp + sy
        target = _half_patch(f2, x_hp, y_hp, p)
        cands.append((bx_hp + sx, by_hp + sy, int(np.abs(target - ref).sum())))
    return cands


def oracle_match_poi(frame1: Frame, frame2: Frame, anchor: PoiAnchor, config: FlowConfig) -> PoiFlow:
    """Brute-force reference for :func:`parflow.matcher.match_poi`."""
    cands = oracle_candidates(frame1, frame2, anchor, config)
    n_int = (2 * config.search_radius + 1) ** 2
    integer, halves = cands[:n_int], cands[n_int:]
    i_best = min(integer, key=lambda c: c[2])  # min() keeps the first of equal keys
    h_best = min(halves, key=lambda c: c[2])
    if h_best[2] < i_best[2]:
        return PoiFlow(anchor, h_best[0], h_best[1], h_best[2], True)
    return PoiFlow(anchor, i_best[0], i_best[1], i_best[2], False)


def oracle_interp_counts(config: FlowConfig) -> dict[Variant, WorkCounters]:
    """Closed-form work counters for one frame pair, per variant."""
    n, p = config.poi_count, config.patch
    sads = n * ((2 * config.search_radius + 1) ** 2 + 8)
    axis_fresh = 4 * p * p  # W, E, N, S samples per POI
    diag_fresh = 4 * p * p  # NW, NE, SW, SE samples per POI
    axis_unique = 2 * p * (p + 1)  # horizontal + vertical cells around one patch
    diag_unique = (p + 1) ** 2
    cells = config.width * config.height
    return {
        Variant.ORIGINAL: WorkCounters(n * (axis_fresh + 2 * diag_fresh), n * (axis_fresh + 3 * diag_fresh), sads),
        Variant.LOCAL: WorkCounters(n * (axis_unique + 2 * diag_unique), n * (axis_unique + 3 * diag_unique), sads),
        Variant.GLOBAL: WorkCounters(3 * cells, 3 * cells, sads),
    }
