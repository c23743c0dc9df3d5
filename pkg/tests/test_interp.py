import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parflow import Direction, Frame, LocalCache, WorkCounters, avg2, build_planes, diag4, half_pixel

intensity = st.integers(0, 255)


def _avg(a, b):
    return (a + b + 1) // 2


def oracle_half(img, direction, i, j):
    """Half-pixel value by position: (row, col) offsets of +/- one half step."""
    sx, sy = direction.step
    # rows / cols bracketing the half position
    cols = (j, j + 1) if sx > 0 else (j - 1, j) if sx < 0 else (j,)
    rows = (i, i + 1) if sy > 0 else (i - 1, i) if sy < 0 else (i,)
    def row_value(r):
        vals = [int(img[r, c]) for c in cols]
        return vals[0] if len(vals) == 1 else _avg(*vals)
    rv = [row_value(r) for r in rows]
    return rv[0] if len(rv) == 1 else _avg(*rv)


def test_avg2_examples():
    assert avg2(0, 0) == 0
    assert avg2(10, 11) == 11
    assert avg2(255, 255) == 255
    with pytest.raises(ValueError):
        avg2(-1, 3)


@given(intensity, intensity)
def test_avg2_symmetric_and_bounded(a, b):
    m = avg2(a, b)
    assert m == avg2(b, a)
    assert min(a, b) <= m <= max(a, b)


def test_diag4_examples():
    assert diag4(0, 0, 0, 0) == 0
    assert diag4(0, 0, 0, 1) == 1
    assert diag4(100, 100, 100, 100) == 100


def test_diag4_is_not_the_direct_quarter_formula():
    # horizontal-first composition: avg2(avg2(0,1), avg2(0,0)) = avg2(1, 0) = 1,
    # while (0+1+0+0+2)//4 = 0
    assert diag4(0, 1, 0, 0) == 1


def test_build_planes_counts_and_constant():
    counters = WorkCounters()
    planes = build_planes(Frame.constant(64, 64, 77), counters)
    assert counters.interp_paper == 12_288
    assert counters.interp_raw == 12_288
    assert counters.sad_evals == 0
    for plane in (planes.h_plane, planes.v_plane, planes.d_plane):
        assert plane.shape == (64, 64)
        assert np.all(plane == 77)


def test_build_planes_matches_cellwise_oracle(rng):
    img = rng.integers(0, 256, size=(13, 17))
    planes = build_planes(Frame.from_array(img))
    h, w = img.shape
    for i in range(h):
        for j in range(w):
            i1, j1 = min(i + 1, h - 1), min(j + 1, w - 1)
            hv = _avg(img[i, j], img[i, j1])
            assert planes.h_plane[i, j] == hv
            assert planes.v_plane[i, j] == _avg(img[i, j], img[i1, j])
            assert planes.d_plane[i, j] == _avg(hv, _avg(img[i1, j], img[i1, j1]))
            lo = min(img[i, j], img[i, j1], img[i1, j], img[i1, j1])
            hi = max(img[i, j], img[i, j1], img[i1, j], img[i1, j1])
            assert lo <= planes.d_plane[i, j] <= hi
            if i < h - 1 and j < w - 1:
                assert planes.d_plane[i, j] == diag4(*(int(v) for v in (img[i, j], img[i, j1], img[i1, j], img[i1, j1])))


def test_half_pixel_definitions(rng):
    frame = Frame.from_array(rng.integers(0, 256, size=(10, 10)))
    img = frame.data.astype(int)
    assert half_pixel(frame, None, Direction.E, 4, 5) == avg2(img[4, 5], img[4, 6])
    assert half_pixel(frame, None, Direction.SE, 4, 5) == diag4(img[4, 5], img[4, 6], img[5, 5], img[5, 6])


def test_original_backend_charges_per_call(rng):
    frame = Frame.from_array(rng.integers(0, 256, size=(10, 10)))
    c = WorkCounters()
    half_pixel(frame, None, Direction.W, 4, 4, c)
    assert (c.interp_paper, c.interp_raw) == (1, 1)
    half_pixel(frame, None, Direction.NE, 4, 4, c)
    assert (c.interp_paper, c.interp_raw) == (3, 4)
    half_pixel(frame, None, Direction.NE, 4, 4, c)
    assert (c.interp_paper, c.interp_raw) == (5, 7)


def test_local_cache_charges_unique_cells_once(rng):
    frame = Frame.from_array(rng.integers(0, 256, size=(20, 20)))
    cache = LocalCache(8)
    c = WorkCounters()
    cache.anchor_on(frame, 5, 6, c)
    assert cache.unique_count == 72 + 72 + 81
    assert c.interp_paper == 72 + 72 + 2 * 81
    assert c.interp_raw == 72 + 72 + 3 * 81
    before = c.copy()
    for d in Direction:
        for r in range(8):
            for col in range(8):
                half_pixel(frame, cache, d, 6 + r, 5 + col, c)
    assert c == before


def test_local_cache_rejects_foreign_cells(rng):
    frame = Frame.from_array(rng.integers(0, 256, size=(20, 20)))
    cache = LocalCache(8)
    cache.anchor_on(frame, 5, 6)
    with pytest.raises(IndexError):
        half_pixel(frame, cache, Direction.E, 6, 14)
    # horizontal cell in the row above the patch is never needed
    with pytest.raises(IndexError):
        half_pixel(frame, cache, Direction.E, 5, 5)
    with pytest.raises(ValueError):
        half_pixel(Frame.constant(20, 20, 0), cache, Direction.E, 6, 5)


def test_plane_lookups_are_free(rng):
    frame = Frame.from_array(rng.integers(0, 256, size=(12, 12)))
    planes = build_planes(frame)
    c = WorkCounters()
    for d in Direction:
        half_pixel(frame, planes, d, 5, 5, c)
    assert c == WorkCounters()


@pytest.mark.parametrize("direction,i,j", [(Direction.W, 3, 0), (Direction.E, 3, 9), (Direction.N, 0, 3),
                                           (Direction.SE, 9, 3), (Direction.NW, 0, 0)])
def test_half_pixel_margin_violation(direction, i, j):
    frame = Frame.constant(10, 10, 3)
    for source in (None, build_planes(frame)):
        with pytest.raises(IndexError):
            half_pixel(frame, source, direction, i, j)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_backends_bit_identical(seed):
    rng = np.random.default_rng(seed)
    frame = Frame.from_array(rng.integers(0, 256, size=(14, 15)))
    planes = build_planes(frame)
    img = frame.data
    for by, bx in itertools.product(range(1, 14 - 9), range(1, 15 - 9)):
        cache = LocalCache(8)
        cache.anchor_on(frame, bx, by)
        for d in Direction:
            for r in range(8):
                for col in range(8):
                    i, j = by + r, bx + col
                    expected = oracle_half(img, d, i, j)
                    assert half_pixel(frame, None, d, i, j) == expected
                    assert half_pixel(frame, cache, d, i, j) == expected
                    assert half_pixel(frame, planes, d, i, j) == expected


def test_work_counters_arithmetic():
    a = WorkCounters(1, 2, 3)
    b = WorkCounters(10, 20, 30)
    assert a + b == WorkCounters(11, 22, 33)
    a += b
    assert a.as_dict() == {"interp_paper": 11, "interp_raw": 22, "sad_evals": 33}
