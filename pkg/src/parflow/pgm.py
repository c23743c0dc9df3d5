"""Binary PGM (P5, maxval 255) reading and writing."""

from __future__ import annotations

import os

import numpy as np

from .image import Frame

_WHITESPACE = b" \t\r\n\v\f"


class PgmError(ValueError):
    pass


def _header_fields(data: bytes, count: int, pos: int) -> tuple[list[int], int]:
    fields = []
    while len(fields) < count:
        while pos < len(data) and data[pos] in _WHITESPACE:
            pos += 1
        if pos < len(data) and data[pos] == ord("#"):
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
            continue
        if pos >= len(data):
            raise PgmError("truncated header: expected width, height and maxval")
        start = pos
        while pos < len(data) and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise PgmError(f"malformed header field {token[:16]!r}")
        fields.append(int(token))
    return fields, pos


def read_pgm(path) -> Frame:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such PGM file: {path}")
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] != b"P5" or (len(data) > 2 and data[2] not in _WHITESPACE):
        raise PgmError(f"not a binary PGM: bad magic {data[:2]!r}")
    (width, height, maxval), pos = _header_fields(data, 3, 2)
    if maxval != 255:
        raise PgmError(f"unsupported maxval {maxval}: only 8-bit (255) images are accepted")
    if width == 0 or height == 0:
        raise PgmError(f"degenerate image size {width}x{height}")
    if pos >= len(data):
        raise PgmError(f"truncated payload: expected {width * height} bytes, got 0")
    # exactly one whitespace byte separates maxval from the raster
    payload = data[pos + 1 : pos + 1 + width * height]
    if len(payload) < width * height:
        raise PgmError(f"truncated payload: expected {width * height} bytes, got {len(payload)}")
    return Frame(width, height, np.frombuffer(payload, dtype=np.uint8))


def write_pgm(frame: Frame, path) -> None:
    if not path:
        raise FileNotFoundError("empty output path")
    header = b"P5\n%d %d\n255\n" % (frame.width, frame.height)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(frame.data).tobytes())
