"""JSON report documents."""

from __future__ import annotations

import json
import os
import tempfile

from .perfmodel import SpeedupReport
from .pipeline import FlowResult, PhaseTiming

SCHEMA_VERSION = 1


def _timing(t: PhaseTiming) -> dict:
    return {"setup_ns": t.setup_ns, "parallel_ns": t.parallel_ns, "serial_ns": t.serial_ns, "total_ns": t.total_ns}


def report_document(
    result: FlowResult,
    width: int,
    height: int,
    timing: PhaseTiming | None = None,
    amdahl: SpeedupReport | None = None,
) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "variant": result.variant.value,
        "workers": result.workers,
        "frame": {"width": width, "height": height},
        "global_flow": {
            "fx_px": round(result.global_flow.fx, 3),
            "fy_px": round(result.global_flow.fy, 3),
        },
        "per_poi": [
            {
                "anchor_x": f.anchor.x,
                "anchor_y": f.anchor.y,
                "dx_hp": f.dx_hp,
                "dy_hp": f.dy_hp,
                "sad": f.sad,
                "refined": f.refined,
            }
            for f in result.per_poi
        ],
        "counters": result.counters.as_dict(),
        "timing": _timing(timing or result.timing),
    }
    if amdahl is not None:
        doc["amdahl"] = {"limit": round(amdahl.amdahl_limit, 3), "measured_speedup": round(amdahl.measured_speedup, 3)}
    return doc


def write_report(doc: dict, path) -> None:
    """Write ``doc`` atomically; an interrupted write leaves no partial file."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".report-", suffix=".json", dir=directory)
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
