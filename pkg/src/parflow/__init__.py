"""Patch-based optical flow with SAD block matching, half-pixel refinement and
data-parallel point-of-interest processing."""

from .aggregate import FlowHistogram, GlobalFlow, NoFlowError, aggregate_flow, build_histogram, peak_refine
from .image import FlowConfig, Frame, PoiAnchor, Variant, config_for_frame, default_config, pixel
from .interp import Direction, HalfPixelPlanes, LocalCache, WorkCounters, avg2, build_planes, diag4, half_pixel
from .matcher import PoiFlow, match_poi, sad, sad_half
from .perfmodel import AmdahlInput, amdahl_limit, ideal_parallel_work, speedup_report
from .pgm import PgmError, read_pgm, write_pgm
from .pipeline import FlowResult, compute_flow, run_phases_timed
from .synth import SynthSpec, generate_pair, oracle_interp_counts, oracle_match_poi

__all__ = [
    "AmdahlInput", "Direction", "FlowConfig", "FlowHistogram", "FlowResult", "Frame", "GlobalFlow",
    "HalfPixelPlanes", "LocalCache", "NoFlowError", "PgmError", "PoiAnchor", "PoiFlow", "SynthSpec", "Variant",
    "WorkCounters", "aggregate_flow", "amdahl_limit", "avg2", "build_histogram", "build_planes", "compute_flow",
    "config_for_frame", "default_config", "diag4", "generate_pair", "half_pixel", "ideal_parallel_work",
    "match_poi", "oracle_interp_counts", "oracle_match_poi", "peak_refine", "pixel", "read_pgm",
    "run_phases_timed", "sad", "sad_half", "speedup_report", "write_pgm",
]

__version__ = "0.1.0"
