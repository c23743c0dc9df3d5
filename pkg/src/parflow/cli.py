"""Command line entry point: ``parflow {flow,synth,counts,bench,amdahl}``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .image import Variant, config_for_frame, default_config
from .perfmodel import AmdahlInput, amdahl_from_summary, amdahl_limit, speedup_report
from .pgm import PgmError, read_pgm, write_pgm
from .pipeline import compute_flow, run_phases_timed
from .report import report_document, write_report
from .synth import SynthSpec, generate_pair, oracle_interp_counts

log = logging.getLogger("parflow")

# interpolation counts per frame reported for the reference implementation
REFERENCE_INTERP_COUNTS = {Variant.ORIGINAL: 49_152, Variant.LOCAL: 19_200, Variant.GLOBAL: 12_288}


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _workers_list(text: str) -> list[int]:
    try:
        return [_positive_int(t) for t in text.split(",") if t.strip()]
    except argparse.ArgumentTypeError as exc:
        raise argparse.ArgumentTypeError(f"bad workers list {text!r}: {exc}") from None


def _variant(text: str) -> Variant:
    try:
        return Variant.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parflow", description="Patch-based optical flow with parallel POI matching.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("flow", help="estimate flow between two PGM frames")
    p.add_argument("--frame1", required=True)
    p.add_argument("--frame2", required=True)
    p.add_argument("--variant", type=_variant, default=Variant.LOCAL)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--json", dest="json_path")

    p = sub.add_parser("synth", help="write a synthetic frame pair with known shift")
    p.add_argument("--out1", required=True)
    p.add_argument("--out2", required=True)
    p.add_argument("--shift-x-hp", type=int, required=True)
    p.add_argument("--shift-y-hp", type=int, required=True)
    p.add_argument("--noise", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=_positive_int, default=64)
    p.add_argument("--height", type=_positive_int, default=64)

    p = sub.add_parser("counts", help="interpolation counts per variant")
    p.add_argument("--variant", type=_variant, action="append")

    p = sub.add_parser("bench", help="phase timings and parallel speedup")
    p.add_argument("--workers-list", type=_workers_list, default=[1, 2, 4, 8])
    p.add_argument("--variant", type=_variant, default=Variant.LOCAL)
    p.add_argument("--iters", type=_positive_int, default=50)
    p.add_argument("--frame1")
    p.add_argument("--frame2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", dest="json_path")

    p = sub.add_parser("amdahl", help="Amdahl speedup limit")
    p.add_argument("--total", type=float, required=True)
    p.add_argument("--parallel", type=float, required=True)
    p.add_argument("--cores", type=_positive_int, required=True)
    return parser


def _load_pair(args):
    if bool(args.frame1) != bool(args.frame2):
        raise UsageError("--frame1 and --frame2 must be given together")
    if args.frame1:
        return read_pgm(args.frame1), read_pgm(args.frame2)
    return generate_pair(SynthSpec(shift_x_hp=3, shift_y_hp=-2, noise_amplitude=4, seed=args.seed))


def cmd_flow(args) -> int:
    f1, f2 = read_pgm(args.frame1), read_pgm(args.frame2)
    if (f1.width, f1.height) != (f2.width, f2.height):
        raise ValueError(f"frame sizes differ: {f1.width}x{f1.height} vs {f2.width}x{f2.height}")
    config = config_for_frame(f1.width, f1.height, variant=args.variant, workers=args.workers)
    result = compute_flow(f1, f2, config)
    if args.json_path:
        write_report(report_document(result, f1.width, f1.height), args.json_path)
    print(f"flow_px: {result.global_flow.fx:.3f} {result.global_flow.fy:.3f}")
    return 0


def cmd_synth(args) -> int:
    spec = SynthSpec(
        width=args.width, height=args.height, shift_x_hp=args.shift_x_hp, shift_y_hp=args.shift_y_hp,
        noise_amplitude=args.noise, seed=args.seed,
    )
    f1, f2 = generate_pair(spec)
    write_pgm(f1, args.out1)
    write_pgm(f2, args.out2)
    print(f"wrote {args.out1} {args.out2} shift_hp: {spec.shift_x_hp} {spec.shift_y_hp}")
    return 0


def cmd_counts(args) -> int:
    config = default_config()
    variants = args.variant or list(Variant)
    expected = oracle_interp_counts(config)
    f1, f2 = generate_pair(SynthSpec(shift_x_hp=3, shift_y_hp=-2, seed=0))
    print(f"{'variant':<10}{'measured':>10}{'expected':>10}{'reference':>11}")
    for v in variants:
        result = compute_flow(f1, f2, dataclasses.replace(config, variant=v))
        print(
            f"{v.value:<10}{result.counters.interp_paper:>10}"
            f"{expected[v].interp_paper:>10}{REFERENCE_INTERP_COUNTS[v]:>11}"
        )
    return 0


def cmd_bench(args) -> int:
    f1, f2 = _load_pair(args)
    config = config_for_frame(f1.width, f1.height, variant=args.variant)
    print(f"{'workers':>7}{'threads':>8}{'setup_us':>10}{'parallel_us':>12}{'serial_us':>10}"
          f"{'par_x':>8}{'total_x':>9}{'limit':>8}{'eff':>7}")
    sweep = []
    summary = report = None
    for w in args.workers_list:
        summary = run_phases_timed(f1, f2, dataclasses.replace(config, workers=w), repetitions=args.iters)
        report = speedup_report(summary, amdahl_from_summary(summary))
        ph = summary.phases
        print(
            f"{w:>7}{summary.threads:>8}{ph.setup_ns / 1e3:>10.1f}{ph.parallel_ns / 1e3:>12.1f}"
            f"{ph.serial_ns / 1e3:>10.1f}{summary.parallel_speedup:>8.3f}"
            f"{report.measured_speedup:>9.3f}{report.amdahl_limit:>8.3f}"
            f"{report.efficiency:>7.3f}"
        )
        sweep.append({"workers": w, "threads": summary.threads, **report.as_dict(),
                      "parallel_speedup": round(summary.parallel_speedup, 3),
                      "setup_ns": ph.setup_ns, "parallel_ns": ph.parallel_ns, "serial_ns": ph.serial_ns})
    if args.json_path:
        result = compute_flow(f1, f2, dataclasses.replace(config, workers=args.workers_list[-1]))
        doc = report_document(result, f1.width, f1.height, timing=summary.phases, amdahl=report)
        doc["sweep"] = sweep
        write_report(doc, args.json_path)
    return 0


def cmd_amdahl(args) -> int:
    limit = amdahl_limit(AmdahlInput(args.total, args.parallel, args.cores))
    print(f"{limit:.3f}")
    return 0


COMMANDS = {"flow": cmd_flow, "synth": cmd_synth, "counts": cmd_counts, "bench": cmd_bench, "amdahl": cmd_amdahl}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"parflow: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, IndexError, PgmError) as exc:
        print(f"parflow: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
