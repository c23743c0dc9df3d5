import dataclasses

import pytest

from parflow import FlowConfig, Variant, compute_flow, run_phases_timed
from parflow.pipeline import block_bounds
from parflow.synth import SynthSpec, generate_pair, oracle_interp_counts

from conftest import random_frame


@pytest.mark.parametrize("n,w,expected", [(64, 8, [0, 8, 16, 24, 32, 40, 48, 56, 64]),
                                          (64, 5, [0, 13, 26, 39, 52, 64]),
                                          (3, 5, [0, 1, 2, 3, 3, 3])])
def test_block_bounds(n, w, expected):
    assert block_bounds(n, w).tolist() == expected


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("workers", [1, 8])
def test_identical_frames(rng, variant, workers):
    f = random_frame(rng)
    r = compute_flow(f, f, FlowConfig(variant=variant, workers=workers))
    assert (r.global_flow.fx, r.global_flow.fy) == (0.0, 0.0)
    assert all(p.sad == 0 for p in r.per_poi)
    assert len(r.per_poi) == 64 and r.workers == workers and r.variant is variant


def test_shifted_pair_all_variants():
    f1, f2 = generate_pair(SynthSpec(shift_x_hp=4, shift_y_hp=-2, seed=11))
    results = [compute_flow(f1, f2, FlowConfig(variant=v)) for v in Variant]
    for r in results:
        assert (r.global_flow.fx, r.global_flow.fy) == (2.0, -1.0)
        assert r.per_poi == results[0].per_poi


def test_counters_follow_closed_forms(rng):
    cfg = FlowConfig()
    expected = oracle_interp_counts(cfg)
    f1, f2 = random_frame(rng), random_frame(rng)
    for v in Variant:
        assert compute_flow(f1, f2, dataclasses.replace(cfg, variant=v, workers=4)).counters == expected[v]


def test_non_default_geometry_counters(rng):
    cfg = FlowConfig(width=48, height=40, patch=6, search_radius=3, poi_anchors_x=(4, 20, 35),
                     poi_anchors_y=(4, 25), workers=3)
    f1 = random_frame(rng, width=48, height=40)
    f2 = random_frame(rng, width=48, height=40)
    expected = oracle_interp_counts(cfg)
    for v in Variant:
        r = compute_flow(f1, f2, dataclasses.replace(cfg, variant=v))
        assert r.counters == expected[v]
        assert all(abs(p.dx_hp) <= 7 for p in r.per_poi)


def test_counter_additivity_across_workers(rng):
    f1, f2 = random_frame(rng), random_frame(rng)
    single = compute_flow(f1, f2, FlowConfig(workers=1)).counters
    for w in (2, 3, 8, 64, 100):
        assert compute_flow(f1, f2, FlowConfig(workers=w)).counters == single


def test_dimension_mismatch(rng):
    with pytest.raises(ValueError, match="config expects"):
        compute_flow(random_frame(rng, width=32), random_frame(rng, width=32), FlowConfig())


def test_determinism(rng):
    f1, f2 = random_frame(rng), random_frame(rng)
    a = compute_flow(f1, f2, FlowConfig(variant="global", workers=4))
    b = compute_flow(f1, f2, FlowConfig(variant="global", workers=4))
    assert a.same_flow(b)


def test_timing_phases_sum_to_total(rng):
    f1, f2 = random_frame(rng), random_frame(rng)
    t = compute_flow(f1, f2, FlowConfig()).timing
    assert t.setup_ns + t.parallel_ns + t.serial_ns == t.total_ns
    assert min(t.setup_ns, t.parallel_ns, t.serial_ns) >= 0


def test_run_phases_timed(rng):
    f1, f2 = random_frame(rng), random_frame(rng)
    one = run_phases_timed(f1, f2, FlowConfig(workers=1), repetitions=1)
    assert one.parallel_speedup == 1.0 and one.total_speedup == 1.0
    assert one.baseline == one.phases
    ph = one.phases
    assert ph.setup_ns + ph.parallel_ns + ph.serial_ns == pytest.approx(ph.total_ns, abs=2_000)

    four = run_phases_timed(f1, f2, FlowConfig(workers=4), repetitions=3)
    assert four.workers == 4 and four.parallel_speedup > 0
    assert four.parallel_speedup == four.baseline.parallel_ns / four.phases.parallel_ns
    with pytest.raises(ValueError):
        run_phases_timed(f1, f2, FlowConfig(), repetitions=0)


def test_multithreaded_pool_matches_single_worker():
    # a real thread pool, even on hosts with fewer cores, to exercise concurrent block execution
    import os
    import subprocess
    import sys
    import textwrap

    script = textwrap.dedent("""
        import dataclasses
        from parflow import FlowConfig, Variant, compute_flow
        from parflow.pipeline import effective_threads
        from parflow.synth import SynthSpec, generate_pair
        assert effective_threads(8) == 4, effective_threads(8)
        for seed in range(5):
            f1, f2 = generate_pair(SynthSpec(shift_x_hp=seed - 2, shift_y_hp=3, noise_amplitude=9, seed=seed))
            for v in Variant:
                base = compute_flow(f1, f2, FlowConfig(variant=v, workers=1))
                for w in (2, 4, 8, 64):
                    assert compute_flow(f1, f2, FlowConfig(variant=v, workers=w)).same_flow(base)
        print("ok")
    """)
    env = dict(os.environ, NUMBA_NUM_THREADS="4")
    proc = subprocess.run([sys.executable, "-c", script], env=env, capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "ok"
