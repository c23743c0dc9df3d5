import dataclasses

import numpy as np
import pytest

from parflow import Frame, Variant, compute_flow, default_config
from parflow.synth import SynthSpec, generate_pair


def random_frame(rng, width=64, height=64, levels=256):
    return Frame.from_array(rng.integers(0, levels, size=(height, width)))


def random_pairs(count, seed=1234):
    """Mixed frame pairs: independent noise, shifted textures, low-contrast ties."""
    rng = np.random.default_rng(seed)
    pairs = []
    for k in range(count):
        kind = k % 4
        if kind == 0:
            pairs.append((random_frame(rng), random_frame(rng)))
        elif kind == 1:
            sx, sy = rng.integers(-9, 10, size=2)
            spec = SynthSpec(shift_x_hp=int(sx), shift_y_hp=int(sy), noise_amplitude=int(rng.integers(0, 30)),
                             seed=int(rng.integers(2**63)))
            pairs.append(generate_pair(spec))
        elif kind == 2:
            # three grey levels make many SAD ties
            f1 = rng.integers(0, 3, size=(64, 64))
            f2 = np.roll(f1, tuple(rng.integers(-3, 4, size=2)), axis=(0, 1))
            flip = rng.random(f2.shape) < 0.05
            f2 = np.where(flip, rng.integers(0, 3, size=f2.shape), f2)
            pairs.append((Frame.from_array(f1), Frame.from_array(f2)))
        else:
            sx, sy = rng.integers(-9, 10, size=2)
            spec = SynthSpec(shift_x_hp=int(sx), shift_y_hp=int(sy), noise_amplitude=int(rng.integers(0, 3)),
                             seed=int(rng.integers(2**63)), texture="periodic")
            pairs.append(generate_pair(spec))
    return pairs


@pytest.fixture(scope="session")
def config():
    return default_config()


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # pay JIT compilation once, outside any timed test
    f1, f2 = generate_pair(SynthSpec(shift_x_hp=2, shift_y_hp=1, seed=7))
    for v in Variant:
        compute_flow(f1, f2, dataclasses.replace(default_config(), variant=v, workers=2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance summary ------------------------------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion gate")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        if call.excinfo is None:
            status = "PASS"
        elif call.excinfo.errisinstance(pytest.skip.Exception):
            status = f"SKIP ({call.excinfo.value})"
        else:
            status = "FAIL"
        prev = _criteria.get(number, (title, "PASS"))[1]
        if prev.startswith("FAIL") or (prev.startswith("SKIP") and status == "PASS"):
            status = prev
        _criteria[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {status:<6} {title}")
