import numpy as np
import pytest

from bdriccati import (
    make_asymmetric,
    make_constant,
    make_explicit,
    make_offset_exponential,
)


def random_explicit(seed=2024, N=30):
    """Random schedule whose ratios b_i/d_{i+1} are nondecreasing through i = N."""
    rng = np.random.default_rng(seed)
    d = rng.uniform(0.2, 0.8, N + 3)
    ratios = np.sort(rng.uniform(0.5, 1.5, N + 1))
    b = np.empty(N + 2)
    b[: N + 1] = ratios * d[1 : N + 2]
    b[N + 1] = rng.uniform(0.2, 0.8)
    return make_explicit(b, d, N, label=f"random explicit seed={seed}")


def builtin_schedules():
    return {
        "constant": make_constant(0.5, 20),
        "asymmetric": make_asymmetric(0.02, 100),
        "figure3": make_offset_exponential(0.1, 0.12, 0.1, 0.15, 1, 100),
        "figure4": make_offset_exponential(0.0, 0.12, 0.0, 0.15, 0.5, 100),
        "figure5": make_offset_exponential(0.01, 0.15, 0.01, 0.12, 1, 100),
        "random": random_explicit(),
    }


BUILTIN = builtin_schedules()
D_GRID = [-4.0, -40.0, -1000.0, -4000.0, -1e6]


@pytest.fixture(params=sorted(BUILTIN))
def schedule(request):
    return BUILTIN[request.param]


@pytest.fixture(params=D_GRID)
def d_value(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
