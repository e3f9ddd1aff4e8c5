"""Shared fixtures, hypothesis profile and the acceptance summary hook."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from genpair.model import BUILTIN_NAMES, ModelSpace, builtin_model, validate_model

settings.register_profile(
    "genpair",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("genpair")

ACCEPTANCE_LINES: list[str] = []

SMALL_BUILTINS = tuple(n for n in BUILTIN_NAMES if n != "table2-shell6")


def random_model(seed: int, max_shells: int = 4, max_omega: int = 4) -> ModelSpace:
    """Seeded model with distinct amplitudes, ``p <= max_shells`` and ``Omega_j <= max_omega``."""
    rng = np.random.default_rng(seed)
    p = int(rng.integers(1, max_shells + 1))
    omegas = rng.integers(1, max_omega + 1, size=p)
    weights = rng.uniform(0.2, 1.0, size=p)
    while p > 1 and np.min(np.diff(np.sort(weights))) < 0.02:
        weights = rng.uniform(0.2, 1.0, size=p)
    c2 = weights / math.fsum(weights)
    c2[-1] = 1.0 - math.fsum(c2[:-1])
    return validate_model(
        [{"label": f"s{j}", "omega": int(om), "c_squared": float(x)} for j, (om, x) in enumerate(zip(omegas, c2))]
    )


@pytest.fixture(params=BUILTIN_NAMES)
def builtin(request) -> tuple[str, ModelSpace]:
    return request.param, builtin_model(request.param)


@pytest.fixture(params=SMALL_BUILTINS)
def small_builtin(request) -> tuple[str, ModelSpace]:
    return request.param, builtin_model(request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
