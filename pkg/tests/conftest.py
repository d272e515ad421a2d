"""Shared fixtures: small-horizon parameter sets and solved results."""

from __future__ import annotations

from dataclasses import replace

import pytest

from gate import default_preset
from gate.planner import SolverSettings, solve


@pytest.fixture(scope="session")
def preset():
    return default_preset()


@pytest.fixture(scope="session")
def tiny_params(preset):
    """5-period instance for gradient and rollout unit tests."""
    return replace(preset, tau_plan=5.0, tau_optim=5.0)


@pytest.fixture(scope="session")
def small_params(preset):
    """12-period instance: fast solves for CLI/service/planner tests."""
    return replace(preset, tau_plan=6.0, tau_optim=12.0)


@pytest.fixture(scope="session")
def small_solution(small_params):
    return solve(small_params, "deterministic", SolverSettings())


@pytest.fixture(scope="session")
def desk_params(preset):
    """Desk-scale instance used by the acceptance suite."""
    return replace(preset, tau_plan=20.0, tau_optim=40.0)
