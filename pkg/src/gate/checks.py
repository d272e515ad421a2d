"""Built-in solver sanity checks.

Both checks guard against the main solve quietly landing on a bad local
optimum or a numerically flat region: a restricted policy class must
not beat the full solution, and neither must a solution found under a
log-tailed utility when re-scored on the original preferences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import jax
import jax.numpy as jnp
import numpy as np

from . import rollout
from .initialization import initial_state, model_params, warm_start_shares
from .params import ParameterSet
from .planner import (SolverSettings, SolveResult, _ascend, Problem,
                      initial_consumption_per_capita,
                      objective_from_consumption)


@dataclass
class CheckReport:
    name: str
    passed: bool
    value_full: float
    value_challenger: float
    tolerance: float
    detail: str = ""

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: V_full={self.value_full:.9g} "
                f"vs challenger={self.value_challenger:.9g} (tol {self.tolerance:.2g})")


def _phase_problem(p: ParameterSet, settings: SolverSettings,
                   tfp: float, c_star: float = math.inf) -> Problem:
    n_periods = int(round(p.tau_optim / settings.dt))
    engine = rollout.phase_engine(n_periods, p.task_grid_workers)
    init = rollout.initial_econ_state(initial_state(p))
    mp = model_params(p, tfp, dt=settings.dt, xi=1.0, c_star=c_star)
    out, comp = warm_start_shares(p)
    point = np.concatenate([np.log(out), np.log(comp)])
    theta0 = np.tile(point, (3, 1))

    def value_only(theta):
        return engine(theta, mp, init, 1.0)[0]

    return Problem(p, "deterministic", settings, tfp, theta0,
                   jax.jit(jax.value_and_grad(value_only)),
                   jax.jit(value_only),
                   lambda theta: (float(value_only(jnp.asarray(theta))), None, None),
                   None, np.array([1.0]), np.array([1.0]), ((0,),), n_periods)


def sanity_check_simple_policy(p: ParameterSet, full: SolveResult,
                               settings: Optional[SolverSettings] = None,
                               rel_tol: float = 1e-4) -> CheckReport:
    """Re-solve under one decision point per automation phase.

    The 3-point class (initial level / ramp / full automation) nests
    inside the full schedule class, so with exact optimization the full
    solve can never lose; a loss beyond tolerance flags a suboptimal
    local optimum of the main solver.
    """
    settings = settings or SolverSettings()
    problem = _phase_problem(p, settings, full.tfp)
    theta, _, _, _, _ = _ascend(problem, jnp.asarray(problem.theta0),
                                settings, None)
    v_simple = float(problem.value(theta))
    tol = rel_tol * max(abs(full.value), 1e-12)
    passed = full.value >= v_simple - tol
    detail = "" if passed else ("restricted policy beat the full solve: "
                                "the main solver may have stopped at a local optimum")
    return CheckReport("simple_policy", passed, full.value, v_simple, tol, detail)


def sanity_check_spliced_utility(p: ParameterSet, full: SolveResult,
                                 settings: Optional[SolverSettings] = None,
                                 rel_tol: float = 1e-4,
                                 c_star_multiple: float = 1e3) -> CheckReport:
    """Re-solve with a log tail above c* and re-score on original utility.

    The splice keeps the objective's gradients alive at very high
    consumption where the power utility can flatten out numerically.
    Allocations do not depend on preferences, so the spliced solution's
    schedule is re-scored exactly from its consumption path.
    """
    from .planner import build_problem

    settings = settings or SolverSettings()
    c_star = c_star_multiple * initial_consumption_per_capita(p)
    spliced = SolverSettings(**{**settings.__dict__, "c_star": c_star})
    problem = build_problem(p, "deterministic", spliced)
    theta, _, _, _, _ = _ascend(problem, jnp.asarray(problem.theta0),
                                spliced, None)
    _, _, recs = problem.rollout_paths(theta)
    consumption = np.asarray(recs[0].consumption_pc)
    v_rescored = objective_from_consumption(consumption, p, settings.dt)
    tol = rel_tol * max(abs(full.value), 1e-12)
    passed = full.value >= v_rescored - tol
    detail = "" if passed else ("spliced-utility solution beat the full solve "
                                "under original preferences: possible numerical flatness")
    return CheckReport("spliced_utility", passed, full.value, v_rescored, tol, detail)
