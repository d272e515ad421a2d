"""Social-planner solver: decision encoding, objective, gradient ascent.

Decisions are unconstrained logits (5 output + 2 compute per period and
information state) decoded through normalized exponentials, so the
planner's five effective degrees of freedom per period are optimized
smoothly without simplex constraints. The optimizer is adaptive-moment
gradient ascent with a monotone acceptance rule: a candidate step is
backtracked until it does not decrease the objective, falling back to
the raw gradient direction when the momentum direction fails, so
accepted iterates never lose value.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import jax
import jax.numpy as jnp
import numpy as np

from . import kernels, rollout
from .initialization import (calibrate_tfp, initial_state, model_params,
                             warm_start_logits, warm_start_shares)
from .params import ParameterSet, validate


class NaNObjectiveError(RuntimeError):
    """Objective or gradient became NaN; carries a diagnostic dump."""

    def __init__(self, message: str, dump: dict):
        super().__init__(message)
        self.dump = dump


@dataclass(frozen=True)
class DecisionPoint:
    """Unconstrained planner controls for one (period, information state)."""

    output_logits: np.ndarray   # consumption, capital, compute, hardware R&D, software R&D
    compute_logits: np.ndarray  # training, inference

    def output_shares(self) -> np.ndarray:
        return np.asarray(kernels.softmax_kernel(jnp.asarray(self.output_logits)))

    def compute_shares(self) -> np.ndarray:
        return np.asarray(kernels.softmax_kernel(jnp.asarray(self.compute_logits)))


@dataclass(frozen=True)
class DecisionSchedule:
    """Map from (timestep, information state) to a DecisionPoint.

    ``info_labels[i]`` is the surviving candidate set of state i;
    deterministic runs have the single trivial state.
    """

    logits: np.ndarray  # [n_states, n_periods, 7]
    info_labels: tuple[tuple[int, ...], ...]

    @property
    def n_states(self) -> int:
        return self.logits.shape[0]

    @property
    def n_periods(self) -> int:
        return self.logits.shape[1]

    def decision(self, t: int, state: int = 0) -> DecisionPoint:
        row = self.logits[state, t]
        return DecisionPoint(row[:5].copy(), row[5:].copy())


def info_state_labels(n_cands: int) -> tuple[tuple[int, ...], ...]:
    """Suffix sets {k..n} then singletons {1}..{n-1}, matching engine indices."""
    suffixes = [tuple(range(k, n_cands)) for k in range(n_cands)]
    singles = [(j,) for j in range(n_cands - 1)]
    return tuple(suffixes + singles)


@dataclass
class SolverSettings:
    """Everything that influences the numerical solve (hashed in manifests)."""

    max_iterations: int = 20000
    grad_tol: float = 1e-6          # on the gradient max-norm, relative to |V|
    learning_rate: float = 0.05
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    backtrack_limit: int = 40
    dt: float = 1.0
    progress_stride: int = 25
    c_star: float = math.inf        # spliced-utility threshold (inf = plain CRRA)

    def to_document(self) -> dict:
        return {
            "max_iterations": self.max_iterations,
            "grad_tol": self.grad_tol,
            "learning_rate": self.learning_rate,
            "adam_beta1": self.adam_beta1,
            "adam_beta2": self.adam_beta2,
            "backtrack_limit": self.backtrack_limit,
            "dt": self.dt,
            "progress_stride": self.progress_stride,
            "c_star": None if math.isinf(self.c_star) else self.c_star,
        }


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    value: float
    grad_norm: float
    step_size: float

    def to_document(self) -> dict:
        return {"iteration": self.iteration, "value": self.value,
                "grad_norm": self.grad_norm, "step_size": self.step_size}


MODES = ("deterministic", "externality", "uncertainty")


@dataclass
class Problem:
    """A solvable instance: objective, gradient, warm start, and rollouts."""

    params: ParameterSet
    mode: str
    settings: SolverSettings
    tfp: float
    theta0: np.ndarray
    value_and_grad: Callable
    value: Callable
    rollout_paths: Callable      # theta -> (value, scenario values, [PathArrays])
    resimulate: Optional[Callable]  # externality mode: theta -> (value, [PathArrays])
    scenario_probs: np.ndarray
    scenario_zetas: np.ndarray
    info_labels: tuple[tuple[int, ...], ...]
    n_periods: int


def build_problem(p: ParameterSet, mode: str,
                  settings: Optional[SolverSettings] = None) -> Problem:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    violations = validate(p, "permissive")
    if violations:
        raise ValueError("invalid parameters: " + "; ".join(map(str, violations)))
    settings = settings or SolverSettings()

    tfp = calibrate_tfp(p)
    init = rollout.initial_econ_state(initial_state(p))
    n_periods = int(round(p.tau_optim / settings.dt))
    n_bins = p.task_grid_workers
    mp_true = model_params(p, tfp, dt=settings.dt, xi=1.0, c_star=settings.c_star)

    if mode == "uncertainty":
        cands = sorted(p.belief_spec, key=lambda c: c.zeta)
        zetas = np.array([c.zeta for c in cands])
        probs = np.array([c.prob for c in cands])
        onsets = np.array([
            float(kernels.inverse_automation_kernel(
                z, p.f_init, p.t_agi, p.delta_flop(), 1.0)) for z in zetas])
        engine, n_states = rollout.scenario_engine(n_periods, n_bins, len(cands))
        theta0 = warm_start_logits(p, n_periods, n_states)
        if theta0.ndim == 2:
            theta0 = theta0[None, :, :]

        def paths(theta):
            value, values, recs = engine(jnp.asarray(theta), mp_true, init,
                                         jnp.asarray(zetas), jnp.asarray(onsets),
                                         jnp.asarray(probs))
            return float(value), np.asarray(values), recs

        def value_only(theta):
            return engine(theta, mp_true, init, jnp.asarray(zetas),
                          jnp.asarray(onsets), jnp.asarray(probs))[0]

        vag = jax.jit(jax.value_and_grad(value_only))
        return Problem(p, mode, settings, tfp, theta0, vag,
                       jax.jit(value_only), paths, None, probs, zetas,
                       info_state_labels(len(cands)), n_periods)

    # deterministic shape: a single information state
    engine = rollout.deterministic_engine(n_periods, n_bins)
    theta0 = warm_start_logits(p, n_periods)
    xi = p.xi if mode == "externality" else 1.0
    mp_solve = model_params(p, tfp, dt=settings.dt, xi=xi, c_star=settings.c_star)

    def value_only(theta):
        return engine(theta, mp_solve, init, 1.0)[0]

    def paths(theta):
        value, recs = engine(jnp.asarray(theta), mp_solve, init, 1.0)
        return float(value), np.array([float(value)]), [recs]

    resim = None
    if mode == "externality":
        def resim(theta):
            value, recs = engine(jnp.asarray(theta), mp_true, init, 1.0)
            return float(value), [recs]

    vag = jax.jit(jax.value_and_grad(value_only))
    return Problem(p, mode, settings, tfp, theta0, vag, jax.jit(value_only),
                   paths, resim, np.array([1.0]), np.array([1.0]),
                   ((0,),), n_periods)


def gradient(problem: Problem, theta) -> np.ndarray:
    """Objective gradient with respect to every logit."""
    _, g = problem.value_and_grad(jnp.asarray(theta))
    return np.asarray(g)


def objective_from_consumption(consumption_pc, p: ParameterSet, dt: float = 1.0,
                               c_star: float = math.inf) -> float:
    """Discounted CRRA objective of a per-capita consumption path.

    Scenario-independent re-evaluation used by tests and the spliced
    utility check (allocations do not depend on the utility function,
    so re-scoring a rolled-out path under different preferences is
    exact).
    """
    mp = model_params(p, tfp=1.0, dt=dt, c_star=c_star)
    c = jnp.asarray(consumption_pc)
    t = jnp.arange(c.shape[0])
    disc = jnp.exp(-(mp.beta - mp.g_l) * t * mp.dt)
    return float(jnp.sum(disc * kernels.utility_kernel(c, mp) * mp.dt))


def expected_objective(per_scenario_values, probs) -> float:
    values = np.asarray(per_scenario_values, dtype=float)
    pr = np.asarray(probs, dtype=float)
    if abs(pr.sum() - 1.0) > 1e-9:
        raise ValueError("scenario probabilities must sum to 1")
    return float(values @ pr)


@dataclass
class SolveResult:
    mode: str
    schedule: DecisionSchedule
    paths: list                      # per-scenario PathArrays (numpy-backed)
    scenario_probs: np.ndarray
    scenario_zetas: np.ndarray
    value: float
    scenario_values: np.ndarray
    converged: bool
    iterations: int
    grad_norm: float
    diagnostics: list[IterationRecord] = field(default_factory=list)
    tfp: float = 0.0
    value_perceived: Optional[float] = None  # externality mode: wedge-objective value
    wall_time: float = 0.0

    @property
    def n_periods(self) -> int:
        return self.schedule.n_periods


ProgressCallback = Callable[[IterationRecord], None]


def solve(p: ParameterSet, mode: str = "deterministic",
          settings: Optional[SolverSettings] = None,
          progress: Optional[ProgressCallback] = None,
          theta_init: Optional[np.ndarray] = None) -> SolveResult:
    """Maximize the planner objective over the decision schedule.

    Stops when the gradient max-norm falls below the relative tolerance
    or the iteration cap is reached; non-convergence is reported on the
    result, not raised. A NaN objective aborts with a diagnostic dump.
    """
    settings = settings or SolverSettings()
    problem = build_problem(p, mode, settings)
    theta0 = problem.theta0 if theta_init is None else np.asarray(theta_init)
    started = time.monotonic()

    theta, records, converged, iters, grad_norm = _ascend(
        problem, jnp.asarray(theta0), settings, progress)

    value, scen_values, recs = problem.rollout_paths(theta)
    value_perceived = None
    if problem.resimulate is not None:
        # re-simulate the committed plan under the true R&D laws
        value_perceived = value
        value, recs = problem.resimulate(theta)
        scen_values = np.array([value])

    logits = np.asarray(theta)
    if logits.ndim == 2:
        logits = logits[None, :, :]
    schedule = DecisionSchedule(logits, problem.info_labels)
    paths = [jax.tree_util.tree_map(np.asarray, r) for r in recs]
    return SolveResult(
        mode=mode, schedule=schedule, paths=paths,
        scenario_probs=problem.scenario_probs,
        scenario_zetas=problem.scenario_zetas,
        value=float(value), scenario_values=np.asarray(scen_values),
        converged=converged, iterations=iters, grad_norm=grad_norm,
        diagnostics=records, tfp=problem.tfp,
        value_perceived=value_perceived,
        wall_time=time.monotonic() - started)


def _ascend(problem: Problem, theta, settings: SolverSettings,
            progress: Optional[ProgressCallback]):
    vag = problem.value_and_grad
    b1, b2 = settings.adam_beta1, settings.adam_beta2
    lr0 = settings.learning_rate
    lr = lr0
    m = jnp.zeros_like(theta)
    v = jnp.zeros_like(theta)
    records: list[IterationRecord] = []
    converged = False

    value, grad = vag(theta)
    value = float(value)
    if not math.isfinite(value):
        raise NaNObjectiveError("objective is NaN at the starting point",
                                _dump(problem, theta))
    grad_norm = float(jnp.max(jnp.abs(grad)))

    it = 0
    for it in range(1, settings.max_iterations + 1):
        record = IterationRecord(it - 1, value, grad_norm, lr)
        records.append(record)
        if progress and (it - 1) % settings.progress_stride == 0:
            progress(record)
        if grad_norm <= settings.grad_tol * max(abs(value), 1e-12):
            converged = True
            break
        if not np.all(np.isfinite(np.asarray(grad))):
            raise NaNObjectiveError("gradient is NaN", _dump(problem, theta))

        m = b1 * m + (1.0 - b1) * grad
        v = b2 * v + (1.0 - b2) * grad * grad
        m_hat = m / (1.0 - b1 ** it)
        v_hat = v / (1.0 - b2 ** it)
        adam_dir = m_hat / (jnp.sqrt(v_hat) + 1e-12)

        accepted = False
        for direction in (adam_dir, grad / (jnp.max(jnp.abs(grad)) + 1e-300)):
            step = lr
            for _ in range(settings.backtrack_limit):
                cand = theta + step * direction
                cand_value, cand_grad = vag(cand)
                cand_value = float(cand_value)
                if math.isfinite(cand_value) and cand_value >= value:
                    theta, value, grad = cand, cand_value, cand_grad
                    grad_norm = float(jnp.max(jnp.abs(grad)))
                    lr = min(step * 1.25, lr0)
                    accepted = True
                    break
                step *= 0.5
            if accepted:
                break
        if not accepted:
            break  # numerically stationary: report best found

    final = IterationRecord(it, value, grad_norm, lr)
    records.append(final)
    if progress:
        progress(final)
    return theta, records, converged, it, grad_norm


def _dump(problem: Problem, theta) -> dict:
    arr = np.asarray(theta)
    return {
        "mode": problem.mode,
        "n_periods": problem.n_periods,
        "theta_min": float(arr.min()),
        "theta_max": float(arr.max()),
        "theta_nonfinite": int(np.sum(~np.isfinite(arr))),
        "settings": problem.settings.to_document(),
    }


def initial_consumption_per_capita(p: ParameterSet) -> float:
    """Warm-start per-capita consumption (anchors utility floors and splices)."""
    out, _ = warm_start_shares(p)
    return float(out[0] * p.y0 / p.l0)
