"""Mapping effective compute to task automation.

Extensive margin: a piecewise log-linear function of capability gives
the fraction of tasks AI can perform, optionally plateauing below 1
(the candidate family of the uncertainty add-on). Intensive margin:
per-task runtime requirements turn allocated inference compute into
digital-worker counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import kernels
from .params import ParameterSet


class InfeasibleTaskError(ValueError):
    """Raised when a task cannot be automated at the current capability."""


@dataclass(frozen=True)
class AutomationFunction:
    """One member of the automation-function family.

    ``zeta`` is the plateau fraction; the true function has zeta = 1.
    All candidates share the ramp (f_init, t_agi, delta_flop) and are
    indistinguishable until capability passes a candidate's plateau.
    """

    f_init: float
    t_agi: float
    delta_flop: float
    zeta: float = 1.0

    def __post_init__(self):
        if not 0 <= self.f_init < 1:
            raise ValueError("f_init must lie in [0, 1)")
        if not self.f_init < self.zeta <= 1:
            raise ValueError("zeta must lie in (f_init, 1]")
        if not (self.t_agi > 0 and self.delta_flop > 0):
            raise ValueError("t_agi and delta_flop must be positive")

    @classmethod
    def from_params(cls, p: ParameterSet, zeta: float = 1.0) -> "AutomationFunction":
        return cls(p.f_init, p.t_agi, p.delta_flop(), zeta)

    def ramp_onset(self) -> float:
        """Capability at which automation first rises above f_init."""
        return self.t_agi / 10.0 ** self.delta_flop

    def plateau_onset(self) -> float:
        """Capability at which the candidate's plateau binds."""
        return float(kernels.inverse_automation_kernel(
            self.zeta, self.f_init, self.t_agi, self.delta_flop, 1.0))


def fraction_automatable(af: AutomationFunction, capability: float) -> float:
    """Fraction of tasks automatable at the given capability level."""
    if not capability > 0:
        raise ValueError("capability must be > 0")
    return float(kernels.fraction_automatable_kernel(
        capability, af.f_init, af.t_agi, af.delta_flop, af.zeta))


def inverse_automation(af: AutomationFunction, i: float) -> float:
    """Minimal capability at which task fraction i becomes automatable.

    0 below f_init, +inf beyond the plateau (an in-band sentinel, not
    an error: the runtime-requirement max() consumes it naturally).
    """
    if not 0 <= i <= 1:
        raise ValueError("task index must lie in [0, 1]")
    if i > af.zeta:
        return math.inf
    out = kernels.inverse_automation_kernel(
        i, af.f_init, af.t_agi, af.delta_flop, af.zeta)
    return float(out)


def capability_with_inference(c_t: float, iota: float, m: float) -> float:
    """Capability of a training run boosted by the inference multiplier."""
    if not 1 <= iota:
        raise ValueError("iota must be >= 1")
    return float(kernels.capability_kernel(c_t, iota, m))


def runtime_requirement(i: float, c_t: float, af: AutomationFunction,
                        gamma0: float, gamma1: float, m: float,
                        iota_max: float) -> float:
    """Runtime compute per digital worker on task i (eFLOP/year)."""
    feasible_up_to = fraction_automatable(
        af, capability_with_inference(c_t, iota_max, m))
    if i > feasible_up_to:
        raise InfeasibleTaskError(
            f"task {i} exceeds the automatable fraction {feasible_up_to}")
    return float(kernels.runtime_requirement_kernel(
        i, c_t, af.f_init, af.t_agi, af.delta_flop, af.zeta, gamma0, gamma1, m))


def digital_workers(inference_compute: float, requirement: float) -> float:
    """Digital-worker count delivered by an inference allocation."""
    if not requirement > 0:
        raise ValueError("runtime requirement must be > 0")
    if inference_compute < 0:
        raise ValueError("inference compute must be >= 0")
    return inference_compute / requirement


@dataclass(frozen=True)
class BeliefState:
    """Discrete beliefs over the automation-function family.

    ``probs`` are the renormalized probabilities over surviving
    candidates; eliminated candidates keep a zero entry.
    """

    candidates: tuple[AutomationFunction, ...]
    probs: tuple[float, ...]
    surviving: tuple[bool, ...]

    def __post_init__(self):
        if not (len(self.candidates) == len(self.probs) == len(self.surviving)):
            raise ValueError("candidate, probability and mask lengths must agree")
        live = [p for p, s in zip(self.probs, self.surviving) if s]
        if abs(sum(live) - 1.0) > 1e-9:
            raise ValueError("surviving probabilities must sum to 1")

    @classmethod
    def from_params(cls, p: ParameterSet) -> "BeliefState":
        candidates = tuple(AutomationFunction.from_params(p, c.zeta)
                           for c in p.belief_spec)
        return cls(candidates, tuple(c.prob for c in p.belief_spec),
                   (True,) * len(candidates))


def update_beliefs(beliefs: BeliefState, capability_observed: float,
                   f_observed: float) -> BeliefState:
    """Condition beliefs on an observed (capability, automation) point.

    A candidate survives iff its value matches the observation; once a
    candidate disagrees with the realized function it never re-agrees,
    so checking the current point under a non-decreasing capability
    path is equivalent to checking the whole history.
    """
    mask = []
    for cand, alive in zip(beliefs.candidates, beliefs.surviving):
        if not alive:
            mask.append(False)
            continue
        predicted = fraction_automatable(cand, capability_observed)
        mask.append(abs(predicted - f_observed) <= 1e-9)
    total = sum(p for p, s in zip(beliefs.probs, mask) if s)
    if total <= 0:
        raise ValueError("all candidates eliminated: observation inconsistent "
                         "with the belief support")
    probs = tuple(p / total if s else 0.0
                  for p, s in zip(beliefs.probs, mask))
    return replace(beliefs, probs=probs, surviving=tuple(mask))


@dataclass(frozen=True)
class TaskGrid:
    """Midpoint discretizations of the unit task space."""

    worker_nodes: tuple[float, ...]
    labor_nodes: tuple[float, ...]

    @classmethod
    def from_params(cls, p: ParameterSet) -> "TaskGrid":
        return cls(midpoint_nodes(p.task_grid_workers),
                   midpoint_nodes(p.task_grid_labor))

    def worker_weights(self) -> tuple[float, ...]:
        n = len(self.worker_nodes)
        return (1.0 / n,) * n

    def labor_weights(self) -> tuple[float, ...]:
        n = len(self.labor_nodes)
        return (1.0 / n,) * n


def midpoint_nodes(n: int) -> tuple[float, ...]:
    """Midpoints of n equal bins of [0, 1] (avoids the endpoint singularities)."""
    return tuple((j + 0.5) / n for j in range(n))
