"""State dynamics of AI development.

Physical compute accumulates from dollar investment through a
super-quadratic adjustment cost and depreciates quickly; hardware and
software efficiency grow with R&D investment subject to ceilings; the
heat-dissipation cap saturates usable compute. Effective compute is
maintained through the stock identity C = usable(Q) * S, which is valid
on both sides of the heat-cap crossover, and the largest training run
accumulates whatever compute the planner allocates to training.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .params import ParameterSet


@dataclass(frozen=True)
class ComputeState:
    """AI-development state block at one timestep."""

    q: float    # physical compute stock, FLOP/year
    h: float    # hardware efficiency, FLOP/year/$
    s: float    # software efficiency, eFLOP/FLOP
    c: float    # total effective compute, eFLOP/year
    c_t: float  # largest training run, eFLOP

    def __post_init__(self):
        for name in ("q", "h", "s", "c", "c_t"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")


def usable_compute(q: float, c_l: float) -> float:
    """Usable compute after the heat-dissipation cap: Q / (Q/C_L + 1)."""
    if q < 0 or not c_l > 0:
        raise ValueError("q must be >= 0 and c_l > 0")
    return float(kernels.usable_compute_kernel(q, c_l))


def compute_cost(i_q_effective: float, q: float, h: float,
                 a_q: float, chi: float) -> float:
    """Dollar cost of an effective compute investment (forward formula)."""
    _check_compute_args(i_q_effective, q, h, a_q, chi)
    return float(kernels.compute_cost_forward_kernel(i_q_effective, q, h, a_q, chi))


def compute_effective_investment(i_q_spending: float, q: float, h: float,
                                 a_q: float, chi: float) -> float:
    """Effective compute investment bought by a dollar outlay.

    Closed-form inverse of the adjustment-cost formula; monotone,
    concave, and never above the spending itself.
    """
    _check_compute_args(i_q_spending, q, h, a_q, chi)
    return float(kernels.compute_investment_kernel(i_q_spending, q, h, a_q, chi))


def _check_compute_args(flow, q, h, a_q, chi):
    if flow < 0:
        raise ValueError("investment flow must be >= 0")
    if not (q > 0 and h > 0 and a_q > 0):
        raise ValueError("q, h and a_q must be > 0")
    if not chi > 1:
        raise ValueError("chi must be > 1")


def rd_growth_rate(level: float, i_rd: float, theta: float, phi: float,
                   lam: float, xi: float = 1.0) -> float:
    """Unconstrained efficiency growth rate theta * level^-phi * (I/xi)^lambda."""
    if i_rd < 0 or not level > 0:
        raise ValueError("level must be > 0 and investment >= 0")
    return float(kernels.rd_growth_kernel(level, i_rd, theta, phi, lam, xi))


def ceiling_factor(level: float, level_init: float, level_max: float) -> float:
    """Log-distance share remaining to the efficiency ceiling (1 at the start)."""
    return float(kernels.ceiling_factor_kernel(level, level_init, level_max))


def step_efficiency(level: float, i_rd: float, theta: float, phi: float,
                    lam: float, level_init: float, level_max: float,
                    dt: float, xi: float = 1.0) -> float:
    """Advance an efficiency level one step; never exceeds the ceiling."""
    if not level_init <= level < level_max:
        raise ValueError("level must satisfy level_init <= level < level_max")
    if i_rd < 0 or not dt > 0:
        raise ValueError("need i_rd >= 0 and dt > 0")
    return float(kernels.step_efficiency_kernel(
        level, i_rd, theta, phi, lam, level_init, level_max, dt, xi))


def step_compute_state(state: ComputeState, i_q: float, i_h: float, i_s: float,
                       d: float, p: ParameterSet, dt: float = 1.0,
                       xi: float = 1.0) -> ComputeState:
    """Advance the full AI-development block one timestep.

    Per-step order: efficiency updates, then the physical stock with
    the updated hardware efficiency, then effective compute from the
    stock identity, then the training-run accumulation. Depreciation
    acts on the physical stock and reaches effective compute through
    the identity, so compute and effective compute depreciate together.
    """
    for name, flow in (("i_q", i_q), ("i_h", i_h), ("i_s", i_s), ("d", d)):
        if flow < 0:
            raise ValueError(f"{name} must be >= 0")
    mp = _dev_params(p, dt, xi)
    q2, h2, s2, c2, c_t2 = kernels.step_compute_state_kernel(
        state.q, state.h, state.s, state.c_t, i_q, i_h, i_s, d, mp)
    return ComputeState(float(q2), float(h2), float(s2), float(c2), float(c_t2))


def _dev_params(p: ParameterSet, dt: float, xi: float) -> kernels.ModelParams:
    from .initialization import model_params

    return model_params(p, tfp=1.0, dt=dt, xi=xi)
