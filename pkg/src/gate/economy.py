"""Production side: CES task composite, output, and the period inner solvers.

The planner's top-level shares fix how output and compute are split;
given those, labor spreads optimally (uniform over non-automated tasks
under perfect reallocation) and runtime compute is water-filled across
automated task bins so the marginal composite value per unit of compute
is equalized. Both inner solves are analytic/one-dimensional, so they
stay out of the planner's decision vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .params import NO_REALLOCATION, PERFECT_REALLOCATION, ParameterSet


@dataclass(frozen=True)
class EconomyState:
    """Macro state at one timestep (f and tfp stay at calibration values)."""

    k: float      # capital stock, $
    labor: float  # total labor force (density per task in no-reallocation mode)
    f_stock: float
    tfp: float

    def __post_init__(self):
        if not (self.k > 0 and self.labor > 0):
            raise ValueError("k and labor must be > 0")


def ces_composite(task_inputs, weights, rho: float) -> float:
    """CES aggregate over a quadrature grid.

    Tasks are gross complements (rho < 0), so any zero input collapses
    the composite to 0; that collapse is a value, not an error.
    """
    if not rho < 0:
        raise ValueError("rho must be < 0")
    inputs = np.asarray(task_inputs, dtype=float)
    w = np.asarray(weights, dtype=float)
    if inputs.shape != w.shape:
        raise ValueError("inputs and weights must have matching shapes")
    if np.any(inputs <= 0.0):
        return 0.0
    return float(kernels.ces_composite_kernel(inputs, w, rho))


def produce(tfp: float, composite: float, k: float, f_stock: float,
            alpha: float, mu: float) -> float:
    """Cobb-Douglas output from the task composite, capital and the fixed factor."""
    if min(tfp, composite, k, f_stock) < 0:
        raise ValueError("inputs must be >= 0")
    return float(kernels.produce_kernel(tfp, composite, k, f_stock, alpha, mu))


def capital_cost(i_k_effective: float, k: float, a_k: float) -> float:
    """Dollar cost of an effective capital investment (forward formula)."""
    _check_capital_args(i_k_effective, k, a_k)
    return float(kernels.capital_cost_forward_kernel(i_k_effective, k, a_k))


def capital_effective_investment(i_k_spending: float, k: float, a_k: float) -> float:
    """Effective capital investment bought by a dollar outlay (cost inverse)."""
    _check_capital_args(i_k_spending, k, a_k)
    return float(kernels.capital_investment_kernel(i_k_spending, k, a_k))


def _check_capital_args(flow, k, a_k):
    if flow < 0:
        raise ValueError("investment flow must be >= 0")
    if not (k > 0 and a_k > 0):
        raise ValueError("k and a_k must be > 0")


def allocate_labor(l_total: float, f: float, mode: str, grid_nodes) -> np.ndarray:
    """Labor density on each grid node.

    Perfect reallocation: density l_total/(1-f) on non-automated nodes,
    zero on automated ones (uniform is optimal for complementary
    tasks). No reallocation: density l_total everywhere.
    """
    if not l_total > 0:
        raise ValueError("l_total must be > 0")
    nodes = np.asarray(grid_nodes, dtype=float)
    if mode == NO_REALLOCATION:
        return np.full_like(nodes, l_total)
    if mode != PERFECT_REALLOCATION:
        raise ValueError(f"unknown labor mode {mode!r}")
    if f >= 1.0:
        return np.zeros_like(nodes)
    density = l_total / (1.0 - f)
    return np.where(nodes > f, density, 0.0)


def water_fill_allocation(budget: float, runtime_reqs, labor, weights,
                          rho: float) -> np.ndarray:
    """Digital workers per node maximizing the composite under the budget.

    KKT water-filling: nodes receiving compute equalize
    (labor + workers)^(rho-1) / requirement; nodes whose labor floor
    already exceeds the water level get nothing.
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    if not rho < 0:
        raise ValueError("rho must be < 0")
    reqs = np.asarray(runtime_reqs, dtype=float)
    lab = np.broadcast_to(np.asarray(labor, dtype=float), reqs.shape)
    w = np.asarray(weights, dtype=float)
    out = kernels.water_fill_kernel(budget, reqs, lab, w, rho)
    return np.asarray(out)


@dataclass(frozen=True)
class PeriodAllocation:
    """Everything the period inner solvers decide, plus derived output."""

    f: float
    train_compute: float
    inference_budget: float
    workers_per_bin: np.ndarray
    inference_per_bin: np.ndarray
    bin_measures: np.ndarray
    labor_density_auto: float
    labor_density_nonauto: float
    composite: float
    output: float
    consumption_per_capita: float
    i_k: float
    i_q: float
    i_h: float
    i_s: float
    output_shares: np.ndarray   # consumption, capital, compute, hardware R&D, software R&D
    compute_shares: np.ndarray  # training, inference


def period_output(econ: EconomyState, c: float, c_t: float,
                  output_shares, compute_shares, p: ParameterSet,
                  zeta: float = 1.0) -> PeriodAllocation:
    """Evaluate one period at given states and top-level shares.

    Splits output across consumption and the four investments, compute
    across training and the inference budget, runs the labor and
    inference allocations, and evaluates the composite and production.
    """
    from .initialization import model_params

    out_sh = np.asarray(output_shares, dtype=float)
    cmp_sh = np.asarray(compute_shares, dtype=float)
    if out_sh.shape != (5,) or cmp_sh.shape != (2,):
        raise ValueError("need 5 output shares and 2 compute shares")
    for sh, name in ((out_sh, "output"), (cmp_sh, "compute")):
        if np.any(sh < 0) or abs(sh.sum() - 1.0) > 1e-9:
            raise ValueError(f"{name} shares must be non-negative and sum to 1")

    mp = model_params(p, tfp=econ.tfp)
    pr = kernels.period_production_kernel(
        c, c_t, econ.k, econ.labor, cmp_sh[0], cmp_sh[1], mp, zeta,
        p.task_grid_workers)
    output = float(pr.output)
    return PeriodAllocation(
        f=float(pr.f),
        train_compute=float(pr.train_compute),
        inference_budget=float(pr.inference_budget),
        workers_per_bin=np.asarray(pr.workers),
        inference_per_bin=np.asarray(pr.inference_per_bin),
        bin_measures=np.asarray(pr.bin_measures),
        labor_density_auto=float(pr.labor_density_auto),
        labor_density_nonauto=float(pr.labor_density_nonauto),
        composite=float(pr.composite),
        output=output,
        consumption_per_capita=out_sh[0] * output / econ.labor,
        i_k=out_sh[1] * output,
        i_q=out_sh[2] * output,
        i_h=out_sh[3] * output,
        i_s=out_sh[4] * output,
        output_shares=out_sh,
        compute_shares=cmp_sh,
    )
