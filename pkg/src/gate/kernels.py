"""Differentiable numeric kernels shared by the public modules and the solver.

Everything here operates on jax arrays/scalars and is safe to place
inside ``jit``/``grad``/``scan``. Public modules wrap these kernels
with domain types, precondition checks, and error reporting; the
trajectory engine composes them directly.

Conventions: compute quantities are eFLOP or eFLOP/year, money is
$/year, the task space is the unit interval. ``BIG`` stands in for the
infinity sentinel of the automation-function inverse so that downstream
products with zero weights stay NaN-free.
"""

from __future__ import annotations

from typing import NamedTuple

import jax
import jax.numpy as jnp

TINY = 1e-300
BIG = 1e270
LOG_MULT_CAP = 460.0  # exp(460) ~ 1e199; caps infeasible-task multipliers


class ModelParams(NamedTuple):
    """Scalar parameters consumed by the kernels (all jax-traceable)."""

    alpha: jnp.ndarray
    mu: jnp.ndarray
    rho: jnp.ndarray
    beta: jnp.ndarray
    eta: jnp.ndarray
    g_l: jnp.ndarray
    delta_k: jnp.ndarray
    a_k: jnp.ndarray
    a_q: jnp.ndarray
    chi: jnp.ndarray
    delta_q: jnp.ndarray
    theta_h: jnp.ndarray
    phi_h: jnp.ndarray
    lambda_h: jnp.ndarray
    h_init: jnp.ndarray
    h_max: jnp.ndarray
    theta_s: jnp.ndarray
    phi_s: jnp.ndarray
    lambda_s: jnp.ndarray
    s_init: jnp.ndarray
    s_max: jnp.ndarray
    c_l: jnp.ndarray
    m: jnp.ndarray
    iota_max: jnp.ndarray
    gamma0: jnp.ndarray
    gamma1: jnp.ndarray
    t_agi: jnp.ndarray
    f_init: jnp.ndarray
    delta_flop: jnp.ndarray
    f_stock: jnp.ndarray
    tfp: jnp.ndarray
    c_floor: jnp.ndarray
    xi: jnp.ndarray          # R&D wedge as perceived by the planner (1 = true laws)
    no_realloc: jnp.ndarray  # 1.0 in the no-reallocation labor mode, else 0.0
    c_star: jnp.ndarray      # consumption threshold of the spliced-utility tail (inf = off)
    dt: jnp.ndarray


class EconState(NamedTuple):
    """Per-period dynamic state carried through the trajectory scan."""

    k: jnp.ndarray
    labor: jnp.ndarray
    q: jnp.ndarray
    h: jnp.ndarray
    s: jnp.ndarray
    c: jnp.ndarray
    c_t: jnp.ndarray


# --------------------------------------------------------------------------
# automation function family
# --------------------------------------------------------------------------

def fraction_automatable_kernel(capability, f_init, t_agi, delta_flop, zeta):
    """Piecewise log-linear automation fraction, capped at the plateau zeta."""
    ramp_lo_log = jnp.log10(t_agi) - delta_flop
    ramp = f_init + (1.0 - f_init) * (
        jnp.log10(jnp.maximum(capability, TINY)) - ramp_lo_log) / delta_flop
    return jnp.clip(ramp, f_init, zeta)


def inverse_automation_kernel(i, f_init, t_agi, delta_flop, zeta):
    """Training compute needed for task fraction i at minimal inference cost.

    0 below the initial fraction, the ramp inverse on (f_init, zeta],
    and BIG (infinity sentinel) beyond the plateau.
    """
    ramp = 10.0 ** (jnp.log10(t_agi) - delta_flop
                    + delta_flop * (i - f_init) / (1.0 - f_init))
    return jnp.where(i <= f_init, 0.0, jnp.where(i > zeta, BIG, ramp))


def capability_kernel(c_t, iota, m):
    return c_t * iota ** (1.0 / m)


def runtime_requirement_kernel(i, c_t, f_init, t_agi, delta_flop, zeta,
                               gamma0, gamma1, m):
    """Runtime compute per digital worker on task i, given training run c_t."""
    f_inv = inverse_automation_kernel(i, f_init, t_agi, delta_flop, zeta)
    log_mult = m * jnp.log(jnp.maximum(f_inv / c_t, 1.0))
    mult = jnp.exp(jnp.minimum(log_mult, LOG_MULT_CAP))
    return mult * 10.0 ** (gamma0 + gamma1 * i)


# --------------------------------------------------------------------------
# compute stock, efficiency, adjustment costs
# --------------------------------------------------------------------------

def usable_compute_kernel(q, c_l):
    """Heat-cap saturation: ~q for small stocks, asymptoting to c_l."""
    return q / (q / c_l + 1.0)


def usable_compute_inverse_kernel(u, c_l):
    return u * c_l / (c_l - u)


def compute_cost_forward_kernel(i_eff, q, h, a_q, chi):
    """Dollars needed to add i_eff of effective compute investment."""
    x = a_q * i_eff * h / q
    return q / (chi * a_q * h) * jnp.expm1(chi * jnp.log1p(x))


def compute_investment_kernel(i_spend, q, h, a_q, chi):
    """Effective compute investment bought by i_spend dollars (cost inverse)."""
    x = chi * a_q * h * i_spend / q
    return q / (a_q * h) * jnp.expm1(jnp.log1p(x) / chi)


def capital_cost_forward_kernel(i_eff, k, a_k):
    return i_eff + a_k * i_eff ** 2 / (2.0 * k)


def capital_investment_kernel(i_spend, k, a_k):
    """Effective capital investment from spending (quadratic-cost inverse)."""
    y = 2.0 * a_k * i_spend / k
    return k / a_k * jnp.expm1(0.5 * jnp.log1p(y))


def rd_growth_kernel(level, i_rd, theta, phi, lam, xi):
    """Unconstrained efficiency growth rate from R&D investment.

    The wedge xi scales down the investment the planner perceives;
    xi = 1 recovers the true law of motion.
    """
    return theta * level ** (-phi) * (jnp.maximum(i_rd, 0.0) / xi) ** lam


def ceiling_factor_kernel(level, level_init, level_max):
    return (jnp.log(level_max) - jnp.log(level)) / (
        jnp.log(level_max) - jnp.log(level_init))


def step_efficiency_kernel(level, i_rd, theta, phi, lam,
                           level_init, level_max, dt, xi):
    g = rd_growth_kernel(level, i_rd, theta, phi, lam, xi)
    shrink = ceiling_factor_kernel(level, level_init, level_max)
    nxt = level * jnp.exp(g * shrink * dt)
    return jnp.minimum(nxt, level_max * (1.0 - 1e-12))


def step_compute_state_kernel(q, h, s, c_t, i_q, i_h, i_s, d, mp: ModelParams):
    """One timestep of the AI-development state block.

    Order: efficiency updates first, then the physical stock with the
    updated hardware efficiency, then effective compute restated from
    the stock identity, then the training-run accumulation.
    """
    h2 = step_efficiency_kernel(h, i_h, mp.theta_h, mp.phi_h, mp.lambda_h,
                                mp.h_init, mp.h_max, mp.dt, mp.xi)
    s2 = step_efficiency_kernel(s, i_s, mp.theta_s, mp.phi_s, mp.lambda_s,
                                mp.s_init, mp.s_max, mp.dt, mp.xi)
    i_q_eff = compute_investment_kernel(i_q, q, h2, mp.a_q, mp.chi)
    q2 = q + (i_q_eff * h2 - mp.delta_q * q) * mp.dt
    c2 = usable_compute_kernel(q2, mp.c_l) * s2
    c_t2 = c_t + d * mp.dt
    return q2, h2, s2, c2, c_t2


# --------------------------------------------------------------------------
# production side
# --------------------------------------------------------------------------

def produce_kernel(tfp, composite, k, f_stock, alpha, mu):
    return tfp * composite ** (1.0 - alpha - mu) * k ** alpha * f_stock ** mu


def ces_composite_kernel(task_inputs, weights, rho):
    """CES aggregate over a quadrature grid (degree-1 homogeneous)."""
    inner = jnp.sum(weights * jnp.maximum(task_inputs, TINY) ** rho)
    return inner ** (1.0 / rho)


def bin_coverage_kernel(f, n_bins):
    """Automated measure per worker bin and the covered-part midpoints.

    Bin j spans [j/n, (j+1)/n); coverage is the exact overlap with
    [0, f], so the measures sum to f and vary smoothly with it. The
    midpoint of the covered part is the evaluation node for runtime
    requirements (it never exceeds f).
    """
    width = 1.0 / n_bins
    edges = jnp.arange(n_bins) * width
    measures = jnp.clip(f - edges, 0.0, width)
    midpoints = edges + 0.5 * measures
    return measures, midpoints


def water_fill_kernel(budget, runtime_reqs, labor, weights, rho):
    """Optimal digital-worker allocation across automated task nodes.

    Maximizes the CES composite of task inputs (labor + workers) under
    sum_j weights_j * runtime_reqs_j * n_j = budget. The first-order
    condition equalizes (labor_j + n_j)^(rho-1)/runtime_reqs_j across
    nodes receiving compute; the multiplier is found by bisection (the
    spending is monotone in it). The bisection runs outside the
    gradient; the final rescale keeps the budget constraint exact and
    differentiable, which makes the envelope-theorem gradients exact.

    Returns worker counts n_j (zero wherever weights_j is zero).
    """
    kappa = 1.0 / (rho - 1.0)
    wpos = weights > 0.0
    reqs = jnp.where(wpos, runtime_reqs, 1.0)

    def spend_at(nu):
        n = jnp.maximum((nu * reqs) ** kappa - labor, 0.0)
        return jnp.sum(jnp.where(wpos, weights * reqs * n, 0.0)), n

    # closed form ignoring labor floors upper-bounds the multiplier
    denom = jnp.sum(jnp.where(wpos, weights * reqs ** (1.0 + kappa), 0.0))
    safe_budget = jnp.maximum(budget, TINY)
    log_nu0 = jnp.log(safe_budget / jnp.maximum(denom, TINY)) / kappa

    def body(_, bracket):
        lo, hi = bracket
        mid = 0.5 * (lo + hi)
        spent, _ = spend_at(jnp.exp(mid))
        beyond = spent > safe_budget  # spending decreases in nu
        return jnp.where(beyond, mid, lo), jnp.where(beyond, hi, mid)

    lo, hi = jax.lax.fori_loop(0, 160, body, (log_nu0 - 200.0, log_nu0 + 5.0))
    nu = jax.lax.stop_gradient(jnp.exp(0.5 * (lo + hi)))
    _, n = spend_at(nu)
    n = jax.lax.stop_gradient(n)
    # spending recomputed differentiably so the budget holds identically
    # in (budget, reqs, weights); allocation optimality then transfers
    # exact gradients by the envelope theorem
    live_spend = jnp.sum(jnp.where(wpos, weights * reqs * n, 0.0))
    live_spend = jnp.where(live_spend > 0.0, live_spend, 1.0)
    n = n * (budget / live_spend)
    return jnp.where(wpos & (budget > 0.0), n, 0.0)


class PeriodOutputs(NamedTuple):
    f: jnp.ndarray
    train_compute: jnp.ndarray      # D, eFLOP allocated to training this period
    inference_budget: jnp.ndarray   # eFLOP/year across automated tasks
    workers: jnp.ndarray            # digital workers per worker bin
    inference_per_bin: jnp.ndarray  # eFLOP/year density per worker bin
    bin_measures: jnp.ndarray
    labor_density_auto: jnp.ndarray
    labor_density_nonauto: jnp.ndarray
    composite: jnp.ndarray
    output: jnp.ndarray             # Y, $/year


def period_production_kernel(c, c_t, k, labor_total, share_train, share_inference,
                             mp: ModelParams, zeta, n_bins: int) -> PeriodOutputs:
    """Inner per-period solve: allocation of compute and labor, then output.

    The compute endowment c splits into training and an inference
    budget by the planner's shares; labor spreads uniformly over
    non-automated tasks (or stays put in the no-reallocation mode);
    runtime compute is water-filled across the automated bins.
    """
    capability = capability_kernel(c_t, mp.iota_max, mp.m)
    f = fraction_automatable_kernel(capability, mp.f_init, mp.t_agi,
                                    mp.delta_flop, zeta)
    d = share_train * c
    budget = share_inference * c

    measures, midpoints = bin_coverage_kernel(f, n_bins)
    reqs = runtime_requirement_kernel(midpoints, c_t, mp.f_init, mp.t_agi,
                                      mp.delta_flop, zeta, mp.gamma0,
                                      mp.gamma1, mp.m)
    labor_auto = mp.no_realloc * labor_total
    workers = water_fill_kernel(budget, reqs, labor_auto, measures, mp.rho)

    tasks_auto = jnp.maximum(labor_auto + workers, 1e-290)
    auto_term = jnp.sum(measures * tasks_auto ** mp.rho)
    # at full automation the non-automated branch is masked out, but its
    # intermediates must stay finite or the masked division still pollutes
    # the backward pass (0 * inf)
    at_full = f > 1.0 - 1e-15
    remaining = jnp.where(at_full, 1.0, 1.0 - f)
    labor_nonauto = jnp.where(mp.no_realloc > 0.5, labor_total,
                              labor_total / remaining)
    nonauto_term = jnp.where(at_full, 0.0, remaining * labor_nonauto ** mp.rho)
    inner = jnp.maximum(auto_term + nonauto_term, 1e-290)
    composite = inner ** (1.0 / mp.rho)

    output = produce_kernel(mp.tfp, composite, k, mp.f_stock, mp.alpha, mp.mu)
    return PeriodOutputs(f, d, budget, workers, workers * reqs, measures,
                         labor_auto, labor_nonauto, composite, output)


# --------------------------------------------------------------------------
# preferences
# --------------------------------------------------------------------------

def crra_kernel(consumption, eta):
    """Isoelastic utility, switching to the log form at eta = 1."""
    is_log = jnp.abs(eta - 1.0) < 1e-9
    eta_safe = jnp.where(is_log, 2.0, eta)
    power = (consumption ** (1.0 - eta_safe) - 1.0) / (1.0 - eta_safe)
    return jnp.where(is_log, jnp.log(consumption), power)


def utility_kernel(consumption, mp: ModelParams):
    """Floored, optionally spliced per-period utility of per-capita consumption.

    Above ``c_star`` the power utility continues as a log tail with
    matching value and slope; ``c_star = inf`` disables the splice.
    The floor applies inside utility only, never in accounting.
    """
    c = jnp.maximum(consumption, mp.c_floor)
    base = crra_kernel(jnp.minimum(c, mp.c_star), mp.eta)
    cs = jnp.where(jnp.isfinite(mp.c_star), mp.c_star, 1.0)
    tail = jnp.where(c > mp.c_star,
                     cs ** (1.0 - mp.eta) * jnp.log(jnp.maximum(c, cs) / cs),
                     0.0)
    return base + tail


def softmax_kernel(logits):
    z = logits - jax.scipy.special.logsumexp(logits)
    return jnp.exp(z)
