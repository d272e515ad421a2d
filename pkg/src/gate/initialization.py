"""Initial conditions, warm-start policy, and TFP calibration."""

from __future__ import annotations

import math
from typing import NamedTuple

import jax.numpy as jnp
import numpy as np

from . import kernels
from .params import NO_REALLOCATION, ParameterSet

# Frontier training runs have recently grown 4-5x per year; the warm
# start allocates one year of that growth to training.
TRAINING_RUN_GROWTH = 4.0


class InitialState(NamedTuple):
    k: float
    labor: float
    q: float
    h: float
    s: float
    c: float
    c_t: float


def initial_state(p: ParameterSet) -> InitialState:
    """State block at t = 0.

    Effective compute starts at the runtime endowment c_i0; the
    physical stock is backed out through the heat-cap identity so that
    usable(Q0) * S0 = C0 holds exactly from the first step.
    """
    usable = p.c_i0 / p.s0
    if not usable < p.c_l:
        raise ValueError("initial usable compute must lie below the heat cap")
    q0 = float(kernels.usable_compute_inverse_kernel(usable, p.c_l))
    return InitialState(k=p.k0, labor=p.l0, q=q0, h=p.h0, s=p.s0,
                        c=p.c_i0, c_t=p.c_t0)


def warm_start_shares(p: ParameterSet) -> tuple[np.ndarray, np.ndarray]:
    """Initial-period policy implied by today's observed flows.

    Output shares: compute investment, hardware R&D and software R&D
    from their documented initial spending over initial GWP; capital
    investment at the stock-sustaining level delta_k * K0 / Y0 (close
    to the observed world savings rate); consumption takes the
    residual. Compute split: training gets one year of frontier
    training-run growth relative to the runtime endowment.
    """
    s_q = p.i_q0 / p.y0
    s_h = p.i_h0 / p.y0
    s_s = p.i_s0 / p.y0
    s_k = p.delta_k * p.k0 / p.y0
    s_c = 1.0 - (s_q + s_h + s_s + s_k)
    if s_c <= 0:
        raise ValueError("initial investment flows exceed initial output")
    out = np.array([s_c, s_k, s_q, s_h, s_s])

    d0 = (TRAINING_RUN_GROWTH - 1.0) * p.c_t0
    s_train = min(max(d0 / p.c_i0, 1e-4), 0.9)
    comp = np.array([s_train, 1.0 - s_train])
    return out, comp


def warm_start_logits(p: ParameterSet, n_periods: int,
                      n_states: int = 1) -> np.ndarray:
    """Log-share logits replicated over the horizon (and information states)."""
    out, comp = warm_start_shares(p)
    point = np.concatenate([np.log(out), np.log(comp)])
    logits = np.tile(point, (n_periods, 1))
    if n_states > 1:
        logits = np.tile(logits, (n_states, 1, 1))
    return logits


def model_params(p: ParameterSet, tfp: float, dt: float = 1.0,
                 xi: float = 1.0, c_star: float = math.inf,
                 c_floor: float | None = None) -> kernels.ModelParams:
    """Bundle a ParameterSet into the kernel-facing scalar tuple."""
    if c_floor is None:
        out, _ = warm_start_shares(p)
        c_floor = 1e-12 * out[0] * p.y0 / p.l0
    return kernels.ModelParams(
        alpha=jnp.float64(p.alpha), mu=jnp.float64(p.mu), rho=jnp.float64(p.rho),
        beta=jnp.float64(p.beta), eta=jnp.float64(p.eta), g_l=jnp.float64(p.g_l),
        delta_k=jnp.float64(p.delta_k), a_k=jnp.float64(p.a_k),
        a_q=jnp.float64(p.a_q), chi=jnp.float64(p.chi),
        delta_q=jnp.float64(p.delta_q),
        theta_h=jnp.float64(p.theta_h), phi_h=jnp.float64(p.phi_h),
        lambda_h=jnp.float64(p.lambda_h), h_init=jnp.float64(p.h0),
        h_max=jnp.float64(p.h_max),
        theta_s=jnp.float64(p.theta_s), phi_s=jnp.float64(p.phi_s),
        lambda_s=jnp.float64(p.lambda_s), s_init=jnp.float64(p.s0),
        s_max=jnp.float64(p.s_max),
        c_l=jnp.float64(p.c_l), m=jnp.float64(p.m),
        iota_max=jnp.float64(p.iota_max),
        gamma0=jnp.float64(p.gamma0), gamma1=jnp.float64(p.gamma1),
        t_agi=jnp.float64(p.t_agi), f_init=jnp.float64(p.f_init),
        delta_flop=jnp.float64(p.delta_flop()),
        f_stock=jnp.float64(p.f0), tfp=jnp.float64(tfp),
        c_floor=jnp.float64(c_floor), xi=jnp.float64(xi),
        no_realloc=jnp.float64(1.0 if p.labor_mode == NO_REALLOCATION else 0.0),
        c_star=jnp.float64(c_star), dt=jnp.float64(dt),
    )


def calibrate_tfp(p: ParameterSet) -> float:
    """Constant TFP that reproduces initial output exactly.

    Evaluates the period-0 inner solve (warm-start compute split,
    optimal labor and inference allocation) with unit TFP and rescales
    so production equals y0. Linear in y0 by construction.
    """
    init = initial_state(p)
    _, comp = warm_start_shares(p)
    mp = model_params(p, tfp=1.0)
    pr = kernels.period_production_kernel(
        init.c, init.c_t, init.k, init.labor, comp[0], comp[1], mp,
        zeta=1.0, n_bins=p.task_grid_workers)
    raw = float(pr.output)
    if not raw > 0:
        raise ValueError("initial output is zero; cannot calibrate TFP")
    return p.y0 / raw
