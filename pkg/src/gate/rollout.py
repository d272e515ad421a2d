"""Trajectory engines: deterministic, scenario-tree, and phase-policy rollouts.

Each engine scans the per-period step over the optimization horizon and
returns the discounted objective together with the full state/allocation
series. Engines are built per (horizon, grid, candidate-count) shape and
jitted once; parameter values stay dynamic so sweeps and repeated solves
reuse the compiled code.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import jax
import jax.numpy as jnp

from . import kernels
from .kernels import EconState, ModelParams


class PathArrays(NamedTuple):
    """Per-period series along one trajectory (start-of-period states)."""

    output: jnp.ndarray
    consumption_pc: jnp.ndarray
    f: jnp.ndarray
    c: jnp.ndarray
    c_t: jnp.ndarray
    q: jnp.ndarray
    h: jnp.ndarray
    s: jnp.ndarray
    k: jnp.ndarray
    labor: jnp.ndarray
    out_shares: jnp.ndarray     # [T, 5]
    comp_shares: jnp.ndarray    # [T, 2]
    train_compute: jnp.ndarray
    inference_budget: jnp.ndarray
    composite: jnp.ndarray
    utility: jnp.ndarray        # discounted utility increments
    info_state: jnp.ndarray     # information-state index (0 outside uncertainty mode)


def period_step(state: EconState, t, logits_t, mp: ModelParams, zeta,
                n_bins: int, info_idx=0):
    """Allocate, produce, consume, and advance every state one period."""
    out_sh = kernels.softmax_kernel(logits_t[:5])
    cmp_sh = kernels.softmax_kernel(logits_t[5:])
    pr = kernels.period_production_kernel(
        state.c, state.c_t, state.k, state.labor, cmp_sh[0], cmp_sh[1],
        mp, zeta, n_bins)
    y = pr.output
    c_pc = out_sh[0] * y / state.labor
    i_k, i_q, i_h, i_s = (out_sh[1] * y, out_sh[2] * y,
                          out_sh[3] * y, out_sh[4] * y)
    discount = jnp.exp(-(mp.beta - mp.g_l) * t * mp.dt)
    util = discount * kernels.utility_kernel(c_pc, mp) * mp.dt

    q2, h2, s2, c2, c_t2 = kernels.step_compute_state_kernel(
        state.q, state.h, state.s, state.c_t, i_q, i_h, i_s,
        pr.train_compute, mp)
    i_k_eff = kernels.capital_investment_kernel(i_k, state.k, mp.a_k)
    k2 = state.k + (i_k_eff - mp.delta_k * state.k) * mp.dt
    labor2 = state.labor * jnp.exp(mp.g_l * mp.dt)

    record = PathArrays(
        output=y, consumption_pc=c_pc, f=pr.f, c=state.c, c_t=state.c_t,
        q=state.q, h=state.h, s=state.s, k=state.k, labor=state.labor,
        out_shares=out_sh, comp_shares=cmp_sh,
        train_compute=pr.train_compute, inference_budget=pr.inference_budget,
        composite=pr.composite, utility=util,
        info_state=jnp.asarray(info_idx),
    )
    return EconState(k2, labor2, q2, h2, s2, c2, c_t2), record


@lru_cache(maxsize=None)
def deterministic_engine(n_periods: int, n_bins: int):
    """Rollout under a single known automation function (plateau zeta)."""

    def run(logits, mp: ModelParams, init: EconState, zeta):
        def body(state, xs):
            t, logits_t = xs
            return period_step(state, t, logits_t, mp, zeta, n_bins)

        ts = jnp.arange(n_periods)
        _, recs = jax.lax.scan(body, init, (ts, logits))
        return jnp.sum(recs.utility), recs

    return jax.jit(run)


@lru_cache(maxsize=None)
def scenario_engine(n_periods: int, n_bins: int, n_cands: int):
    """Scenario-tree rollout under automation uncertainty.

    One trajectory per candidate-is-true scenario. Decisions are read
    from an information-state-indexed schedule; the information state
    is the surviving candidate set, which for this family is always a
    suffix {k..n} of the zeta-sorted candidates or the singleton left
    once the true plateau is revealed. Indices: 0..n-1 are the
    suffixes {1..n}..{n}, n..2n-2 the singletons {1}..{n-1}.
    """
    n_states = 2 * n_cands - 1

    def run(logits_states, mp: ModelParams, init: EconState, zetas, onsets, probs):
        # scan consumes time-major decisions: [T, n_states, 7]
        time_major = jnp.swapaxes(logits_states, 0, 1)
        ts = jnp.arange(n_periods)
        values = []
        paths = []
        for s in range(n_cands):
            singleton_idx = s if s == n_cands - 1 else n_cands + s

            def body(state, xs, s=s, singleton_idx=singleton_idx):
                t, lt = xs
                capability = kernels.capability_kernel(
                    state.c_t, mp.iota_max, mp.m)
                if s == 0:
                    crossed_before = jnp.asarray(0)
                else:
                    crossed_before = jnp.sum(
                        (capability > onsets[:s]).astype(jnp.int32))
                own = capability > onsets[s]
                idx = jnp.where(own, singleton_idx, crossed_before)
                return period_step(state, t, lt[idx], mp, zetas[s],
                                   n_bins, info_idx=idx)

            _, recs = jax.lax.scan(body, init, (ts, time_major))
            values.append(jnp.sum(recs.utility))
            paths.append(recs)
        value = sum(probs[s] * values[s] for s in range(n_cands))
        return value, jnp.stack(values), paths

    return jax.jit(run), n_states


@lru_cache(maxsize=None)
def phase_engine(n_periods: int, n_bins: int):
    """Rollout under a restricted 3-point policy indexed by automation phase.

    Phase 0: automation still at its initial level; phase 1: the ramp;
    phase 2: full automation. Used by the simple-policy sanity check.
    """

    def run(logits3, mp: ModelParams, init: EconState, zeta):
        def body(state, t):
            capability = kernels.capability_kernel(state.c_t, mp.iota_max, mp.m)
            f = kernels.fraction_automatable_kernel(
                capability, mp.f_init, mp.t_agi, mp.delta_flop, zeta)
            phase = jnp.where(f > 1.0 - 1e-12, 2,
                              jnp.where(f > mp.f_init + 1e-12, 1, 0))
            return period_step(state, t, logits3[phase], mp, zeta, n_bins,
                               info_idx=phase)

        _, recs = jax.lax.scan(body, init, jnp.arange(n_periods))
        return jnp.sum(recs.utility), recs

    return jax.jit(run)


def initial_econ_state(init) -> EconState:
    """Pack an InitialState (or anything with the same fields) for the scan."""
    return EconState(
        k=jnp.float64(init.k), labor=jnp.float64(init.labor),
        q=jnp.float64(init.q), h=jnp.float64(init.h), s=jnp.float64(init.s),
        c=jnp.float64(init.c), c_t=jnp.float64(init.c_t))
