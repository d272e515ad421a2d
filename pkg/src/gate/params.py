"""Exogenous parameter set: defaults, ranges, validation, serialization.

Every tunable constant of the model lives here, together with the
machine-readable metadata (units, plausible range, default, display
scale, explanation) that drives validation, the CLI config format and
the sandbox UI's parameter schema endpoint.

Two validation modes exist:

- ``strict``  : every field must lie inside its documented plausible
  range, and configuration documents must not carry unknown keys.
- ``permissive`` : only structural invariants are enforced (signs,
  ordering, probability sums); values outside the documented ranges
  are accepted. The sandbox uses permissive validation for solving and
  surfaces strict violations as warnings.

Known source discrepancies (the parameter tables disagree with the
accompanying derivation text in four places) are resolved in favour of
the tables: eta 1.45 (text: 1.5), s_max 1e4 (text: 1e5), lambda_s
0.0625 (text: 0.14, which is also the value its theta_s derivation
uses), flop_gap_fraction 0.55 (text: 0.52).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from typing import Any, Iterable, Optional

PERFECT_REALLOCATION = "perfect_reallocation"
NO_REALLOCATION = "no_reallocation"
LABOR_MODES = (PERFECT_REALLOCATION, NO_REALLOCATION)


@dataclass(frozen=True)
class BeliefCandidate:
    """One automation-function candidate in the planner's belief support.

    ``zeta`` is the fraction of tasks at which the candidate plateaus
    (1.0 for the function that reaches full automation), ``prob`` its
    prior probability.
    """

    zeta: float
    prob: float


@dataclass(frozen=True)
class ParameterSet:
    """All exogenous constants of the model. Immutable; safe to share."""

    # -- general economics -------------------------------------------------
    y0: float = 110e12            # initial gross world product, $/year
    l0: float = 3.6e9             # initial labor force, workers
    g_l: float = 0.0025           # population growth rate, 1/year
    k0: float = 450e12            # initial capital stock, $
    alpha: float = 0.35           # output elasticity of capital
    mu: float = 0.0               # output elasticity of the non-accumulable factor
    f0: float = 1e12              # non-accumulable stock, $-equivalent (constant)
    a_k: float = 1.0              # capital adjustment timescale, years
    delta_k: float = 0.065        # capital depreciation, 1/year
    rho: float = -0.65            # CES substitution parameter (< 0: complements)
    beta: float = 0.05            # consumption discount rate, 1/year
    eta: float = 1.45             # relative risk aversion

    # -- hardware R&D -------------------------------------------------------
    h0: float = 1e18              # hardware efficiency, FLOP/year/$
    h_max: float = 1e23           # hardware efficiency ceiling
    i_h0: float = 1e11            # initial hardware R&D spending, $/year
    lambda_h: float = 0.14        # returns to scale in hardware R&D investment
    phi_h: float = 0.0769         # diminishing returns in hardware efficiency level
    theta_h: float = 0.192        # hardware R&D productivity scale

    # -- software R&D -------------------------------------------------------
    s0: float = 1.0               # software efficiency, eFLOP/FLOP (1 by definition)
    s_max: float = 1e4            # software efficiency ceiling
    i_s0: float = 5e9             # initial software R&D spending, $/year
    lambda_s: float = 0.0625      # returns to scale in software R&D investment
    phi_s: float = 0.32           # diminishing returns in software efficiency level
    theta_s: float = 0.0307       # software R&D productivity scale

    # -- compute investment and stock ----------------------------------------
    i_q0: float = 2e11            # initial compute investment, $/year
    chi: float = 4.0              # compute adjustment cost exponent (> 1)
    a_q: float = 2.0              # compute adjustment timescale, years
    delta_q: float = 0.3          # compute depreciation, 1/year
    c_t0: float = 5e25            # largest training run to date, eFLOP
    c_l: float = 2e38             # heat-dissipation cap on usable compute, FLOP/year
    c_i0: float = 1e28            # compute available for running AI, eFLOP/year
    gamma0: float = 15.0          # log10 minimum runtime cost of the easiest task
    gamma1: float = 9.0           # OOM rise in runtime cost across the task space
    m: float = 2.0                # training-inference tradeoff slope
    iota_max: float = 1e5         # maximum inference multiplier

    # -- automation -----------------------------------------------------------
    t_agi: float = 10**36.5       # training compute for full automation, eFLOP
    f_init: float = 0.1           # fraction of tasks automated at the start
    flop_gap_fraction: float = 0.55  # FLOP gap as a fraction of the initial distance to t_agi

    # -- add-ons ---------------------------------------------------------------
    xi: float = 1.0               # R&D wedge (1 = externality add-on off)
    belief_spec: tuple[BeliefCandidate, ...] = (BeliefCandidate(1.0, 1.0),)
    labor_mode: str = PERFECT_REALLOCATION

    # -- solver discretization --------------------------------------------------
    tau_plan: float = 80.0        # reported planning horizon, years
    tau_optim: float = 160.0      # optimization horizon, years (>= tau_plan)
    task_grid_workers: int = 20   # grid for digital-worker allocation
    task_grid_labor: int = 100    # grid for labor allocation / CES integral

    def delta_flop(self) -> float:
        """FLOP gap in OOMs, derived from the fraction parameterization.

        The gap fraction is defined against the initial distance between
        the start-of-simulation capability (largest training run boosted
        by the maximum inference multiplier) and the full-automation
        requirement, so that automation sits exactly at ``f_init`` when
        the simulation starts.
        """
        cap0 = self.c_t0 * self.iota_max ** (1.0 / self.m)
        return self.flop_gap_fraction * (math.log10(self.t_agi) - math.log10(cap0))

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "belief_spec":
                value = [{"zeta": c.zeta, "prob": c.prob} for c in value]
            doc[f.name] = value
        return doc

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_document(), **kwargs)


FIELD_NAMES = tuple(f.name for f in fields(ParameterSet))


@dataclass(frozen=True)
class Violation:
    """A single validation finding. Violations are data, not exceptions."""

    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


@dataclass(frozen=True)
class ParamMeta:
    name: str
    units: str
    lo: Optional[float]
    hi: Optional[float]
    group: str
    tooltip: str
    addon: Optional[str] = None

    @property
    def scale(self) -> str:
        # log-scaled UI control whenever the plausible range spans >= 2 OOMs
        if self.lo is not None and self.hi is not None and self.lo > 0:
            if self.hi / self.lo >= 100.0:
                return "log"
        return "linear"


PARAM_TABLE: dict[str, ParamMeta] = {m.name: m for m in [
    ParamMeta("y0", "$/year", 105e12, 115e12, "economy",
              "Gross world product at the start of the simulation."),
    ParamMeta("l0", "workers", 3.4e9, 3.8e9, "economy",
              "Total human labor force at the start of the simulation."),
    ParamMeta("g_l", "1/year", -0.01, 0.02, "economy",
              "Annual growth rate of the human labor force."),
    ParamMeta("k0", "$", 200e12, 1e15, "economy",
              "Value of the physical capital stock at the start."),
    ParamMeta("alpha", "dimensionless", 0.2, 0.6, "economy",
              "Output elasticity of capital in the production function."),
    ParamMeta("mu", "dimensionless", 0.0, 0.3, "economy",
              "Output elasticity of the non-accumulable factor (land/resources)."),
    ParamMeta("f0", "$-equivalent", None, None, "economy",
              "Stock of the non-accumulable factor; TFP calibration absorbs its scale."),
    ParamMeta("a_k", "years", 0.5, 2.0, "economy",
              "Capital adjustment timescale; larger values mean costlier rapid buildouts."),
    ParamMeta("delta_k", "1/year", 0.003, 0.20, "economy",
              "Depreciation rate of physical capital."),
    ParamMeta("rho", "dimensionless", -5.0, -0.2, "economy",
              "CES substitution parameter across tasks; negative values make tasks complements."),
    ParamMeta("beta", "1/year", 0.03, 0.07, "economy",
              "Rate at which future consumption is discounted."),
    ParamMeta("eta", "dimensionless", 1.0, 6.0, "economy",
              "Relative risk aversion of the isoelastic utility; 1 is log utility."),
    ParamMeta("h0", "FLOP/year/$", 1e17, 1e19, "hardware_rd",
              "Computations per dollar per year at the start."),
    ParamMeta("h_max", "FLOP/year/$", 1e21, 1e25, "hardware_rd",
              "Ceiling on hardware efficiency under the current paradigm."),
    ParamMeta("i_h0", "$/year", 1e10, 1e12, "hardware_rd",
              "Hardware R&D spending at the start."),
    ParamMeta("lambda_h", "dimensionless", 0.0625, 1.0, "hardware_rd",
              "Diminishing returns of hardware R&D investment (stepping-on-toes)."),
    ParamMeta("phi_h", "dimensionless", 0.01, 1.0, "hardware_rd",
              "Fishing-out effect: how the hardware efficiency level slows further gains."),
    ParamMeta("theta_h", "mixed", 0.001, 1000.0, "hardware_rd",
              "Scale factor converting hardware R&D into efficiency growth."),
    ParamMeta("s0", "eFLOP/FLOP", 1.0, 1.0, "software_rd",
              "Software efficiency at the start; 1 by definition."),
    ParamMeta("s_max", "eFLOP/FLOP", 50.0, 1e8, "software_rd",
              "Ceiling on software efficiency under the current paradigm."),
    ParamMeta("i_s0", "$/year", 1e9, 2.5e10, "software_rd",
              "Software R&D spending at the start."),
    ParamMeta("lambda_s", "dimensionless", 0.0625, 1.0, "software_rd",
              "Diminishing returns of software R&D investment."),
    ParamMeta("phi_s", "dimensionless", 0.1, 1.0, "software_rd",
              "Fishing-out effect for software efficiency."),
    ParamMeta("theta_s", "mixed", 0.001, 1000.0, "software_rd",
              "Scale factor converting software R&D into efficiency growth."),
    ParamMeta("i_q0", "$/year", 5e10, 8e11, "compute",
              "Dollar spending on compute production at the start."),
    ParamMeta("chi", "dimensionless", 3.0, 5.0, "compute",
              "Steepness of compute adjustment costs (super-quadratic for values above 2)."),
    ParamMeta("a_q", "years", 1.0, 4.0, "compute",
              "Compute adjustment timescale."),
    ParamMeta("delta_q", "1/year", 0.05, 0.9, "compute",
              "Depreciation rate of compute hardware."),
    ParamMeta("c_t0", "eFLOP", 2e25, 2e26, "compute",
              "Largest training run performed before the simulation starts."),
    ParamMeta("c_l", "FLOP/year", 8.6e34, 5e41, "compute",
              "Thermodynamic bound on total computation per year."),
    ParamMeta("c_i0", "eFLOP/year", 1e27, 1e29, "compute",
              "Compute available for running AI systems at the start."),
    ParamMeta("gamma0", "log10 eFLOP/year", 13.0, 17.0, "runtime",
              "Minimum runtime cost of the easiest task, in orders of magnitude."),
    ParamMeta("gamma1", "OOMs", 7.0, 11.0, "runtime",
              "Rise in task runtime cost from the easiest to the hardest task."),
    ParamMeta("m", "dimensionless", 1.0, 4.0, "runtime",
              "OOMs of inference compute that substitute for one OOM of training."),
    ParamMeta("iota_max", "dimensionless", 1e3, 1e7, "runtime",
              "Maximum inference multiplier on top of the trained capability."),
    ParamMeta("t_agi", "eFLOP", 1e33, 1e41, "automation",
              "Effective training compute needed to automate every task."),
    ParamMeta("f_init", "fraction", 0.05, 0.2, "automation",
              "Fraction of tasks automated at the start."),
    ParamMeta("flop_gap_fraction", "fraction", 0.4, 0.8, "automation",
              "How early pre-AGI systems start automating, as a share of the remaining compute distance."),
    ParamMeta("xi", "dimensionless", 2.0, 20.0, "addons",
              "R&D wedge: the planner perceives only investment/xi of R&D spending (1 disables the add-on).",
              addon="externality"),
    ParamMeta("tau_plan", "years", 1.0, 500.0, "solver",
              "Reported planning horizon."),
    ParamMeta("tau_optim", "years", 1.0, 1000.0, "solver",
              "Horizon over which the objective is truncated and optimized."),
    ParamMeta("task_grid_workers", "count", 2, 200, "solver",
              "Grid points for allocating digital workers across automated tasks."),
    ParamMeta("task_grid_labor", "count", 2, 1000, "solver",
              "Grid points for labor allocation and the CES integral."),
]}


def default_preset() -> ParameterSet:
    """The documented default column, verbatim."""
    return ParameterSet()


def _positive_fields() -> tuple[str, ...]:
    return (
        "y0", "l0", "k0", "f0", "a_k", "beta", "eta",
        "h0", "h_max", "i_h0", "lambda_h", "theta_h",
        "s0", "s_max", "i_s0", "lambda_s", "theta_s",
        "i_q0", "a_q", "delta_q", "c_t0", "c_l", "c_i0",
        "m", "iota_max", "t_agi", "f_init", "flop_gap_fraction",
        "xi", "tau_plan", "tau_optim",
    )


def validate(p: ParameterSet, mode: str = "permissive") -> list[Violation]:
    """Check a parameter set; returns an empty list when valid.

    ``permissive`` checks only structural invariants; ``strict``
    additionally checks every field against its documented range.
    """
    if mode not in ("strict", "permissive"):
        raise ValueError(f"unknown validation mode {mode!r}")
    out: list[Violation] = []

    for name in _positive_fields():
        if not getattr(p, name) > 0:
            out.append(Violation(name, "must be > 0"))
    if not p.rho < 0:
        out.append(Violation("rho", "must be < 0 (tasks are gross complements)"))
    if not p.alpha > 0:
        out.append(Violation("alpha", "must be > 0"))
    if not p.mu >= 0:
        out.append(Violation("mu", "must be >= 0"))
    if not p.alpha + p.mu < 1:
        out.append(Violation("alpha", "alpha + mu must be < 1"))
    if not p.beta > p.g_l:
        out.append(Violation("beta", "must exceed g_l for the discounted objective to converge"))
    if not p.chi > 1:
        out.append(Violation("chi", "must be > 1"))
    if not 0 < p.delta_k < 1:
        out.append(Violation("delta_k", "must lie in (0, 1)"))
    if not 0 < p.delta_q < 1:
        out.append(Violation("delta_q", "must lie in (0, 1)"))
    if not p.f_init < 1:
        out.append(Violation("f_init", "must be < 1"))
    if not p.h_max > p.h0:
        out.append(Violation("h_max", "must exceed h0"))
    if not p.s_max > p.s0:
        out.append(Violation("s_max", "must exceed s0"))
    if not p.iota_max >= 1:
        out.append(Violation("iota_max", "must be >= 1"))
    if not p.tau_optim >= p.tau_plan:
        out.append(Violation("tau_optim", "must be >= tau_plan"))
    if p.c_t0 > 0 and p.m > 0 and p.iota_max >= 1 and p.t_agi > 0:
        if not p.t_agi > p.c_t0 * p.iota_max ** (1.0 / p.m):
            out.append(Violation(
                "t_agi", "must exceed the initial inference-boosted capability "
                         "c_t0 * iota_max^(1/m)"))
    if p.labor_mode not in LABOR_MODES:
        out.append(Violation("labor_mode", f"must be one of {LABOR_MODES}"))
    if not (isinstance(p.task_grid_workers, int) and p.task_grid_workers >= 2):
        out.append(Violation("task_grid_workers", "must be an integer >= 2"))
    if not (isinstance(p.task_grid_labor, int) and p.task_grid_labor >= 2):
        out.append(Violation("task_grid_labor", "must be an integer >= 2"))

    out.extend(_validate_beliefs(p))

    if mode == "strict":
        for name, meta in PARAM_TABLE.items():
            if meta.lo is None or meta.hi is None:
                continue
            if name == "xi" and p.xi == 1.0:
                continue  # wedge of exactly 1 means the add-on is off
            value = getattr(p, name)
            if not meta.lo <= value <= meta.hi:
                out.append(Violation(
                    name, f"{value!r} outside documented range [{meta.lo!r}, {meta.hi!r}]"))
    return out


def _validate_beliefs(p: ParameterSet) -> list[Violation]:
    out: list[Violation] = []
    if not p.belief_spec:
        return [Violation("belief_spec", "must contain at least one candidate")]
    total = sum(c.prob for c in p.belief_spec)
    if abs(total - 1.0) > 1e-9:
        out.append(Violation("belief_spec", f"belief probabilities must sum to 1 (got {total!r})"))
    for c in p.belief_spec:
        if not 0 <= c.prob <= 1:
            out.append(Violation("belief_spec", f"probability {c.prob!r} outside [0, 1]"))
        if not p.f_init < c.zeta <= 1.0:
            out.append(Violation(
                "belief_spec", f"zeta {c.zeta!r} must lie in (f_init, 1]"))
    n_full = sum(1 for c in p.belief_spec if c.zeta == 1.0)
    if n_full != 1:
        out.append(Violation("belief_spec", "exactly one candidate must reach full automation (zeta = 1)"))
    zetas = [c.zeta for c in p.belief_spec]
    if len(set(zetas)) != len(zetas):
        out.append(Violation("belief_spec", "plateau values must be distinct"))
    return out


def from_document(doc: dict[str, Any]) -> tuple[ParameterSet, list[Violation]]:
    """Build a ParameterSet from a configuration document.

    Omitted fields take defaults (clients send deltas only). Unknown
    keys do not fail the load; they are reported as violations, which
    strict-mode consumers treat as errors.
    """
    unknown = [k for k in doc if k not in FIELD_NAMES]
    violations = [Violation(k, "unknown configuration key") for k in sorted(unknown)]
    overrides: dict[str, Any] = {}
    for name in FIELD_NAMES:
        if name not in doc:
            continue
        value = doc[name]
        if name == "belief_spec":
            value = tuple(
                BeliefCandidate(float(c["zeta"]), float(c["prob"])) for c in value
            )
        elif name in ("task_grid_workers", "task_grid_labor"):
            value = int(value)
        elif name == "labor_mode":
            value = str(value)
        else:
            value = float(value)
        overrides[name] = value
    return replace(ParameterSet(), **overrides), violations


def from_json(text: str) -> tuple[ParameterSet, list[Violation]]:
    return from_document(json.loads(text))


def schema_document() -> dict[str, Any]:
    """Parameter schema consumed by UIs: one entry per scalar field.

    Enumerated/structured fields (labor mode, belief support) are
    described separately so clients can render dedicated controls.
    """
    defaults = ParameterSet()
    entries = []
    for name, meta in PARAM_TABLE.items():
        entries.append({
            "name": name,
            "units": meta.units,
            "default": getattr(defaults, name),
            "range": None if meta.lo is None else [meta.lo, meta.hi],
            "scale": meta.scale,
            "group": meta.group,
            "addon": meta.addon,
            "tooltip": meta.tooltip,
        })
    return {
        "parameters": entries,
        "labor_modes": list(LABOR_MODES),
        "belief_spec": {
            "addon": "uncertainty",
            "default": [{"zeta": 1.0, "prob": 1.0}],
            "tooltip": "Candidate automation functions: plateau fraction and prior probability; "
                       "exactly one candidate must have zeta = 1.",
        },
    }


def document_digest(doc: dict[str, Any], extra: Optional[dict[str, Any]] = None) -> str:
    """Stable hash of a configuration document plus solver settings."""
    import hashlib

    payload = {"config": doc}
    if extra:
        payload.update(extra)
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]
