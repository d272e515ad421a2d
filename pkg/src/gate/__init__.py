"""GATE: an integrated assessment model of AI-driven economic growth.

The package couples a compute-based model of AI development (hardware,
software R&D, training runs) with a task-automation framework and a
Ramsey-style macro model, and solves the social planner's trajectory
problem by gradient ascent. Optional add-ons cover R&D externality
wedges and uncertainty over the automation function.
"""

import jax

# Trajectory tolerances in this model (1e-9 round-trips, 1e-12 anchors)
# require double precision; must run before any jax computation.
jax.config.update("jax_enable_x64", True)

from .params import ParameterSet, Violation, default_preset, validate  # noqa: E402
from .initialization import calibrate_tfp, initial_state, warm_start_logits  # noqa: E402
from .planner import SolverSettings, solve  # noqa: E402

__all__ = [
    "ParameterSet",
    "Violation",
    "default_preset",
    "validate",
    "calibrate_tfp",
    "initial_state",
    "warm_start_logits",
    "SolverSettings",
    "solve",
]
