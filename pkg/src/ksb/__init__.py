"""Online learning under simultaneous resource and switching constraints.

A toolkit for simulating and benchmarking price-based revenue management and
arm-based packing problems where the learner faces finite inventories, a hard
cap on action changes, and unknown demand.  Ships a dense packing-LP solver,
seeded environments, a family of limited-switch learning policies plus
literature baselines, adversarial instance generators with closed-form
cross-checks, and a reproducible Monte-Carlo benchmark harness.
"""

from .bench import (
    CSV_HEADER,
    ExperimentConfig,
    dlp_upper,
    make_instance,
    run_benchmark,
    summarize,
)
from .envs import (
    BnrmInstance,
    BnrmProblem,
    BwkInstance,
    BwkProblem,
    RunRecord,
    demand_means,
    instance_from_json,
    make_env,
    make_rng_pair,
    replay_actions,
)
from .lp import (
    PackingProgram,
    Row,
    VertexSolution,
    build_dlp,
    build_dlp_g,
    solve_packing,
)
from .policies import (
    ConfidenceState,
    EpochPlan,
    PolicySpec,
    epoch_grid,
    nu,
    run_policy,
    tweaked_lp_plan,
)

__version__ = "0.1.0"
