from .confidence import BwkConfidenceState, ConfidenceState
from .ls2slp import (
    empirical_dlp,
    exploration_program,
    ls2slp_epoch,
    ls2slp_last_epoch,
    ls_gamma,
    pessimistic_program,
    run_ls2slp,
)
from .runner import PolicySpec, run_policy
from .scheduling import (
    EpochPlan,
    epoch_grid,
    nu,
    order_blocks,
    play_blocks,
    play_until_horizon,
    round_lengths,
)
from .tweaked import GammaClamped, tweaked_gamma, tweaked_lp_plan

__all__ = [
    "BwkConfidenceState",
    "ConfidenceState",
    "EpochPlan",
    "GammaClamped",
    "PolicySpec",
    "empirical_dlp",
    "epoch_grid",
    "exploration_program",
    "ls2slp_epoch",
    "ls2slp_last_epoch",
    "ls_gamma",
    "nu",
    "order_blocks",
    "pessimistic_program",
    "play_blocks",
    "play_until_horizon",
    "round_lengths",
    "run_ls2slp",
    "run_policy",
    "tweaked_gamma",
    "tweaked_lp_plan",
]
