from .reinforce import (
    NUM_ACTIONS,
    Baseline,
    PolicyTable,
    ReinforceReport,
    SkillPolicy,
    action_distribution,
    baseline_loss,
    entropy,
    reinforce_surrogate,
    reinforce_update,
    rewards_to_go,
)

__all__ = (
    "NUM_ACTIONS",
    "Baseline",
    "PolicyTable",
    "ReinforceReport",
    "SkillPolicy",
    "action_distribution",
    "baseline_loss",
    "entropy",
    "reinforce_surrogate",
    "reinforce_update",
    "rewards_to_go",
)
