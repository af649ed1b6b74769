from .potential import (
    PotentialBank,
    PotentialLossReport,
    WicConfig,
    label_episode_rewards,
    lipschitz_penalty,
    potential,
    potential_loss,
    train_potential_step,
    wic_reward,
)

__all__ = (
    "PotentialBank",
    "PotentialLossReport",
    "WicConfig",
    "label_episode_rewards",
    "lipschitz_penalty",
    "potential",
    "potential_loss",
    "train_potential_step",
    "wic_reward",
)
