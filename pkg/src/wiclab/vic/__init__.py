from .discriminator import (
    Discriminator,
    EndpointExample,
    discriminator_accuracy,
    discriminator_loss,
    label_episode_rewards,
    skill_posterior,
    train_discriminator_step,
    vic_reward,
)

__all__ = (
    "Discriminator",
    "EndpointExample",
    "discriminator_accuracy",
    "discriminator_loss",
    "label_episode_rewards",
    "skill_posterior",
    "train_discriminator_step",
    "vic_reward",
)
