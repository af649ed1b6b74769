from .chain import ChainSchedule, SkillChain, chain_episodes
from .codec import EpisodeRecord, decode_episodes, encode_episodes, read_episodes, write_episodes
from .episode import (
    ActionSampler,
    ConstantPolicy,
    RandomPolicy,
    SkillEpisode,
    SkillId,
    replay_episode,
    run_skill_episode,
    sample_skill,
)
from .visitation import VisitationSample, visitation_samples

__all__ = (
    "ActionSampler",
    "ChainSchedule",
    "ConstantPolicy",
    "EpisodeRecord",
    "RandomPolicy",
    "SkillChain",
    "SkillEpisode",
    "SkillId",
    "VisitationSample",
    "chain_episodes",
    "decode_episodes",
    "encode_episodes",
    "read_episodes",
    "replay_episode",
    "run_skill_episode",
    "sample_skill",
    "visitation_samples",
    "write_episodes",
)
