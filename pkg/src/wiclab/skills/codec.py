from collections.abc import Iterable
from pathlib import Path

import msgspec

from wiclab.env import GridAction, GridSpec, GridState

from .episode import SkillEpisode, replay_episode

__all__ = (
    "EpisodeRecord",
    "decode_episodes",
    "encode_episodes",
    "read_episodes",
    "write_episodes",
)


class EpisodeRecord(msgspec.Struct, frozen=True):
    skill: int
    start: tuple[int, int]
    actions: list[int]
    rewards: list[float] = msgspec.field(default_factory=list)
    """Per-step rewards; empty for unlabeled episodes."""


_encoder = msgspec.json.Encoder()
_decoder = msgspec.json.Decoder(EpisodeRecord)


def encode_episodes(episodes: Iterable[SkillEpisode]) -> str:
    """One JSON object per line: skill id, start cell, action list and rewards."""

    lines = [
        _encoder.encode(
            EpisodeRecord(
                skill=ep.skill,
                start=(ep.start_state.row, ep.start_state.col),
                actions=[int(a) for a in ep.actions],
                rewards=list(ep.rewards),
            )
        ).decode()
        for ep in episodes
    ]

    return "".join(f"{line}\n" for line in lines)


def decode_episodes(spec: GridSpec, text: str) -> list[SkillEpisode]:
    """Replay each record through the dynamics of `spec`."""

    episodes: list[SkillEpisode] = []

    for line in text.splitlines():
        if not line.strip():
            continue
        record = _decoder.decode(line)
        episode = replay_episode(spec, record.skill, GridState(*record.start), [GridAction(a) for a in record.actions])
        episodes.append(episode.with_rewards(record.rewards) if record.rewards else episode)

    return episodes


def write_episodes(path: Path | str, episodes: Iterable[SkillEpisode]) -> None:
    Path(path).write_text(encode_episodes(episodes))


def read_episodes(spec: GridSpec, path: Path | str) -> list[SkillEpisode]:
    return decode_episodes(spec, Path(path).read_text())
