from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from wiclab.env import GridAction, GridSpec, GridState
from wiclab.exception import ConfigurationError, ContractViolation
from wiclab.skills import (
    ChainSchedule,
    ConstantPolicy,
    RandomPolicy,
    SkillChain,
    SkillEpisode,
    chain_episodes,
    decode_episodes,
    encode_episodes,
    read_episodes,
    replay_episode,
    run_skill_episode,
    sample_skill,
    visitation_samples,
    write_episodes,
)


def test_sample_skill_is_uniform(rng: np.random.Generator) -> None:
    counts = Counter(sample_skill(rng, 4) for _ in range(100_000))

    for w in range(4):
        assert counts[w] / 100_000 == pytest.approx(0.25, abs=0.01)


def test_sample_skill_single_and_invalid(rng: np.random.Generator) -> None:
    assert {sample_skill(rng, 1) for _ in range(50)} == {0}

    with pytest.raises(ConfigurationError):
        sample_skill(rng, 0)


def test_sample_skill_is_reproducible() -> None:
    a = np.random.default_rng(3)
    b = np.random.default_rng(3)

    assert [sample_skill(a, 4) for _ in range(100)] == [sample_skill(b, 4) for _ in range(100)]


def test_random_episode_shape(open15: GridSpec, centre: GridState, rng: np.random.Generator) -> None:
    ep = run_skill_episode(open15, RandomPolicy(), 2, centre, 10, rng)

    assert len(ep.states) == 11
    assert len(ep.actions) == len(ep.rewards) == 10
    assert ep.rewards == (0.0,) * 10
    assert ep.skill == 2
    assert all(abs(s.row - centre.row) + abs(s.col - centre.col) <= 10 for s in ep.states)


def test_noop_episode_stays_put(open15: GridSpec, centre: GridState, rng: np.random.Generator) -> None:
    ep = run_skill_episode(open15, ConstantPolicy(), 0, centre, 7, rng)

    assert set(ep.states) == {centre}


def test_always_up_clamps_at_top(open15: GridSpec, rng: np.random.Generator) -> None:
    ep = run_skill_episode(open15, ConstantPolicy(GridAction.UP), 0, GridState(7, 7), 10, rng)

    assert ep.end_state == GridState(0, 7)


def test_episode_rejects_bad_horizon(open15: GridSpec, centre: GridState, rng: np.random.Generator) -> None:
    with pytest.raises(ConfigurationError):
        run_skill_episode(open15, RandomPolicy(), 0, centre, 0, rng)


def test_episode_length_contract(centre: GridState) -> None:
    with pytest.raises(ContractViolation):
        SkillEpisode(skill=0, start_state=centre, states=(centre,), actions=(GridAction.NOOP,), rewards=(0.0,))


def test_replay_reproduces_states(four_rooms: GridSpec, rng: np.random.Generator) -> None:
    for _ in range(20):
        ep = run_skill_episode(four_rooms, RandomPolicy(), 1, four_rooms.start_cell, 40, rng)

        assert replay_episode(four_rooms, ep.skill, ep.start_state, ep.actions).states == ep.states


def test_tabular_chain_resets_every_episode(open15: GridSpec, rng: np.random.Generator) -> None:
    schedule = ChainSchedule(skills=4, horizon=10, episodes_between_resets=1, total_episodes=3)

    episodes = chain_episodes(open15, RandomPolicy(), schedule, rng)

    assert len(episodes) == 3
    assert all(ep.start_state == open15.start_cell for ep in episodes)


def test_four_rooms_chain_resets_after_17(four_rooms: GridSpec, rng: np.random.Generator) -> None:
    schedule = ChainSchedule(skills=4, horizon=40, episodes_between_resets=17, total_episodes=18)

    episodes = chain_episodes(four_rooms, RandomPolicy(), schedule, rng)

    for previous, current in zip(episodes[:16], episodes[1:17], strict=True):
        assert current.start_state == previous.end_state
    assert episodes[17].start_state == four_rooms.start_cell


def test_chain_cursor_survives_batches(four_rooms: GridSpec, rng: np.random.Generator) -> None:
    chain = SkillChain(four_rooms, ChainSchedule(skills=4, horizon=40, episodes_between_resets=17), rng)

    first = chain.collect(RandomPolicy(), 16)
    second = chain.collect(RandomPolicy(), 16)

    assert second[0].start_state == first[-1].end_state
    assert second[1].start_state == four_rooms.start_cell
    assert chain.episodes_run == 32


def test_chain_is_reproducible(four_rooms: GridSpec) -> None:
    schedule = ChainSchedule(skills=4, horizon=40, episodes_between_resets=17, total_episodes=30)

    a = chain_episodes(four_rooms, RandomPolicy(), schedule, np.random.default_rng(11))
    b = chain_episodes(four_rooms, RandomPolicy(), schedule, np.random.default_rng(11))

    assert a == b


def test_chain_noop_start_states(open15: GridSpec, rng: np.random.Generator) -> None:
    schedule = ChainSchedule(skills=2, horizon=5, total_episodes=6)

    assert {ep.start_state for ep in chain_episodes(open15, ConstantPolicy(), schedule, rng)} == {open15.start_cell}


def test_schedule_validation() -> None:
    with pytest.raises(ConfigurationError):
        ChainSchedule(skills=0, horizon=10)
    with pytest.raises(ConfigurationError):
        ChainSchedule(skills=4, horizon=10, episodes_between_resets=0)


def test_visitation_of_noop_episode(open15: GridSpec, centre: GridState, rng: np.random.Generator) -> None:
    ep = run_skill_episode(open15, ConstantPolicy(), 3, centre, 10, rng)

    samples = visitation_samples(ep, 50, rng)

    assert all(x.state == centre and x.start_state == centre and x.skill == 3 for x in samples)


def test_visitation_is_uniform_over_steps(open15: GridSpec, rng: np.random.Generator) -> None:
    ep = run_skill_episode(open15, ConstantPolicy(GridAction.RIGHT), 0, GridState(7, 0), 10, rng)
    line = ep.states[1:]

    counts = Counter(x.state for x in visitation_samples(ep, 100_000, rng))

    assert set(counts) == set(line)
    total_variation = 0.5 * sum(abs(counts[s] / 100_000 - 1 / len(line)) for s in line)
    assert total_variation <= 0.02


def test_single_visitation_sample(open15: GridSpec, rng: np.random.Generator) -> None:
    ep = run_skill_episode(open15, ConstantPolicy(GridAction.DOWN), 0, GridState(0, 4), 5, rng)

    (sample,) = visitation_samples(ep, 1, rng)

    assert sample.state in ep.states[1:]
    with pytest.raises(ContractViolation):
        visitation_samples(ep, 0, rng)


def test_episode_codec_replays(four_rooms: GridSpec, rng: np.random.Generator, tmp_path: Path) -> None:
    schedule = ChainSchedule(skills=4, horizon=40, episodes_between_resets=17, total_episodes=5)
    episodes = chain_episodes(four_rooms, RandomPolicy(), schedule, rng)

    text = encode_episodes(episodes)

    assert len(text.splitlines()) == 5
    assert decode_episodes(four_rooms, text) == episodes

    write_episodes(tmp_path / "episodes.jsonl", episodes)
    assert read_episodes(four_rooms, tmp_path / "episodes.jsonl") == episodes


def test_episode_codec_keeps_rewards(open15: GridSpec, centre: GridState) -> None:
    ep = replay_episode(open15, 1, centre, [GridAction.UP, GridAction.LEFT]).with_rewards([0.25, -1.5])

    (decoded,) = decode_episodes(open15, encode_episodes([ep]))

    assert decoded.rewards == (0.25, -1.5)
    assert decode_episodes(open15, '{"skill":1,"start":[7,7],"actions":[0]}\n')[0].rewards == (0.0,)
