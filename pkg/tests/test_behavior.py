"""Action sampling CDF and state vocabulary."""

import random

import pytest

from vodswarm.behavior import (
    ACTIONS,
    BUFFERING,
    IDLE,
    JUMP_BACKWARD,
    JUMP_FORWARD,
    PAUSE,
    PAUSED,
    PLAY,
    PLAYED_OUT,
    PLAYING,
    STATE_NAMES,
    sample_action,
)

MI_PROBS = (0.71, 0.05, 0.12, 0.12)


def test_states_are_distinct_and_named():
    states = (BUFFERING, PLAYING, PAUSED, IDLE, PLAYED_OUT)
    assert len(set(states)) == 5
    assert len(STATE_NAMES) == 5


def test_action_cdf_boundaries():
    assert sample_action(MI_PROBS, 0.0) == PLAY
    assert sample_action(MI_PROBS, 0.70999) == PLAY
    assert sample_action(MI_PROBS, 0.71) == PAUSE
    assert sample_action(MI_PROBS, 0.75999) == PAUSE
    assert sample_action(MI_PROBS, 0.76) == JUMP_BACKWARD
    assert sample_action(MI_PROBS, 0.87999) == JUMP_BACKWARD
    assert sample_action(MI_PROBS, 0.88) == JUMP_FORWARD
    assert sample_action(MI_PROBS, 0.999999) == JUMP_FORWARD


def test_action_draw_must_be_unit_interval():
    with pytest.raises(ValueError):
        sample_action(MI_PROBS, 1.0)
    with pytest.raises(ValueError):
        sample_action(MI_PROBS, -0.01)


def test_action_frequencies_match_probabilities():
    rng = random.Random(6021023)
    n = 200_000
    counts = dict.fromkeys(ACTIONS, 0)
    for _ in range(n):
        counts[sample_action(MI_PROBS, rng.random())] += 1
    for action, p in zip(ACTIONS, MI_PROBS):
        sigma = (n * p * (1 - p)) ** 0.5
        assert abs(counts[action] - n * p) < 4 * sigma
