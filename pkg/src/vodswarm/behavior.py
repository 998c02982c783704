"""Interactive client behavior: Poisson action process and playback states.

A client session moves through:

  BUFFERING  waiting for piece 1; no playback, no behavior events.
  PLAYING    a play segment is running; a playback boundary fires every
             p_size/r_play seconds, checking the piece at the playhead
             (missing piece counted once, skip-and-count) and decrementing
             the remaining segment budget.
  PAUSED     frozen until the pause expires or the next event preempts it.
  IDLE       segment budget exhausted; waiting for the next event.
  PLAYED_OUT the viewer has played the final piece; interactive behavior
             ends and the client fetches its remaining pieces rarest-first
             until the download completes.

Behavior events arrive as a Poisson process with the profile's rate and pick
an action from the CDF over (Play, Pause, JumpBackward, JumpForward).
"""

from __future__ import annotations

BUFFERING = 0
PLAYING = 1
PAUSED = 2
IDLE = 3
PLAYED_OUT = 4

STATE_NAMES = ("buffering", "playing", "paused", "idle", "played-out")

PLAY = "play"
PAUSE = "pause"
JUMP_BACKWARD = "jump-backward"
JUMP_FORWARD = "jump-forward"
STOP = "stop"

ACTIONS = (PLAY, PAUSE, JUMP_BACKWARD, JUMP_FORWARD)


def sample_action(probs: tuple[float, float, float, float], u: float) -> str:
    """CDF lookup in fixed order Play, Pause, JB, JF for a uniform draw u."""
    if not 0.0 <= u < 1.0:
        raise ValueError(f"uniform draw out of range: {u}")
    c = probs[0]
    if u < c:
        return PLAY
    c += probs[1]
    if u < c:
        return PAUSE
    c += probs[2]
    if u < c:
        return JUMP_BACKWARD
    return JUMP_FORWARD
