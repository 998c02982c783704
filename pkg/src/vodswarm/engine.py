"""Discrete-event core: simulation clock, event queue, named RNG streams."""

from __future__ import annotations

import hashlib
import heapq
import random
from typing import Any, Callable

# Closed set of event kinds. Handlers are dispatched by integer kind for speed;
# the names are the public vocabulary.
EVENT_KINDS = (
    "unchoke-interval",
    "optimistic-interval",
    "transfer-complete",
    "behavior-event",
    "pause-expiry",
    "playback-piece-boundary",
    "session-admission",
)

K_UNCHOKE = 0
K_OPTIMISTIC = 1
K_TRANSFER = 2
K_BEHAVIOR = 3
K_PAUSE_EXPIRY = 4
K_BOUNDARY = 5
K_ADMISSION = 6

_VALID_KINDS = frozenset(range(len(EVENT_KINDS)))


class SchedulingError(RuntimeError):
    """Raised on attempts to schedule into the past or run time backwards."""


class UnknownStreamError(KeyError):
    """Raised when a draw names an RNG stream that was never declared."""


class EventQueue:
    """Time-ordered event queue with a monotone clock.

    Events fire in (fire_at, seq) order, so same-time events run FIFO by
    scheduling order. Cancellation is by tombstone: payload-owning code keeps a
    generation counter and stale events are ignored by the handler.
    """

    __slots__ = ("now", "_heap", "_seq", "dispatched")

    def __init__(self) -> None:
        self.now = 0.0
        self._heap: list[tuple[float, int, int, Any, int]] = []
        self._seq = 0
        self.dispatched = 0

    def schedule(self, fire_at: float, kind: int, payload: Any = None, gen: int = 0) -> int:
        """Enqueue an event; returns its sequence number (the event handle)."""
        if fire_at < self.now:
            raise SchedulingError(
                f"cannot schedule {EVENT_KINDS[kind]} at {fire_at} before now={self.now}"
            )
        if kind not in _VALID_KINDS:
            raise ValueError(f"unknown event kind: {kind!r}")
        seq = self._seq
        self._seq = seq + 1
        heapq.heappush(self._heap, (fire_at, seq, kind, payload, gen))
        return seq

    def run_until(self, horizon: float, handler: Callable[[int, Any, int], None]) -> int:
        """Dispatch events with fire_at <= horizon; returns the dispatch count.

        The clock ends at exactly `horizon` even if the queue drains early.
        """
        if horizon < self.now:
            raise SchedulingError(f"horizon {horizon} is before now={self.now}")
        heap = self._heap
        count = 0
        while heap and heap[0][0] <= horizon:
            fire_at, _seq, kind, payload, gen = heapq.heappop(heap)
            self.now = fire_at
            handler(kind, payload, gen)
            count += 1
        self.now = horizon
        self.dispatched += count
        return count

    def peek_time(self) -> float | None:
        return self._heap[0][0] if self._heap else None

    def __len__(self) -> int:
        return len(self._heap)


def derive_seed(master_seed: int, name: str) -> int:
    """Stable sub-seed from (master_seed, name), independent of PYTHONHASHSEED."""
    digest = hashlib.sha256(f"{master_seed}/{name}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


class RngStreams:
    """Named, independently-seeded RNG streams.

    Each stream is a stdlib random.Random seeded from (master_seed, name).
    Draws from one stream never perturb another, which keeps runs comparable
    when one subsystem changes its draw count.
    """

    STREAM_NAMES = ("behavior", "optimistic-choice", "tie-break", "action-sample")

    def __init__(self, master_seed: int, names: tuple[str, ...] = STREAM_NAMES) -> None:
        self.master_seed = master_seed
        self._streams = {name: random.Random(derive_seed(master_seed, name)) for name in names}

    def _get(self, name: str) -> random.Random:
        try:
            return self._streams[name]
        except KeyError:
            raise UnknownStreamError(name) from None

    def uniform(self, name: str) -> float:
        """One U[0,1) draw from the named stream."""
        return self._get(name).random()

    def exponential(self, name: str, rate: float) -> float:
        """One Exp(rate) draw from the named stream."""
        if rate <= 0.0:
            raise ValueError(f"exponential rate must be positive, got {rate}")
        return self._get(name).expovariate(rate)

    def choice(self, name: str, seq):
        """Uniform choice from a non-empty sequence (consumes one draw)."""
        if not seq:
            raise ValueError("choice from empty sequence")
        return seq[int(self.uniform(name) * len(seq))]

    def sample(self, name: str, seq, k: int) -> list:
        """k distinct uniform picks, order-stable given the stream state."""
        rng = self._get(name)
        return rng.sample(list(seq), k)
