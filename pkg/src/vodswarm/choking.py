"""Unchoke decisions: rate-ranked regular slots and random optimistic slots.

Pure functions over snapshots; the simulation applies the returned sets
(tearing down flows of newly choked peers). Rates are byte counts over the
previous regular interval. Ties are broken uniformly via the tie-break
stream, and a draw is consumed only when a tie actually straddles the
slot-count cutoff.
"""

from __future__ import annotations


def select_regular(
    candidates: list[int], counters: dict[int, float], x1: int, rng
) -> set[int]:
    """Top-x1 candidates by rate descending; boundary ties drawn uniformly.

    `candidates` are peer slots interested in the local peer; `counters` maps
    slot -> bytes moved in the last interval (missing entries count as 0).
    """
    if len(candidates) <= x1:
        return set(candidates)
    pos: list[tuple[float, int]] = []
    if counters:
        get = counters.get
        pos = [(r, s) for s in candidates if (r := get(s, 0.0)) > 0.0]
        pos.sort(key=_rate_key, reverse=True)
    n_pos = len(pos)
    if n_pos >= x1:
        boundary = pos[x1 - 1][0]
        if n_pos == x1 or pos[x1][0] != boundary:
            return {s for _r, s in pos[:x1]}
        chosen = {s for r, s in pos if r > boundary}
        tied = sorted(s for r, s in pos if r == boundary)
        chosen.update(rng.sample("tie-break", tied, x1 - len(chosen)))
        return chosen
    # cutoff falls inside the zero-rate group: all positives win, draw the rest
    chosen = {s for _r, s in pos}
    zeros = sorted(s for s in candidates if s not in chosen)
    chosen.update(rng.sample("tie-break", zeros, x1 - n_pos))
    return chosen


def _rate_key(pair: tuple[float, int]) -> float:
    return pair[0]


def select_optimistic(eligible: list[int], x2: int, rng) -> set[int]:
    """min(x2, available) uniform picks; no draw when all eligible fit."""
    if len(eligible) <= x2:
        return set(eligible)
    return set(rng.sample("optimistic-choice", sorted(eligible), x2))
