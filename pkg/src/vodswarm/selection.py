"""Piece-selection policies over a sliding playback window.

Pieces are numbered 1..t and piece sets are int bitmasks (bit p = piece p,
bit 0 unused). The window W = [d, d+w-1] is anchored at the playhead d and
truncated at t. Urgency is satisfied when the first v pieces of W (also
truncated at t) are all owned.

Policies:
  sisp   - satisfied: rarest eligible piece outside W; otherwise lowest-index
           eligible piece inside W, falling back to rarest outside W when this
           neighbour has nothing eligible inside.
  eisp   - satisfied: rarest eligible piece inside W; otherwise lowest-index
           eligible piece inside W; never selects outside W.
  rarest - rarest eligible piece anywhere (window-oblivious control).

Eligible means: neighbour owns it, local peer lacks it, and it is not already
outstanding at some neighbour. Rarity uses swarm-wide replica counts; ties are
broken uniformly at random, consuming a tie-break draw only on actual ties.
"""

from __future__ import annotations

from dataclasses import dataclass


def piece_mask(p: int) -> int:
    return 1 << p


def range_mask(lo: int, hi: int) -> int:
    """Bits lo..hi inclusive; empty when hi < lo."""
    if hi < lo:
        return 0
    return ((1 << (hi - lo + 1)) - 1) << lo


def full_mask(t: int) -> int:
    return range_mask(1, t)


def iter_pieces(mask: int):
    """Yield set bits in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def window_mask(d: int, w: int, t: int) -> int:
    return range_mask(d, min(d + w - 1, t))


def urgency_satisfied(owned: int, d: int, v: int, t: int) -> bool:
    """True when pieces d..d+v-1 (truncated at t) are all owned."""
    if d > t:
        return True
    need = range_mask(d, min(d + v - 1, t))
    return owned & need == need


@dataclass(slots=True)
class SlidingWindow:
    """Playback window state: playhead d over a t-piece file, width w."""

    d: int
    w: int
    t: int

    def mask(self) -> int:
        return window_mask(self.d, self.w, self.t)

    def advance(self) -> None:
        """Playhead moves past the piece just played."""
        self.d += 1

    def jump_forward(self, j: int) -> None:
        self.d = min(self.d + j, self.t)

    def jump_backward(self, j: int) -> None:
        self.d = max(self.d - j, 1)


def buckets_from_replica(replica: list[int], max_count: int) -> list[int]:
    """Piece bitmasks grouped by replica count; index r holds pieces with r owners."""
    buckets = [0] * (max_count + 1)
    for p in range(1, len(replica)):
        buckets[replica[p]] |= 1 << p
    return buckets


def rarest_candidates(mask: int, buckets: list[int]) -> list[int]:
    """Pieces in `mask` with the minimum replica count, ascending."""
    for b in buckets:
        hit = b & mask
        if hit:
            out = []
            while hit:
                low = hit & -hit
                out.append(low.bit_length() - 1)
                hit ^= low
            return out
    return []


def request_candidates(
    policy: str,
    d: int,
    owned: int,
    outstanding: int,
    neighbour_owned: int,
    buckets: list[int],
    w: int,
    v: int,
    t: int,
) -> tuple[str, list[int]]:
    """Candidate set for the next request from one neighbour.

    Returns (branch, candidates). Candidates is empty when the slot idles;
    greedy branches yield exactly one candidate; rarest branches may tie
    (all candidates then share the minimum replica count).
    """
    eligible = neighbour_owned & ~owned & ~outstanding & (((1 << t) - 1) << 1)
    if not eligible:
        return ("idle", [])
    if policy == "rarest":
        return ("rarest-any", rarest_candidates(eligible, buckets))
    hi = d + w - 1
    if hi > t:
        hi = t
    win = ((1 << (hi - d + 1)) - 1) << d
    vhi = d + v - 1
    if vhi > t:
        vhi = t
    need = ((1 << (vhi - d + 1)) - 1) << d
    satisfied = owned & need == need
    if policy == "eisp":
        inside = eligible & win
        if not inside:
            return ("idle", [])
        if satisfied:
            return ("rarest-inside", rarest_candidates(inside, buckets))
        low = inside & -inside
        return ("greedy", [low.bit_length() - 1])
    if policy == "sisp":
        outside = eligible & ~win
        if satisfied:
            if not outside:
                return ("idle", [])
            return ("rarest-outside", rarest_candidates(outside, buckets))
        inside = eligible & win
        if inside:
            low = inside & -inside
            return ("greedy", [low.bit_length() - 1])
        if not outside:
            return ("idle", [])
        return ("rarest-outside", rarest_candidates(outside, buckets))
    raise ValueError(f"unknown policy {policy!r}")


def next_request(
    policy: str,
    d: int,
    owned: int,
    outstanding: int,
    neighbour_owned: int,
    buckets: list[int],
    w: int,
    v: int,
    t: int,
    rng,
) -> int | None:
    """Piece to request from this neighbour, or None when the slot idles.

    `rng` provides choice(stream, seq); a tie-break draw is consumed only when
    several pieces tie for rarest.
    """
    _branch, cands = request_candidates(
        policy, d, owned, outstanding, neighbour_owned, buckets, w, v, t
    )
    if not cands:
        return None
    if len(cands) == 1:
        return cands[0]
    return rng.choice("tie-break", cands)


def choose_serving_neighbour(order, has_flow) -> int | None:
    """First neighbour in unchoke-time order without an active flow to us."""
    for src in order:
        if not has_flow(src):
            return src
    return None
