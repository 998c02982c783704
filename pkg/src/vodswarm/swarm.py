"""Swarm state: peers, piece/block ownership, flows, and bandwidth sharing.

Piece ownership is an int bitmask (bit p = piece p, 1-based). Interest is kept
incrementally as a pairwise difference matrix: diff[a][b] = number of pieces b
owns that a lacks, so "a interested in b" is diff[a][b] > 0 and updates cost
O(population) per piece arrival.

Bandwidth follows a fluid equal-split model: a sender splits r_up over its
active outbound flows, a receiver splits r_down over its inbound flows, and a
flow runs at the min of the two shares. Residual capacity from the min is not
redistributed. Flow progress is settled linearly at the moments adjacent flow
sets change; each flow keeps one pending completion event, stale copies being
tombstoned via a per-flow generation counter.
"""

from __future__ import annotations

import math

from .behavior import BUFFERING
from .config import ScenarioConfig
from .engine import EventQueue, K_TRANSFER

# one-millionth of a block: below any settled float residue, above nothing real
_BLOCK_EPS = 1e-6


class Flow:
    """One piece transfer src -> dst, covering the piece's missing blocks."""

    __slots__ = (
        "src",
        "dst",
        "piece",
        "total",
        "rem",
        "rate",
        "last_settle",
        "sched_at",
        "gen",
        "done",
    )

    def __init__(self, src: "Peer", dst: "Peer", piece: int, total: float, now: float) -> None:
        self.src = src
        self.dst = dst
        self.piece = piece
        self.total = total
        self.rem = total
        self.rate = 0.0
        self.last_settle = now
        self.sched_at = math.inf
        self.gen = 0
        self.done = False


class Peer:
    """One slot's occupant: the seed or a leecher session."""

    __slots__ = (
        "slot",
        "is_seed",
        "departed",
        "initial",
        "join_time",
        "owned",
        "owned_count",
        "partial",
        "outstanding",
        "in_flows",
        "out_flows",
        "n_in",
        "n_out",
        "regular",
        "optimistic",
        "unchokers",
        "recv_bytes",
        "sent_bytes",
        "state",
        "budget",
        "playhead",
        "missed",
        "act_gen",
    )

    def __init__(self, slot: int, now: float, is_seed: bool, initial: bool) -> None:
        self.slot = slot
        self.is_seed = is_seed
        self.departed = False
        self.initial = initial
        self.join_time = now
        self.owned = 0
        self.owned_count = 0
        self.partial: dict[int, set[int]] = {}
        self.outstanding = 0
        self.in_flows: dict[int, Flow] = {}
        self.out_flows: dict[int, Flow] = {}
        self.n_in = 0
        self.n_out = 0
        self.regular: set[int] = set()
        self.optimistic: set[int] = set()
        self.unchokers: dict[int, tuple[float, int]] = {}
        self.recv_bytes: dict[int, float] = {}
        self.sent_bytes: dict[int, float] = {}
        self.state = BUFFERING
        self.budget = 0
        self.playhead = 1
        self.missed = 0
        self.act_gen = 0


class SwarmState:
    """Peers, replica counts, interest matrix, and the active flow set."""

    def __init__(self, cfg: ScenarioConfig, engine: EventQueue) -> None:
        self.cfg = cfg
        self.engine = engine
        self.t = cfg.t
        self.b_size = cfg.b_size
        self.blocks_per_piece = cfg.blocks_per_piece
        self.r_up = cfg.r_up
        self.r_down = cfg.r_down
        n = cfg.s_size + 1
        self.n_slots = n
        self.peers: list[Peer] = []
        self.replica = [0] * (self.t + 1)
        # buckets[r] = bitmask of pieces owned by exactly r peers (rarest lookup)
        self.buckets = [0] * (n + 1)
        self.diff = [[0] * n for _ in range(n)]

        seed = Peer(0, 0.0, is_seed=True, initial=True)
        seed.owned = ((1 << self.t) - 1) << 1
        seed.owned_count = self.t
        self.peers.append(seed)
        for p in range(1, self.t + 1):
            self.replica[p] = 1
        self.buckets[1] = seed.owned
        for slot in range(1, n):
            self.peers.append(Peer(slot, 0.0, is_seed=False, initial=True))
        for slot in range(1, n):
            self.diff[slot][0] = self.t

    # -- interest ------------------------------------------------------------

    def interested(self, a: int, b: int) -> bool:
        """True iff peer b owns at least one piece peer a lacks."""
        return self.diff[a][b] > 0

    def interested_in(self, x: int) -> list[int]:
        """Slots of live peers interested in peer x, ascending."""
        col = x
        diff = self.diff
        return [
            q
            for q in range(self.n_slots)
            if q != col and diff[q][col] > 0 and not self.peers[q].departed
        ]

    # -- flow mechanics -------------------------------------------------------

    def settle_peer(self, x: Peer, now: float) -> None:
        """Advance progress of every flow adjacent to x up to now."""
        for flows in (x.in_flows, x.out_flows):
            for f in flows.values():
                dt = now - f.last_settle
                if dt > 0.0:
                    moved = f.rate * dt
                    f.rem -= moved
                    f.last_settle = now
                    src, dst = f.src, f.dst
                    sent = src.sent_bytes
                    sent[dst.slot] = sent.get(dst.slot, 0.0) + moved
                    recv = dst.recv_bytes
                    recv[src.slot] = recv.get(src.slot, 0.0) + moved

    def _settle_flow(self, f: Flow, now: float) -> None:
        dt = now - f.last_settle
        if dt > 0.0:
            moved = f.rate * dt
            f.rem -= moved
            f.last_settle = now
            src, dst = f.src, f.dst
            sent = src.sent_bytes
            sent[dst.slot] = sent.get(dst.slot, 0.0) + moved
            recv = dst.recv_bytes
            recv[src.slot] = recv.get(src.slot, 0.0) + moved

    def retime_peer(self, x: Peer, now: float) -> None:
        """Recompute rates of flows adjacent to x; reschedule ones that changed."""
        r_up = self.r_up
        r_down = self.r_down
        for flows in (x.in_flows, x.out_flows):
            for f in flows.values():
                rate = r_up / f.src.n_out
                share = r_down / f.dst.n_in
                if share < rate:
                    rate = share
                if rate != f.rate:
                    self._retime_changed(f, rate, now)

    def _retime_changed(self, f: Flow, rate: float, now: float) -> None:
        if rate <= 0.0:
            raise RuntimeError("zero-rate flow")
        f.rate = rate
        rem = f.rem if f.rem > 0.0 else 0.0
        finish = now + rem / rate
        # a slower rate keeps the pending event as an early checkpoint; only a
        # finish that moved earlier needs a fresh completion event
        if finish < f.sched_at:
            f.gen += 1
            f.sched_at = finish
            self.engine.schedule(finish, K_TRANSFER, f, f.gen)

    def checkpoint_flow(self, f: Flow, now: float) -> bool:
        """Early completion event: settle; True if the flow is really done."""
        self._settle_flow(f, now)
        if f.rem > _BLOCK_EPS * self.b_size:
            f.gen += 1
            f.sched_at = now + f.rem / f.rate
            self.engine.schedule(f.sched_at, K_TRANSFER, f, f.gen)
            return False
        return True

    def missing_blocks(self, dst: Peer, piece: int) -> int:
        return self.blocks_per_piece - len(dst.partial.get(piece, ()))

    def start_flow(self, dst: Peer, src: Peer, piece: int, now: float) -> Flow:
        """Begin transferring the missing blocks of `piece` from src to dst."""
        total = self.missing_blocks(dst, piece) * self.b_size
        self.settle_peer(src, now)
        self.settle_peer(dst, now)
        f = Flow(src, dst, piece, float(total), now)
        dst.in_flows[src.slot] = f
        src.out_flows[dst.slot] = f
        dst.n_in += 1
        src.n_out += 1
        dst.outstanding |= 1 << piece
        self.retime_peer(src, now)
        self.retime_peer(dst, now)
        return f

    def end_flow(self, f: Flow, now: float) -> int | None:
        """Stop a flow, crediting fully transferred blocks only.

        A partial in-flight remainder is dropped (never fabricated), so a
        session can never finish faster than its download capacity allows;
        the piece stays resumable block-wise from any future unchoker.
        Returns the piece index if the credit completed the piece, else None.
        The caller is responsible for the piece-arrival bookkeeping.
        """
        src, dst = f.src, f.dst
        self.settle_peer(src, now)
        self.settle_peer(dst, now)
        f.done = True
        f.gen += 1
        del dst.in_flows[src.slot]
        del src.out_flows[dst.slot]
        dst.n_in -= 1
        src.n_out -= 1
        dst.outstanding &= ~(1 << f.piece)
        self.retime_peer(src, now)
        self.retime_peer(dst, now)

        transferred = f.total - (f.rem if f.rem > 0.0 else 0.0)
        blocks = math.floor(transferred / self.b_size + _BLOCK_EPS)
        done = dst.partial.setdefault(f.piece, set())
        missing = self.blocks_per_piece - len(done)
        if blocks > missing:
            blocks = missing
        if blocks > 0:
            have = done
            added = 0
            for idx in range(self.blocks_per_piece):
                if idx not in have:
                    have.add(idx)
                    added += 1
                    if added == blocks:
                        break
        if len(done) == self.blocks_per_piece:
            return f.piece
        if not done:
            del dst.partial[f.piece]
        return None

    # -- piece arrival ---------------------------------------------------------

    def add_piece(self, x: Peer, piece: int) -> None:
        """Ownership/replica/interest bookkeeping for a completed piece."""
        bit = 1 << piece
        if x.owned & bit:
            raise RuntimeError(f"peer {x.slot} completed piece {piece} twice")
        x.owned |= bit
        x.owned_count += 1
        x.partial.pop(piece, None)
        r = self.replica[piece]
        self.replica[piece] = r + 1
        self.buckets[r] ^= bit
        self.buckets[r + 1] |= bit
        diff = self.diff
        xs = x.slot
        peers = self.peers
        for q in range(self.n_slots):
            if q == xs:
                continue
            if peers[q].owned & bit:
                diff[xs][q] -= 1
            else:
                diff[q][xs] += 1

    # -- population ------------------------------------------------------------

    def remove_peer(self, x: Peer) -> None:
        """Scrub a departing peer from replica counts, choke sets, estimators."""
        x.departed = True
        owned = x.owned
        replica = self.replica
        buckets = self.buckets
        m = owned
        while m:
            low = m & -m
            p = low.bit_length() - 1
            m ^= low
            r = replica[p]
            replica[p] = r - 1
            buckets[r] ^= low
            buckets[r - 1] |= low
        xs = x.slot
        for q in self.peers:
            if q is x:
                continue
            q.regular.discard(xs)
            q.optimistic.discard(xs)
            q.unchokers.pop(xs, None)
            q.recv_bytes.pop(xs, None)
            q.sent_bytes.pop(xs, None)

    def admit_peer(self, slot: int, now: float) -> Peer:
        """Install a fresh empty leecher in a vacated slot."""
        p = Peer(slot, now, is_seed=False, initial=False)
        self.peers[slot] = p
        diff = self.diff
        for q in range(self.n_slots):
            if q == slot:
                continue
            diff[slot][q] = self.peers[q].owned_count
            diff[q][slot] = 0
        diff[slot][slot] = 0
        return p

    # -- audits ------------------------------------------------------------------

    def audit(self, x1: int, x2: int) -> None:
        """Recompute invariants from scratch; raises AssertionError on drift."""
        n = self.n_slots
        peers = self.peers
        fresh = [0] * (self.t + 1)
        for p in peers:
            assert not p.departed
            m = p.owned
            count = 0
            while m:
                low = m & -m
                fresh[low.bit_length() - 1] += 1
                m ^= low
                count += 1
            assert count == p.owned_count
        assert fresh == self.replica, "replica count drift"
        for r in range(len(self.buckets)):
            want = 0
            for p in range(1, self.t + 1):
                if fresh[p] == r:
                    want |= 1 << p
            assert self.buckets[r] == want, f"rarity bucket drift at count {r}"
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                want = (peers[b].owned & ~peers[a].owned).bit_count()
                assert self.diff[a][b] == want, f"interest drift at ({a},{b})"
        for p in peers:
            assert len(p.regular) <= x1, "regular slots over budget"
            assert len(p.optimistic) <= x2, "optimistic slots over budget"
            assert not (p.regular & p.optimistic), "choke sets overlap"
            out_rate = sum(f.rate for f in p.out_flows.values())
            in_rate = sum(f.rate for f in p.in_flows.values())
            assert out_rate <= self.r_up * (1 + 1e-9), "upload cap exceeded"
            assert in_rate <= self.r_down * (1 + 1e-9), "download cap exceeded"
            assert p.n_in == len(p.in_flows) and p.n_out == len(p.out_flows)
            outstanding = 0
            for src_slot, f in p.in_flows.items():
                assert f.src.slot == src_slot and f.dst is p
                assert f.src.owned >> f.piece & 1, "flow src lacks the piece"
                assert p.slot in f.src.regular or p.slot in f.src.optimistic, (
                    "flow without an unchoke"
                )
                assert src_slot in p.unchokers
                outstanding |= 1 << f.piece
            assert outstanding == p.outstanding, "outstanding ledger drift"
            assert not (p.outstanding & p.owned), "owned piece outstanding"
            for dst_slot in p.regular | p.optimistic:
                assert p.slot in peers[dst_slot].unchokers
