"""One simulation run: event handlers wiring swarm, choking, selection, behavior.

Request pumping: whenever a peer's request eligibility may have widened (a new
unchoke grant, a freed serving slot, a window move, a playout switch, or a
neighbour gaining a piece), the peer re-scans its unchoking neighbours in
strict unchoke-time order and issues at most one outstanding piece per idle
neighbour. Pumps are the only place flows start.

Departure runs inline at the completing event: outbound flows are torn down
with block credit (which can complete pieces and recursively terminate the
receivers), the peer is scrubbed from swarm state, and a session-admission
event at the same timestamp installs the replacement once the cascade settles.
"""

from __future__ import annotations

from .behavior import (
    BUFFERING,
    IDLE,
    JUMP_BACKWARD,
    JUMP_FORWARD,
    PAUSE,
    PAUSED,
    PLAY,
    PLAYED_OUT,
    PLAYING,
    sample_action,
)
from .choking import select_optimistic, select_regular
from .config import ScenarioConfig
from .engine import (
    EventQueue,
    K_ADMISSION,
    K_BEHAVIOR,
    K_BOUNDARY,
    K_OPTIMISTIC,
    K_PAUSE_EXPIRY,
    K_TRANSFER,
    K_UNCHOKE,
    RngStreams,
)
from .metrics import SessionRecord
from .selection import next_request
from .swarm import Peer, SwarmState


class SimulationFault(RuntimeError):
    """A run aborted; carries the seed and the failing event sequence number."""

    def __init__(self, seed: int, event_seq: int, cause: BaseException) -> None:
        super().__init__(f"run failed at event #{event_seq} (seed {seed}): {cause!r}")
        self.seed = seed
        self.event_seq = event_seq
        self.cause = cause


class Simulation:
    """A single seeded run of one scenario cell."""

    def __init__(
        self,
        cfg: ScenarioConfig,
        seed: int,
        collect_behavior_stats: bool = False,
        audit_interval: int | None = None,
    ) -> None:
        self.cfg = cfg
        self.seed = seed
        self.engine = EventQueue()
        self.rng = RngStreams(seed)
        self.swarm = SwarmState(cfg, self.engine)
        self.records: list[SessionRecord] = []
        self.interactive = cfg.profile is not None
        self.t = cfg.t
        self.protocol = cfg.protocol
        st = cfg.setting
        self.x1 = st.x1
        self.x2 = st.x2
        self.delta = st.delta
        self.opt_interval = st.k * st.delta
        if self.interactive:
            pr = cfg.profile
            self.event_rate = pr.event_rate
            self.probs = pr.probs
            self.play_budget = cfg.play_pieces
            self.jump_pieces = cfg.jump_pieces
            self.pause_seconds = cfg.pause_seconds
            self.piece_seconds = cfg.piece_seconds
            self.w = cfg.window_pieces
            self.v = cfg.urgency_pieces
        else:
            self.w = self.v = 1
        self._arrival = 0
        self._audit_interval = audit_interval
        self._since_audit = 0
        self.collect_behavior_stats = collect_behavior_stats
        self.action_counts: dict[str, int] = {}
        self.gap_samples: list[float] = []
        self._handlers = (
            self._on_unchoke,
            self._on_optimistic,
            self._on_transfer,
            self._on_behavior,
            self._on_pause_expiry,
            self._on_boundary,
            self._on_admission,
        )
        for peer in self.swarm.peers:
            at = self._phase(peer.slot)
            self.engine.schedule(at, K_UNCHOKE, peer, 0)
            self.engine.schedule(at, K_OPTIMISTIC, peer, 0)

    def _phase(self, slot: int) -> float:
        # desynchronize per-peer choke intervals deterministically
        return slot * self.delta / (self.swarm.n_slots + 1)

    def run(self) -> list[SessionRecord]:
        try:
            self.engine.run_until(self.cfg.sim_time, self._dispatch)
        except Exception as exc:
            raise SimulationFault(self.seed, self.engine.dispatched, exc) from exc
        return self.records

    def _dispatch(self, kind: int, payload, gen: int) -> None:
        self._handlers[kind](payload, gen)
        if self._audit_interval is not None:
            self._since_audit += 1
            if self._since_audit >= self._audit_interval:
                self._since_audit = 0
                self.swarm.audit(self.x1, self.x2)

    # -- choke decisions --------------------------------------------------------

    def _on_unchoke(self, peer: Peer, gen: int) -> None:
        if peer.departed:
            return
        now = self.engine.now
        swarm = self.swarm
        if peer.out_flows or peer.in_flows:
            swarm.settle_peer(peer, now)
        counters = peer.sent_bytes if peer.is_seed else peer.recv_bytes
        candidates = swarm.interested_in(peer.slot)
        new_set = select_regular(candidates, counters, self.x1, self.rng)
        peer.regular = self._apply_choke(peer, peer.regular, new_set, now, promote=True)
        peer.recv_bytes.clear()
        peer.sent_bytes.clear()
        self.engine.schedule(now + self.delta, K_UNCHOKE, peer, 0)

    def _on_optimistic(self, peer: Peer, gen: int) -> None:
        if peer.departed:
            return
        now = self.engine.now
        eligible = [s for s in self.swarm.interested_in(peer.slot) if s not in peer.regular]
        new_set = select_optimistic(eligible, self.x2, self.rng)
        peer.optimistic = self._apply_choke(peer, peer.optimistic, new_set, now, promote=False)
        self.engine.schedule(now + self.opt_interval, K_OPTIMISTIC, peer, 0)

    def _apply_choke(
        self, peer: Peer, old: set[int], new: set[int], now: float, promote: bool
    ) -> set[int]:
        """Teardown for newly choked slots, grants (and pumps) for new ones.

        Returns the subset of `new` actually in effect: a teardown cascade can
        complete a session mid-call, so slots departing during the call are
        dropped rather than left dangling in the choke sets.
        """
        peers = self.swarm.peers
        for dst_slot in sorted(old - new):
            dst = peers[dst_slot]
            if dst.departed:
                continue
            dst.unchokers.pop(peer.slot)
            flow = peer.out_flows.get(dst_slot)
            if flow is not None and not flow.done:
                completed = self.swarm.end_flow(flow, now)
                if completed is not None:
                    self._piece_arrived(dst, completed)
                else:
                    # the aborted piece is requestable again elsewhere
                    self._pump(dst)
        promoted: set[int] = set()
        if promote:
            # an optimistic peer winning a regular slot keeps its grant time
            promoted = new & peer.optimistic
            peer.optimistic -= promoted
        grants = [s for s in sorted(new - old - promoted) if not peers[s].departed]
        for dst_slot in grants:
            self._arrival += 1
            peers[dst_slot].unchokers[peer.slot] = (now, self._arrival)
        for dst_slot in grants:
            # only the (dst, peer) pair gained an opportunity
            self._pump_from(peers[dst_slot], peer)
        return {s for s in new if not peers[s].departed}

    # -- transfers ----------------------------------------------------------------

    def _on_transfer(self, flow, gen: int) -> None:
        if flow.done or gen != flow.gen:
            return
        if not self.swarm.checkpoint_flow(flow, self.engine.now):
            return
        piece = self.swarm.end_flow(flow, self.engine.now)
        if piece is None:
            raise RuntimeError("completion event fired on an unfinished flow")
        self._piece_arrived(flow.dst, piece)

    def _piece_arrived(self, dst: Peer, piece: int) -> None:
        swarm = self.swarm
        swarm.add_piece(dst, piece)
        if dst.owned_count == self.t:
            self._terminate(dst)
            return
        if self.interactive and piece == 1 and dst.state == BUFFERING:
            self._start_playback(dst)
        self._pump(dst)
        # dst can now serve this piece: poke its idle downloaders
        for q_slot in sorted(dst.regular | dst.optimistic):
            if q_slot not in dst.out_flows:
                self._pump_from(swarm.peers[q_slot], dst)

    def _pump(self, x: Peer) -> None:
        """Issue requests for x's idle unchoking neighbours in unchoke order.

        Unchoker dict insertion order is grant order (grants carry strictly
        increasing (time, seq) keys and re-grants re-insert at the end), so
        plain iteration is strict unchoke-time order.
        """
        unchokers = x.unchokers
        in_flows = x.in_flows
        if len(in_flows) >= len(unchokers):
            return
        if x.is_seed or x.departed or x.owned_count == self.t:
            return
        if self.interactive and x.state != PLAYED_OUT:
            policy = self.protocol
        else:
            policy = "rarest"
        now = self.engine.now
        swarm = self.swarm
        peers = swarm.peers
        buckets = swarm.buckets
        for src_slot in list(unchokers):
            if src_slot in in_flows:
                continue
            src = peers[src_slot]
            if src.departed:
                continue
            piece = next_request(
                policy,
                x.playhead,
                x.owned,
                x.outstanding,
                src.owned,
                buckets,
                self.w,
                self.v,
                self.t,
                self.rng,
            )
            if piece is not None:
                swarm.start_flow(x, src, piece, now)

    def _pump_from(self, x: Peer, src: Peer) -> None:
        """A single neighbour gained a piece: try just that idle pair.

        Valid because another neighbour's eligibility is untouched by src's
        gain; a full rescan would reach src with the same intermediate
        no-request outcomes.
        """
        if src.slot in x.in_flows or x.is_seed or x.departed or x.owned_count == self.t:
            return
        if src.slot not in x.unchokers or src.departed:
            return
        if self.interactive and x.state != PLAYED_OUT:
            policy = self.protocol
        else:
            policy = "rarest"
        piece = next_request(
            policy,
            x.playhead,
            x.owned,
            x.outstanding,
            src.owned,
            self.swarm.buckets,
            self.w,
            self.v,
            self.t,
            self.rng,
        )
        if piece is not None:
            self.swarm.start_flow(x, src, piece, self.engine.now)

    # -- playback & behavior ---------------------------------------------------------

    def _start_playback(self, x: Peer) -> None:
        now = self.engine.now
        x.state = PLAYING
        x.budget = self.play_budget
        x.act_gen += 1
        self.engine.schedule(now + self.piece_seconds, K_BOUNDARY, x, x.act_gen)
        gap = self.rng.exponential("behavior", self.event_rate)
        if self.collect_behavior_stats:
            self.gap_samples.append(gap)
        self.engine.schedule(now + gap, K_BEHAVIOR, x, 0)

    def _on_behavior(self, peer: Peer, gen: int) -> None:
        if peer.departed or peer.state == PLAYED_OUT:
            return
        now = self.engine.now
        action = sample_action(self.probs, self.rng.uniform("action-sample"))
        if self.collect_behavior_stats:
            self.action_counts[action] = self.action_counts.get(action, 0) + 1
        peer.act_gen += 1
        if action == PAUSE:
            peer.state = PAUSED
            self.engine.schedule(now + self.pause_seconds, K_PAUSE_EXPIRY, peer, peer.act_gen)
        else:
            if action == JUMP_BACKWARD:
                peer.playhead = max(1, peer.playhead - self.jump_pieces)
            elif action == JUMP_FORWARD:
                peer.playhead = min(self.t, peer.playhead + self.jump_pieces)
            peer.state = PLAYING
            peer.budget = self.play_budget
            self.engine.schedule(now + self.piece_seconds, K_BOUNDARY, peer, peer.act_gen)
            if action != PLAY:
                self._pump(peer)
        gap = self.rng.exponential("behavior", self.event_rate)
        if self.collect_behavior_stats:
            self.gap_samples.append(gap)
        self.engine.schedule(now + gap, K_BEHAVIOR, peer, 0)

    def _on_pause_expiry(self, peer: Peer, gen: int) -> None:
        if peer.departed or gen != peer.act_gen:
            return
        assert peer.state == PAUSED
        peer.state = PLAYING
        peer.budget = self.play_budget
        peer.act_gen += 1
        self.engine.schedule(
            self.engine.now + self.piece_seconds, K_BOUNDARY, peer, peer.act_gen
        )

    def _on_boundary(self, peer: Peer, gen: int) -> None:
        if peer.departed or gen != peer.act_gen:
            return
        assert peer.state == PLAYING
        d = peer.playhead
        if not peer.owned >> d & 1:
            peer.missed |= 1 << d
        if d == self.t:
            # final piece played: interactive phase over, fetch the rest
            peer.state = PLAYED_OUT
            peer.act_gen += 1
            self._pump(peer)
            return
        peer.playhead = d + 1
        peer.budget -= 1
        if peer.budget > 0:
            self.engine.schedule(
                self.engine.now + self.piece_seconds, K_BOUNDARY, peer, peer.act_gen
            )
        else:
            peer.state = IDLE
        self._pump(peer)

    # -- lifecycle ---------------------------------------------------------------------

    def _terminate(self, x: Peer) -> None:
        now = self.engine.now
        x.departed = True
        misses = x.missed.bit_count() if self.interactive else None
        self.records.append(
            SessionRecord(
                duration=now - x.join_time,
                misses=misses,
                t=self.t,
                f_size=self.cfg.f_size,
                r_down=self.cfg.r_down,
                initial=x.initial,
            )
        )
        repump: list[Peer] = []
        for f in list(x.out_flows.values()):
            if f.done:
                continue
            completed = self.swarm.end_flow(f, now)
            if completed is not None:
                self._piece_arrived(f.dst, completed)
            else:
                repump.append(f.dst)
        assert not x.in_flows, "completed peer still downloading"
        self.swarm.remove_peer(x)
        x.act_gen += 1
        for dst in repump:
            # the aborted piece is requestable again elsewhere
            self._pump(dst)
        self.engine.schedule(now, K_ADMISSION, x.slot, 0)

    def _on_admission(self, slot: int, gen: int) -> None:
        peer = self.swarm.admit_peer(slot, self.engine.now)
        at = self.engine.now + self._phase(slot)
        self.engine.schedule(at, K_UNCHOKE, peer, 0)
        self.engine.schedule(at, K_OPTIMISTIC, peer, 0)
