"""Discrete-event execution of many engines over a lossy shared medium.

Time advances in integer ticks. A frame sent at tick t reaches its
receivers at t+1. Within a tick, arrivals are handled first (in send
order), then adversary injections are emitted, then every node's timer
fires in id order. All randomness is keyed off the trial seed.
"""

from __future__ import annotations

import heapq
import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Optional

from sensorkey.crypto import OpCounter, derive_bytes
from sensorkey.ec import TOY16, CurveParams
from sensorkey.engine import DROP_CAUSES, Engine, EngineConfig, KeyEstablished, PacketArrival, Send
from sensorkey.kgc import ProvisionedNetwork, generate_network
from sensorkey.simnet.loss import LossModel
from sensorkey.simnet.topology import Topology
from sensorkey.wire import BROADCAST, Frame, MalformedPacket, decode_frame, encode_frame


@dataclass(frozen=True)
class TrialResult:
    ratio: float
    in_range_pairs: int
    secure_pairs: int
    one_way_pairs: int
    key_mismatches: int
    drops: tuple
    packets_sent: int
    packets_delivered: int
    bytes_on_air: int
    sm_total: int
    residual_registered: int
    residual_orphans: int
    retransmissions: int
    seed: int

    def drops_dict(self) -> dict:
        return dict(self.drops)

    def to_json(self) -> str:
        d = asdict(self)
        d["drops"] = dict(self.drops)
        return json.dumps(d, sort_keys=True)


class Network:
    def __init__(
        self,
        topology: Topology,
        provisioned: ProvisionedNetwork,
        config: EngineConfig,
        loss=None,
        seed: int = 0,
        adversary=None,
    ):
        if len(provisioned.bundles) < topology.n:
            raise ValueError("fewer bundles than topology nodes")
        self.topology = topology
        self.config = config
        self.loss = loss if loss is not None else LossModel()
        self.seed = seed
        self.adversary = adversary
        self.engines = {
            node: Engine(provisioned.bundle(node), config, seed=derive_bytes(seed, "node-seed", 16, node))
            for node in topology.node_ids
        }
        self.now = 0
        self.stats: Counter = Counter()
        self.trace: list = []
        self._queue: list = []
        self._qseq = 0
        self._link_seq: Counter = Counter()

    # -- medium ------------------------------------------------------------

    def transmit(self, src: int, frame_bytes: bytes, t: int) -> None:
        """Put a frame on the air from ``src`` at tick ``t``."""
        frame = decode_frame(frame_bytes)
        self.stats["sent"] += 1
        self.stats["bytes_on_air"] += len(frame_bytes)
        if self.adversary is not None:
            self.adversary.observe(t, src, frame, frame_bytes)
        if frame.dst == BROADCAST:
            receivers = self.topology.adjacency[src]
        elif self.topology.in_range(src, frame.dst):
            receivers = (frame.dst,)
        else:
            receivers = ()
        radius = self.topology.radius
        for rx in receivers:
            self.stats["attempted"] += 1
            key = (src, rx, frame.msg_type)
            seq = self._link_seq[key]
            self._link_seq[key] += 1
            if not self.loss.delivers(self.seed, src, rx, frame.msg_type, seq, self.topology.distance(src, rx), radius):
                self.stats["lost"] += 1
                continue
            if self.adversary is not None and not self.adversary.allow(t, frame, rx):
                self.stats["ceased"] += 1
                continue
            self._push(t + 1, rx, frame_bytes)

    def inject(self, rx: int, frame_bytes: bytes, t: int) -> None:
        """Adversarial delivery straight to ``rx`` at t+1, bypassing the channel."""
        self.stats["injected"] += 1
        self._push(t + 1, rx, frame_bytes)

    def _push(self, t: int, rx: int, frame_bytes: bytes) -> None:
        heapq.heappush(self._queue, (t, self._qseq, rx, frame_bytes))
        self._qseq += 1

    def _apply(self, node: int, actions, t: int) -> None:
        for act in actions:
            if isinstance(act, Send):
                self.transmit(node, encode_frame(Frame(node, act.dst, act.msg_type, act.body)), t)
            elif isinstance(act, KeyEstablished):
                self.trace.append((t, node, "established", act.partner))
            else:
                self.trace.append((t, node, "purged", act.partner))

    # -- driving -----------------------------------------------------------

    def run_stage(self, round: int = 1, duration: Optional[int] = None, start: Optional[int] = None) -> None:
        t0 = self.now if start is None else start
        duration = self.config.stage_duration if duration is None else duration
        for node in self.topology.node_ids:
            self._apply(node, self.engines[node].start_stage(round, t0), t0)
        for t in range(t0, t0 + duration + 1):
            self.now = t
            while self._queue and self._queue[0][0] <= t:
                _, _, rx, frame_bytes = heapq.heappop(self._queue)
                self._deliver(rx, frame_bytes, t)
            if self.adversary is not None:
                for rx, frame_bytes in self.adversary.inject(t, self):
                    self.inject(rx, frame_bytes, t)
            for node in self.topology.node_ids:
                self._apply(node, self.engines[node].on_timer(t), t)
        self.now = t0 + duration + 1

    def _deliver(self, rx: int, frame_bytes: bytes, t: int) -> None:
        self.stats["delivered"] += 1
        try:
            frame = decode_frame(frame_bytes)
        except MalformedPacket:
            self.stats["bad_frames"] += 1
            return
        if frame.dst not in (rx, BROADCAST):
            self.stats["misaddressed"] += 1
            return
        eng = self.engines[rx]
        self._apply(rx, eng.handle(PacketArrival(frame.src, frame.msg_type, frame.body, t)), t)

    # -- results -----------------------------------------------------------

    def result(self) -> TrialResult:
        pairs = self.topology.in_range_pairs()
        secure = one_way = mismatches = 0
        for a, b in pairs:
            ka = self.engines[a].pairwise_key(b)
            kb = self.engines[b].pairwise_key(a)
            if ka is not None and kb is not None:
                secure += 1
                if ka != kb:
                    mismatches += 1
            elif ka is not None or kb is not None:
                one_way += 1
        drops = Counter()
        ops = OpCounter()
        for eng in self.engines.values():
            drops.update(eng.drops())
            ops = ops + eng.ops
        return TrialResult(
            ratio=secure / len(pairs) if pairs else 0.0,
            in_range_pairs=len(pairs),
            secure_pairs=secure,
            one_way_pairs=one_way,
            key_mismatches=mismatches,
            drops=tuple((c, drops[c]) for c in DROP_CAUSES),
            packets_sent=self.stats["sent"],
            packets_delivered=self.stats["delivered"],
            bytes_on_air=self.stats["bytes_on_air"],
            sm_total=ops.sm,
            residual_registered=sum(e.residual_registered() for e in self.engines.values()),
            residual_orphans=sum(e.residual_orphans() for e in self.engines.values()),
            retransmissions=self.config.retransmissions,
            seed=self.seed,
        )


def run_trial(
    topology: Topology,
    loss=None,
    config: Optional[EngineConfig] = None,
    adversary=None,
    duration: Optional[int] = None,
    seed: int = 0,
    provisioned: Optional[ProvisionedNetwork] = None,
    curve: CurveParams = TOY16,
) -> TrialResult:
    """One key-establishment stage; the result is read after cleanup quiescence."""
    config = config or EngineConfig()
    if provisioned is None:
        provisioned = generate_network(topology.n, curve, master_seed=seed)
    net = Network(topology, provisioned, config, loss, seed, adversary)
    net.run_stage(1, duration)
    return net.result()
