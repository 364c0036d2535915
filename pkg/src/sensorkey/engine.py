"""Per-node key establishment state machine.

The engine is event-in / action-out and never reads a clock: time arrives
with every event. One instance handles events strictly one at a time.

Handshake for a node A and neighbour B within one stage:

* A broadcasts New1 = round || nonce_A || cert_A (plus k identical copies).
* On B's New1, A verifies cert_B, registers B, and unicasts
  New2 = Enc_{Q_B}(secret_A) || Sig_{d_A}(ciphertext || nonce_B).
* On B's New2, A verifies the signature against Q_B and its own nonce,
  decrypts secret_B and stores secret_A XOR secret_B.
"""

from __future__ import annotations

import enum
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Optional, Union

from sensorkey.certificates import verify_cert
from sensorkey.crypto import (
    AuthenticationError,
    DecodeError,
    OpCounter,
    Seed,
    derive_bytes,
    decrypt,
    encrypt,
    sign,
    verify,
)
from sensorkey.ec import Point
from sensorkey.kgc import SecurityBundle
from sensorkey.wire import (
    BROADCAST,
    MSG_NEW1,
    MSG_NEW2,
    NONCE_LEN,
    SECRET_LEN,
    MalformedPacket,
    New1Packet,
    New2Packet,
    decode_new1,
    decode_new2,
    encode_new1,
    encode_new2,
)

DROP_CAUSES = (
    "cert_fail",
    "sig_fail",
    "mac_fail",
    "stale",
    "malformed",
    "table_full",
    "orphan_expired",
    "orphan_evicted",
    "send_queue_full",
)


class State(enum.Enum):
    REGISTERED = "registered"
    ESTABLISHED = "established"


@dataclass
class EngineConfig:
    """Tunables. Times are in simulator ticks.

    Unset timeouts default to multiples of ``retx_interval``: registration
    cleanup after 3 intervals, orphan New2 expiry and one-way repair after 1.
    """

    max_neighbors: int = 16
    queue_capacity: int = 12
    retransmissions: int = 1
    retx_interval: int = 10
    cleanup_timeout: Optional[int] = None
    orphan_timeout: Optional[int] = None
    repair_interval: Optional[int] = None
    stage_duration: Optional[int] = None
    compressed: bool = False

    def __post_init__(self):
        if self.cleanup_timeout is None:
            self.cleanup_timeout = 3 * self.retx_interval
        if self.orphan_timeout is None:
            self.orphan_timeout = self.retx_interval
        if self.repair_interval is None:
            self.repair_interval = self.retx_interval
        if self.stage_duration is None:
            # last New1 copy, last repair, then a full cleanup horizon
            self.stage_duration = (
                (self.retransmissions + 1) * self.retx_interval
                + self.retransmissions * self.repair_interval
                + self.cleanup_timeout
                + self.retx_interval
            )
        if self.retransmissions < 0:
            raise ValueError("retransmissions must be >= 0")
        for name in (
            "max_neighbors",
            "queue_capacity",
            "retx_interval",
            "cleanup_timeout",
            "orphan_timeout",
            "repair_interval",
            "stage_duration",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


# -- events and actions ----------------------------------------------------


@dataclass(frozen=True)
class StartStage:
    round: int
    now: int = 0


@dataclass(frozen=True)
class PacketArrival:
    src: int
    msg_type: int
    body: bytes
    now: int


@dataclass(frozen=True)
class TimerTick:
    now: int


@dataclass(frozen=True)
class Send:
    dst: int
    msg_type: int
    body: bytes


@dataclass(frozen=True)
class KeyEstablished:
    partner: int
    key: bytes


@dataclass(frozen=True)
class EntryPurged:
    partner: int
    reason: str


Event = Union[StartStage, PacketArrival, TimerTick]
Action = Union[Send, KeyEstablished, EntryPurged]


# -- state -----------------------------------------------------------------


@dataclass
class NeighborEntry:
    partner: int
    public_key: Point
    cert_bytes: bytes
    partner_nonce: bytes
    partner_round: int
    own_secret: bytes
    cipher: bytes
    new2_out: bytes
    registered_at: int
    last_sent: int
    state: State = State.REGISTERED
    partner_secret: Optional[bytes] = None
    new2_in: Optional[bytes] = None
    resends: int = 0

    @property
    def key(self) -> Optional[bytes]:
        if self.state is not State.ESTABLISHED:
            return None
        return xor_bytes(self.own_secret, self.partner_secret)


@dataclass
class _Orphan:
    src: int
    body: bytes
    arrived: int


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ValueError("length mismatch")
    return bytes(x ^ y for x, y in zip(a, b))


class Engine:
    def __init__(self, bundle: SecurityBundle, config: Optional[EngineConfig] = None, seed: Seed = 0):
        self.bundle = bundle
        self.curve = bundle.curve
        self.node_id = bundle.node_id
        self.config = config or EngineConfig()
        self.seed = seed
        self.ops = OpCounter()
        self.metrics: Counter = Counter()
        self.round: Optional[int] = None
        self.nonce: Optional[bytes] = None
        self.neighbors: dict[int, NeighborEntry] = {}
        self.orphans: deque[_Orphan] = deque()
        self._new1_body: Optional[bytes] = None
        self._retx_left = 0
        self._next_retx = 0
        self._out: list[Action] = []
        self._sends_this_event = 0

    # -- public interface --------------------------------------------------

    def handle(self, event: Event) -> list[Action]:
        self._out = []
        self._sends_this_event = 0
        if isinstance(event, PacketArrival):
            if event.msg_type == MSG_NEW1:
                self._on_new1(event.src, event.body, event.now)
            elif event.msg_type == MSG_NEW2:
                self._on_new2(event.src, event.body, event.now)
            else:
                self._count_rx("malformed")
        elif isinstance(event, TimerTick):
            self._on_timer(event.now)
        elif isinstance(event, StartStage):
            self._start_stage(event.round, event.now)
        else:
            raise TypeError(f"unknown event {event!r}")
        out, self._out = self._out, []
        return out

    def start_stage(self, round: int, now: int = 0) -> list[Action]:
        return self.handle(StartStage(round, now))

    def on_new1(self, src: int, body: bytes, now: int) -> list[Action]:
        return self.handle(PacketArrival(src, MSG_NEW1, body, now))

    def on_new2(self, src: int, body: bytes, now: int) -> list[Action]:
        return self.handle(PacketArrival(src, MSG_NEW2, body, now))

    def on_timer(self, now: int) -> list[Action]:
        return self.handle(TimerTick(now))

    def pairwise_key(self, partner: int) -> Optional[bytes]:
        entry = self.neighbors.get(partner)
        return entry.key if entry else None

    def secret_for(self, partner: int) -> bytes:
        """The secret value this node contributes toward ``partner`` in the current stage."""
        return derive_bytes(self.seed, "secret", SECRET_LEN, self.round, partner)

    def established(self) -> dict[int, bytes]:
        return {p: e.key for p, e in sorted(self.neighbors.items()) if e.state is State.ESTABLISHED}

    def residual_registered(self) -> int:
        return sum(1 for e in self.neighbors.values() if e.state is State.REGISTERED)

    def residual_orphans(self) -> int:
        return len(self.orphans)

    def drops(self) -> dict[str, int]:
        m = self.metrics
        return {
            "cert_fail": m["rx.cert_fail"],
            "sig_fail": m["rx.sig_fail"] + m["orphan.sig_fail"],
            "mac_fail": m["rx.mac_fail"] + m["orphan.mac_fail"],
            "stale": m["rx.stale"],
            "malformed": m["rx.malformed"] + m["orphan.malformed"],
            "table_full": m["rx.table_full"],
            "orphan_expired": m["orphan.expired"],
            "orphan_evicted": m["orphan.evicted"],
            "send_queue_full": m["send_queue_full"],
        }

    def snapshot(self) -> dict:
        """Counters and neighbour states as plain data."""
        return {
            "node": self.node_id,
            "round": self.round,
            "ops": self.ops.as_dict(),
            "metrics": dict(sorted(self.metrics.items())),
            "neighbors": {
                str(p): {"state": e.state.value, "resends": e.resends, "registered_at": e.registered_at}
                for p, e in sorted(self.neighbors.items())
            },
            "orphans": len(self.orphans),
        }

    # -- internals ---------------------------------------------------------

    def _count_rx(self, outcome: str) -> None:
        self.metrics["rx." + outcome] += 1

    def _send(self, dst: int, msg_type: int, body: bytes) -> None:
        if self._sends_this_event >= self.config.queue_capacity:
            self.metrics["send_queue_full"] += 1
            return
        self._sends_this_event += 1
        self.metrics["tx.new1" if msg_type == MSG_NEW1 else "tx.new2"] += 1
        self._out.append(Send(dst, msg_type, body))

    def _start_stage(self, round: int, now: int) -> None:
        cfg = self.config
        self.round = round
        self.nonce = derive_bytes(self.seed, "nonce", NONCE_LEN, round)
        self.neighbors.clear()
        self.orphans.clear()
        self._new1_body = encode_new1(New1Packet(round, self.nonce, self.bundle.cert), self.curve)
        self._retx_left = cfg.retransmissions
        self._next_retx = now + cfg.retx_interval
        self._send(BROADCAST, MSG_NEW1, self._new1_body)

    def _on_new1(self, src: int, body: bytes, now: int) -> None:
        cfg, curve = self.config, self.curve
        try:
            pkt = decode_new1(body, curve, cfg.compressed)
        except MalformedPacket:
            self._count_rx("malformed")
            return
        if self.round is None or pkt.round != self.round:
            self._count_rx("stale")
            return
        cert_bytes = pkt.cert.to_bytes(curve)
        entry = self.neighbors.get(src)

        if entry is not None and entry.state is State.ESTABLISHED:
            self._count_rx("ignored")
            return
        if entry is not None and entry.partner_nonce == pkt.nonce and entry.cert_bytes == cert_bytes:
            # retransmitted New1: same secret, same ciphertext, cached New2
            entry.registered_at = now
            entry.last_sent = now
            self._send(src, MSG_NEW2, entry.new2_out)
            self._count_rx("refreshed")
            return

        if entry is None or entry.cert_bytes != cert_bytes:
            if pkt.cert.node_id != src or not verify_cert(pkt.cert, self.bundle.kgc_Q, curve, counter=self.ops):
                self._count_rx("cert_fail")
                return
            Q = pkt.cert.public_key(curve)
        else:
            Q = entry.public_key

        if entry is None and len(self.neighbors) >= cfg.max_neighbors:
            self._count_rx("table_full")
            return

        secret = self.secret_for(src)
        if entry is not None and entry.public_key == Q:
            cipher = entry.cipher
        else:
            ct = encrypt(
                secret,
                Q,
                curve,
                compressed=cfg.compressed,
                seed=derive_bytes(self.seed, "ephemeral", 32, self.round, src),
                counter=self.ops,
            )
            cipher = ct.to_bytes(curve)
        sig = sign(cipher + pkt.nonce, self.bundle.keypair.d, curve, seed=self.seed, counter=self.ops)
        new2 = encode_new2(New2Packet(cipher, sig), curve, cfg.compressed)

        self.neighbors[src] = NeighborEntry(
            partner=src,
            public_key=Q,
            cert_bytes=cert_bytes,
            partner_nonce=pkt.nonce,
            partner_round=pkt.round,
            own_secret=secret,
            cipher=cipher,
            new2_out=new2,
            registered_at=now,
            last_sent=now,
        )
        self._send(src, MSG_NEW2, new2)
        self._count_rx("registered")
        self._release_orphans(src, now)

    def _release_orphans(self, src: int, now: int) -> None:
        waiting = [o for o in self.orphans if o.src == src]
        if not waiting:
            return
        self.orphans = deque(o for o in self.orphans if o.src != src)
        for o in waiting:
            entry = self.neighbors[src]
            if entry.state is State.ESTABLISHED:
                self.metrics["orphan.duplicate"] += 1
                continue
            self.metrics["orphan." + self._process_new2(entry, o.body)] += 1

    def _on_new2(self, src: int, body: bytes, now: int) -> None:
        cfg = self.config
        try:
            pkt = decode_new2(body, self.curve, cfg.compressed)
        except MalformedPacket:
            self._count_rx("malformed")
            return
        entry = self.neighbors.get(src)
        if entry is None:
            if len(self.orphans) >= cfg.queue_capacity:
                self.orphans.popleft()
                self.metrics["orphan.evicted"] += 1
            self.orphans.append(_Orphan(src, body, now))
            self._count_rx("buffered")
            return
        if entry.state is State.ESTABLISHED:
            if body != entry.new2_in and not self._signature_ok(entry, pkt):
                self._count_rx("sig_fail")
                return
            # the partner is still waiting for our secret: answer its repair
            self._count_rx("duplicate")
            if entry.resends < cfg.retransmissions:
                entry.resends += 1
                entry.last_sent = now
                self._send(src, MSG_NEW2, entry.new2_out)
            return
        self._count_rx(self._process_new2(entry, body, pkt))

    def _signature_ok(self, entry: NeighborEntry, pkt: New2Packet) -> bool:
        return verify(pkt.cipher + self.nonce, pkt.sig, entry.public_key, self.curve, counter=self.ops)

    def _process_new2(self, entry: NeighborEntry, body: bytes, pkt: Optional[New2Packet] = None) -> str:
        curve, cfg = self.curve, self.config
        if pkt is None:
            pkt = decode_new2(body, curve, cfg.compressed)
        if not self._signature_ok(entry, pkt):
            return "sig_fail"
        try:
            secret = decrypt(pkt.ciphertext(curve, cfg.compressed), self.bundle.keypair.d, curve, counter=self.ops)
        except AuthenticationError:
            return "mac_fail"
        except DecodeError:
            return "malformed"
        if len(secret) != SECRET_LEN:
            return "malformed"
        entry.partner_secret = secret
        entry.new2_in = body
        entry.state = State.ESTABLISHED
        self._out.append(KeyEstablished(entry.partner, entry.key))
        return "established"

    def _on_timer(self, now: int) -> None:
        cfg = self.config
        if self._retx_left > 0 and now >= self._next_retx:
            self._retx_left -= 1
            self._next_retx += cfg.retx_interval
            self._send(BROADCAST, MSG_NEW1, self._new1_body)

        while self.orphans and now - self.orphans[0].arrived >= cfg.orphan_timeout:
            self.orphans.popleft()
            self.metrics["orphan.expired"] += 1

        for pid in sorted(self.neighbors):
            entry = self.neighbors[pid]
            if entry.state is not State.REGISTERED:
                continue
            if now - entry.registered_at >= cfg.cleanup_timeout:
                del self.neighbors[pid]
                self.metrics["purged"] += 1
                self._out.append(EntryPurged(pid, "timeout"))
            elif entry.resends < cfg.retransmissions and now - entry.last_sent >= cfg.repair_interval:
                entry.resends += 1
                entry.last_sent = now
                self._send(pid, MSG_NEW2, entry.new2_out)
