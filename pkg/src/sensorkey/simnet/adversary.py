"""Scripted Dolev-Yao adversaries and the attack harness.

The adversary hears every frame in the network, can stop any delivery, and
can inject arbitrary frames (any claimed source) straight into a victim.
It holds key pairs of its own but no KGC-signed certificate and no honest
node's private key.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from sensorkey.certificates import issue
from sensorkey.crypto import AuthenticationError, Ciphertext, DecodeError, derive_bytes, decrypt, encrypt, keygen, sign
from sensorkey.ec import SECP160R1, CurveParams
from sensorkey.engine import EngineConfig, State, xor_bytes
from sensorkey.kgc import generate_network
from sensorkey.simnet.loss import LossModel
from sensorkey.simnet.network import Network
from sensorkey.simnet.topology import line_topology
from sensorkey.wire import (
    MSG_NEW1,
    MSG_NEW2,
    ROUND_LEN,
    SECRET_LEN,
    Frame,
    New1Packet,
    New2Packet,
    decode_new1,
    decode_new2,
    encode_frame,
    encode_new1,
    encode_new2,
)

SCENARIOS = ("replay-new1", "replay-new2", "forge-cert", "tamper-new2", "mitm-relay")


@dataclass
class Adversary:
    curve: CurveParams
    seed: int = 0
    compressed: bool = False
    transcript: list = field(default_factory=list)
    chosen_secrets: set = field(default_factory=set)
    keypairs: list = field(default_factory=list)
    phase: int = 1
    t0: int = 0

    def __post_init__(self):
        self.keypairs.append(keygen(self.curve, derive_bytes(self.seed, "adversary-key", 32)))

    # hooks called by Network
    def observe(self, t, src, frame: Frame, raw: bytes) -> None:
        self.transcript.append((self.phase, t, src, frame))

    def allow(self, t, frame: Frame, rx: int) -> bool:
        return True

    def inject(self, t, net) -> list:
        return []

    # helpers
    def captured(self, msg_type: int, src: int, dst: Optional[int] = None, phase: Optional[int] = None) -> list:
        return [
            f
            for ph, _, s, f in self.transcript
            if f.msg_type == msg_type and s == src and (dst is None or f.dst == dst) and (phase is None or ph == phase)
        ]

    def frame(self, claimed_src: int, dst: int, msg_type: int, body: bytes) -> bytes:
        return encode_frame(Frame(claimed_src, dst, msg_type, body))

    def own_secret(self, label: str) -> bytes:
        s = derive_bytes(self.seed, "adversary-secret|" + label, SECRET_LEN)
        self.chosen_secrets.add(s)
        return s

    def forged_new2(self, victim_Q, victim_nonce: bytes, label: str) -> bytes:
        """New2 carrying an adversary-chosen secret, signed with the adversary's own key."""
        secret = self.own_secret(label)
        ct = encrypt(secret, victim_Q, self.curve, self.compressed, seed=derive_bytes(self.seed, "eph|" + label, 32))
        cipher = ct.to_bytes(self.curve)
        sig = sign(cipher + victim_nonce, self.keypairs[0].d, self.curve)
        return encode_new2(New2Packet(cipher, sig), self.curve, self.compressed)

    def knowledge(self) -> set:
        """Every secret value the adversary chose or can decrypt from its transcript."""
        known = set(self.chosen_secrets)
        for _, _, _, f in self.transcript:
            if f.msg_type != MSG_NEW2:
                continue
            try:
                pkt = decode_new2(f.body, self.curve, self.compressed)
                ct = Ciphertext.from_bytes(pkt.cipher, self.curve, self.compressed)
            except (ValueError, DecodeError):
                continue
            for kp in self.keypairs:
                try:
                    known.add(decrypt(ct, kp.d, self.curve))
                except (AuthenticationError, DecodeError):
                    pass
        return known


@dataclass
class AttackReport:
    scenario: str
    seed: int
    established_links: list
    forged_links: list
    adversary_known_keys: int
    drops: dict
    stats: dict
    notes: list

    @property
    def compromised(self) -> bool:
        return bool(self.forged_links) or self.adversary_known_keys > 0

    def summary(self) -> str:
        verdict = "PASS (no key compromise)" if not self.compromised else "FAIL (key compromise)"
        fired = ", ".join(f"{k}={v}" for k, v in self.drops.items() if v) or "none"
        lines = [
            f"scenario: {self.scenario}  seed: {self.seed}",
            f"verdict: {verdict}",
            f"established links: {self.established_links or 'none'}",
            f"forged links: {self.forged_links or 'none'}",
            f"adversary-known keys: {self.adversary_known_keys}",
            f"drop counters fired: {fired}",
        ]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)


def _audit(net: Network, adv: Adversary, scenario: str, seed: int, notes: list) -> AttackReport:
    known = adv.knowledge()
    established, forged = [], []
    known_keys = 0
    derivable = {xor_bytes(a, b) for a in known for b in known}
    for node, eng in sorted(net.engines.items()):
        for partner, entry in sorted(eng.neighbors.items()):
            if entry.state is not State.ESTABLISHED:
                continue
            established.append((node, partner))
            # the secret the real partner generated for us, whether or not it kept the entry
            peer = net.engines.get(partner)
            genuine = peer is not None and entry.partner_secret == peer.secret_for(node)
            if not genuine:
                forged.append((node, partner))
            if entry.partner_secret in known or entry.own_secret in known or entry.key in derivable:
                known_keys += 1
    drops = {}
    for eng in net.engines.values():
        for k, v in eng.drops().items():
            drops[k] = drops.get(k, 0) + v
        drops["purged"] = drops.get("purged", 0) + eng.metrics["purged"]
    return AttackReport(scenario, seed, established, forged, known_keys, drops, dict(net.stats), notes)


def _setup(xs, seed: int, curve: CurveParams, config: Optional[EngineConfig]):
    topo = line_topology(xs)
    prov = generate_network(len(xs), curve, master_seed=f"attack|{seed}")
    return topo, prov, config or EngineConfig()


# -- scenarios -------------------------------------------------------------
# Node 1 is the victim "A", node 2 the honest partner "B".


class _ReplayNew1(Adversary):
    """Stage 2: silence B toward A and replay B's stage-1 New1, first as-is,
    then with the (unsigned) round field rewritten to the current stage."""

    def allow(self, t, frame, rx):
        return not (self.phase == 2 and frame.src == 2 and rx == 1)

    def inject(self, t, net):
        if self.phase != 2:
            return []
        old = self.captured(MSG_NEW1, 2, phase=1)[0].body
        if t == self.t0 + 2:
            return [(1, self.frame(2, 0xFFFF, MSG_NEW1, old))]
        if t == self.t0 + 4:
            bumped = (2).to_bytes(ROUND_LEN, "big") + old[ROUND_LEN:]
            return [(1, self.frame(2, 0xFFFF, MSG_NEW1, bumped))]
        return []


class _ReplayNew2(Adversary):
    """Stage 2: replay B's stage-1 New1 (round bumped) and then B's stage-1
    New2 to A; the stale nonce inside the signature must sink it."""

    def allow(self, t, frame, rx):
        return not (self.phase == 2 and frame.src == 2 and rx == 1)

    def inject(self, t, net):
        if self.phase != 2:
            return []
        if t == self.t0 + 2:
            old_new1 = self.captured(MSG_NEW1, 2, phase=1)[0].body
            bumped = (2).to_bytes(ROUND_LEN, "big") + old_new1[ROUND_LEN:]
            return [(1, self.frame(2, 0xFFFF, MSG_NEW1, bumped))]
        if t == self.t0 + 4:
            return [(1, self.frame(2, 1, MSG_NEW2, f.body)) for f in self.captured(MSG_NEW2, 2, dst=1, phase=1)]
        return []


class _ForgeCert(Adversary):
    """Claims identity 2 with its own key under a home-made KGC, and also
    with a self-signed certificate, then follows up with a New2."""

    def inject(self, t, net):
        curve = self.curve
        me = self.keypairs[0]
        nonce = b"\xad\xad\xad\xad"
        if t == 2:
            fake_kgc = keygen(curve, derive_bytes(self.seed, "fake-kgc", 32))
            out = []
            for signer in (fake_kgc.d, me.d):
                cert = issue(2, me.Q, signer, curve, self.compressed)
                body = encode_new1(New1Packet(1, nonce, cert), curve)
                out.append((1, self.frame(2, 0xFFFF, MSG_NEW1, body)))
            return out
        if t == 4:
            victim = net.engines[1]
            body = self.forged_new2(victim.bundle.keypair.Q, victim.nonce, "forge")
            return [(1, self.frame(2, 1, MSG_NEW2, body))]
        return []


class _TamperNew2(Adversary):
    """Stops every New2 from B to A and substitutes (a) a bit-flipped copy,
    (b) an adversary ciphertext under B's signature, (c) C's New2 to A
    relabelled as coming from B."""

    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        self.pending = []

    def allow(self, t, frame, rx):
        if frame.msg_type == MSG_NEW2 and frame.src == 2 and rx == 1:
            self.pending.append(frame.body)
            return False
        return True

    def inject(self, t, net):
        out = []
        curve = self.curve
        victim = net.engines[1]
        while self.pending:
            body = self.pending.pop(0)
            flipped = bytearray(body)
            flipped[curve.point_len(self.compressed)] ^= 0x01
            out.append((1, self.frame(2, 1, MSG_NEW2, bytes(flipped))))
            pkt = decode_new2(body, curve, self.compressed)
            secret = self.own_secret(f"tamper{t}")
            ct = encrypt(secret, victim.bundle.keypair.Q, curve, self.compressed, seed=derive_bytes(self.seed, "t", 32, t))
            swapped = encode_new2(New2Packet(ct.to_bytes(curve), pkt.sig), curve, self.compressed)
            out.append((1, self.frame(2, 1, MSG_NEW2, swapped)))
            for f in self.captured(MSG_NEW2, 3, dst=1):
                out.append((1, self.frame(2, 1, MSG_NEW2, f.body)))
        return out


class _MitmRelay(Adversary):
    """A and B are out of range. The adversary carries B's New1 into A's
    neighbourhood (and A's into B's) and answers each with a New2 of its own."""

    def inject(self, t, net):
        out = []
        for victim_id, impersonated in ((1, 2), (2, 1)):
            heard = self.captured(MSG_NEW1, impersonated)
            if t == 2 and heard:
                out.append((victim_id, self.frame(impersonated, 0xFFFF, MSG_NEW1, heard[0].body)))
            if t == 4:
                victim = net.engines[victim_id]
                body = self.forged_new2(victim.bundle.keypair.Q, victim.nonce, f"mitm{victim_id}")
                out.append((victim_id, self.frame(impersonated, victim_id, MSG_NEW2, body)))
        return out


def run_attack(
    scenario: str,
    seed: int = 0,
    curve: CurveParams = SECP160R1,
    config: Optional[EngineConfig] = None,
) -> AttackReport:
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")
    notes = []
    lossless = LossModel.lossless()
    if scenario in ("replay-new1", "replay-new2"):
        topo, prov, cfg = _setup([0, 30], seed, curve, config)
        cls = _ReplayNew1 if scenario == "replay-new1" else _ReplayNew2
        adv = cls(curve, seed, cfg.compressed)
        net = Network(topo, prov, cfg, lossless, seed, adv)
        net.run_stage(1)
        if net.engines[1].pairwise_key(2) is None:
            notes.append("stage 1 handshake did not complete; nothing to replay")
        adv.phase = 2
        adv.t0 = net.now
        net.run_stage(2)
        notes.append("stage 1 key between A and B is genuine; audit covers stage 2 state")
    elif scenario == "forge-cert":
        topo, prov, cfg = _setup([0, 300], seed, curve, config)
        adv = _ForgeCert(curve, seed, cfg.compressed)
        net = Network(topo, prov, cfg, lossless, seed, adv)
        net.run_stage(1)
    elif scenario == "tamper-new2":
        topo, prov, cfg = _setup([0, 30, 20], seed, curve, config)
        adv = _TamperNew2(curve, seed, cfg.compressed)
        net = Network(topo, prov, cfg, lossless, seed, adv)
        net.run_stage(1)
    else:
        topo, prov, cfg = _setup([0, 300], seed, curve, config)
        adv = _MitmRelay(curve, seed, cfg.compressed)
        net = Network(topo, prov, cfg, lossless, seed, adv)
        net.run_stage(1)
    return _audit(net, adv, scenario, seed, notes)
