"""Byte-exact New1/New2 bodies and the simulated 802.15.4 link frame.

New1 body: ``[round:4][nonce:4][certificate]``  (90 bytes at L=20)
New2 body: ``[ciphertext][signature]``          (110 bytes at L=20)

The message type lives in the link attachment, not in the body. The nonce
signed inside New2 is never transmitted; the verifier supplies its own.
"""

from __future__ import annotations

import binascii
from dataclasses import dataclass

from sensorkey.certificates import Certificate, cert_len
from sensorkey.crypto import DEFAULT_MAX_PLAINTEXT, Ciphertext, DecodeError, Signature, ciphertext_len
from sensorkey.ec import SECP160R1, CurveParams

MAX_FRAME = 127
ATTACHMENT = 13
MAX_PAYLOAD = 114
ROUND_LEN = 4
NONCE_LEN = 4
SECRET_LEN = DEFAULT_MAX_PLAINTEXT

MSG_NEW1 = 0x01
MSG_NEW2 = 0x02
BROADCAST = 0xFFFF

_HEADER_LEN = 6  # src:2 dst:2 type:1 len:1
_RESERVED_LEN = 5
_FCS_LEN = 2
assert _HEADER_LEN + _RESERVED_LEN + _FCS_LEN == ATTACHMENT


class MalformedPacket(ValueError):
    pass


class BudgetViolation(ValueError):
    pass


def check_budget(body: bytes) -> bool:
    return len(body) <= MAX_PAYLOAD


def new1_len(curve: CurveParams = SECP160R1, compressed: bool = False) -> int:
    return ROUND_LEN + NONCE_LEN + cert_len(curve, compressed)


def new2_len(curve: CurveParams = SECP160R1, compressed: bool = False) -> int:
    return ciphertext_len(curve, SECRET_LEN, compressed) + 2 * curve.L


@dataclass(frozen=True)
class New1Packet:
    round: int
    nonce: bytes
    cert: Certificate


@dataclass(frozen=True)
class New2Packet:
    cipher: bytes
    sig: Signature

    def ciphertext(self, curve: CurveParams = SECP160R1, compressed: bool = False) -> Ciphertext:
        return Ciphertext.from_bytes(self.cipher, curve, compressed)


def encode_new1(pkt: New1Packet, curve: CurveParams = SECP160R1) -> bytes:
    if len(pkt.nonce) != NONCE_LEN:
        raise MalformedPacket(f"nonce must be {NONCE_LEN} bytes")
    body = pkt.round.to_bytes(ROUND_LEN, "big") + pkt.nonce + pkt.cert.to_bytes(curve)
    if not check_budget(body):
        raise BudgetViolation(f"New1 body of {len(body)} bytes exceeds {MAX_PAYLOAD}")
    return body


def decode_new1(body: bytes, curve: CurveParams = SECP160R1, compressed: bool = False) -> New1Packet:
    expected = new1_len(curve, compressed)
    if len(body) != expected:
        raise MalformedPacket(f"New1 body must be {expected} bytes, got {len(body)}")
    rnd = int.from_bytes(body[:ROUND_LEN], "big")
    nonce = bytes(body[ROUND_LEN : ROUND_LEN + NONCE_LEN])
    try:
        cert = Certificate.from_bytes(body[ROUND_LEN + NONCE_LEN :], curve)
    except DecodeError as exc:
        raise MalformedPacket(str(exc)) from exc
    return New1Packet(rnd, nonce, cert)


def encode_new2(pkt: New2Packet, curve: CurveParams = SECP160R1, compressed: bool = False) -> bytes:
    want = ciphertext_len(curve, SECRET_LEN, compressed)
    if len(pkt.cipher) != want:
        raise MalformedPacket(f"ciphertext must be {want} bytes, got {len(pkt.cipher)}")
    body = pkt.cipher + pkt.sig.to_bytes(curve)
    if not check_budget(body):
        raise BudgetViolation(f"New2 body of {len(body)} bytes exceeds {MAX_PAYLOAD}")
    return body


def decode_new2(body: bytes, curve: CurveParams = SECP160R1, compressed: bool = False) -> New2Packet:
    expected = new2_len(curve, compressed)
    if len(body) != expected:
        raise MalformedPacket(f"New2 body must be {expected} bytes, got {len(body)}")
    split = expected - 2 * curve.L
    return New2Packet(bytes(body[:split]), Signature.from_bytes(body[split:], curve))


# -- link frame ------------------------------------------------------------


@dataclass(frozen=True)
class Frame:
    src: int
    dst: int
    msg_type: int
    body: bytes

    @property
    def is_broadcast(self) -> bool:
        return self.dst == BROADCAST


def encode_frame(frame: Frame) -> bytes:
    """``[src:2][dst:2][type:1][len:1][body][reserved:5][fcs:2]``."""
    if not check_budget(frame.body):
        raise BudgetViolation(f"body of {len(frame.body)} bytes exceeds {MAX_PAYLOAD}")
    head = (
        frame.src.to_bytes(2, "big")
        + frame.dst.to_bytes(2, "big")
        + bytes([frame.msg_type, len(frame.body)])
    )
    pre = head + frame.body + bytes(_RESERVED_LEN)
    return pre + binascii.crc_hqx(pre, 0xFFFF).to_bytes(_FCS_LEN, "big")


def decode_frame(data: bytes) -> Frame:
    if len(data) < ATTACHMENT or len(data) > MAX_FRAME:
        raise MalformedPacket(f"frame length {len(data)} out of range")
    pre, fcs = data[:-_FCS_LEN], data[-_FCS_LEN:]
    if binascii.crc_hqx(pre, 0xFFFF).to_bytes(_FCS_LEN, "big") != fcs:
        raise MalformedPacket("frame check sequence mismatch")
    blen = data[5]
    if len(data) != ATTACHMENT + blen:
        raise MalformedPacket("length field disagrees with frame size")
    return Frame(
        src=int.from_bytes(data[0:2], "big"),
        dst=int.from_bytes(data[2:4], "big"),
        msg_type=data[4],
        body=bytes(data[_HEADER_LEN : _HEADER_LEN + blen]),
    )
