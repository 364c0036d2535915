"""Tiny certificates: (ID, Q, KGC signature over ID||Q).

Layout is ``[id:2][Q:2L or L+1][r:L][s:L]``, big-endian. At L=20 that is 82
bytes plain or 63 bytes with a compressed public key.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

from sensorkey.crypto import DecodeError, OpCounter, Seed, Signature, sign, verify
from sensorkey.ec import SECP160R1, CurveParams, Point, PointDecodeError

log = logging.getLogger(__name__)

ID_LEN = 2
MAX_NODE_ID = 0xFFFF


def cert_len(curve: CurveParams = SECP160R1, compressed: bool = False) -> int:
    return ID_LEN + curve.point_len(compressed) + 2 * curve.L


@dataclass(frozen=True)
class Certificate:
    node_id: int
    q_bytes: bytes
    sig: Signature
    compressed: bool = False

    def signed_bytes(self) -> bytes:
        return self.node_id.to_bytes(ID_LEN, "big") + self.q_bytes

    def public_key(self, curve: CurveParams = SECP160R1) -> Point:
        return curve.decode_point(self.q_bytes, self.compressed)

    def to_bytes(self, curve: CurveParams = SECP160R1) -> bytes:
        return self.signed_bytes() + self.sig.to_bytes(curve)

    @classmethod
    def from_bytes(cls, data: bytes, curve: CurveParams = SECP160R1) -> "Certificate":
        """Parse without validating the point; verify_cert does that."""
        if len(data) == cert_len(curve, False):
            compressed = False
        elif len(data) == cert_len(curve, True):
            compressed = True
        else:
            raise DecodeError(f"certificate length {len(data)} matches no layout")
        plen = curve.point_len(compressed)
        node_id = int.from_bytes(data[:ID_LEN], "big")
        q_bytes = bytes(data[ID_LEN : ID_LEN + plen])
        sig = Signature.from_bytes(data[ID_LEN + plen :], curve)
        return cls(node_id, q_bytes, sig, compressed)


def issue(
    node_id: int,
    Q: Point,
    kgc_d: int,
    curve: CurveParams = SECP160R1,
    compressed: bool = False,
    seed: Seed = b"",
    counter: Optional[OpCounter] = None,
) -> Certificate:
    if not 0 <= node_id <= MAX_NODE_ID:
        raise ValueError(f"node id {node_id} does not fit in {ID_LEN} bytes")
    if Q.is_infinity or not curve.contains(Q):
        raise ValueError("refusing to certify an off-curve public key")
    q_bytes = curve.encode_point(Q, compressed)
    body = node_id.to_bytes(ID_LEN, "big") + q_bytes
    sig = sign(body, kgc_d, curve, seed=seed, counter=counter)
    return Certificate(node_id, q_bytes, sig, compressed)


def verify_cert(
    cert: Certificate,
    kgc_Q: Point,
    curve: CurveParams = SECP160R1,
    counter: Optional[OpCounter] = None,
) -> bool:
    try:
        cert.public_key(curve)
    except PointDecodeError as exc:
        log.info("certificate %d carries an undecodable key: %s", cert.node_id, exc)
        return False
    return verify(cert.signed_bytes(), cert.sig, kgc_Q, curve, counter=counter)
