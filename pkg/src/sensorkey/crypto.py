"""ECDSA and ECIES over a pluggable prime curve, with operation tallies.

Primitive choices: SHA-1 for hashing, AES-128-CTR for the symmetric cipher,
HMAC-SHA-1 (20-byte tag) for the MAC and the ANSI X9.63 KDF over SHA-1.
Randomness is always an explicit seed so every output is reproducible.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
from dataclasses import asdict, dataclass, fields
from typing import Optional, Union

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes
from cryptography.hazmat.primitives.kdf.x963kdf import X963KDF

from sensorkey.ec import INFINITY, SECP160R1, CurveParams, Point, PointDecodeError

Seed = Union[int, str, bytes, None]

TAG_LEN = 20
AES_KEY_LEN = 16
MAC_KEY_LEN = 20
DEFAULT_MAX_PLAINTEXT = 10


class CryptoError(Exception):
    pass


class InvalidPointError(CryptoError, ValueError):
    """A public key or ephemeral point is not a usable curve point."""


class DecodeError(CryptoError, ValueError):
    pass


class AuthenticationError(CryptoError):
    """MAC check failed; no plaintext is released."""


class BudgetExceededError(CryptoError, ValueError):
    pass


@dataclass
class OpCounter:
    """Tally of primitive operations inside one measurement scope."""

    sm: int = 0
    pa: int = 0
    hash: int = 0
    mac: int = 0
    enc: int = 0
    dec: int = 0
    kdf: int = 0

    def as_dict(self) -> dict:
        return asdict(self)

    def nonzero(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v}

    def __add__(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(**{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)})

    def reset(self) -> None:
        for f in fields(self):
            setattr(self, f.name, 0)


def _tally(counter: Optional[OpCounter], **ops) -> None:
    if counter is None:
        return
    for name, k in ops.items():
        setattr(counter, name, getattr(counter, name) + k)


def seed_bytes(seed: Seed) -> bytes:
    """Canonical byte form of a seed; ``None`` draws fresh OS randomness."""
    if seed is None:
        return b"r:" + secrets.token_bytes(32)
    if isinstance(seed, bytes):
        return b"b:" + seed
    if isinstance(seed, str):
        return b"s:" + seed.encode()
    if isinstance(seed, int):
        return b"i:" + str(seed).encode()
    raise TypeError(f"unsupported seed type {type(seed).__name__}")


def derive_bytes(seed: Seed, label: str, length: int, *parts: int) -> bytes:
    """Deterministic byte string from (seed, label, integer parts)."""
    base = seed_bytes(seed) + b"|" + label.encode() + b"".join(b"|" + str(x).encode() for x in parts)
    out = b""
    counter = 0
    while len(out) < length:
        out += hashlib.sha256(base + counter.to_bytes(4, "big")).digest()
        counter += 1
    return out[:length]


def scalar_from_seed(curve: CurveParams, seed: Seed, label: str = "scalar", *parts: int) -> int:
    """Near-uniform scalar in [1, n-1]; 64 extra bits keep the modulo bias negligible."""
    nbytes = curve.scalar_len + 8
    x = int.from_bytes(derive_bytes(seed, label, nbytes, *parts), "big")
    return 1 + x % (curve.n - 1)


# -- keys ----------------------------------------------------------------


@dataclass(frozen=True)
class KeyPair:
    d: int
    Q: Point
    curve: CurveParams = SECP160R1

    def __post_init__(self):
        if not 1 <= self.d < self.curve.n:
            raise ValueError("private scalar out of range")
        if self.Q.is_infinity or not self.curve.contains(self.Q):
            raise InvalidPointError("public key not on curve")
        if self.curve.mul(self.d, self.curve.G) != self.Q:
            raise ValueError("public key does not match private scalar")


def keygen(curve: CurveParams = SECP160R1, seed: Seed = None, counter: Optional[OpCounter] = None) -> KeyPair:
    d = scalar_from_seed(curve, seed, "keygen")
    Q = curve.mul(d, curve.G)
    _tally(counter, sm=1)
    return KeyPair(d, Q, curve)


def public_from_private(curve: CurveParams, d: int, counter: Optional[OpCounter] = None) -> Point:
    _tally(counter, sm=1)
    return curve.mul(d, curve.G)


def _check_public(curve: CurveParams, Q: Point) -> None:
    if Q.is_infinity or not curve.contains(Q):
        raise InvalidPointError("public key is not a finite point on the curve")


# -- ECDSA ---------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    r: int
    s: int

    def to_bytes(self, curve: CurveParams = SECP160R1) -> bytes:
        L = curve.L
        return self.r.to_bytes(L, "big") + self.s.to_bytes(L, "big")

    @classmethod
    def from_bytes(cls, data: bytes, curve: CurveParams = SECP160R1) -> "Signature":
        L = curve.L
        if len(data) != 2 * L:
            raise DecodeError(f"signature must be {2 * L} bytes, got {len(data)}")
        return cls(int.from_bytes(data[:L], "big"), int.from_bytes(data[L:], "big"))


def _hash_to_int(curve: CurveParams, message: bytes) -> int:
    digest = hashlib.sha1(message).digest()
    e = int.from_bytes(digest, "big")
    excess = len(digest) * 8 - curve.n.bit_length()
    if excess > 0:
        e >>= excess
    return e


def sign(
    message: bytes,
    d: int,
    curve: CurveParams = SECP160R1,
    seed: Seed = b"",
    counter: Optional[OpCounter] = None,
) -> Signature:
    """ECDSA over SHA-1(message).

    The per-signature nonce is derived from (d, digest, seed), so a fixed
    seed gives byte-identical signatures. Candidates with r or s equal to
    zero, or too wide for the L-byte encoding, are skipped.
    """
    if not message:
        raise ValueError("message must be non-empty")
    n = curve.n
    e = _hash_to_int(curve, message)
    _tally(counter, hash=1, sm=1)
    limit = 1 << (8 * curve.L)
    key = d.to_bytes(curve.scalar_len, "big") + hashlib.sha1(message).digest()
    attempt = 0
    while True:
        k = scalar_from_seed(curve, seed_bytes(seed) + key, "ecdsa-nonce", attempt)
        attempt += 1
        R = curve.mul(k, curve.G)
        r = R.x % n
        if r == 0 or r >= limit:
            continue
        s = pow(k, -1, n) * (e + r * d) % n
        if s == 0 or s >= limit:
            continue
        return Signature(r, s)


def verify(
    message: bytes,
    sig: Signature,
    Q: Point,
    curve: CurveParams = SECP160R1,
    counter: Optional[OpCounter] = None,
) -> bool:
    """True iff ``sig`` is a valid ECDSA signature of SHA-1(message) under Q.

    An off-curve Q raises InvalidPointError rather than returning False.
    """
    _check_public(curve, Q)
    n = curve.n
    if not (1 <= sig.r < n and 1 <= sig.s < n):
        return False
    e = _hash_to_int(curve, message)
    w = pow(sig.s, -1, n)
    u1 = e * w % n
    u2 = sig.r * w % n
    X = curve.add(curve.mul(u1, curve.G), curve.mul(u2, Q))
    _tally(counter, hash=1, sm=2, pa=1)
    if X.is_infinity:
        return False
    return X.x % n == sig.r


# -- ECIES ---------------------------------------------------------------


@dataclass(frozen=True)
class Ciphertext:
    ephemeral: Point
    payload: bytes
    tag: bytes
    compressed: bool = False

    def to_bytes(self, curve: CurveParams = SECP160R1) -> bytes:
        return curve.encode_point(self.ephemeral, self.compressed) + self.payload + self.tag

    @classmethod
    def from_bytes(cls, data: bytes, curve: CurveParams = SECP160R1, compressed: bool = False) -> "Ciphertext":
        plen = curve.point_len(compressed)
        if len(data) < plen + TAG_LEN + 1:
            raise DecodeError(f"ciphertext too short ({len(data)} bytes)")
        try:
            R = curve.decode_point(data[:plen], compressed)
        except PointDecodeError as exc:
            raise DecodeError(f"bad ephemeral point: {exc}") from exc
        return cls(R, data[plen:-TAG_LEN], data[-TAG_LEN:], compressed)


def ciphertext_len(curve: CurveParams, plaintext_len: int, compressed: bool = False) -> int:
    return curve.point_len(compressed) + plaintext_len + TAG_LEN


def _derive_keys(curve: CurveParams, shared: Point) -> tuple[bytes, bytes]:
    z = shared.x.to_bytes(curve.L, "big")
    okm = X963KDF(algorithm=hashes.SHA1(), length=AES_KEY_LEN + MAC_KEY_LEN, sharedinfo=None).derive(z)
    return okm[:AES_KEY_LEN], okm[AES_KEY_LEN:]


def _ctr(key: bytes, data: bytes) -> bytes:
    c = Cipher(algorithms.AES(key), modes.CTR(bytes(16))).encryptor()
    return c.update(data) + c.finalize()


def encrypt(
    plaintext: bytes,
    Q: Point,
    curve: CurveParams = SECP160R1,
    compressed: bool = False,
    seed: Seed = None,
    counter: Optional[OpCounter] = None,
    max_plaintext: int = DEFAULT_MAX_PLAINTEXT,
) -> Ciphertext:
    if not plaintext:
        raise ValueError("plaintext must be non-empty")
    if len(plaintext) > max_plaintext:
        raise BudgetExceededError(f"plaintext of {len(plaintext)} bytes exceeds budget of {max_plaintext}")
    _check_public(curve, Q)
    k = scalar_from_seed(curve, seed, "ecies-ephemeral")
    R = curve.mul(k, curve.G)
    S = curve.mul(k, Q)
    enc_key, mac_key = _derive_keys(curve, S)
    payload = _ctr(enc_key, plaintext)
    tag = hmac.new(mac_key, payload, hashlib.sha1).digest()
    _tally(counter, sm=2, kdf=1, enc=1, mac=1)
    return Ciphertext(R, payload, tag, compressed)


def decrypt(ct: Ciphertext, d: int, curve: CurveParams = SECP160R1, counter: Optional[OpCounter] = None) -> bytes:
    if ct.ephemeral.is_infinity or not curve.contains(ct.ephemeral):
        raise DecodeError("ephemeral point not on curve")
    S = curve.mul(d, ct.ephemeral)
    _tally(counter, sm=1, kdf=1, mac=1)
    if S.is_infinity:
        raise AuthenticationError("degenerate shared point")
    enc_key, mac_key = _derive_keys(curve, S)
    expected = hmac.new(mac_key, ct.payload, hashlib.sha1).digest()
    if not hmac.compare_digest(expected, ct.tag):
        raise AuthenticationError("MAC mismatch")
    _tally(counter, dec=1)
    return _ctr(enc_key, ct.payload)


# -- point compression ---------------------------------------------------


def compress_point(P: Point, curve: CurveParams = SECP160R1) -> bytes:
    """x (L bytes) followed by one parity byte of y."""
    return curve.encode_point(P, compressed=True)


def decompress_point(data: bytes, curve: CurveParams = SECP160R1) -> Point:
    try:
        return curve.decode_point(data, compressed=True)
    except PointDecodeError as exc:
        raise DecodeError(str(exc)) from exc


__all__ = [
    "INFINITY",
    "AuthenticationError",
    "BudgetExceededError",
    "Ciphertext",
    "CryptoError",
    "DecodeError",
    "InvalidPointError",
    "KeyPair",
    "OpCounter",
    "Signature",
    "TAG_LEN",
    "ciphertext_len",
    "compress_point",
    "decompress_point",
    "decrypt",
    "derive_bytes",
    "encrypt",
    "keygen",
    "public_from_private",
    "scalar_from_seed",
    "seed_bytes",
    "sign",
    "verify",
]
