"""Short-Weierstrass curves over prime fields.

Arithmetic is plain Python integers. Scalar multiplication runs in Jacobian
coordinates with mixed additions; everything that leaves this module is
affine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


class PointDecodeError(ValueError):
    """Bytes do not describe a point on the curve."""


@dataclass(frozen=True)
class Point:
    x: Optional[int]
    y: Optional[int]

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self) -> str:
        if self.is_infinity:
            return "Point(INFINITY)"
        return f"Point(x={self.x:#x}, y={self.y:#x})"


INFINITY = Point(None, None)


@dataclass(frozen=True)
class CurveParams:
    """y^2 = x^3 + a x + b over F_p, with base point G of prime order n."""

    name: str
    p: int
    a: int
    b: int
    gx: int
    gy: int
    n: int
    h: int = 1

    def __post_init__(self):
        if (4 * self.a ** 3 + 27 * self.b ** 2) % self.p == 0:
            raise ValueError(f"{self.name}: singular curve")
        if not self.contains(self.G):
            raise ValueError(f"{self.name}: base point not on curve")

    @property
    def G(self) -> Point:
        return Point(self.gx, self.gy)

    @property
    def L(self) -> int:
        """Field element length in bytes."""
        return (self.p.bit_length() + 7) // 8

    @property
    def scalar_len(self) -> int:
        return (self.n.bit_length() + 7) // 8

    def point_len(self, compressed: bool = False) -> int:
        return self.L + 1 if compressed else 2 * self.L

    # -- group law -------------------------------------------------------

    def contains(self, P: Point) -> bool:
        if P.is_infinity:
            return True
        x, y = P.x, P.y
        if not (0 <= x < self.p and 0 <= y < self.p):
            return False
        return (y * y - (x * x * x + self.a * x + self.b)) % self.p == 0

    def neg(self, P: Point) -> Point:
        if P.is_infinity:
            return P
        return Point(P.x, (-P.y) % self.p)

    def add(self, P: Point, Q: Point) -> Point:
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        p = self.p
        if P.x == Q.x:
            if (P.y + Q.y) % p == 0:
                return INFINITY
            lam = (3 * P.x * P.x + self.a) * pow(2 * P.y, -1, p) % p
        else:
            lam = (Q.y - P.y) * pow(Q.x - P.x, -1, p) % p
        x3 = (lam * lam - P.x - Q.x) % p
        y3 = (lam * (P.x - x3) - P.y) % p
        return Point(x3, y3)

    def double(self, P: Point) -> Point:
        return self.add(P, P)

    def mul(self, k: int, P: Point) -> Point:
        """k * P by left-to-right double-and-add in Jacobian coordinates."""
        if P.is_infinity:
            return INFINITY
        k %= self.n
        if k == 0:
            return INFINITY
        p, a = self.p, self.a
        px, py = P.x, P.y
        X, Y, Z = px, py, 1
        for bit in bin(k)[3:]:
            if Z != 0:
                if Y == 0:
                    X, Y, Z = 1, 1, 0
                else:
                    YY = Y * Y % p
                    S = 4 * X * YY % p
                    ZZ = Z * Z % p
                    M = (3 * X * X + a * ZZ * ZZ) % p
                    X3 = (M * M - 2 * S) % p
                    Z = 2 * Y * Z % p
                    Y = (M * (S - X3) - 8 * YY * YY) % p
                    X = X3
            if bit == "1":
                X, Y, Z = _jadd_affine(X, Y, Z, px, py, p, a)
        if Z == 0:
            return INFINITY
        zinv = pow(Z, -1, p)
        zinv2 = zinv * zinv % p
        return Point(X * zinv2 % p, Y * zinv2 * zinv % p)

    # -- encoding --------------------------------------------------------

    def encode_point(self, P: Point, compressed: bool = False) -> bytes:
        """x||y (2L bytes) or x||parity (L+1 bytes); no prefix byte."""
        if P.is_infinity:
            raise ValueError("cannot encode the point at infinity")
        L = self.L
        if compressed:
            return P.x.to_bytes(L, "big") + bytes([P.y & 1])
        return P.x.to_bytes(L, "big") + P.y.to_bytes(L, "big")

    def decode_point(self, data: bytes, compressed: bool = False) -> Point:
        L = self.L
        if len(data) != self.point_len(compressed):
            raise PointDecodeError(f"expected {self.point_len(compressed)} bytes, got {len(data)}")
        x = int.from_bytes(data[:L], "big")
        if compressed:
            parity = data[L]
            if parity not in (0, 1):
                raise PointDecodeError(f"bad parity byte {parity:#x}")
            if x >= self.p:
                raise PointDecodeError("x out of range")
            rhs = (x * x * x + self.a * x + self.b) % self.p
            y = sqrt_mod(rhs, self.p)
            if y is None:
                raise PointDecodeError("x has no point on the curve")
            if y & 1 != parity:
                y = (-y) % self.p
            P = Point(x, y)
        else:
            P = Point(x, int.from_bytes(data[L:], "big"))
        if not self.contains(P):
            raise PointDecodeError("point not on curve")
        return P


def _jadd_affine(X1, Y1, Z1, x2, y2, p, a):
    """Jacobian (X1,Y1,Z1) + affine (x2,y2)."""
    if Z1 == 0:
        return x2, y2, 1
    Z1Z1 = Z1 * Z1 % p
    U2 = x2 * Z1Z1 % p
    S2 = y2 * Z1 * Z1Z1 % p
    H = (U2 - X1) % p
    r = (S2 - Y1) % p
    if H == 0:
        if r != 0:
            return 1, 1, 0
        # P == Q: double the affine point
        if y2 == 0:
            return 1, 1, 0
        lam = (3 * x2 * x2 + a) * pow(2 * y2, -1, p) % p
        x3 = (lam * lam - 2 * x2) % p
        return x3, (lam * (x2 - x3) - y2) % p, 1
    HH = H * H % p
    HHH = H * HH % p
    V = X1 * HH % p
    X3 = (r * r - HHH - 2 * V) % p
    Y3 = (r * (V - X3) - Y1 * HHH) % p
    return X3, Y3, Z1 * H % p


def sqrt_mod(a: int, p: int) -> Optional[int]:
    """Square root modulo an odd prime, or None for non-residues."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


SECP160R1 = CurveParams(
    name="secp160r1",
    p=0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFF7FFFFFFF,
    a=0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFF7FFFFFFC,
    b=0x1C97BEFC54BD7A8B65ACF89F81D4D4ADC565FA45,
    gx=0x4A96B5688EF573284664698968C38BB913CBFC82,
    gy=0x23A628553168947D59DCC912042351377AC5FB32,
    n=0x0100000000000000000001F4C8F927AED3CA752257,
)

# 16-bit prime-order curve for exhaustive tests and fast simulation sweeps.
TOY16 = CurveParams(name="toy16", p=65519, a=65516, b=76, gx=2, gy=25056, n=65447)

CURVES = {c.name: c for c in (SECP160R1, TOY16)}


def get_curve(name: str) -> CurveParams:
    try:
        return CURVES[name]
    except KeyError:
        raise ValueError(f"unknown curve {name!r}; known: {sorted(CURVES)}") from None
