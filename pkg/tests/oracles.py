"""Reference computations kept independent of the package under test.

Affine textbook arithmetic only, no Jacobian coordinates, no shared code.
"""

SECP160R1_P = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFF7FFFFFFF
SECP160R1_A = SECP160R1_P - 3
SECP160R1_B = 0x1C97BEFC54BD7A8B65ACF89F81D4D4ADC565FA45
SECP160R1_G = (0x4A96B5688EF573284664698968C38BB913CBFC82, 0x23A628553168947D59DCC912042351377AC5FB32)
SECP160R1_N = 0x0100000000000000000001F4C8F927AED3CA752257

TOY_P, TOY_A, TOY_B, TOY_G, TOY_N = 65519, 65516, 76, (2, 25056), 65447


def affine_add(P, Q, p, a):
    if P is None:
        return Q
    if Q is None:
        return P
    (x1, y1), (x2, y2) = P, Q
    if x1 == x2 and (y1 + y2) % p == 0:
        return None
    if P == Q:
        lam = (3 * x1 * x1 + a) * pow(2 * y1, p - 2, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, p - 2, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def naive_mul(k, P, p, a):
    """Right-to-left double-and-add."""
    R = None
    while k:
        if k & 1:
            R = affine_add(R, P, p, a)
        P = affine_add(P, P, p, a)
        k >>= 1
    return R


def toy_points():
    """Every affine point of the toy curve, by brute force."""
    squares = {}
    for y in range(TOY_P):
        squares.setdefault(y * y % TOY_P, []).append(y)
    pts = []
    for x in range(TOY_P):
        rhs = (x**3 + TOY_A * x + TOY_B) % TOY_P
        for y in squares.get(rhs, ()):
            pts.append((x, y))
    return pts


# Hand arithmetic from the published per-operation tables.
PAIR_BYTES = 2 * (4 + 86) + 2 * (70 + 40) + 4 * 13  # 452
COMM_ENERGY_MJ = PAIR_BYTES * 8 / 160 * (1184 + 572) / 1000  # 39.6856
RAM_16_12 = 4028 + 64 * 15 + 284 * 11  # 8112
