import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import SECP160R1_A, SECP160R1_G, SECP160R1_P, naive_mul
from sensorkey.crypto import (
    AuthenticationError,
    BudgetExceededError,
    Ciphertext,
    DecodeError,
    InvalidPointError,
    KeyPair,
    OpCounter,
    Signature,
    ciphertext_len,
    compress_point,
    decompress_point,
    decrypt,
    derive_bytes,
    encrypt,
    keygen,
    public_from_private,
    sign,
    verify,
)
from sensorkey.ec import SECP160R1, TOY16, Point

C = SECP160R1


@pytest.fixture(scope="module")
def kp():
    return keygen(C, seed=42)


@pytest.fixture(scope="module")
def other():
    return keygen(C, seed=43)


def test_small_private_keys():
    assert public_from_private(C, 1) == C.G
    assert public_from_private(C, 2) == C.double(C.G)


def test_seeded_keygen_checked_by_naive_multiplication(kp):
    assert (kp.Q.x, kp.Q.y) == naive_mul(kp.d, SECP160R1_G, SECP160R1_P, SECP160R1_A)
    assert keygen(C, seed=42) == kp


def test_keypair_rejects_mismatch(kp):
    with pytest.raises(ValueError):
        KeyPair(kp.d + 1, kp.Q, C)


def test_sign_verify_round_trip(kp):
    sig = sign(b"hello", kp.d, C, seed=1)
    assert verify(b"hello", sig, kp.Q, C)
    assert not verify(b"hellp", sig, kp.Q, C)


def test_signature_deterministic_and_fixed_width(kp):
    a = sign(b"msg", kp.d, C, seed=5).to_bytes(C)
    b = sign(b"msg", kp.d, C, seed=5).to_bytes(C)
    assert a == b and len(a) == 40
    assert sign(b"msg", kp.d, C, seed=6).to_bytes(C) != a


def test_r_plus_one_and_wrong_key(kp, other):
    sig = sign(b"m", kp.d, C)
    assert not verify(b"m", Signature(sig.r + 1, sig.s), kp.Q, C)
    assert not verify(b"m", sig, other.Q, C)


def test_off_curve_key_is_invalid_input_not_false(kp):
    sig = sign(b"m", kp.d, C)
    with pytest.raises(InvalidPointError):
        verify(b"m", sig, Point(kp.Q.x, kp.Q.y ^ 1), C)


def test_single_bit_mutations_never_verify(kp):
    rng = random.Random(2024)
    for trial in range(500):
        msg = rng.randbytes(rng.randint(1, 80))
        sig = sign(msg, kp.d, C, seed=trial)
        blob = bytearray(msg + sig.to_bytes(C))
        bit = rng.randrange(len(blob) * 8)
        blob[bit // 8] ^= 1 << (bit % 8)
        m2, s2 = bytes(blob[: len(msg)]), Signature.from_bytes(bytes(blob[len(msg):]), C)
        assert not verify(m2, s2, kp.Q, C), trial


def test_ciphertext_sizes(kp):
    assert len(encrypt(b"x" * 10, kp.Q, C, seed=1).to_bytes(C)) == 70
    assert len(encrypt(b"x" * 10, kp.Q, C, compressed=True, seed=1).to_bytes(C)) == 51
    for n in range(1, 11):
        for comp in (False, True):
            ct = encrypt(b"\x01" * n, kp.Q, C, compressed=comp, seed=n)
            expected = (C.L + 1 if comp else 2 * C.L) + n + 20
            assert len(ct.to_bytes(C)) == ciphertext_len(C, n, comp) == expected


def test_plaintext_budget(kp):
    with pytest.raises(BudgetExceededError):
        encrypt(b"x" * 11, kp.Q, C, seed=1)


@settings(max_examples=1000)
@given(st.binary(min_size=1, max_size=10), st.integers(0, 2**64), st.booleans())
def test_encrypt_decrypt_round_trip(pt, seed, comp):
    kp = keygen(C, seed=42)
    ct = encrypt(pt, kp.Q, C, compressed=comp, seed=seed)
    back = Ciphertext.from_bytes(ct.to_bytes(C), C, comp)
    assert decrypt(back, kp.d, C) == pt


def test_tampered_payload_and_wrong_key_fail_mac(kp, other):
    ct = encrypt(b"0123456789", kp.Q, C, seed=3)
    flipped = Ciphertext(ct.ephemeral, bytes([ct.payload[0] ^ 1]) + ct.payload[1:], ct.tag)
    with pytest.raises(AuthenticationError):
        decrypt(flipped, kp.d, C)
    with pytest.raises(AuthenticationError):
        decrypt(ct, other.d, C)


def test_bad_ephemeral_is_decode_error(kp):
    raw = bytearray(encrypt(b"0123456789", kp.Q, C, seed=3).to_bytes(C))
    raw[39] ^= 1
    with pytest.raises(DecodeError):
        Ciphertext.from_bytes(bytes(raw), C)
    with pytest.raises(DecodeError):
        decrypt(Ciphertext(Point(1, 1), b"x", b"\x00" * 20), kp.d, C)


def test_compression_round_trip_on_random_points():
    rng = random.Random(9)
    for _ in range(100):
        P = C.mul(rng.randrange(1, C.n), C.G)
        data = compress_point(P, C)
        assert len(data) == 21
        assert decompress_point(data, C) == P


def test_flipped_parity_gives_the_negated_point():
    P = C.mul(777, C.G)
    data = bytearray(compress_point(P, C))
    data[-1] ^= 1
    Q = decompress_point(bytes(data), C)
    assert Q == C.neg(P) and Q != P


def test_x_without_square_root_is_decode_error():
    for x in range(2, 50):
        if not TOY16.contains(Point(x, 0)) and pow((x**3 + TOY16.a * x + TOY16.b) % TOY16.p, (TOY16.p - 1) // 2, TOY16.p) != 1:
            with pytest.raises(DecodeError):
                decompress_point(x.to_bytes(2, "big") + b"\x00", TOY16)
            return
    pytest.fail("no non-residue x found")


def test_operation_counts_per_primitive(kp):
    c = OpCounter()
    sig = sign(b"m", kp.d, C, counter=c)
    assert (c.sm, c.pa) == (1, 0)
    c = OpCounter()
    verify(b"m", sig, kp.Q, C, counter=c)
    assert (c.sm, c.pa) == (2, 1)
    c = OpCounter()
    ct = encrypt(b"0123456789", kp.Q, C, seed=1, counter=c)
    assert (c.sm, c.pa, c.kdf, c.enc, c.mac) == (2, 0, 1, 1, 1)
    c = OpCounter()
    decrypt(ct, kp.d, C, counter=c)
    assert (c.sm, c.pa, c.dec) == (1, 0, 1)


def test_counter_addition_and_reset():
    a = OpCounter(sm=2, hash=1)
    b = a + OpCounter(sm=1, pa=1)
    assert b.nonzero() == {"sm": 3, "hash": 1, "pa": 1}
    b.reset()
    assert b.nonzero() == {}


def test_derive_bytes_separates_inputs():
    assert derive_bytes(1, "x", 8) == derive_bytes(1, "x", 8)
    assert len({derive_bytes(s, l, 8, *p) for s, l, p in [(1, "x", ()), (b"1", "x", ()), ("1", "x", ()), (1, "y", ()), (1, "x", (1,))]}) == 5
    assert len(derive_bytes(0, "long", 100)) == 100
