import pytest
from hypothesis import given, strategies as st

from sensorkey.crypto import encrypt, keygen, sign
from sensorkey.certificates import issue
from sensorkey.ec import SECP160R1
from sensorkey.wire import (
    ATTACHMENT,
    BROADCAST,
    MAX_FRAME,
    MAX_PAYLOAD,
    MSG_NEW1,
    MSG_NEW2,
    BudgetViolation,
    Frame,
    MalformedPacket,
    New1Packet,
    New2Packet,
    check_budget,
    decode_frame,
    decode_new1,
    decode_new2,
    encode_frame,
    encode_new1,
    encode_new2,
    new1_len,
    new2_len,
)

C = SECP160R1
KGC = keygen(C, seed="w-kgc")
A = keygen(C, seed="w-a")
B = keygen(C, seed="w-b")
CERT = issue(1, A.Q, KGC.d, C)


def new2(compressed=False):
    ct = encrypt(b"0123456789", B.Q, C, compressed=compressed, seed=1).to_bytes(C)
    return New2Packet(ct, sign(ct + b"\x00\x00\x00\x01", A.d, C))


def test_new1_layout():
    pkt = New1Packet(7, b"\xde\xad\xbe\xef", CERT)
    body = encode_new1(pkt, C)
    assert len(body) == new1_len(C) == 90 <= MAX_PAYLOAD
    assert body[:4] == (7).to_bytes(4, "big") and body[4:8] == b"\xde\xad\xbe\xef"
    assert decode_new1(body, C) == pkt


def test_new1_truncation_and_bad_nonce():
    body = encode_new1(New1Packet(1, b"\x00" * 4, CERT), C)
    with pytest.raises(MalformedPacket):
        decode_new1(body[:89], C)
    with pytest.raises(MalformedPacket):
        encode_new1(New1Packet(1, b"\x00" * 3, CERT), C)


def test_new2_layout():
    pkt = new2()
    body = encode_new2(pkt, C)
    assert len(body) == new2_len(C) == 110 <= MAX_PAYLOAD
    assert decode_new2(body, C) == pkt
    small = encode_new2(new2(True), C, compressed=True)
    assert len(small) == new2_len(C, True) == 91


def test_new2_wrong_component_lengths():
    pkt = new2()
    with pytest.raises(MalformedPacket):
        encode_new2(New2Packet(pkt.cipher[:-1], pkt.sig), C)
    with pytest.raises(MalformedPacket):
        decode_new2(encode_new2(pkt, C) + b"\x00", C)


@given(st.binary(max_size=140))
def test_decoders_reject_every_other_length(body):
    if len(body) != 90:
        with pytest.raises(MalformedPacket):
            decode_new1(body, C)
    if len(body) != 110:
        with pytest.raises(MalformedPacket):
            decode_new2(body, C)


def test_budget_boundary():
    assert check_budget(b"\x00" * 114)
    assert not check_budget(b"\x00" * 115)
    assert check_budget(b"\x00" * 90) and check_budget(b"\x00" * 110)


def test_frame_sizes_and_round_trip():
    body = encode_new2(new2(), C)
    f = Frame(3, 4, MSG_NEW2, body)
    raw = encode_frame(f)
    assert len(raw) == len(body) + ATTACHMENT == 123 <= MAX_FRAME
    assert decode_frame(raw) == f
    bcast = Frame(3, BROADCAST, MSG_NEW1, encode_new1(New1Packet(1, b"abcd", CERT), C))
    assert len(encode_frame(bcast)) == 103
    assert decode_frame(encode_frame(bcast)).is_broadcast


def test_clean_pair_traffic_is_452_bytes():
    n1 = encode_frame(Frame(1, BROADCAST, MSG_NEW1, encode_new1(New1Packet(1, b"abcd", CERT), C)))
    n2 = encode_frame(Frame(1, 2, MSG_NEW2, encode_new2(new2(), C)))
    assert 2 * len(n1) + 2 * len(n2) == 452


@given(st.integers(0, 0xFFFF), st.integers(0, 0xFFFF), st.integers(0, 255), st.binary(max_size=114))
def test_frame_round_trip(src, dst, t, body):
    f = Frame(src, dst, t, body)
    assert decode_frame(encode_frame(f)) == f


@given(st.binary(min_size=0, max_size=114), st.integers(0, 10_000))
def test_frame_corruption_detected(body, where):
    raw = bytearray(encode_frame(Frame(1, 2, MSG_NEW1, body)))
    i = where % len(raw)
    raw[i] ^= 0x5A
    with pytest.raises(MalformedPacket):
        decode_frame(bytes(raw))


def test_oversize_frame_body_refused():
    with pytest.raises(BudgetViolation):
        encode_frame(Frame(1, 2, MSG_NEW1, b"\x00" * 115))
    with pytest.raises(MalformedPacket):
        decode_frame(b"\x00" * 12)
