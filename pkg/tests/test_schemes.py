import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from covertlab.errors import CapacityError
from covertlab.headers import PacketRecord, ProtocolKind
from covertlab.schemes import (SEQ_BUCKET, esp_subliminal_embed, esp_subliminal_extract,
                               scheme1_decode, scheme1_encode, scheme1_encode_random, scheme1_max_k,
                               scheme2_decode, scheme2_encode, scheme2_encode_random, scheme3_bits,
                               scheme3_decode_stream, scheme3_encode_stream)
from covertlab.traces import gen_legit_trace


# --- scheme 1 ---

def test_scheme1_worked_example():
    assert scheme1_encode(ord("M"), 104) == 26702
    assert scheme1_decode(26702) == ord("M")


def test_scheme1_trivial():
    assert scheme1_encode(0, 0) == 1
    assert scheme1_decode(1) == 0


def test_scheme1_zero_wraps():
    # brute-force residue table: the symbol c with c + 1 congruent to R mod 256
    table = {r: next(c for c in range(256) if (c + 1 - r) % 256 == 0) for r in range(0, 512)}
    assert table[0] == 255
    assert all(scheme1_decode(r) == c for r, c in table.items())


def test_scheme1_exhaustive_round_trip():
    for c in range(256):
        for k in range(256):
            r = c + 1 + 256 * k
            if r >= 65536:
                with pytest.raises(ValueError):
                    scheme1_encode(c, k)
                continue
            ip_id = scheme1_encode(c, k)
            assert ip_id % 256 == (c + 1) % 256
            assert scheme1_decode(ip_id) == c


def test_scheme1_decode_surjective():
    assert {scheme1_decode(v) for v in range(65536)} == set(range(256))


def test_scheme1_random_wrapper_is_seeded():
    a = [scheme1_encode_random(c, np.random.default_rng(3)) for c in range(256)]
    b = [scheme1_encode_random(c, np.random.default_rng(3)) for c in range(256)]
    assert a == b
    assert [scheme1_decode(v) for v in a] == list(range(256))
    assert all(0 <= v < 65536 for v in a)


def test_scheme1_other_alphabet():
    assert scheme1_decode(scheme1_encode(5, 7, n=26), n=26) == 5
    assert scheme1_max_k(255) == 254


# --- scheme 2 ---

def test_scheme2_worked_example():
    assert scheme2_decode(1235037038) == ord("I")
    # offset recovered by subtraction from the worked sequence number
    offset = 1235037038 - 73 * 16777216
    assert offset == 10300270
    assert scheme2_encode(73, offset) == 1235037038


def test_scheme2_trivial():
    assert scheme2_encode(0, 0) == 0
    assert scheme2_decode(0) == 0
    assert scheme2_decode(16777216) == 1
    assert scheme2_decode(2**32 - 1) == 255


def test_scheme2_offset_range():
    with pytest.raises(ValueError):
        scheme2_encode(1, SEQ_BUCKET)
    with pytest.raises(ValueError):
        scheme2_encode(1, -1)


def test_scheme2_round_trip_random_offsets():
    rng = np.random.default_rng(11)
    for c in range(256):
        for j in rng.integers(0, SEQ_BUCKET, size=100):
            assert scheme2_decode(scheme2_encode(c, int(j))) == c


def test_scheme2_random_wrapper():
    rng = np.random.default_rng(0)
    assert all(scheme2_decode(scheme2_encode_random(c, rng)) == c for c in range(256))


# --- scheme 3 ---

@pytest.mark.parametrize("c,bits", [
    (0x41, [1, 0, 0, 0, 0, 0, 1, 0]),
    (0x00, [0] * 8),
    (0xFF, [1] * 8),
])
def test_scheme3_bits(c, bits):
    assert scheme3_bits(c) == bits


def test_scheme3_encode_example():
    out = scheme3_encode_stream(b"A", list(range(100, 108)))
    assert [t & 1 for t in out] == [1, 0, 0, 0, 0, 0, 1, 0]


def test_scheme3_empty_payload():
    assert scheme3_encode_stream(b"", [5, 9]) == [5, 9]
    assert scheme3_decode_stream([5, 9], 0) == b""


def test_scheme3_decode_example():
    assert scheme3_decode_stream([1, 0, 0, 0, 0, 0, 1, 0], 1) == b"\x41"


def test_scheme3_capacity():
    with pytest.raises(CapacityError):
        scheme3_encode_stream(b"AB", list(range(15)))
    with pytest.raises(CapacityError):
        scheme3_decode_stream(list(range(7)), 1)


def test_scheme3_rejects_unsorted_base():
    with pytest.raises(ValueError):
        scheme3_encode_stream(b"", [3, 3])


def _ascending(rng, n):
    return np.cumsum(rng.integers(1, 30, size=n)).tolist()


def test_scheme3_random_round_trips():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        payload = rng.integers(0, 256, size=int(rng.integers(0, 12))).astype(np.uint8).tobytes()
        base = _ascending(rng, 8 * len(payload) + int(rng.integers(0, 20)))
        out = scheme3_encode_stream(payload, base)
        assert len(out) == len(base)
        assert all(o >= b for o, b in zip(out, base))
        assert all(x < y for x, y in zip(out, out[1:]))
        assert scheme3_decode_stream(out, len(payload)) == payload


@settings(max_examples=200, deadline=None)
@given(payload=st.binary(max_size=16), gaps=st.lists(st.integers(1, 5), min_size=128, max_size=200))
def test_scheme3_monotone_property(payload, gaps):
    base = np.cumsum(gaps).tolist()
    out = scheme3_encode_stream(payload, base)
    assert all(x < y for x, y in zip(out, out[1:]))
    assert all(o >= b for o, b in zip(out, base))
    assert scheme3_decode_stream(out, len(payload)) == payload


# --- ESP ---

def _esp(n, seed=0):
    return gen_legit_trace(n, ["esp"], seed=seed)


def test_esp_single_byte():
    pkts = _esp(1)
    out = esp_subliminal_embed(b"\xab", pkts)
    assert out[0]["sequence_number"] & 0xFF == 0xAB
    assert out[0]["padding"] == pkts[0]["padding"]
    assert esp_subliminal_extract(out, 1) == b"\xab"


def test_esp_alternates_fields():
    out = esp_subliminal_embed(b"\x01\x02\x03", _esp(2))
    assert out[0]["sequence_number"] & 0xFF == 1
    assert out[0]["padding"] == 2
    assert out[1]["sequence_number"] & 0xFF == 3


def test_esp_empty_payload():
    pkts = _esp(3)
    assert esp_subliminal_embed(b"", pkts) == pkts
    assert esp_subliminal_extract(pkts, 0) == b""


def test_esp_capacity():
    with pytest.raises(CapacityError):
        esp_subliminal_embed(b"abc", _esp(1))
    with pytest.raises(CapacityError):
        esp_subliminal_extract(_esp(1), 3)


def test_esp_wrong_protocol():
    pkt = gen_legit_trace(1, ["tcp"])[0]
    with pytest.raises(ValueError):
        esp_subliminal_embed(b"a", [pkt])


@settings(max_examples=100, deadline=None)
@given(payload=st.binary(max_size=40), extra=st.integers(0, 5), seed=st.integers(0, 1000))
def test_esp_round_trip(payload, extra, seed):
    pkts = _esp(max(1, (len(payload) + 1) // 2 + extra), seed)
    out = esp_subliminal_embed(payload, pkts)
    assert esp_subliminal_extract(out, len(payload)) == payload
    for a, b in zip(pkts, out):
        assert a.fields["spi"] == b.fields["spi"]
        assert a.fields["sequence_number"] >> 8 == b.fields["sequence_number"] >> 8
