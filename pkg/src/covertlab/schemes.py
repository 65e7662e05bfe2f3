"""Covert encoding schemes over header field values.

Scheme 1 hides a character in the IP identification residue mod n.
Scheme 2 hides a character in the top byte of the TCP sequence number.
Scheme 3 hides one bit per segment in the TCP timestamp LSB.
The ESP scheme places raw bytes in the ESP sequence-number low byte and
the padding byte. Direct placement writes raw bits into the low bits of any
trapdoor-capable field.

Encoders that have a free carrier choice take it as an explicit argument;
the ``*_random`` wrappers draw it from a caller-supplied numpy Generator.
"""

from __future__ import annotations

import enum
from typing import Sequence

import numpy as np

from .errors import CapacityError
from .headers import REGISTRY, FieldDescriptor, PacketRecord, ProtocolKind

ASCII_ALPHABET = 256
IP_ID_LIMIT = 1 << 16
SEQ_LIMIT = 1 << 32
SEQ_BUCKET = 1 << 24  # 2**32 / 256
TIMESTAMP_LIMIT = 1 << 32


class SchemeId(enum.Enum):
    IP_ID_MODULUS = "ip-id-modulus"
    SEQ_SCALE = "seq-scale"
    TIMESTAMP_LSB = "timestamp-lsb"
    ESP_SUBLIMINAL = "esp-subliminal"
    DIRECT = "direct"

    def __str__(self) -> str:
        return self.value


_SCHEME_ALIASES = {
    "scheme1": SchemeId.IP_ID_MODULUS,
    "ipid": SchemeId.IP_ID_MODULUS,
    "scheme2": SchemeId.SEQ_SCALE,
    "seq": SchemeId.SEQ_SCALE,
    "scheme3": SchemeId.TIMESTAMP_LSB,
    "ts": SchemeId.TIMESTAMP_LSB,
    "esp": SchemeId.ESP_SUBLIMINAL,
    "subliminal": SchemeId.ESP_SUBLIMINAL,
}


def parse_scheme(token) -> SchemeId:
    if isinstance(token, SchemeId):
        return token
    key = token.strip().lower()
    if key in _SCHEME_ALIASES:
        return _SCHEME_ALIASES[key]
    try:
        return SchemeId(key)
    except ValueError:
        raise ValueError(f"unknown scheme {token!r}") from None


# Protocol / field family for each scheme. None means any trapdoor-capable field.
SCHEME_BINDINGS = {
    SchemeId.IP_ID_MODULUS: (ProtocolKind.IPV4, frozenset({"identification"})),
    SchemeId.SEQ_SCALE: (ProtocolKind.TCP, frozenset({"sequence_number"})),
    SchemeId.TIMESTAMP_LSB: (ProtocolKind.TCP, frozenset({"options_timestamp"})),
    SchemeId.ESP_SUBLIMINAL: (ProtocolKind.ESP, frozenset({"sequence_number", "padding"})),
    SchemeId.DIRECT: (None, None),
}


def scheme_accepts(scheme: SchemeId, proto: ProtocolKind, name: str) -> bool:
    bound_proto, names = SCHEME_BINDINGS[scheme]
    if bound_proto is None:
        return any(d.name == name for d in REGISTRY.trapdoors(proto))
    return proto is bound_proto and name in names


def _check_octet(c: int, n: int = ASCII_ALPHABET) -> int:
    if not 0 <= c < n:
        raise ValueError(f"symbol {c} outside alphabet of size {n}")
    return c


# --- Scheme 1: IP identification modulus ------------------------------------

def scheme1_encode(c: int, k: int, n: int = ASCII_ALPHABET) -> int:
    """IP ID carrying ``c``: ``c + 1 + n*k``.

    >>> scheme1_encode(77, 104)
    26702
    """
    if n < 2:
        raise ValueError("alphabet size must be at least 2")
    _check_octet(c, n)
    if k < 0:
        raise ValueError("carrier choice k must be non-negative")
    r = c + 1 + n * k
    if r >= IP_ID_LIMIT:
        raise ValueError(f"no 16-bit IP ID for c={c}, k={k} (got {r})")
    return r


def scheme1_decode(ip_id: int, n: int = ASCII_ALPHABET) -> int:
    # Python's % is already the non-negative modulus, so ip_id 0 maps to n-1.
    return (ip_id - 1) % n


def scheme1_max_k(c: int, n: int = ASCII_ALPHABET) -> int:
    return (IP_ID_LIMIT - 1 - (c + 1)) // n


def scheme1_embed(c: int, ip_id: int, n: int = ASCII_ALPHABET) -> int:
    """Re-encode ``c`` into the IP ID closest in block to the existing ``ip_id``."""
    k = min(ip_id // n, scheme1_max_k(c, n))
    return scheme1_encode(c, k, n)


def scheme1_encode_random(c: int, rng: np.random.Generator, n: int = ASCII_ALPHABET) -> int:
    k = int(rng.integers(0, scheme1_max_k(_check_octet(c, n), n) + 1))
    return scheme1_encode(c, k, n)


# --- Scheme 2: sequence-number bucket ---------------------------------------

def scheme2_encode(c: int, offset: int) -> int:
    """Sequence number in bucket ``c`` of width 2**24."""
    _check_octet(c)
    if not 0 <= offset < SEQ_BUCKET:
        raise ValueError(f"offset {offset} outside [0, 2**24)")
    return c * SEQ_BUCKET + offset


def scheme2_decode(seq: int) -> int:
    return (seq % SEQ_LIMIT) // SEQ_BUCKET


def scheme2_embed(c: int, seq: int) -> int:
    """Move ``seq`` into bucket ``c`` keeping its low 24 bits."""
    return scheme2_encode(c, seq % SEQ_BUCKET)


def scheme2_encode_random(c: int, rng: np.random.Generator) -> int:
    return scheme2_encode(c, int(rng.integers(0, SEQ_BUCKET)))


# --- Scheme 3: timestamp LSB -------------------------------------------------

def scheme3_bits(c: int) -> list[int]:
    """The 8 bits of ``c``, least significant first."""
    _check_octet(c)
    return [(c >> i) & 1 for i in range(8)]


def payload_bits(payload: bytes | Sequence[int]) -> list[int]:
    return [b for c in payload for b in scheme3_bits(c)]


def bits_to_bytes(bits: Sequence[int]) -> bytes:
    if len(bits) % 8:
        raise ValueError("bit count is not a multiple of 8")
    out = bytearray()
    for i in range(0, len(bits), 8):
        out.append(sum((bits[i + j] & 1) << j for j in range(8)))
    return bytes(out)


def scheme3_encode_stream(payload: bytes | Sequence[int], base_timestamps: Sequence[int]) -> list[int]:
    """Delay timestamps until their LSBs spell out the payload bits.

    A mismatching timestamp is bumped by one tick; later timestamps are pushed
    forward only as far as needed to stay strictly ascending.
    """
    bits = payload_bits(payload)
    if len(base_timestamps) < len(bits):
        raise CapacityError(
            f"timestamp carrier has {len(base_timestamps)} slots, payload needs {len(bits)}"
        )
    out = []
    prev = None
    for i, ts in enumerate(base_timestamps):
        if prev is not None and ts <= base_timestamps[i - 1]:
            raise ValueError("base timestamps must be strictly ascending")
        t = ts if prev is None else max(ts, prev + 1)
        if i < len(bits) and (t & 1) != bits[i]:
            t += 1
        if t >= TIMESTAMP_LIMIT:
            raise ValueError("adjusted timestamp overflows 32 bits")
        out.append(t)
        prev = t
    return out


def scheme3_decode_stream(timestamps: Sequence[int], n_bytes: int) -> bytes:
    need = 8 * n_bytes
    if len(timestamps) < need:
        raise CapacityError(f"need {need} timestamps for {n_bytes} bytes, have {len(timestamps)}")
    return bits_to_bytes([t & 1 for t in timestamps[:need]])


# --- ESP trapdoors -----------------------------------------------------------

ESP_BYTES_PER_PACKET = 2


def _esp_slots(n_bytes: int):
    # byte i -> (packet, field): seq low byte and padding alternate
    for i in range(n_bytes):
        yield i // 2, ("sequence_number", "padding")[i % 2]


def esp_subliminal_embed(payload: bytes | Sequence[int], packets: Sequence[PacketRecord]) -> list[PacketRecord]:
    """Write payload bytes alternately into seq low byte and padding, packet by packet."""
    if any(p.proto is not ProtocolKind.ESP for p in packets):
        raise ValueError("ESP embedding needs IPSecESP packets only")
    if len(payload) > ESP_BYTES_PER_PACKET * len(packets):
        raise CapacityError(
            f"{len(packets)} ESP packets hold {ESP_BYTES_PER_PACKET * len(packets)} bytes, "
            f"payload has {len(payload)}"
        )
    out = list(packets)
    for c, (i, name) in zip(payload, _esp_slots(len(payload))):
        _check_octet(c)
        if name == "sequence_number":
            out[i] = out[i].with_fields(sequence_number=(out[i]["sequence_number"] & ~0xFF) | c)
        else:
            out[i] = out[i].with_fields(padding=c)
    return out


def esp_subliminal_extract(packets: Sequence[PacketRecord], n_bytes: int) -> bytes:
    if n_bytes > ESP_BYTES_PER_PACKET * len(packets):
        raise CapacityError(f"{len(packets)} ESP packets cannot hold {n_bytes} bytes")
    return bytes(packets[i][name] & 0xFF for i, name in _esp_slots(n_bytes))


# --- Field codecs used by hybrid channels -----------------------------------

class FieldCodec:
    """Embeds a byte stream into successive values of one header field."""

    bits_per_packet = 8

    def max_bytes(self, n_values: int) -> int:
        return n_values * self.bits_per_packet // 8

    def packets_needed(self, n_bytes: int) -> int:
        return -(-8 * n_bytes // self.bits_per_packet)

    def embed(self, data: bytes, values: list[int]) -> list[int]:
        raise NotImplementedError

    def extract(self, values: Sequence[int], n_bytes: int) -> bytes:
        raise NotImplementedError


class _Scheme1Codec(FieldCodec):
    def embed(self, data, values):
        return [scheme1_embed(c, v) for c, v in zip(data, values)] + values[len(data):]

    def extract(self, values, n_bytes):
        return bytes(scheme1_decode(v) for v in values[:n_bytes])


class _Scheme2Codec(FieldCodec):
    def embed(self, data, values):
        return [scheme2_embed(c, v) for c, v in zip(data, values)] + values[len(data):]

    def extract(self, values, n_bytes):
        return bytes(scheme2_decode(v) for v in values[:n_bytes])


class _Scheme3Codec(FieldCodec):
    bits_per_packet = 1

    def embed(self, data, values):
        return scheme3_encode_stream(data, values)

    def extract(self, values, n_bytes):
        return scheme3_decode_stream(values, n_bytes)


class _LowBitsCodec(FieldCodec):
    """Raw bits in the low ``width`` bits of each value, LSB first."""

    def __init__(self, width: int):
        self.bits_per_packet = width

    def embed(self, data, values):
        bits = payload_bits(data)
        w = self.bits_per_packet
        mask = (1 << w) - 1
        out = list(values)
        for i in range(0, len(bits), w):
            chunk = bits[i:i + w]
            word = sum(b << j for j, b in enumerate(chunk))
            keep = mask ^ ((1 << len(chunk)) - 1)
            out[i // w] = (out[i // w] & ~mask) | (out[i // w] & keep) | word
        return out

    def extract(self, values, n_bytes):
        w = self.bits_per_packet
        need = 8 * n_bytes
        bits = []
        for v in values:
            if len(bits) >= need:
                break
            bits.extend((v >> j) & 1 for j in range(w))
        return bits_to_bytes(bits[:need])


def codec_for(scheme: SchemeId, desc: FieldDescriptor) -> FieldCodec:
    if scheme is SchemeId.IP_ID_MODULUS:
        return _Scheme1Codec()
    if scheme is SchemeId.SEQ_SCALE:
        return _Scheme2Codec()
    if scheme is SchemeId.TIMESTAMP_LSB:
        return _Scheme3Codec()
    # ESP trapdoors and direct placement both write raw low bits.
    return _LowBitsCodec(min(8, desc.bit_width))
