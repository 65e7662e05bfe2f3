"""Trace files and synthetic legitimate traffic.

Trace format, one packet per line after a header::

    covertlab-trace v1 <count>
    <index> <proto> field=value field=value ... [covert=0|1]
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence

import numpy as np

from .errors import TraceFormatError, TraceValidationError
from .headers import REGISTRY, PacketRecord, ProtocolKind, parse_protocol, validate_packet

MAGIC = "covertlab-trace"
VERSION = "v1"

TIMESTAMP_STEP = (3, 41)  # ticks between segments; >= 3 keeps LSB nudges local
MAX_SEGMENT = 1460


class _Flow:
    """Per-protocol generator state for one synthetic conversation."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.src_addr = int(rng.integers(0, 1 << 32))
        self.dst_addr = int(rng.integers(0, 1 << 32))
        self.src_port = int(rng.integers(49152, 65536))
        self.seq = int(rng.integers(0, 1 << 32))
        self.ack = int(rng.integers(0, 1 << 32))
        self.ts = int(rng.integers(0, 1 << 30))
        self.spi = int(rng.integers(256, 1 << 32))
        self.esp_seq = 0

    def ipv4(self):
        r = self.rng
        return {
            "version": 4,
            "ihl": 5,
            "tos": 0,
            "total_length": int(r.integers(40, 1501)),
            "identification": int(r.integers(0, 1 << 16)),
            "flags_frag": 0x4000,
            "ttl": int(r.choice([64, 128])),
            "protocol": 6,
            "src_addr": self.src_addr,
            "dst_addr": self.dst_addr,
            "options": 0,
        }

    def tcp(self):
        r = self.rng
        fields = {
            "src_port": self.src_port,
            "dst_port": 443,
            "sequence_number": self.seq,
            "ack_number": self.ack,
            "data_offset": 8,
            "reserved": 0,
            "flags_unused": 0,
            "flags": int(r.choice([0x10, 0x18])),
            "window": int(r.integers(1024, 1 << 16)),
            "urgent_pointer": 0,
            "options_timestamp": self.ts,
        }
        self.seq = (self.seq + int(r.integers(0, MAX_SEGMENT + 1))) % (1 << 32)
        self.ack = (self.ack + int(r.integers(0, MAX_SEGMENT + 1))) % (1 << 32)
        self.ts += int(r.integers(*TIMESTAMP_STEP))
        if self.ts >= 1 << 32:
            self.ts %= 1 << 32  # wrap; only happens on very long traces
        return fields

    def esp(self):
        self.esp_seq += 1
        return {
            "spi": self.spi,
            "sequence_number": self.esp_seq,
            "padding": 1,  # first self-describing pad byte
            "pad_length": int(self.rng.integers(0, 4)),
            "next_header": 6,
        }


def generate_packets(layout: Sequence[ProtocolKind], rng: np.random.Generator) -> list[PacketRecord]:
    """Legitimate packets, one per entry of ``layout``, drawing from ``rng``."""
    flow = _Flow(rng)
    makers = {ProtocolKind.IPV4: flow.ipv4, ProtocolKind.TCP: flow.tcp, ProtocolKind.ESP: flow.esp}
    out = []
    for i, proto in enumerate(layout):
        if proto not in makers:
            raise ValueError(f"cannot generate {proto} packets")
        out.append(PacketRecord(i, proto, makers[proto]()))
    return out


def gen_legit_trace(n_packets: int, mix: Iterable = (ProtocolKind.IPV4,), seed: int = 0) -> list[PacketRecord]:
    """Seeded legitimate trace; protocols in ``mix`` are interleaved round-robin."""
    if n_packets < 1:
        raise ValueError("n_packets must be positive")
    mix = [parse_protocol(p) for p in mix]
    if not mix:
        raise ValueError("protocol mix is empty")
    rng = np.random.default_rng(seed)
    return generate_packets([mix[i % len(mix)] for i in range(n_packets)], rng)


# --- text format ------------------------------------------------------------

def render_trace(trace: Sequence[PacketRecord]) -> str:
    lines = [f"{MAGIC} {VERSION} {len(trace)}"]
    for rec in trace:
        names = REGISTRY.field_names(rec.proto)
        extra = [n for n in rec.fields if n not in names]
        parts = [str(rec.index), rec.proto.value]
        parts += [f"{n}={rec.fields[n]}" for n in (*names, *extra) if n in rec.fields]
        if rec.covert_marker is not None:
            parts.append(f"covert={int(rec.covert_marker)}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _parse_record(line: str, lineno: int) -> PacketRecord:
    tokens = line.split()
    if len(tokens) < 2:
        raise TraceFormatError("expected '<index> <proto> field=value ...'", lineno)
    try:
        index = int(tokens[0])
        proto = ProtocolKind(tokens[1])
    except ValueError:
        raise TraceFormatError(f"bad index or protocol in {line!r}", lineno) from None
    fields = {}
    marker = None
    for tok in tokens[2:]:
        name, sep, value = tok.partition("=")
        if not sep:
            raise TraceFormatError(f"token {tok!r} is not field=value", lineno)
        try:
            number = int(value)
        except ValueError:
            raise TraceFormatError(f"{name} has non-integer value {value!r}", lineno) from None
        if name == "covert":
            if number not in (0, 1):
                raise TraceFormatError("covert marker must be 0 or 1", lineno)
            marker = bool(number)
        elif name in fields:
            raise TraceFormatError(f"duplicate field {name}", lineno)
        else:
            fields[name] = number
    rec = PacketRecord(index, proto, fields, marker)
    result = validate_packet(rec)
    if not result.ok:
        raise TraceValidationError("; ".join(result.violations), lineno)
    return rec


def parse_trace(text: str) -> list[PacketRecord]:
    lines = text.splitlines()
    if not lines:
        raise TraceFormatError("empty trace file", 1)
    header = lines[0].split()
    if len(header) != 3 or header[0] != MAGIC or header[1] != VERSION:
        raise TraceFormatError(f"expected header '{MAGIC} {VERSION} <count>'", 1)
    try:
        count = int(header[2])
    except ValueError:
        raise TraceFormatError("packet count is not an integer", 1) from None
    body = lines[1:]
    if len(body) != count:
        raise TraceFormatError(f"header declares {count} packets but file has {len(body)}", len(lines))
    trace = []
    for lineno, line in enumerate(body, start=2):
        rec = _parse_record(line, lineno)
        if trace and rec.index <= trace[-1].index:
            raise TraceFormatError("packet index does not increase", lineno)
        trace.append(rec)
    return trace


def write_trace(trace: Sequence[PacketRecord], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(render_trace(trace))


def read_trace(path: str | os.PathLike) -> list[PacketRecord]:
    with open(path, encoding="ascii") as fh:
        return parse_trace(fh.read())
