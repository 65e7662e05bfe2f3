"""Modeled protocol headers and the trapdoor registry.

Headers are field maps of unsigned integers, not byte layouts. Every
formula in this package works on field values, so wire serialization,
checksums and fragmentation are left out on purpose.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import FixtureOnlyProtocolError, UnknownFieldError


class ProtocolKind(enum.Enum):
    IPV4 = "IPv4"
    TCP = "TCP"
    ESP = "IPSecESP"
    TLS = "TLS"  # table fixtures only, no field registry

    def __str__(self) -> str:
        return self.value


_PROTO_ALIASES = {
    "ipv4": ProtocolKind.IPV4,
    "ip": ProtocolKind.IPV4,
    "tcp": ProtocolKind.TCP,
    "ipsecesp": ProtocolKind.ESP,
    "esp": ProtocolKind.ESP,
    "tls": ProtocolKind.TLS,
}


def parse_protocol(token: str | ProtocolKind) -> ProtocolKind:
    """Accept a ProtocolKind, its canonical name, or a short alias (ipv4, tcp, esp)."""
    if isinstance(token, ProtocolKind):
        return token
    try:
        return _PROTO_ALIASES[token.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown protocol {token!r}") from None


@dataclass(frozen=True)
class FieldDescriptor:
    protocol: ProtocolKind
    name: str
    bit_width: int
    trapdoor_capable: bool = False

    def __post_init__(self):
        if not 1 <= self.bit_width <= 32:
            raise ValueError(f"{self.name}: bit_width must be in 1..32, got {self.bit_width}")

    @property
    def max_value(self) -> int:
        return (1 << self.bit_width) - 1


def _fields(proto, spec):
    return tuple(FieldDescriptor(proto, name, bits, trap) for name, bits, trap in spec)


# (name, bits, trapdoor_capable). Field order here is the canonical render order.
_LAYOUTS = {
    ProtocolKind.IPV4: _fields(ProtocolKind.IPV4, [
        ("version", 4, False),
        ("ihl", 4, False),
        ("tos", 8, True),
        ("total_length", 16, False),
        ("identification", 16, True),
        ("flags_frag", 16, True),  # 3 flag bits + 13-bit fragment offset
        ("ttl", 8, False),
        ("protocol", 8, False),
        ("src_addr", 32, False),
        ("dst_addr", 32, False),
        ("options", 32, True),
    ]),
    ProtocolKind.TCP: _fields(ProtocolKind.TCP, [
        ("src_port", 16, False),
        ("dst_port", 16, False),
        ("sequence_number", 32, True),
        ("ack_number", 32, True),
        ("data_offset", 4, False),
        ("reserved", 3, True),
        ("flags_unused", 3, True),  # NS / CWR / ECE
        ("flags", 6, False),
        ("window", 16, True),
        ("urgent_pointer", 16, True),
        ("options_timestamp", 32, True),
    ]),
    ProtocolKind.ESP: _fields(ProtocolKind.ESP, [
        ("spi", 32, False),
        ("sequence_number", 32, True),
        ("padding", 8, True),
        ("pad_length", 8, False),
        ("next_header", 8, False),
    ]),
}

# Ordered trapdoor sets; their sizes are the per-protocol maxima T_m.
_TRAPDOOR_ORDER = {
    ProtocolKind.IPV4: ("identification", "tos", "flags_frag", "options"),
    ProtocolKind.TCP: ("sequence_number", "ack_number", "reserved", "window",
                       "urgent_pointer", "flags_unused", "options_timestamp"),
    ProtocolKind.ESP: ("sequence_number", "padding"),
}


class TrapdoorRegistry:
    """Per-protocol field layouts and the universal trapdoor set U_t."""

    def __init__(self, layouts=None, trapdoor_order=None):
        self._layouts = dict(layouts or _LAYOUTS)
        order = dict(trapdoor_order or _TRAPDOOR_ORDER)
        self._by_name = {
            proto: {d.name: d for d in descs} for proto, descs in self._layouts.items()
        }
        self._trapdoors = {}
        for proto, names in order.items():
            descs = tuple(self._by_name[proto][n] for n in names)
            if not all(d.trapdoor_capable for d in descs):
                raise ValueError(f"{proto}: trapdoor list names a non-capable field")
            capable = sum(d.trapdoor_capable for d in self._layouts[proto])
            if capable != len(descs):
                raise ValueError(f"{proto}: trapdoor list does not cover every capable field")
            self._trapdoors[proto] = descs

    @property
    def protocols(self) -> tuple[ProtocolKind, ...]:
        return tuple(self._layouts)

    def _check(self, proto: ProtocolKind) -> ProtocolKind:
        proto = parse_protocol(proto)
        if proto not in self._layouts:
            raise FixtureOnlyProtocolError(f"{proto} is a fixture-only protocol")
        return proto

    def layout(self, proto) -> tuple[FieldDescriptor, ...]:
        return self._layouts[self._check(proto)]

    def trapdoors(self, proto) -> tuple[FieldDescriptor, ...]:
        return self._trapdoors[self._check(proto)]

    def t_max(self, proto) -> int:
        return len(self.trapdoors(proto))

    def descriptor(self, proto, name: str) -> FieldDescriptor:
        proto = self._check(proto)
        try:
            return self._by_name[proto][name]
        except KeyError:
            raise UnknownFieldError(f"{proto} has no field {name!r}") from None

    def field_names(self, proto) -> tuple[str, ...]:
        return tuple(d.name for d in self.layout(proto))


REGISTRY = TrapdoorRegistry()


def trapdoor_capacity(proto) -> int:
    """Number of trapdoor-capable fields (T_m) for ``proto``."""
    return REGISTRY.t_max(proto)


def field_bits(proto, name: str) -> int:
    return REGISTRY.descriptor(proto, name).bit_width


@dataclass(frozen=True, eq=True)
class PacketRecord:
    """One simulated packet.

    ``covert_marker`` is ground truth for labeled test traces. Detection code
    never looks at it.
    """

    index: int
    proto: ProtocolKind
    fields: Mapping[str, int]
    covert_marker: bool | None = None

    def with_fields(self, **updates: int) -> "PacketRecord":
        merged = dict(self.fields)
        merged.update(updates)
        return PacketRecord(self.index, self.proto, merged, self.covert_marker)

    def with_marker(self, marker: bool | None) -> "PacketRecord":
        return PacketRecord(self.index, self.proto, dict(self.fields), marker)

    def with_index(self, index: int) -> "PacketRecord":
        return PacketRecord(index, self.proto, dict(self.fields), self.covert_marker)

    def __getitem__(self, name: str) -> int:
        return self.fields[name]


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_packet(record: PacketRecord, registry: TrapdoorRegistry = REGISTRY) -> ValidationResult:
    """Check field presence and bit widths. Violations are returned, not raised."""
    try:
        layout = registry.layout(record.proto)
    except FixtureOnlyProtocolError as exc:
        return ValidationResult((str(exc),))

    problems = []
    for desc in layout:
        if desc.name not in record.fields:
            problems.append(f"missing field {desc.name}")
            continue
        value = record.fields[desc.name]
        if not isinstance(value, int) or isinstance(value, bool):
            problems.append(f"{desc.name} is not an integer")
        elif value < 0:
            problems.append(f"{desc.name} is negative")
        elif value > desc.max_value:
            problems.append(f"{desc.name} exceeds {desc.bit_width} bits")
    known = {d.name for d in layout}
    for name in record.fields:
        if name not in known:
            problems.append(f"unknown field {name}")
    return ValidationResult(tuple(problems))


def validate_trace(trace: Iterable[PacketRecord], registry: TrapdoorRegistry = REGISTRY) -> ValidationResult:
    problems = []
    last = None
    for rec in trace:
        if last is not None and rec.index <= last:
            problems.append(f"packet {rec.index}: index does not increase")
        last = rec.index
        problems.extend(f"packet {rec.index}: {v}" for v in validate_packet(rec, registry).violations)
    return ValidationResult(tuple(problems))
