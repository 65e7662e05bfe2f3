"""Single- and multi-trapdoor hybrid channels and the two attack scenarios.

Payload bytes are dealt round-robin over the trapdoors of a channel, in list
order. Each trapdoor then writes its share into the packets of its own
protocol, starting from the first one, so the receiver can undo the split
from the shared configuration and the byte count alone.
"""

from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, ConfigError, ConstraintError
from .headers import REGISTRY, PacketRecord, ProtocolKind, TrapdoorRegistry, parse_protocol
from .schemes import SchemeId, codec_for, parse_scheme, scheme_accepts

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrapdoorSpec:
    protocol: ProtocolKind
    field: str
    scheme: SchemeId

    def __post_init__(self):
        object.__setattr__(self, "protocol", parse_protocol(self.protocol))
        object.__setattr__(self, "scheme", parse_scheme(self.scheme))
        desc = REGISTRY.descriptor(self.protocol, self.field)
        if not desc.trapdoor_capable:
            raise ConfigError(f"{self.protocol}.{self.field} is not a trapdoor field")
        if not scheme_accepts(self.scheme, self.protocol, self.field):
            raise ConfigError(f"scheme {self.scheme} cannot drive {self.protocol}.{self.field}")

    @classmethod
    def parse(cls, text: str) -> "TrapdoorSpec":
        """Parse ``proto:field:scheme``, e.g. ``ipv4:identification:scheme1``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"trapdoor must be proto:field:scheme, got {text!r}")
        return cls(parts[0], parts[1], parts[2])

    def __str__(self) -> str:
        return f"{self.protocol.value}:{self.field}:{self.scheme.value}"

    @property
    def codec(self):
        return codec_for(self.scheme, REGISTRY.descriptor(self.protocol, self.field))


def trapdoors_per_protocol(trapdoors: Iterable[TrapdoorSpec]) -> dict[ProtocolKind, int]:
    return dict(Counter(t.protocol for t in trapdoors))


def trapdoor_slack(config, registry: TrapdoorRegistry = REGISTRY) -> dict[ProtocolKind, int]:
    """Unused trapdoor budget ``T_m - T_s`` for each protocol the channel touches.

    ``config`` may be a HybridChannelConfig or a plain sequence of TrapdoorSpec.
    """
    trapdoors = config.trapdoors if isinstance(config, HybridChannelConfig) else tuple(config)
    slack = {}
    for proto, t_set in trapdoors_per_protocol(trapdoors).items():
        t_max = registry.t_max(proto)
        if t_set >= t_max:
            raise ConstraintError(
                f"{proto}: {t_set} trapdoors set but only {t_max} exist (need T_s < T_m)",
                protocol=proto,
            )
        slack[proto] = t_max - t_set
    return slack


@dataclass(frozen=True)
class HybridChannelConfig:
    trapdoors: tuple[TrapdoorSpec, ...]
    label: str = ""

    def __post_init__(self):
        tds = tuple(TrapdoorSpec.parse(t) if isinstance(t, str) else t for t in self.trapdoors)
        object.__setattr__(self, "trapdoors", tds)
        if not tds:
            raise ConfigError("a channel needs at least one trapdoor")
        seen = set()
        for t in tds:
            if (t.protocol, t.field) in seen:
                raise ConfigError(f"{t.protocol}.{t.field} is used by two trapdoors")
            seen.add((t.protocol, t.field))
        trapdoor_slack(tds)

    @classmethod
    def of(cls, *specs, label: str = "") -> "HybridChannelConfig":
        return cls(tuple(specs), label)

    @property
    def protocols(self) -> tuple[ProtocolKind, ...]:
        return tuple(dict.fromkeys(t.protocol for t in self.trapdoors))


def _shares(n_bytes: int, n_trapdoors: int) -> list[list[int]]:
    return [list(range(i, n_bytes, n_trapdoors)) for i in range(n_trapdoors)]


def _carrier_positions(trace: Sequence[PacketRecord], proto: ProtocolKind) -> list[int]:
    return [i for i, p in enumerate(trace) if p.proto is proto]


def channel_capacity_bytes(trace: Sequence[PacketRecord], config: HybridChannelConfig) -> int:
    """Largest payload length ``embed_hybrid`` can place in ``trace``."""
    n = len(config.trapdoors)
    caps = []
    for i, t in enumerate(config.trapdoors):
        share = t.codec.max_bytes(len(_carrier_positions(trace, t.protocol)))
        # trapdoor i receives ceil((b - i) / n) bytes of a b-byte payload
        caps.append(i + n * share)
    return min(caps)


def _plan(trace, config, n_bytes):
    plan = []
    for t, idx in zip(config.trapdoors, _shares(n_bytes, len(config.trapdoors))):
        positions = _carrier_positions(trace, t.protocol)
        need = t.codec.packets_needed(len(idx))
        if need > len(positions):
            raise CapacityError(
                f"trapdoor {t} needs {need} {t.protocol} packets, trace has {len(positions)}",
                trapdoor=t,
            )
        plan.append((t, idx, positions))
    return plan


def embed_hybrid(trace: Sequence[PacketRecord], config: HybridChannelConfig,
                 payload: bytes) -> list[PacketRecord]:
    payload = bytes(payload)
    out = list(trace)
    for t, idx, positions in _plan(trace, config, len(payload)):
        if not idx:
            continue
        share = bytes(payload[j] for j in idx)
        values = [out[p][t.field] for p in positions]
        new_values = t.codec.embed(share, values)
        for p, old, new in zip(positions, values, new_values):
            if new != old:
                out[p] = out[p].with_fields(**{t.field: new})
    return out


def extract_hybrid(trace: Sequence[PacketRecord], config: HybridChannelConfig,
                   n_bytes: int) -> bytes:
    result = bytearray(n_bytes)
    for t, idx, positions in _plan(trace, config, n_bytes):
        if not idx:
            continue
        values = [trace[p][t.field] for p in positions]
        for j, c in zip(idx, t.codec.extract(values, len(idx))):
            result[j] = c
    return bytes(result)


def consumed_positions(trace: Sequence[PacketRecord], config: HybridChannelConfig,
                       n_bytes: int) -> set[int]:
    """Trace positions that carry at least part of an ``n_bytes`` payload."""
    used = set()
    for t, idx, positions in _plan(trace, config, n_bytes):
        used.update(positions[:t.codec.packets_needed(len(idx))])
    return used


# --- Scenarios ---------------------------------------------------------------

class ScenarioKind(enum.Enum):
    NOISY = "noisy"
    NOISELESS = "noiseless"


@dataclass(frozen=True)
class ScenarioConfig:
    kind: ScenarioKind
    n_packets: int
    overt_fraction: float = 0.0
    hop_period: int = 0
    seed: int = 0

    def __post_init__(self):
        kind = ScenarioKind(self.kind) if not isinstance(self.kind, ScenarioKind) else self.kind
        object.__setattr__(self, "kind", kind)
        if self.n_packets < 1:
            raise ConfigError("n_packets must be positive")
        if kind is ScenarioKind.NOISY:
            if not 0.0 < self.overt_fraction <= 1.0:
                raise ConfigError("a noisy scenario needs overt_fraction in (0, 1]")
        else:
            if self.overt_fraction != 0:
                raise ConfigError("a noiseless scenario has no overt traffic")
            if self.hop_period < 1:
                raise ConfigError("hop_period must be at least 1")


def scenario_noisy(cfg: ScenarioConfig, channel: HybridChannelConfig,
                   payload: bytes) -> list[PacketRecord]:
    """Covert packets mixed into legitimate traffic, labeled with covert_marker."""
    from .traces import generate_packets

    if cfg.kind is not ScenarioKind.NOISY:
        raise ConfigError("scenario_noisy needs a noisy ScenarioConfig")
    rng = np.random.default_rng(cfg.seed)
    protos = channel.protocols
    layout = [protos[i % len(protos)] for i in range(cfg.n_packets)]
    trace = generate_packets(layout, rng)

    n_covert = cfg.n_packets - int(round(cfg.overt_fraction * cfg.n_packets))
    covert_slots = sorted(rng.choice(cfg.n_packets, size=n_covert, replace=False).tolist())
    carrier = [trace[i] for i in covert_slots]
    if len(payload) > channel_capacity_bytes(carrier, channel):
        raise CapacityError(
            f"payload of {len(payload)} bytes exceeds the {n_covert} covert slots"
        )
    embedded = embed_hybrid(carrier, channel, payload)
    used = consumed_positions(carrier, channel, len(payload))

    out = [p.with_marker(False) for p in trace]
    for k, slot in enumerate(covert_slots):
        if k in used:
            out[slot] = embedded[k].with_marker(True)
    logger.debug("noisy scenario: %d packets, %d covert", len(out), len(used))
    return out


def marked_subtrace(trace: Sequence[PacketRecord]) -> list[PacketRecord]:
    return [p for p in trace if p.covert_marker]


def _hop_segments(n_packets: int, hop_period: int):
    return [range(s, min(s + hop_period, n_packets)) for s in range(0, n_packets, hop_period)]


def _hop_allocation(trace, cfg, channels, n_bytes):
    remaining = n_bytes
    alloc = []
    for h, seg in enumerate(_hop_segments(len(trace), cfg.hop_period)):
        channel = channels[h % len(channels)]
        sub = [trace[i] for i in seg]
        take = min(remaining, channel_capacity_bytes(sub, channel))
        alloc.append((seg, channel, take))
        remaining -= take
    if remaining:
        raise CapacityError(f"hopped channel is {remaining} bytes short of the payload")
    return alloc


def scenario_noiseless(cfg: ScenarioConfig, channels: Sequence[HybridChannelConfig],
                       payload: bytes) -> list[PacketRecord]:
    """Covert-only trace whose active channel rotates every ``hop_period`` packets."""
    from .traces import generate_packets

    if cfg.kind is not ScenarioKind.NOISELESS:
        raise ConfigError("scenario_noiseless needs a noiseless ScenarioConfig")
    if not channels:
        raise ConfigError("at least one channel is required")
    rng = np.random.default_rng(cfg.seed)
    layout = []
    for h, seg in enumerate(_hop_segments(cfg.n_packets, cfg.hop_period)):
        protos = channels[h % len(channels)].protocols
        layout.extend(protos[k % len(protos)] for k in range(len(seg)))
    trace = generate_packets(layout, rng)

    payload = bytes(payload)
    out = list(trace)
    pos = 0
    for seg, channel, take in _hop_allocation(trace, cfg, channels, len(payload)):
        sub = embed_hybrid([trace[i] for i in seg], channel, payload[pos:pos + take])
        for i, rec in zip(seg, sub):
            out[i] = rec
        pos += take
    return [p.with_marker(True) for p in out]


def extract_noiseless(trace: Sequence[PacketRecord], cfg: ScenarioConfig,
                      channels: Sequence[HybridChannelConfig], n_bytes: int) -> bytes:
    result = bytearray()
    for seg, channel, take in _hop_allocation(trace, cfg, channels, n_bytes):
        result += extract_hybrid([trace[i] for i in seg], channel, take)
    return bytes(result)
