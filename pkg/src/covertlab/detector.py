"""Windowed field-entropy detector.

A baseline records the min / mean / max entropy of each monitored header
field over non-overlapping windows of legitimate traffic. A window under
test is flagged when its entropy leaves that band by more than ``margin``
bits, and a trace is Suspicious once one field collects ``flag_threshold``
flagged windows.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import ConfigError, TraceFormatError, TrainingError
from .headers import REGISTRY, PacketRecord, ProtocolKind, parse_protocol
from .metrics import shannon_entropy

DEFAULT_WINDOW = 256
DEFAULT_MARGIN = 0.25
DEFAULT_FLAG_THRESHOLD = 2
MIN_WINDOW = 16
MIN_TRAINING_WINDOWS = 10


class Symbolizer(enum.Enum):
    LOW_BYTE = "LowByte"
    HIGH_BYTE = "HighByte"
    LSB = "Lsb"

    def apply(self, value: int, bit_width: int = 32) -> int:
        if self is Symbolizer.LOW_BYTE:
            return value & 0xFF
        if self is Symbolizer.HIGH_BYTE:
            return value >> max(0, bit_width - 8)
        return value & 1


class FieldMonitor(NamedTuple):
    proto: ProtocolKind
    field: str
    symbolizer: Symbolizer

    @classmethod
    def parse(cls, text: str) -> "FieldMonitor":
        """``proto:field:symbolizer``, e.g. ``ipv4:identification:LowByte``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"field monitor must be proto:field:symbolizer, got {text!r}")
        proto = parse_protocol(parts[0])
        REGISTRY.descriptor(proto, parts[1])
        sym = {s.value.lower(): s for s in Symbolizer}.get(parts[2].lower())
        if sym is None:
            raise ValueError(f"unknown symbolizer {parts[2]!r}")
        return cls(proto, parts[1], sym)

    def __str__(self) -> str:
        return f"{self.proto.value}:{self.field}:{self.symbolizer.value}"


# One symbolizer per trapdoor field, mirroring the scheme that would target it:
# IP ID residues live in the low byte ((v-1) mod 256 has the same entropy),
# sequence buckets in the high byte, timestamp bits in the LSB.
_HIGH = {(ProtocolKind.TCP, "sequence_number"), (ProtocolKind.TCP, "ack_number")}
_LSB = {(ProtocolKind.TCP, "options_timestamp")}


def default_monitors(protocols: Iterable[ProtocolKind] | None = None) -> list[FieldMonitor]:
    protocols = REGISTRY.protocols if protocols is None else protocols
    out = []
    for proto in protocols:
        for desc in REGISTRY.trapdoors(proto):
            key = (proto, desc.name)
            sym = Symbolizer.HIGH_BYTE if key in _HIGH else Symbolizer.LSB if key in _LSB else Symbolizer.LOW_BYTE
            out.append(FieldMonitor(proto, desc.name, sym))
    return out


def field_symbols(trace: Sequence[PacketRecord], monitor: FieldMonitor) -> list[int]:
    width = REGISTRY.descriptor(monitor.proto, monitor.field).bit_width
    return [monitor.symbolizer.apply(p.fields[monitor.field], width)
            for p in trace if p.proto is monitor.proto]


def _windowed(symbols: list[int], window_size: int) -> list[float]:
    n = len(symbols) // window_size
    return [shannon_entropy(symbols[i * window_size:(i + 1) * window_size]) for i in range(n)]


def field_entropy_series(trace: Sequence[PacketRecord], proto, field: str,
                         symbolizer: Symbolizer | str = Symbolizer.LOW_BYTE,
                         window_size: int = DEFAULT_WINDOW) -> list[float]:
    """Entropy of each full, non-overlapping window of one field's symbols."""
    monitor = FieldMonitor(parse_protocol(proto), field, Symbolizer(symbolizer))
    REGISTRY.descriptor(monitor.proto, field)
    if window_size < 1:
        raise ValueError("window_size must be positive")
    symbols = field_symbols(trace, monitor)
    if len(symbols) < window_size:
        raise ValueError(
            f"{len(symbols)} {monitor.proto} packets is less than one window of {window_size}"
        )
    return _windowed(symbols, window_size)


@dataclass(frozen=True)
class Band:
    min: float
    mean: float
    max: float


@dataclass(frozen=True)
class BaselineProfile:
    bands: dict  # FieldMonitor -> Band
    window_size: int

    def __post_init__(self):
        if self.window_size < MIN_WINDOW:
            raise ValueError(f"window_size must be at least {MIN_WINDOW}")
        for m, b in self.bands.items():
            if not b.min <= b.mean <= b.max:
                raise ValueError(f"{m}: band is not ordered min <= mean <= max")

    @property
    def monitors(self) -> list[FieldMonitor]:
        return list(self.bands)

    def render(self) -> str:
        # min rounds down and max rounds up so the written band still covers
        # every training window.
        lines = []
        for m, b in self.bands.items():
            lo = math.floor(b.min * 1e6) / 1e6
            hi = math.ceil(b.max * 1e6) / 1e6
            mean = min(max(b.mean, lo), hi)
            lines.append(
                f"{m.proto.value} {m.field} {m.symbolizer.value} "
                f"{lo:.6f} {mean:.6f} {hi:.6f} {self.window_size}"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "BaselineProfile":
        bands = {}
        window = None
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 7:
                raise TraceFormatError("expected 'proto field symbolizer min mean max window_size'", lineno)
            try:
                monitor = FieldMonitor(ProtocolKind(parts[0]), parts[1], Symbolizer(parts[2]))
                REGISTRY.descriptor(monitor.proto, monitor.field)
                lo, mean, hi = (float(x) for x in parts[3:6])
                w = int(parts[6])
            except (ValueError, KeyError) as exc:
                raise TraceFormatError(f"bad profile line: {exc}", lineno) from None
            if window is not None and w != window:
                raise TraceFormatError("profile mixes window sizes", lineno)
            window = w
            bands[monitor] = Band(lo, mean, hi)
        if window is None:
            raise TraceFormatError("empty profile", 1)
        return cls(bands, window)

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.render())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "BaselineProfile":
        with open(path, encoding="ascii") as fh:
            return cls.parse(fh.read())


def build_baseline(legit_traces: Sequence[Sequence[PacketRecord]],
                   window_size: int = DEFAULT_WINDOW,
                   monitors: Iterable[FieldMonitor] | None = None) -> BaselineProfile:
    """Learn per-field entropy bands from legitimate traces.

    With ``monitors=None`` every trapdoor field of every protocol present in
    the traces is monitored. Each trace is windowed separately.
    """
    if window_size < MIN_WINDOW:
        raise ValueError(f"window_size must be at least {MIN_WINDOW}")
    if monitors is None:
        present = {p.proto for t in legit_traces for p in t}
        monitors = [m for m in default_monitors() if m.proto in present]
    monitors = list(monitors)
    if not monitors:
        raise TrainingError("no monitored fields")

    bands = {}
    for m in monitors:
        series = []
        for trace in legit_traces:
            series.extend(_windowed(field_symbols(trace, m), window_size))
        if len(series) < MIN_TRAINING_WINDOWS:
            raise TrainingError(
                f"{m}: {len(series)} training windows, need {MIN_TRAINING_WINDOWS}"
            )
        lo, hi = min(series), max(series)
        mean = min(max(sum(series) / len(series), lo), hi)
        bands[m] = Band(lo, mean, hi)
    return BaselineProfile(bands, window_size)


class Verdict(enum.Enum):
    CLEAN = "Clean"
    SUSPICIOUS = "Suspicious"


@dataclass(frozen=True)
class FieldVerdict:
    monitor: FieldMonitor
    entropies: tuple[float, ...]
    deviations: tuple[float, ...]  # signed distance outside the band, 0 inside
    flagged_windows: tuple[int, ...]
    flagged: bool


@dataclass(frozen=True)
class DetectionReport:
    fields: tuple[FieldVerdict, ...]
    verdict: Verdict
    flagged_windows: tuple[tuple[FieldMonitor, int], ...]

    @property
    def flagged_fields(self) -> list[FieldMonitor]:
        return [f.monitor for f in self.fields if f.flagged]


def detect(trace: Sequence[PacketRecord], profile: BaselineProfile,
           margin: float = DEFAULT_MARGIN,
           flag_threshold: int = DEFAULT_FLAG_THRESHOLD) -> DetectionReport:
    if margin < 0:
        raise ValueError("margin must be non-negative")
    if flag_threshold < 1:
        raise ValueError("flag_threshold must be at least 1")
    present = {p.proto for p in trace}
    verdicts = []
    flagged_all = []
    for m, band in profile.bands.items():
        if m.proto not in present:
            raise ConfigError(f"profile monitors {m} but the trace has no {m.proto} packets")
        series = field_entropy_series(trace, m.proto, m.field, m.symbolizer, profile.window_size)
        devs = []
        hits = []
        for i, e in enumerate(series):
            devs.append(e - band.min if e < band.min else e - band.max if e > band.max else 0.0)
            if e < band.min - margin or e > band.max + margin:
                hits.append(i)
        verdicts.append(FieldVerdict(m, tuple(series), tuple(devs), tuple(hits),
                                     len(hits) >= flag_threshold))
        flagged_all.extend((m, i) for i in hits)
    suspicious = any(v.flagged for v in verdicts)
    return DetectionReport(
        tuple(verdicts),
        Verdict.SUSPICIOUS if suspicious else Verdict.CLEAN,
        tuple(flagged_all),
    )
