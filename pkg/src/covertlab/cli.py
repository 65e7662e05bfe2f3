"""Command-line entry point: ``covertlab <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 capacity or constraint error,
3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .detector import (DEFAULT_FLAG_THRESHOLD, DEFAULT_MARGIN, DEFAULT_WINDOW, BaselineProfile,
                       FieldMonitor, build_baseline, default_monitors, detect, field_entropy_series,
                       field_symbols)
from .errors import CapacityError, ConfigError, TraceFormatError, TrainingError
from .hybrid import (HybridChannelConfig, ScenarioConfig, ScenarioKind, TrapdoorSpec, embed_hybrid,
                     extract_hybrid, extract_noiseless, marked_subtrace, scenario_noiseless,
                     scenario_noisy)
from .metrics import entropy_report
from .tables import reproduce_tables
from .traces import gen_legit_trace, read_trace, write_trace

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CAPACITY = 2
EXIT_IO = 3

log = logging.getLogger("covertlab")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_payload(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--payload", help="payload text (UTF-8)")
    g.add_argument("--payload-hex", help="payload as hex digits")


def _payload(args) -> bytes:
    if args.payload_hex is not None:
        try:
            return bytes.fromhex(args.payload_hex)
        except ValueError as exc:
            raise UsageError(f"--payload-hex: {exc}") from None
    if args.payload is not None:
        return args.payload.encode("utf-8")
    return b""


def _channel(specs, label="") -> HybridChannelConfig:
    return HybridChannelConfig(tuple(TrapdoorSpec.parse(s) for s in specs), label)


def _channels(args) -> list[HybridChannelConfig]:
    if args.channel:
        return [_channel(c.split(","), label=f"hop{i}") for i, c in enumerate(args.channel)]
    if args.trapdoor:
        return [_channel(args.trapdoor)]
    raise UsageError("give --trapdoor or --channel")


def cmd_gen(args):
    trace = gen_legit_trace(args.packets, args.mix.split(","), args.seed)
    write_trace(trace, args.out)
    log.info("wrote %d packets to %s", len(trace), args.out)


def cmd_embed(args):
    trace = read_trace(args.in_)
    payload = _payload(args)
    out = embed_hybrid(trace, _channel(args.trapdoor), payload)
    write_trace(out, args.out)
    log.info("embedded %d bytes into %s", len(payload), args.out)


def cmd_extract(args):
    trace = read_trace(args.in_)
    if args.marked_only:
        trace = marked_subtrace(trace)
    if args.hop_period:
        cfg = ScenarioConfig(ScenarioKind.NOISELESS, len(trace), hop_period=args.hop_period)
        data = extract_noiseless(trace, cfg, _channels(args), args.bytes)
    else:
        if args.channel:
            raise UsageError("--channel needs --hop-period")
        data = extract_hybrid(trace, _channel(args.trapdoor or []), args.bytes)
    print(data.hex() if args.hex else data.decode("utf-8", errors="backslashreplace"))


def cmd_scenario(args):
    payload = _payload(args)
    if args.kind == "noisy":
        if args.channel:
            raise UsageError("a noisy scenario takes --trapdoor, not --channel")
        frac = 0.5 if args.overt_fraction is None else args.overt_fraction
        cfg = ScenarioConfig(ScenarioKind.NOISY, args.packets, overt_fraction=frac, seed=args.seed)
        trace = scenario_noisy(cfg, _channel(args.trapdoor or []), payload)
    else:
        if args.overt_fraction:
            raise UsageError("a noiseless scenario has no --overt-fraction")
        cfg = ScenarioConfig(ScenarioKind.NOISELESS, args.packets,
                             hop_period=args.hop_period or args.packets, seed=args.seed)
        trace = scenario_noiseless(cfg, _channels(args), payload)
    write_trace(trace, args.out)
    log.info("wrote %s scenario with %d packets to %s", args.kind, len(trace), args.out)


def _monitors(args, trace):
    if args.field:
        return [FieldMonitor.parse(f) for f in args.field]
    present = {p.proto for p in trace}
    return [m for m in default_monitors() if m.proto in present]


def cmd_metrics(args):
    trace = read_trace(args.in_)
    for m in _monitors(args, trace):
        symbols = field_symbols(trace, m)
        if not symbols:
            print(f"{m}: no packets")
            continue
        rep = entropy_report(symbols)
        print(f"{m}: H={rep.entropy_bits:.4f} bits/symbol symbols={rep.symbol_count} "
              f"distinct={rep.distinct_symbols} code_bits={rep.total_code_bits}")
        if len(symbols) >= args.window:
            series = field_entropy_series(trace, m.proto, m.field, m.symbolizer, args.window)
            print("  windows: " + " ".join(f"{e:.4f}" for e in series))


def cmd_baseline(args):
    traces = [read_trace(p) for p in args.in_]
    monitors = [FieldMonitor.parse(f) for f in args.field] if args.field else None
    profile = build_baseline(traces, args.window, monitors)
    profile.save(args.out)
    log.info("baseline over %d fields written to %s", len(profile.bands), args.out)


def cmd_detect(args):
    trace = read_trace(args.in_)
    profile = BaselineProfile.load(args.profile)
    report = detect(trace, profile, args.margin, args.flag_threshold)
    for f in report.fields:
        band = profile.bands[f.monitor]
        state = "FLAGGED" if f.flagged else "ok"
        print(f"{f.monitor} band=[{band.min:.4f}, {band.max:.4f}] windows={len(f.entropies)} "
              f"flagged={list(f.flagged_windows)} {state}")
    print(f"verdict: {report.verdict.value}")


def cmd_tables(args):
    sys.stdout.write(reproduce_tables().render())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="covertlab", description="Hybrid covert channel simulator and analyzer")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate legitimate traffic")
    p.add_argument("--packets", type=int, required=True)
    p.add_argument("--mix", default="ipv4,tcp", help="comma-separated protocols")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("embed", help="embed a payload into a trace")
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trapdoor", action="append", required=True, metavar="PROTO:FIELD:SCHEME")
    _add_payload(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover a payload from a trace")
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--trapdoor", action="append", metavar="PROTO:FIELD:SCHEME")
    p.add_argument("--channel", action="append", help="comma-separated trapdoors, one hop channel")
    p.add_argument("--hop-period", type=int, help="noiseless scenario hop period")
    p.add_argument("--marked-only", action="store_true", help="use only covert=1 packets")
    p.add_argument("--bytes", type=int, required=True)
    p.add_argument("--hex", action="store_true", help="print the payload as hex")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("scenario", help="generate a noisy or noiseless attack trace")
    p.add_argument("--kind", choices=["noisy", "noiseless"], required=True)
    p.add_argument("--packets", type=int, required=True)
    p.add_argument("--overt-fraction", type=float)
    p.add_argument("--hop-period", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trapdoor", action="append", metavar="PROTO:FIELD:SCHEME")
    p.add_argument("--channel", action="append", help="comma-separated trapdoors, one hop channel")
    p.add_argument("--out", required=True)
    _add_payload(p, required=False)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("metrics", help="per-field entropy report")
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--field", action="append", metavar="PROTO:FIELD:SYMBOLIZER")
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("baseline", help="learn an entropy baseline")
    p.add_argument("--in", dest="in_", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--field", action="append", metavar="PROTO:FIELD:SYMBOLIZER")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("detect", help="check a trace against a baseline")
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN)
    p.add_argument("--flag-threshold", type=int, default=DEFAULT_FLAG_THRESHOLD)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("tables", help="reproduce the multi-trapdoor tables")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (CapacityError, ConfigError, TrainingError) as exc:
        print(f"covertlab: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (TraceFormatError, OSError) as exc:
        print(f"covertlab: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError, KeyError) as exc:
        print(f"covertlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
