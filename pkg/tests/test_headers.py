import pytest
from hypothesis import given, settings, strategies as st

from covertlab.errors import FixtureOnlyProtocolError, UnknownFieldError
from covertlab.headers import (REGISTRY, PacketRecord, ProtocolKind, field_bits, parse_protocol,
                               trapdoor_capacity, validate_packet, validate_trace)
from covertlab.traces import gen_legit_trace


@pytest.mark.parametrize("proto,expected", [
    (ProtocolKind.IPV4, 4),
    (ProtocolKind.TCP, 7),
    (ProtocolKind.ESP, 2),
])
def test_trapdoor_capacity(proto, expected):
    assert trapdoor_capacity(proto) == expected
    assert trapdoor_capacity(proto) == trapdoor_capacity(proto)


def test_tls_is_fixture_only():
    with pytest.raises(FixtureOnlyProtocolError, match="fixture-only"):
        trapdoor_capacity(ProtocolKind.TLS)


@pytest.mark.parametrize("proto", [ProtocolKind.IPV4, ProtocolKind.TCP, ProtocolKind.ESP])
def test_capacity_counts_capable_fields(proto):
    capable = [d for d in REGISTRY.layout(proto) if d.trapdoor_capable]
    assert trapdoor_capacity(proto) == len(capable)
    names = REGISTRY.field_names(proto)
    assert len(names) == len(set(names))


@pytest.mark.parametrize("proto,name,bits", [
    ("ipv4", "identification", 16),
    ("tcp", "sequence_number", 32),
    ("esp", "sequence_number", 32),
])
def test_field_bits(proto, name, bits):
    assert field_bits(proto, name) == bits


def test_field_bits_total_and_nonzero():
    for proto in REGISTRY.protocols:
        for d in REGISTRY.layout(proto):
            assert 1 <= field_bits(proto, d.name) <= 32


def test_unknown_field():
    with pytest.raises(UnknownFieldError):
        field_bits(ProtocolKind.IPV4, "sequence_number")


def test_parse_protocol_aliases():
    assert parse_protocol("IPSecESP") is ProtocolKind.ESP
    assert parse_protocol("esp") is ProtocolKind.ESP
    with pytest.raises(ValueError):
        parse_protocol("udp")


def _ipv4(**overrides):
    fields = gen_legit_trace(1, ["ipv4"], seed=0)[0].fields
    fields = {**fields, **overrides}
    return PacketRecord(0, ProtocolKind.IPV4, fields)


def test_validate_ok():
    assert validate_packet(_ipv4(identification=26702)).ok


def test_validate_too_wide():
    result = validate_packet(_ipv4(identification=70000))
    assert not result.ok
    assert result.violations == ("identification exceeds 16 bits",)


def test_validate_missing_field():
    tcp = gen_legit_trace(1, ["tcp"], seed=0)[0]
    fields = dict(tcp.fields)
    del fields["sequence_number"]
    result = validate_packet(PacketRecord(0, ProtocolKind.TCP, fields))
    assert result.violations == ("missing field sequence_number",)


def test_validate_unknown_and_negative():
    result = validate_packet(_ipv4(bogus=1, ttl=-1))
    assert "unknown field bogus" in result.violations
    assert "ttl is negative" in result.violations


def test_validate_trace_index_order():
    trace = gen_legit_trace(3, ["ipv4"], seed=0)
    assert validate_trace(trace).ok
    swapped = [trace[1], trace[0], trace[2]]
    assert not validate_trace(swapped).ok


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 300))
def test_generator_output_always_valid(seed, n):
    trace = gen_legit_trace(n, ["ipv4", "tcp", "esp"], seed=seed)
    assert validate_trace(trace).ok
