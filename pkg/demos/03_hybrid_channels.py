"""A payload spread over several trapdoors, then the two attack scenarios."""
from covertlab.hybrid import (HybridChannelConfig, ScenarioConfig, ScenarioKind, TrapdoorSpec,
                              channel_capacity_bytes, embed_hybrid, extract_hybrid,
                              extract_noiseless, marked_subtrace, scenario_noiseless,
                              scenario_noisy, trapdoor_slack)
from covertlab.traces import gen_legit_trace

ipid = TrapdoorSpec.parse("ipv4:identification:scheme1")
seq = TrapdoorSpec.parse("tcp:sequence_number:scheme2")
ts = TrapdoorSpec.parse("tcp:options_timestamp:scheme3")
pad = TrapdoorSpec.parse("esp:padding:esp")

cfg = HybridChannelConfig.of(ipid, seq, ts, pad)
print("slack per protocol:", {p.value: d for p, d in trapdoor_slack(cfg).items()})

trace = gen_legit_trace(600, ["ipv4", "tcp", "esp"], seed=1)
print("capacity:", channel_capacity_bytes(trace, cfg), "bytes")

secret = b"meet at the old mill"
covert = embed_hybrid(trace, cfg, secret)
print("recovered:", extract_hybrid(covert, cfg, len(secret)))

# noisy: half the packets are ordinary traffic
noisy_cfg = ScenarioConfig(ScenarioKind.NOISY, 500, overt_fraction=0.5, seed=3)
noisy = scenario_noisy(noisy_cfg, HybridChannelConfig.of(ipid, seq), secret)
marked = marked_subtrace(noisy)
print(len(marked), "of", len(noisy), "packets carry covert data")
print("noisy:", extract_hybrid(marked, HybridChannelConfig.of(ipid, seq), len(secret)))

# noiseless: hop between an IPv4 and a TCP channel every 40 packets
hops = [HybridChannelConfig.of(ipid), HybridChannelConfig.of(seq, ts)]
quiet_cfg = ScenarioConfig(ScenarioKind.NOISELESS, 400, hop_period=40, seed=4)
quiet = scenario_noiseless(quiet_cfg, hops, secret)
print("noiseless:", extract_noiseless(quiet, quiet_cfg, hops, len(secret)))
