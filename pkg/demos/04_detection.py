"""Entropy baseline on clean traffic, then scanning covert traces against it."""
from covertlab.detector import build_baseline, detect
from covertlab.hybrid import HybridChannelConfig, TrapdoorSpec, embed_hybrid
from covertlab.traces import gen_legit_trace

text = (b"It was late in the afternoon when the letter finally arrived, folded twice "
        b"and sealed with plain wax. The courier would not say who had sent it, only "
        b"that it had come a long way and that an answer was expected before the end "
        b"of the week. Inside there were three short lines and a drawing of a bridge. ") * 3

train = gen_legit_trace(6000, ["ipv4", "tcp"], seed=10)
profile = build_baseline([train])
band = next(b for m, b in profile.bands.items() if m.field == "identification")
print(f"IP ID low byte entropy band: [{band.min:.3f}, {band.max:.3f}]")

clean = gen_legit_trace(6000, ["ipv4", "tcp"], seed=11)
print("clean:", detect(clean, profile).verdict.value)

# English text has far fewer distinct bytes than a random IP ID
one = embed_hybrid(clean, HybridChannelConfig.of(TrapdoorSpec.parse("ipv4:identification:scheme1")),
                   text)
rep = detect(one, profile)
print("one trapdoor:", rep.verdict.value, [str(m) for m in rep.flagged_fields])

# spreading the text over two fields still shows up, now in both
two_cfg = HybridChannelConfig.of(TrapdoorSpec.parse("ipv4:identification:scheme1"),
                                 TrapdoorSpec.parse("tcp:sequence_number:scheme2"))
rep = detect(embed_hybrid(clean, two_cfg, text), profile)
print("two trapdoors:", rep.verdict.value, [str(m) for m in rep.flagged_fields])
