"""Entropy, covertness and C/E numbers for a short message."""
from covertlab.metrics import (ce_ratio, channel_capacity, classify, covertness_ncc,
                               covertness_subliminal, min_code_bits, robustness, shannon_entropy)
from covertlab.tables import TABLE_CAPACITY

msg = "network"
h = shannon_entropy(msg)
print(f"H({msg!r}) = {h:.4f} bits/symbol, needs {min_code_bits(msg)} bits")

# one of four IPv4 trapdoors in use
eta = covertness_ncc(1, 4)
print("eta =", eta, classify(eta).value)

# subliminal variant: 5 of 16 cipher rounds seeded, one of two trapdoors
print("subliminal eta =", covertness_subliminal(5, 16, 1, 2))

# literal capacity for a 16-bit field carrying a 21-bit message
print(f"capacity formula = {channel_capacity(16, 21):.4f} (tables use {TABLE_CAPACITY})")

for t in (1, 2, 3):
    print(f"t={t}  C/E = {ce_ratio(TABLE_CAPACITY, t, h):.3f}")

print(robustness(eta, TABLE_CAPACITY, 1, h))
