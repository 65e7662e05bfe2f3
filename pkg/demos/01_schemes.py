"""Hiding single bytes in IP ID, TCP sequence and TCP timestamp fields."""
import numpy as np

from covertlab.schemes import (scheme1_decode, scheme1_encode, scheme2_decode, scheme2_encode,
                               scheme3_decode_stream, scheme3_encode_stream)

rng = np.random.default_rng(0)

# IP ID: the low byte carries c + 1, the high byte is free cover
ip_id = scheme1_encode(ord("M"), 104)
print("IP ID", ip_id, "->", chr(scheme1_decode(ip_id)))

# any multiple of 256 decodes to 255 because of the +1 shift
print("decode(0) =", scheme1_decode(0))

# TCP sequence: the byte sits in the top 8 bits, the low 24 bits look random
seq = scheme2_encode(ord("I"), int(rng.integers(0, 2**24)))
print("seq", seq, "->", chr(scheme2_decode(seq)))

# TCP timestamps: one bit per packet in the LSB, stream stays ascending
base = np.cumsum(rng.integers(3, 40, size=24)).tolist()
stamped = scheme3_encode_stream(b"ok!", base)
print("bumped", sum(a != b for a, b in zip(base, stamped)), "of", len(base), "timestamps")
print("timestamps ->", scheme3_decode_stream(stamped, 3))
