"""
Which shift triples give a full period?
=======================================

A three-shift xorshift engine is a linear map on the state bits.  Its period
is maximal exactly when the characteristic polynomial of that map is
primitive.  This walk-through certifies a few triples, then checks the
verdicts by brute force on a 16-bit version of the same engine.
"""

# %%
# Certify a 64-bit triple
# -----------------------
# ``certify`` recovers the characteristic polynomial from the output stream
# (Berlekamp-Massey) and tests primitivity against the factors of 2^64 - 1.
from xorshiftstar import XorshiftParams
from xorshiftstar.period import brute_force_period, certify, enumerate_64

for triple in [(13, 7, 17), (12, 25, 27), (5, 7, 5)]:
    cert = certify(XorshiftParams.single("A0", *triple))
    print(triple, "full period" if cert.primitive else f"rejected ({cert.reason})",
          "weight", cert.weight)

# %%
# All eight variants share the polynomial
# ---------------------------------------
from xorshiftstar.period import characteristic_poly

polys = {characteristic_poly(XorshiftParams.single(v, 11, 31, 18))
         for v in ("A0", "A1", "A2", "A3", "A4", "A5", "A6", "A7")}
print("distinct polynomials over A0..A7:", len(polys))

# %%
# Scale down and iterate
# ----------------------
# With 16-bit words the whole cycle fits in a fraction of a second, so the
# algebraic verdict can be compared with the actual cycle length.
good = enumerate_64(w=16)
print(f"{len(good)} full-period triples at w=16")
a, b, c, _ = good[0]
print((a, b, c), "period", brute_force_period(XorshiftParams.single("A0", a, b, c, w=16)))
print((1, 1, 1), "period", brute_force_period(XorshiftParams.single("A0", 1, 1, 1, w=16)))
