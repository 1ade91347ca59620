"""
Escaping zeroland and spotting linearity
========================================

Two quick diagnostics.  Starting from a state with a single bit set, how long
does it take before outputs look like they have half their bits set?  And
can a matrix-rank test see that the low bit of a raw xorshift generator is
an LFSR?
"""

# %%
# Escape curves
# -------------
from xorshiftstar import SHIPPED, Engine, XorshiftParams, seed_schedule
from xorshiftstar.metrics import (
    escape_zeroland, format_escape_table, high_bits_stream, output_bit_stream, rank_probe,
)

rows = [(name, escape_zeroland(params)) for name, params in SHIPPED.items()]
print(format_escape_table(rows))
for name, curve in rows:
    print(name, "first windows:", [round(float(r), 3) for r in curve.ratios[:5]])

# %%
# Rank probe
# ----------
raw = XorshiftParams.single("A0", 13, 7, 17)
need = 64 * 64 * 1000
seeds = seed_schedule(64, 5)
print("raw low bit:", [f"{rank_probe(output_bit_stream(Engine(raw, s), need)):.1e}"
                       for s in seeds])
seeds = seed_schedule(1024, 5)
print("xorshift1024* high bits:",
      [f"{rank_probe(high_bits_stream(Engine(SHIPPED['x1024star'], s), need)):.3f}"
       for s in seeds])
