"""
Non-overlapping streams with jump masks
=======================================

Jumping ``j`` steps ahead amounts to evaluating ``x**j mod P(x)`` at the
transition matrix.  The coefficients are stored as a mask of 64-bit words;
applying it costs one pass over the state per coefficient.
"""

# %%
# Compute the standard 1024-bit mask
# ----------------------------------
from xorshiftstar import X1024_STAR, Engine, EngineState
from xorshiftstar.engines import next_linear
from xorshiftstar.jump import apply_jump, jump_mask, standard_jump

mask = standard_jump(X1024_STAR)
print(mask.dumps().splitlines()[:3], "...")

# %%
# Hand out streams
# ----------------
# Each worker starts 2^512 steps after the previous one.
state = EngineState.from_int(42, X1024_STAR.t)
streams = []
for _ in range(4):
    streams.append(Engine(X1024_STAR, state))
    apply_jump(state, mask, X1024_STAR)
for i, eng in enumerate(streams):
    print(f"stream {i}: first output 0x{eng.next():016x}")

# %%
# Sanity check against plain iteration
# ------------------------------------
small = jump_mask(X1024_STAR, 1000)
a = EngineState.from_int(42, 16)
b = a.copy()
for _ in range(1000):
    next_linear(b, X1024_STAR)
print("jump(1000) == 1000 steps:", apply_jump(a, small, X1024_STAR) == b)
