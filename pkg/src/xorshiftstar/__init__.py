"""Xorshift / xorshift* generators and their GF(2) toolkit."""

from .engines import (
    M2, M8, M32, MULTIPLIERS, SHIPPED, X64_STAR, X1024_STAR, X4096_STAR,
    Engine, EngineState, OutputMode, Variant, XorshiftParams,
    emit, next64, next_highdim, next_scrambled, seed_schedule,
)
from .gf2 import (
    BitMatrix, GF2Poly, min_poly, poly_mulmod, poly_powmod, transform_of, weight,
)

__version__ = "0.1.0"
