"""Xorshift engines: 64-bit variants A0-A7, high-dimensional engines, scrambling.

All engines can be scaled down to ``w``-bit words (``w`` < 64) so that
full-period and equidistribution claims can be checked by brute force.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

import numpy as np

from . import _kernels

M32 = 2685821657736338717
M8 = 1181783497276652981
M2 = 8372773778140471301
MULTIPLIERS = {"M32": M32, "M8": M8, "M2": M2}


class Variant(enum.Enum):
    A0 = "A0"
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"
    A6 = "A6"
    A7 = "A7"
    HD = "HD"


# Shift programs of the eight one-word algorithms, as (direction, letter).
# Contiguous same-direction shifts are listed with sorted letters.
PROGRAMS = {
    Variant.A0: (("<<", "a"), (">>", "b"), ("<<", "c")),
    Variant.A1: ((">>", "a"), ("<<", "b"), (">>", "c")),
    Variant.A2: (("<<", "c"), (">>", "b"), ("<<", "a")),
    Variant.A3: ((">>", "c"), ("<<", "b"), (">>", "a")),
    Variant.A4: (("<<", "a"), ("<<", "c"), (">>", "b")),
    Variant.A5: ((">>", "a"), (">>", "c"), ("<<", "b")),
    Variant.A6: ((">>", "b"), ("<<", "a"), ("<<", "c")),
    Variant.A7: (("<<", "b"), (">>", "a"), (">>", "c")),
}

# a and c are adjacent shifts in the same direction, so (a,b,c) ~ (c,b,a)
_EXCHANGEABLE = {Variant.A4, Variant.A5, Variant.A6, Variant.A7}


@dataclass(frozen=True)
class XorshiftParams:
    """Parameters of an xorshift engine.

    ``t`` is the number of ``w``-bit words of state; ``multiplier`` (odd)
    turns the engine into its scrambled ``*`` counterpart.  For variants
    A4-A7 the triple is stored with ``a <= c``; ``reordered`` records that the
    caller's triple was swapped into that form.
    """

    variant: Variant
    a: int
    b: int
    c: int
    t: int = 1
    multiplier: int | None = None
    w: int = 64
    reordered: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.variant, Variant):
            object.__setattr__(self, "variant", Variant(self.variant))
        if not 2 <= self.w <= 64:
            raise ValueError(f"word width {self.w} out of range 2..64")
        for name in ("a", "b", "c"):
            s = getattr(self, name)
            if not 1 <= s < self.w:
                raise ValueError(f"shift {name}={s} out of range 1..{self.w - 1}")
        if self.variant is Variant.HD:
            if self.t < 2:
                raise ValueError("high-dimensional engines need t >= 2 words")
        elif self.t != 1:
            raise ValueError(f"variant {self.variant.value} has one word of state, got t={self.t}")
        if self.multiplier is not None:
            m = self.multiplier
            if not 0 < m < (1 << self.w) or m % 2 == 0:
                raise ValueError(f"multiplier {m} must be odd and below 2^{self.w}")
        if self.variant in _EXCHANGEABLE and self.a > self.c:
            a, c = self.a, self.c
            object.__setattr__(self, "a", c)
            object.__setattr__(self, "c", a)
            object.__setattr__(self, "reordered", True)

    @classmethod
    def single(cls, variant: Variant | str, a: int, b: int, c: int,
               multiplier: int | None = None, w: int = 64) -> XorshiftParams:
        return cls(Variant(variant), a, b, c, 1, multiplier, w)

    @classmethod
    def highdim(cls, a: int, b: int, c: int, t: int,
                multiplier: int | None = None, w: int = 64) -> XorshiftParams:
        return cls(Variant.HD, a, b, c, t, multiplier, w)

    @property
    def n_bits(self) -> int:
        return self.w * self.t

    @property
    def mask(self) -> int:
        return (1 << self.w) - 1

    @property
    def is_highdim(self) -> bool:
        return self.variant is Variant.HD

    @property
    def scrambled(self) -> bool:
        return self.multiplier is not None

    def program(self) -> list[tuple[str, int]]:
        """Concrete shift program of a one-word variant."""
        amounts = {"a": self.a, "b": self.b, "c": self.c}
        return [(d, amounts[letter]) for d, letter in PROGRAMS[self.variant]]

    def unscrambled(self) -> XorshiftParams:
        return replace(self, multiplier=None)

    @property
    def linear_id(self) -> str:
        """Identifier of the underlying linear engine (the multiplier is irrelevant to state)."""
        base = f"{self.variant.value}({self.a},{self.b},{self.c})"
        if self.is_highdim:
            base += f":t={self.t}"
        if self.w != 64:
            base += f":w={self.w}"
        return base

    def __str__(self) -> str:
        if self.multiplier is None:
            return self.linear_id
        names = {v: k for k, v in MULTIPLIERS.items()}
        return f"{self.linear_id}*{names.get(self.multiplier, self.multiplier)}"


X64_STAR = XorshiftParams.single("A1", 12, 25, 27, multiplier=M32)
X1024_STAR = XorshiftParams.highdim(31, 11, 30, 16, multiplier=M8)
X4096_STAR = XorshiftParams.highdim(25, 3, 49, 64, multiplier=M2)
SHIPPED = {"x64star": X64_STAR, "x1024star": X1024_STAR, "x4096star": X4096_STAR}


@dataclass
class EngineState:
    """``t`` words plus the circular index ``p`` of the most recent output."""

    words: list[int]
    p: int = 0

    def __post_init__(self):
        self.words = list(self.words)
        if not self.words:
            raise ValueError("state needs at least one word")
        if not 0 <= self.p < len(self.words):
            raise ValueError(f"index p={self.p} out of range")

    @classmethod
    def seeded(cls, words: Sequence[int], p: int = 0, w: int = 64) -> EngineState:
        """Validated seeding: rejects the all-zero state and oversized words."""
        limit = 1 << w
        if any(not 0 <= x < limit for x in words):
            raise ValueError(f"seed words must fit in {w} bits")
        if not any(words):
            raise ValueError("the all-zero state is a fixed point and cannot seed an engine")
        return cls(list(words), p)

    @classmethod
    def from_int(cls, value: int, t: int, w: int = 64) -> EngineState:
        """Lay a big integer into ``t`` words, least significant word first."""
        if not 0 < value < 1 << (w * t):
            raise ValueError(f"seed must be in 1..2^{w * t}-1")
        mask = (1 << w) - 1
        return cls.seeded([(value >> (w * i)) & mask for i in range(t)], 0, w)

    @property
    def t(self) -> int:
        return len(self.words)

    def to_vector(self, w: int = 64) -> int:
        """State as a bit vector in logical order: word ``j`` is ``words[(p + j) % t]``."""
        t = self.t
        v = 0
        for j in range(t):
            v |= self.words[(self.p + j) % t] << (w * j)
        return v

    @classmethod
    def from_vector(cls, v: int, t: int, w: int = 64, p: int = 0) -> EngineState:
        mask = (1 << w) - 1
        words = [0] * t
        for j in range(t):
            words[(p + j) % t] = (v >> (w * j)) & mask
        return cls(words, p)

    def copy(self) -> EngineState:
        return EngineState(list(self.words), self.p)

    def dumps(self, hex: bool = True) -> str:
        """Text form: one word per line, then ``p``."""
        lines = [f"0x{x:016x}" if hex else str(x) for x in self.words]
        lines.append(str(self.p))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> EngineState:
        values = [int(tok, 0) for tok in text.split()]
        if len(values) < 2:
            raise ValueError("state text needs at least one word and p")
        return cls.seeded(values[:-1], values[-1])


# --- step functions ------------------------------------------------------------

def next64(state: EngineState, params: XorshiftParams) -> int:
    """One step of a one-word engine; returns the new state word."""
    mask = params.mask
    x = state.words[0]
    for direction, s in params.program():
        if direction == "<<":
            x ^= (x << s) & mask
        else:
            x ^= x >> s
    state.words[0] = x
    return x


def next_highdim(state: EngineState, params: XorshiftParams) -> int:
    """One step of a multi-word engine; returns the freshly written word."""
    if params.t < 2:
        raise ValueError("high-dimensional step needs t >= 2")
    s = state.words
    mask = params.mask
    s0 = s[state.p]
    state.p = p = (state.p + 1) % params.t
    s1 = s[p]
    s1 ^= (s1 << params.a) & mask
    s[p] = s1 ^ s0 ^ (s1 >> params.b) ^ (s0 >> params.c)
    return s[p]


def next_linear(state: EngineState, params: XorshiftParams) -> int:
    if params.is_highdim:
        return next_highdim(state, params)
    return next64(state, params)


def next_scrambled(state: EngineState, params: XorshiftParams) -> int:
    """Advance the linear engine and return its output times the multiplier."""
    if params.multiplier is None:
        raise ValueError("scrambled step needs a multiplier")
    return next_linear(state, params) * params.multiplier & params.mask


def next_output(state: EngineState, params: XorshiftParams) -> int:
    x = next_linear(state, params)
    if params.multiplier is not None:
        x = x * params.multiplier & params.mask
    return x


def seed_schedule(n_bits: int, count: int = 100, w: int = 64) -> list[EngineState]:
    """Seeds ``1 + i * floor(2**n / count)`` for ``0 <= i < count``."""
    if n_bits % w:
        raise ValueError(f"state size {n_bits} is not a multiple of {w}")
    t = n_bits // w
    step = (1 << n_bits) // count
    return [EngineState.from_int(1 + i * step, t, w) for i in range(count)]


# --- engines and bulk output ----------------------------------------------------

class Engine:
    """A generator instance: parameters plus mutable state.

    >>> e = Engine(X64_STAR, seed=1)
    >>> hex(e.next())
    '0x47e4ce4b896cdd1d'
    """

    def __init__(self, params: XorshiftParams, seed: int | Sequence[int] | EngineState = 1):
        self.params = params
        if isinstance(seed, EngineState):
            state = seed.copy()
        elif isinstance(seed, int):
            state = EngineState.from_int(seed, params.t, params.w)
        else:
            state = EngineState.seeded(seed, 0, params.w)
        if state.t != params.t:
            raise ValueError(f"state has {state.t} words, parameters need {params.t}")
        self.state = state

    def next(self) -> int:
        return next_output(self.state, self.params)

    def next_linear(self) -> int:
        return next_linear(self.state, self.params)

    __next__ = next

    def __iter__(self) -> Iterator[int]:
        return self

    def copy(self) -> Engine:
        return Engine(self.params, self.state)

    def take(self, count: int) -> list[int]:
        return [self.next() for _ in range(count)]

    def fill(self, count: int) -> np.ndarray:
        """Next ``count`` outputs as a ``uint64`` array."""
        if self.params.w != 64:
            return np.array(self.take(count), dtype=np.uint64)
        out = np.empty(count, dtype=np.uint64)
        params = self.params
        mult = np.uint64(params.multiplier or 1)
        if params.is_highdim:
            s = np.array(self.state.words, dtype=np.uint64)
            p = _kernels.fill_hd(s, self.state.p, np.uint64(params.a), np.uint64(params.b),
                                 np.uint64(params.c), mult, out)
            self.state = EngineState([int(x) for x in s], int(p))
        else:
            lefts, shifts = _program_arrays(params)
            x = _kernels.fill_single(np.uint64(self.state.words[0]), lefts, shifts, mult, out)
            self.state.words[0] = int(x)
        return out

    def checksum(self, count: int) -> int:
        """Wrapping sum of the next ``count`` outputs (compiled path, 64-bit only)."""
        params = self.params
        if params.w != 64:
            return sum(self.take(count)) & params.mask
        mult = np.uint64(params.multiplier or 1)
        if params.is_highdim:
            s = np.array(self.state.words, dtype=np.uint64)
            acc, p = _kernels.checksum_hd(s, self.state.p, np.uint64(params.a),
                                          np.uint64(params.b), np.uint64(params.c), mult, count)
            self.state = EngineState([int(x) for x in s], int(p))
        else:
            lefts, shifts = _program_arrays(params)
            acc, x = _kernels.checksum_single(np.uint64(self.state.words[0]), lefts, shifts,
                                              mult, count)
            self.state.words[0] = int(x)
        return int(acc)


def _program_arrays(params: XorshiftParams) -> tuple[np.ndarray, np.ndarray]:
    prog = params.program()
    lefts = np.array([d == "<<" for d, _ in prog], dtype=np.bool_)
    shifts = np.array([s for _, s in prog], dtype=np.uint64)
    return lefts, shifts


class OutputMode(enum.Enum):
    RAW64 = "raw64"
    INTERLEAVED32 = "interleaved32"
    REVERSED64 = "reversed64"
    UNIT_INTERVAL = "unit"


_BYTE_REVERSE = np.array([int(f"{i:08b}"[::-1], 2) for i in range(256)], dtype=np.uint8)


def reverse_bits64(words: np.ndarray) -> np.ndarray:
    """Reverse the bit order of every 64-bit word."""
    b = np.ascontiguousarray(words, dtype="<u8").view(np.uint8).reshape(-1, 8)
    return _BYTE_REVERSE[b[:, ::-1]].reshape(-1).view("<u8").copy()


def encode(words: np.ndarray, mode: OutputMode) -> bytes:
    """Frame 64-bit outputs as bytes."""
    words = np.asarray(words, dtype=np.uint64)
    if mode is OutputMode.RAW64:
        return words.astype("<u8").tobytes()
    if mode is OutputMode.INTERLEAVED32:
        lo = (words & np.uint64(0xFFFFFFFF)).astype("<u4")
        hi = (words >> np.uint64(32)).astype("<u4")
        return np.stack([lo, hi], axis=1).reshape(-1).tobytes()
    if mode is OutputMode.REVERSED64:
        return reverse_bits64(words).tobytes()
    if mode is OutputMode.UNIT_INTERVAL:
        # top 53 bits only: the lowest eleven bits cannot reach the mantissa
        return ((words >> np.uint64(11)).astype(np.float64) * 2.0**-53).astype("<f8").tobytes()
    raise ValueError(f"unknown output mode {mode!r}")


def emit(state: EngineState, params: XorshiftParams, mode: OutputMode, count: int) -> bytes:
    """Advance ``state`` by ``count`` steps and return the framed outputs."""
    if params.w != 64:
        raise ValueError("byte streams are defined for 64-bit words only")
    engine = Engine(params, state)
    data = encode(engine.fill(count), mode)
    state.words[:] = engine.state.words
    state.p = engine.state.p
    return data


def full_period(params: XorshiftParams) -> int:
    return (1 << params.n_bits) - 1
