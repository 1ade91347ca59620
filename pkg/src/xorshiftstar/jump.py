"""Jump-ahead through ``x**j mod P(x)``."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .engines import EngineState, XorshiftParams, next_linear
from .gf2 import GF2Poly, from_words, reducer, to_words
from .period import characteristic_poly


@dataclass(frozen=True)
class JumpMask:
    """Coefficients of ``Q(x) = x**j mod P(x)``: bit ``b`` of ``words[i]`` is the
    coefficient of ``x**(w*i + b)``."""

    words: tuple[int, ...]
    j: int
    params_id: str
    w: int = 64

    @property
    def poly(self) -> GF2Poly:
        return GF2Poly(from_words(self.words, self.w))

    def dumps(self) -> str:
        lines = [f"j={format_power(self.j)} params={self.params_id}"]
        lines += [f"0x{x:0{self.w // 4}x}" for x in self.words]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> JumpMask:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        m = re.fullmatch(r"j=(\S+)\s+params=(\S+)", lines[0]) if lines else None
        if m is None:
            raise ValueError("mask file must start with 'j=<distance> params=<id>'")
        words = tuple(int(tok, 16) for tok in lines[1:])
        w = _width_from_id(m.group(2))
        return cls(words, parse_power(m.group(1)), m.group(2), w)


def _width_from_id(params_id: str) -> int:
    m = re.search(r":w=(\d+)", params_id)
    return int(m.group(1)) if m else 64


def parse_power(text: str) -> int:
    """Parse a jump distance: decimal, ``0x`` hex, or ``2^k`` (optionally ``2^k+d``)."""
    text = text.replace(" ", "")
    m = re.fullmatch(r"(\d+)\^(\d+)([+-]\d+)?", text)
    if m:
        return int(m.group(1)) ** int(m.group(2)) + int(m.group(3) or 0)
    value = int(text, 0)
    if value < 0:
        raise ValueError("jump distance must be non-negative")
    return value


def format_power(j: int) -> str:
    if j > 1 and j & (j - 1) == 0:
        return f"2^{j.bit_length() - 1}"
    return str(j)


def jump_poly(poly: GF2Poly, j: int, params: XorshiftParams | None = None) -> JumpMask:
    """Pack ``x**j mod poly`` as a jump mask."""
    if j < 0:
        raise ValueError("jump distance must be non-negative")
    w = params.w if params is not None else 64
    if poly.degree % w:
        raise ValueError(f"degree {poly.degree} is not a multiple of the word width {w}")
    q = reducer(poly.bits).pow(2, j)
    params_id = params.linear_id if params is not None else f"deg={poly.degree}"
    return JumpMask(tuple(to_words(q, poly.degree // w, w)), j, params_id, w)


def jump_mask(params: XorshiftParams, j: int) -> JumpMask:
    """Mask for jumping the engine of ``params`` ahead by ``j`` steps."""
    return jump_poly(characteristic_poly(params), j, params)


def standard_jump(params: XorshiftParams) -> JumpMask:
    """Jump by ``2**(n/2)`` steps, splitting the period into non-overlapping blocks."""
    return jump_mask(params, 1 << (params.n_bits // 2))


def apply_jump(state: EngineState, mask: JumpMask, params: XorshiftParams) -> EngineState:
    """Advance ``state`` in place by ``mask.j`` steps and return it.

    Walks every coefficient position, xoring the current state into an
    accumulator where the coefficient is set; one engine step per position.
    The result is stored with the rotation index the state would have after
    ``mask.j`` single steps, so jumped and iterated states compare equal word
    for word.
    """
    if mask.params_id != params.linear_id or mask.w != params.w:
        raise ValueError(f"mask computed for {mask.params_id}, not {params.linear_id}")
    t = params.t
    if len(mask.words) != t or state.t != t:
        raise ValueError("mask, state and parameters disagree on the word count")
    acc = [0] * t
    words = state.words
    target = (state.p + mask.j) % t
    for word in mask.words:
        for b in range(params.w):
            if word >> b & 1:
                p = state.p
                for k in range(t):
                    acc[k] ^= words[(k + p) % t]
            next_linear(state, params)
    for k in range(t):
        words[(k + target) % t] = acc[k]
    state.p = target
    return state
