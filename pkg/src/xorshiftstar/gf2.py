"""Polynomials and square bit matrices over GF(2).

Polynomials are dense bitsets stored in a Python ``int`` (bit ``i`` is the
coefficient of ``x**i``).  Matrices act on row vectors, also stored as ints:
bit ``i`` of a vector is coordinate ``i`` and one step is ``v -> v @ M``.
"""

from __future__ import annotations

import functools
import random
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

MASK64 = (1 << 64) - 1

# Spread the low/high nibble of a byte into the even bit positions of a byte;
# squaring over GF(2) interleaves zero bits between coefficients.
_SPREAD_LO = bytes(sum(((b >> i) & 1) << (2 * i) for i in range(4)) for b in range(256))
_SPREAD_HI = bytes(sum(((b >> (i + 4)) & 1) << (2 * i) for i in range(4)) for b in range(256))


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bitsets."""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    if b.bit_length() <= 64:
        r = 0
        while b:
            low = b & -b
            r ^= a << (low.bit_length() - 1)
            b ^= low
        return r
    # 8-bit windows: 256 multiples of a, then one shift-xor per byte of b.
    table = [0] * 256
    for i in range(1, 256):
        low = i & -i
        table[i] = table[i ^ low] ^ (a << (low.bit_length() - 1))
    r = 0
    shift = 0
    for byte in b.to_bytes((b.bit_length() + 7) // 8, "little"):
        if byte:
            r ^= table[byte] << shift
        shift += 8
    return r


def clsquare(a: int) -> int:
    """Carry-less square: bit i moves to bit 2i."""
    if a == 0:
        return 0
    data = a.to_bytes((a.bit_length() + 7) // 8, "little")
    out = bytearray(2 * len(data))
    out[0::2] = data.translate(_SPREAD_LO)
    out[1::2] = data.translate(_SPREAD_HI)
    return int.from_bytes(out, "little")


def _divmod_bits(a: int, m: int) -> tuple[int, int]:
    n = m.bit_length() - 1
    q = 0
    while a.bit_length() - 1 >= n:
        shift = a.bit_length() - 1 - n
        q |= 1 << shift
        a ^= m << shift
    return q, a


@dataclass(frozen=True, slots=True)
class GF2Poly:
    """Dense polynomial over GF(2).

    The zero polynomial has degree ``-1``.
    """

    bits: int = 0

    def __post_init__(self):
        if self.bits < 0:
            raise ValueError("coefficient bitset must be non-negative")

    @classmethod
    def from_exponents(cls, exponents: Iterable[int]) -> GF2Poly:
        bits = 0
        for e in exponents:
            bits ^= 1 << e
        return cls(bits)

    @classmethod
    def x(cls) -> GF2Poly:
        return cls(2)

    @classmethod
    def one(cls) -> GF2Poly:
        return cls(1)

    @property
    def degree(self) -> int:
        return self.bits.bit_length() - 1

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def exponents(self) -> list[int]:
        return [i for i in range(self.bits.bit_length()) if self.bits >> i & 1]

    def coefficient(self, i: int) -> int:
        return self.bits >> i & 1

    def __bool__(self) -> bool:
        return self.bits != 0

    def __add__(self, other: GF2Poly) -> GF2Poly:
        return GF2Poly(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: GF2Poly) -> GF2Poly:
        return GF2Poly(clmul(self.bits, other.bits))

    def __divmod__(self, other: GF2Poly) -> tuple[GF2Poly, GF2Poly]:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        q, r = _divmod_bits(self.bits, other.bits)
        return GF2Poly(q), GF2Poly(r)

    def __floordiv__(self, other: GF2Poly) -> GF2Poly:
        return divmod(self, other)[0]

    def __mod__(self, other: GF2Poly) -> GF2Poly:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        return GF2Poly(reducer(other.bits).reduce(self.bits))

    def __call__(self, x: int) -> int:
        """Evaluate at 0 or 1."""
        if x == 0:
            return self.bits & 1
        if x == 1:
            return self.weight & 1
        raise ValueError("GF(2) polynomials evaluate only at 0 and 1")

    def reciprocal(self, degree: int | None = None) -> GF2Poly:
        """Return ``x**degree * self(1/x)``."""
        d = self.degree if degree is None else degree
        r = 0
        bits = self.bits
        while bits:
            low = bits & -bits
            r |= 1 << (d - (low.bit_length() - 1))
            bits ^= low
        return GF2Poly(r)

    def __str__(self) -> str:
        return format_sparse(self)

    def __repr__(self) -> str:
        if self.degree > 64:
            return f"GF2Poly(degree={self.degree}, weight={self.weight})"
        return f"GF2Poly({format_sparse(self)!r})"


def weight(p: GF2Poly) -> int:
    """Number of nonzero coefficients."""
    return p.weight


def poly_gcd(f: GF2Poly, g: GF2Poly) -> GF2Poly:
    a, b = f.bits, g.bits
    while b:
        db = b.bit_length()
        while a.bit_length() >= db:
            a ^= b << (a.bit_length() - db)
        a, b = b, a
    return GF2Poly(a)


def poly_lcm(f: GF2Poly, g: GF2Poly) -> GF2Poly:
    if not f or not g:
        return GF2Poly(0)
    return (f * g) // poly_gcd(f, g)


class Reducer:
    """Reduction modulo a fixed polynomial ``m``, eight bits at a time."""

    __slots__ = ("modulus", "n", "_table")

    def __init__(self, modulus: int):
        if modulus.bit_length() < 2:
            raise ValueError("modulus must have degree >= 1")
        self.modulus = modulus
        self.n = n = modulus.bit_length() - 1
        # table[top] = q*m where the bits of q*m at positions >= n equal top
        table = [0] * 256
        mults = [0] * 256
        for i in range(1, 256):
            low = i & -i
            mults[i] = mults[i ^ low] ^ (modulus << (low.bit_length() - 1))
        for prod in mults:
            table[prod >> n] = prod
        self._table = table

    def reduce(self, a: int) -> int:
        n = self.n
        table = self._table
        length = a.bit_length()
        while length > n:
            k = length - 8 if length - 8 > n else n
            a ^= table[a >> k] << (k - n)
            length = a.bit_length()
        return a

    def mul(self, a: int, b: int) -> int:
        return self.reduce(clmul(a, b))

    def square(self, a: int) -> int:
        return self.reduce(clsquare(a))

    def mul_x(self, a: int) -> int:
        a <<= 1
        if a >> self.n:
            a ^= self.modulus
        return a

    def pow(self, base: int, e: int) -> int:
        if e < 0:
            raise ValueError("negative exponent")
        base = self.reduce(base)
        if e == 0:
            return self.reduce(1)
        r = 1
        if base == 2:
            for bit in bin(e)[2:]:
                r = self.square(r)
                if bit == "1":
                    r = self.mul_x(r)
            return r
        for bit in bin(e)[2:]:
            r = self.square(r)
            if bit == "1":
                r = self.mul(r, base)
        return r

    def frobenius_powers(self, base: int, k: int) -> list[int]:
        """``[base**(2**i) mod m for i in 0..k]``."""
        out = [self.reduce(base)]
        for _ in range(k):
            out.append(self.square(out[-1]))
        return out


@functools.lru_cache(maxsize=64)
def reducer(modulus: int) -> Reducer:
    return Reducer(modulus)


def poly_mulmod(f: GF2Poly, g: GF2Poly, m: GF2Poly) -> GF2Poly:
    if not m:
        raise ZeroDivisionError("zero modulus")
    return GF2Poly(reducer(m.bits).mul(f.bits, g.bits))


def poly_powmod(f: GF2Poly, e: int, m: GF2Poly) -> GF2Poly:
    """``f**e mod m`` by left-to-right square-and-multiply."""
    if not m:
        raise ZeroDivisionError("zero modulus")
    return GF2Poly(reducer(m.bits).pow(f.bits, e))


# --- text formats -----------------------------------------------------------

def format_sparse(p: GF2Poly) -> str:
    if not p:
        return "0"
    terms = []
    for e in reversed(p.exponents()):
        terms.append("1" if e == 0 else "x" if e == 1 else f"x^{e}")
    return " + ".join(terms)


_TERM = re.compile(r"^(?:(1)|x(?:\^(\d+))?)$")


def parse_sparse(text: str) -> GF2Poly:
    """Parse ``"x^64 + x^13 + 1"``; repeated terms cancel."""
    text = text.strip()
    if text == "0":
        return GF2Poly(0)
    bits = 0
    for term in text.replace(" ", "").split("+"):
        m = _TERM.match(term)
        if m is None:
            raise ValueError(f"bad polynomial term {term!r}")
        e = 0 if m.group(1) else int(m.group(2) or 1)
        bits ^= 1 << e
    return GF2Poly(bits)


def to_words(bits: int, count: int | None = None, w: int = 64) -> list[int]:
    """Split a bitset into ``w``-bit words, least significant first."""
    if count is None:
        count = max(1, -(-bits.bit_length() // w))
    mask = (1 << w) - 1
    return [(bits >> (w * i)) & mask for i in range(count)]


def from_words(words: Sequence[int], w: int = 64) -> int:
    bits = 0
    for i, word in enumerate(words):
        bits |= word << (w * i)
    return bits


def format_hex_words(p: GF2Poly, count: int | None = None) -> str:
    return " ".join(f"{word:016x}" for word in to_words(p.bits, count))


def parse_hex_words(text: str) -> GF2Poly:
    return GF2Poly(from_words([int(tok, 16) for tok in text.split()]))


# --- Berlekamp-Massey --------------------------------------------------------

def berlekamp_massey(bits: Iterable[int]) -> tuple[int, GF2Poly]:
    """Shortest LFSR generating ``bits``.

    Returns ``(L, C)`` where ``C`` is the connection polynomial
    ``1 + c_1 x + ... + c_L x^L`` with ``s_n = sum(c_i s_{n-i})``.
    """
    c, b, length, m = 1, 1, 0, -1
    window = 0  # bit i holds s_{n-i}
    for n, bit in enumerate(bits):
        window = (window << 1) | (int(bit) & 1)
        if (c & window).bit_count() & 1:
            prev = c
            c ^= b << (n - m)
            if 2 * length <= n:
                length, b, m = n + 1 - length, prev, n
    return length, GF2Poly(c)


def sequence_min_poly(bits: Iterable[int]) -> GF2Poly:
    """Minimal polynomial (monic, annihilating) of a linearly recurrent bit sequence."""
    length, conn = berlekamp_massey(bits)
    return conn.reciprocal(length)


# --- bit matrices -------------------------------------------------------------

@dataclass(frozen=True)
class BitMatrix:
    """Square matrix over GF(2); ``rows[i]`` is row ``i`` as a bitset."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise ValueError("matrix must be square")
        limit = 1 << self.n
        if any(r < 0 or r >= limit for r in self.rows):
            raise ValueError("row wider than the matrix")

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def zero(cls, n: int) -> BitMatrix:
        return cls(n, (0,) * n)

    @classmethod
    def from_map(cls, n: int, f: Callable[[int], int]) -> BitMatrix:
        """Matrix of the linear map ``f`` (rows are images of unit vectors)."""
        return cls(n, tuple(f(1 << i) for i in range(n)))

    @classmethod
    def companion(cls, p: GF2Poly) -> BitMatrix:
        """Companion matrix whose characteristic polynomial is ``p``."""
        n = p.degree
        if n < 1:
            raise ValueError("need degree >= 1")
        # multiplication by x in GF(2)[x]/(p)
        return cls.from_map(n, lambda v: (v << 1) ^ p.bits if v >> (n - 1) else v << 1)

    def apply(self, v: int) -> int:
        """Row vector times matrix."""
        rows = self.rows
        r = 0
        while v:
            low = v & -v
            r ^= rows[low.bit_length() - 1]
            v ^= low
        return r

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return BitMatrix(self.n, tuple(other.apply(r) for r in self.rows))

    def __add__(self, other: BitMatrix) -> BitMatrix:
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return BitMatrix(self.n, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    def is_zero(self) -> bool:
        return not any(self.rows)

    def transpose(self) -> BitMatrix:
        n = self.n
        cols = [0] * n
        for i, row in enumerate(self.rows):
            while row:
                low = row & -row
                cols[low.bit_length() - 1] |= 1 << i
                row ^= low
        return BitMatrix(n, tuple(cols))

    def rank(self) -> int:
        return gf2_rank(self.rows)

    def evaluate(self, p: GF2Poly) -> BitMatrix:
        """``p(M)`` by Horner's rule."""
        acc = BitMatrix.zero(self.n)
        eye = BitMatrix.identity(self.n)
        for e in range(p.degree, -1, -1):
            acc = acc @ self
            if p.coefficient(e):
                acc = acc + eye
        return acc


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank of a set of bitset rows."""
    basis: dict[int, int] = {}  # leading bit -> row
    for row in rows:
        while row:
            lead = row.bit_length() - 1
            pivot = basis.get(lead)
            if pivot is None:
                basis[lead] = row
                break
            row ^= pivot
    return len(basis)


def shift_xor_matrix(direction: str, s: int, n: int, w: int | None = None) -> BitMatrix:
    """``I + L^s`` (``"left"``) or ``I + R^s`` (``"right"``) on ``n/w`` words of ``w`` bits.

    Acting on a row vector ``v`` this is ``v ^ (v << s)`` or ``v ^ (v >> s)``
    within each word.
    """
    if w is None:
        w = n if n <= 64 else 64
    if n % w:
        raise ValueError(f"dimension {n} is not a multiple of word width {w}")
    if not 1 <= s < w:
        raise ValueError(f"shift {s} out of range 1..{w - 1}")
    if direction not in ("left", "right"):
        raise ValueError(f"direction must be 'left' or 'right', not {direction!r}")
    left = direction == "left"
    rows = []
    for i in range(n):
        j = i % w
        row = 1 << i
        if left and j + s < w:
            row |= 1 << (i + s)
        elif not left and j - s >= 0:
            row |= 1 << (i - s)
        rows.append(row)
    return BitMatrix(n, tuple(rows))


def block_matrix(blocks: dict[tuple[int, int], BitMatrix], t: int, w: int) -> BitMatrix:
    """Assemble a ``t x t`` block matrix of ``w x w`` blocks (missing blocks are zero)."""
    rows = [0] * (t * w)
    for (bi, bj), block in blocks.items():
        if block.n != w:
            raise ValueError("block size mismatch")
        for k, row in enumerate(block.rows):
            rows[bi * w + k] ^= row << (bj * w)
    return BitMatrix(t * w, tuple(rows))


def transform_of(params) -> BitMatrix:
    """One-step matrix ``M`` of an engine: ``next(v) == v @ M``.

    ``params`` is an ``XorshiftParams``.  Multi-word states are read in
    logical order (word 0 is the one at the circular index ``p``), matching
    ``EngineState.to_vector``.
    """
    w = params.w
    if not params.is_highdim:
        m = BitMatrix.identity(w)
        for direction, s in params.program():
            m = m @ shift_xor_matrix("left" if direction == "<<" else "right", s, w)
        return m
    t = params.t
    eye = BitMatrix.identity(w)
    blocks = {
        (0, 0): shift_xor_matrix("right", params.c, w),
        (1, 0): shift_xor_matrix("left", params.a, w) @ shift_xor_matrix("right", params.b, w),
        (0, t - 1): eye,
    }
    for j in range(1, t - 1):
        blocks[(j + 1, j)] = eye
    return block_matrix(blocks, t, w)


class DegreeShortfallError(ValueError):
    """Stabilized minimal polynomial has degree below the matrix dimension."""

    def __init__(self, poly: GF2Poly, n: int):
        super().__init__(f"minimal polynomial has degree {poly.degree} < {n}")
        self.poly = poly
        self.n = n


def krylov_min_poly(step: Callable[[int], int], n: int, *, pairs: int = 3,
                    seed: int = 0, max_pairs: int = 64, checks: int = 20) -> GF2Poly:
    """Minimal polynomial of the linear map ``step`` on ``n``-bit vectors.

    Runs Berlekamp-Massey on ``u . M^k . v`` for ``k < 2n`` and takes the lcm
    over random ``(u, v)`` pairs.  Degree ``n`` is final.  Otherwise, once the
    degree has held still for ``pairs`` consecutive pairs, the candidate must
    also annihilate ``checks`` random vectors (a wrong candidate survives each
    with probability at most 1/2) before it is returned.
    """
    rng = random.Random(seed)
    result = GF2Poly(1)
    stable = 0
    for _ in range(max_pairs):
        u = rng.getrandbits(n)
        v = rng.getrandbits(n)
        seq = []
        for _ in range(2 * n):
            seq.append((u & v).bit_count() & 1)
            v = step(v)
        new = poly_lcm(result, sequence_min_poly(seq))
        stable = stable + 1 if new.degree == result.degree else 0
        result = new
        if result.degree == n:
            break
        if stable >= pairs:
            if all(_annihilates(step, result, rng.getrandbits(n)) for _ in range(checks)):
                break
            stable = 0
    return result


def _annihilates(step: Callable[[int], int], p: GF2Poly, v: int) -> bool:
    acc = 0
    for e in range(p.degree, -1, -1):
        acc = step(acc)
        if p.coefficient(e):
            acc ^= v
    return acc == 0


def min_poly(m: BitMatrix, *, pairs: int = 3, seed: int = 0) -> GF2Poly:
    """Minimal polynomial of ``m``.

    Equal to the characteristic polynomial when its degree is ``m.n``; check
    the degree (or use :func:`char_poly`) before relying on that.
    """
    return krylov_min_poly(m.apply, m.n, pairs=pairs, seed=seed)


def char_poly(m: BitMatrix, *, seed: int = 0) -> GF2Poly:
    """Characteristic polynomial, provided it equals the minimal polynomial."""
    p = min_poly(m, seed=seed)
    if p.degree != m.n:
        raise DegreeShortfallError(p, m.n)
    return p
