"""Full-period certification and parameter enumeration."""

from __future__ import annotations

import functools
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .engines import EngineState, XorshiftParams, next_linear, Variant
from .gf2 import DegreeShortfallError, GF2Poly, poly_gcd, poly_lcm, reducer, sequence_min_poly

log = logging.getLogger(__name__)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


def is_probable_prime(n: int, rounds: int = 32) -> bool:
    """Strong-pseudoprime (Miller-Rabin) test.

    Bases are the first primes followed by pseudo-random bases from a fixed
    seed, so the answer is reproducible.  Deterministic below 3.3e24.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = random.Random(n & 0xFFFFFFFF)
    bases = list(_SMALL_PRIMES[:13])
    if n >= 3_317_044_064_679_887_385_961_981:
        bases += [rng.randrange(2, n - 1) for _ in range(rounds)]
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class FactorTableError(ValueError):
    pass


@dataclass(frozen=True)
class FactorTable:
    """Distinct prime factors of ``2**n - 1`` (with multiplicities)."""

    n: int
    primes: tuple[int, ...]
    multiplicities: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return (1 << self.n) - 1

    def verify(self) -> FactorTable:
        """Check primality, exact divisibility and product reconstruction."""
        return _verified(self)

    @classmethod
    def parse(cls, text: str) -> FactorTable:
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines or not lines[0].startswith("n="):
            raise FactorTableError("factor table must start with a line 'n=<exponent>'")
        n = int(lines[0][2:])
        primes, mults = [], []
        for lineno, ln in enumerate(lines[1:], start=2):
            base, _, mult = ln.partition("^")
            try:
                primes.append(int(base))
                mults.append(int(mult) if mult else 1)
            except ValueError:
                raise FactorTableError(f"line {lineno}: cannot parse {ln!r}") from None
        return cls(n, tuple(primes), tuple(mults))

    @classmethod
    def load(cls, path: str | Path) -> FactorTable:
        return cls.parse(Path(path).read_text())

    def dumps(self) -> str:
        lines = [f"n={self.n}"]
        for p, m in zip(self.primes, self.multiplicities):
            lines.append(f"{p}^{m}" if m > 1 else str(p))
        return "\n".join(lines) + "\n"


@functools.lru_cache(maxsize=None)
def _verified(table: FactorTable) -> FactorTable:
    modulus = table.modulus
    if len(set(table.primes)) != len(table.primes):
        raise FactorTableError(f"2^{table.n}-1: repeated prime in table")
    product = 1
    for p, m in zip(table.primes, table.multiplicities):
        if not is_probable_prime(p):
            raise FactorTableError(f"2^{table.n}-1: {p} is not prime")
        if modulus % p**m:
            raise FactorTableError(f"2^{table.n}-1: {p}^{m} does not divide")
        product *= p**m
    if product != modulus:
        raise FactorTableError(f"2^{table.n}-1: listed factors do not multiply back")
    return table


_SHIPPED_TABLES = (64, 1024, 4096)


def factor_table(n: int, path: str | Path | None = None) -> FactorTable:
    """Verified factor table for ``2**n - 1``.

    Tables ship for n = 64, 1024, 4096.  Smaller powers of two are derived
    from the 4096 table, since ``2**(2**k) - 1`` is the product of the Fermat
    numbers below it.
    """
    if path is not None:
        table = FactorTable.load(path)
        if table.n != n:
            raise FactorTableError(f"{path} is for n={table.n}, need n={n}")
        return table.verify()
    if n in _SHIPPED_TABLES:
        text = resources.files(__package__).joinpath(f"data/factors_{n}.txt").read_text()
        return FactorTable.parse(text).verify()
    if n >= 1 and n & (n - 1) == 0 and n < 4096:
        big = factor_table(4096)
        modulus = (1 << n) - 1
        primes = tuple(p for p in big.primes if modulus % p == 0)
        return FactorTable(n, primes, (1,) * len(primes)).verify()
    raise FactorTableError(f"no factor table for 2^{n}-1; supply a factor file")


# --- characteristic polynomials -----------------------------------------------------

def _projected_sequence(params: XorshiftParams, rng: random.Random) -> list[int]:
    n = params.n_bits
    state = EngineState.from_int(rng.getrandbits(n) | 1, params.t, params.w)
    u = rng.getrandbits(params.w) | 1
    bits = []
    for _ in range(2 * n):
        bits.append((next_linear(state, params) & u).bit_count() & 1)
    return bits


def min_poly_of(params: XorshiftParams, *, pairs: int = 3, seed: int = 0,
                max_pairs: int = 16) -> GF2Poly:
    """Minimal polynomial of the engine's one-step transform.

    Projects the output word on random masks from random starting states and
    takes the lcm of the Berlekamp-Massey results until the degree reaches
    ``n`` or holds still for ``pairs`` projections.  Degree ``n`` is exact; a
    lower degree only proves a shortfall (the result divides the true
    minimal polynomial).
    """
    rng = random.Random(seed)
    n = params.n_bits
    result = GF2Poly(1)
    stable = 0
    for _ in range(max_pairs):
        new = poly_lcm(result, sequence_min_poly(_projected_sequence(params, rng)))
        stable = stable + 1 if new.degree == result.degree else 0
        result = new
        if result.degree == n or stable >= pairs:
            break
    return result


def characteristic_poly(params: XorshiftParams, *, seed: int = 0) -> GF2Poly:
    """Characteristic polynomial of the transform; raises if it is not the minimal one."""
    p = min_poly_of(params, seed=seed)
    if p.degree != params.n_bits:
        raise DegreeShortfallError(p, params.n_bits)
    return p


# --- primitivity -----------------------------------------------------------------------

def _prime_divisors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(poly: GF2Poly) -> bool:
    """Rabin's test: x^(2^n) = x mod P and gcd(x^(2^(n/q)) - x, P) = 1 for primes q | n."""
    n = poly.degree
    if n < 1:
        return False
    if n == 1:
        return True
    if not poly.bits & 1:
        return False
    red = reducer(poly.bits)
    checkpoints = {n // q for q in _prime_divisors(n)}
    y = 2
    for i in range(1, n + 1):
        y = red.square(y)
        if i in checkpoints and poly_gcd(GF2Poly(y ^ 2), poly).degree > 0:
            return False
    return y == red.reduce(2)


def is_primitive(poly: GF2Poly, factors: FactorTable) -> bool:
    """True iff ``poly`` is irreducible and ``x`` has order ``2**n - 1`` modulo it."""
    n = poly.degree
    if n != factors.n:
        raise ValueError(f"polynomial degree {n} does not match factor table n={factors.n}")
    factors.verify()
    if not is_irreducible(poly):
        return False
    red = reducer(poly.bits)
    order = factors.modulus
    return all(red.pow(2, order // p) != 1 for p in factors.primes)


def has_small_factor(poly: GF2Poly, max_degree: int) -> bool:
    """Whether ``poly`` has an irreducible factor of degree at most ``max_degree``.

    Uses gcd(P, prod (x^(2^k) - x)) over ``max_degree/2 < k <= max_degree``,
    which covers every degree up to ``max_degree``.
    """
    if not poly.bits & 1 or not poly.weight & 1:
        return True  # divisible by x or x + 1
    red = reducer(poly.bits)
    y = 2
    acc = 1
    for k in range(1, max_degree + 1):
        y = red.square(y)
        if 2 * k > max_degree:
            acc = red.mul(acc, y ^ 2)
    return poly_gcd(GF2Poly(acc), poly).degree > 0


@dataclass(frozen=True)
class Certificate:
    params: XorshiftParams
    poly: GF2Poly | None
    primitive: bool
    reason: str = ""

    @property
    def weight(self) -> int:
        return self.poly.weight if self.poly is not None else 0


def certify(params: XorshiftParams, factors: FactorTable | None = None, *,
            seed: int = 0, prefilter: int | None = None) -> Certificate:
    """Decide whether ``params`` yields a full-period engine.

    One projection suffices for a verdict: when the transform has a primitive
    characteristic polynomial every nonzero output projection has it as
    minimal polynomial, so a shortfall already proves a shorter period.
    """
    factors = factors or factor_table(params.n_bits)
    n = params.n_bits
    rng = random.Random(f"{seed}:{params.linear_id}")
    poly = sequence_min_poly(_projected_sequence(params, rng))
    if poly.degree < n:
        return Certificate(params, poly, False, "degree")
    if not poly.weight & 1:
        return Certificate(params, poly, False, "x+1 divides")
    if prefilter is None:
        prefilter = 32 if n > 128 else 0
    if prefilter and has_small_factor(poly, prefilter):
        return Certificate(params, poly, False, "small factor")
    if not is_primitive(poly, factors):
        return Certificate(params, poly, False, "not primitive")
    return Certificate(params, poly, True)


# --- enumeration ------------------------------------------------------------------------

def candidates_single(w: int = 64) -> list[tuple[int, int, int]]:
    """Canonical one-word triples: 0 < a, b, c < w with a <= c."""
    return [(a, b, c) for a in range(1, w) for b in range(1, w) for c in range(a, w)]


def candidates_highdim(w: int = 64) -> list[tuple[int, int, int]]:
    """Triples with a + b <= w and gcd(a, b) = 1."""
    return [(a, b, c) for a in range(1, w) for b in range(1, w - a + 1)
            if math.gcd(a, b) == 1 for c in range(1, w)]


def _certify_chunk(args) -> list[tuple[int, int, int, int]]:
    triples, t, w, highdim = args
    factors = factor_table(w * t)
    out = []
    for a, b, c in triples:
        if highdim:
            params = XorshiftParams.highdim(a, b, c, t, w=w)
        else:
            params = XorshiftParams.single(Variant.A0, a, b, c, w=w)
        cert = certify(params, factors)
        if cert.primitive:
            out.append((a, b, c, cert.weight))
    return out


def _run(triples: Sequence[tuple[int, int, int]], t: int, w: int, highdim: bool,
         jobs: int, chunk: int = 256) -> list[tuple[int, int, int, int]]:
    factor_table(w * t)  # fail early, naming the exponent
    chunks = [(list(triples[i:i + chunk]), t, w, highdim) for i in range(0, len(triples), chunk)]
    results = []
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            for part in pool.map(_certify_chunk, chunks):
                results.extend(part)
    else:
        for i, args in enumerate(chunks):
            results.extend(_certify_chunk(args))
            log.info("chunk %d/%d done, %d found", i + 1, len(chunks), len(results))
    return sorted(results)


def enumerate_64(*, w: int = 64, jobs: int = 1) -> list[tuple[int, int, int, int]]:
    """All canonical full-period one-word triples as ``(a, b, c, weight)``.

    The transform of every variant A0-A7 shares one characteristic polynomial
    (cyclic rotation, transposition and bit reversal are similarities), and
    so does the mirrored triple (c, b, a); hence a <= c and A0 suffice.
    """
    return _run(candidates_single(w), 1, w, False, jobs)


def enumerate_highdim(t: int, *, w: int = 64, jobs: int = 1,
                      triples: Iterable[tuple[int, int, int]] | None = None
                      ) -> list[tuple[int, int, int, int]]:
    """Full-period multi-word triples (a + b <= w, gcd(a, b) = 1) as ``(a, b, c, weight)``."""
    if t < 2:
        raise ValueError("high-dimensional enumeration needs t >= 2")
    cands = list(triples) if triples is not None else candidates_highdim(w)
    return _run(cands, t, w, True, jobs)


# --- brute force ---------------------------------------------------------------------------

MAX_BRUTE_FORCE_BITS = 24


def brute_force_period(params: XorshiftParams, seed: int = 1) -> int:
    """Exact cycle length of the state sequence from ``seed`` by iteration."""
    if params.n_bits > MAX_BRUTE_FORCE_BITS:
        raise ValueError(f"{params.n_bits}-bit state is too large to iterate "
                         f"(limit {MAX_BRUTE_FORCE_BITS})")
    state = EngineState.from_int(seed, params.t, params.w)
    start = state.to_vector(params.w)
    limit = 1 << params.n_bits
    for k in range(1, limit + 1):
        next_linear(state, params)
        if state.to_vector(params.w) == start:
            return k
    raise RuntimeError("state did not return to the seed; transform is not invertible")
