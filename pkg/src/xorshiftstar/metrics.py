"""Quality probes: escape from zeroland, linear artifacts, exhaustive small-state
checks and failure-count scoring of external test-suite results."""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .engines import Engine, EngineState, XorshiftParams, next_output
from .engines import _program_arrays
from .gf2 import berlekamp_massey
from .period import MAX_BRUTE_FORCE_BITS, _prime_divisors

FAIL_LOW = 0.001
FAIL_HIGH = 0.999


# --- escape from zeroland ------------------------------------------------------------

@dataclass
class EscapeCurve:
    positions: np.ndarray
    ratios: np.ndarray
    n_seeds: int
    window: int

    @property
    def mean(self) -> float:
        return float(self.ratios.mean())

    @property
    def stddev(self) -> float:
        return float(self.ratios.std())

    def to_csv(self) -> str:
        lines = ["position,ratio"]
        lines += [f"{p},{r:.6f}" for p, r in zip(self.positions, self.ratios)]
        return "\n".join(lines) + "\n"


def single_bit_seeds(params: XorshiftParams) -> np.ndarray:
    """All states with exactly one bit set, shape ``(n, t)``."""
    n, t = params.n_bits, params.t
    states = np.zeros((n, t), dtype=np.uint64)
    idx = np.arange(n)
    states[idx, idx // 64] = np.left_shift(np.uint64(1), (idx % 64).astype(np.uint64))
    return states


def popcount_profile(params: XorshiftParams, count: int) -> np.ndarray:
    """Number of one bits at each output index, summed over all single-bit seeds."""
    if params.w != 64:
        raise ValueError("escape curves are defined for 64-bit words")
    mult = np.uint64(params.multiplier or 1)
    states = single_bit_seeds(params)
    if params.is_highdim:
        return _kernels.popcount_sums_hd(states, np.uint64(params.a), np.uint64(params.b),
                                         np.uint64(params.c), mult, count)
    lefts, shifts = _program_arrays(params)
    return _kernels.popcount_sums_single(states[:, 0].copy(), lefts, shifts, mult, count)


def escape_zeroland(params: XorshiftParams, n_outputs: int = 100_000, window: int = 4,
                    stride: int = 1) -> EscapeCurve:
    """Fraction of ones in a sliding window of ``window`` outputs, averaged over
    every seed with a single bit set.

    The summary statistics cover every window position by default; a larger
    ``stride`` thins the curve (useful for plotting) but makes the standard
    deviation dominated by the few early, heavily biased points.
    """
    sums = popcount_profile(params, n_outputs)
    csum = np.concatenate([[0], np.cumsum(sums)])
    windows = csum[window:] - csum[:-window]
    positions = np.arange(0, windows.size, stride)
    n_seeds = params.n_bits
    ratios = windows[positions] / (64.0 * window * n_seeds)
    return EscapeCurve(positions, ratios, n_seeds, window)


# --- linear artifacts -----------------------------------------------------------------

def linear_complexity(bits: Iterable[int]) -> int:
    """Length of the shortest LFSR generating the sequence."""
    return berlekamp_massey(bits)[0]


def output_bit_stream(engine: Engine, count: int, bit: int = 0) -> np.ndarray:
    """Bit ``bit`` of the next ``count`` outputs."""
    out = engine.fill(count)
    return ((out >> np.uint64(bit)) & np.uint64(1)).astype(np.uint8)


def high_bits_stream(engine: Engine, n_bits: int, width: int = 32) -> np.ndarray:
    """Concatenated upper ``width`` bits of successive outputs, least significant first."""
    per = width
    out = engine.fill(-(-n_bits // per))
    hi = out >> np.uint64(64 - width)
    bits = ((hi[:, None] >> np.arange(width, dtype=np.uint64)) & np.uint64(1)).astype(np.uint8)
    return bits.reshape(-1)[:n_bits]


def rank_probabilities(rows: int, cols: int) -> tuple[float, float, float]:
    """Probabilities that a random GF(2) matrix has rank min, min-1, or lower."""
    def prob(r: int) -> float:
        logp = (r * (rows + cols - r) - rows * cols) * math.log(2)
        for i in range(r):
            logp += (math.log1p(-2.0 ** (i - rows)) + math.log1p(-2.0 ** (i - cols))
                     - math.log1p(-2.0 ** (i - r)))
        return math.exp(logp)

    m = min(rows, cols)
    full, minus1 = prob(m), prob(m - 1)
    return full, minus1, max(0.0, 1.0 - full - minus1)


def matrix_ranks(bits: np.ndarray, rows: int, cols: int, matrices: int) -> np.ndarray:
    """Ranks of ``matrices`` matrices filled row by row from ``bits``."""
    if cols > 64 or rows > 64:
        raise ValueError("rank probe supports matrices up to 64x64")
    need = rows * cols * matrices
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size < need:
        raise ValueError(f"rank probe needs {need} bits, got {bits.size}")
    m = bits[:need].reshape(matrices * rows, cols)
    padded = np.zeros((matrices * rows, 64), dtype=np.uint8)
    padded[:, :cols] = m
    packed = np.packbits(padded, axis=1, bitorder="little").view("<u8").reshape(matrices, rows)
    return _kernels.batch_ranks(np.ascontiguousarray(packed, dtype=np.uint64))


def rank_probe(bits: np.ndarray, rows: int = 64, cols: int = 64, matrices: int = 1000) -> float:
    """Chi-square p-value of the observed rank classes against the GF(2) rank law."""
    ranks = matrix_ranks(bits, rows, cols, matrices)
    m = min(rows, cols)
    observed = (np.sum(ranks == m), np.sum(ranks == m - 1), np.sum(ranks <= m - 2))
    expected = [matrices * p for p in rank_probabilities(rows, cols)]
    chi2 = sum((o - e) ** 2 / e for o, e in zip(observed, expected))
    return math.exp(-chi2 / 2)  # chi-square survival function, two degrees of freedom


# --- exhaustive checks on scaled engines ----------------------------------------------------

def _check_small(params: XorshiftParams, limit: int = MAX_BRUTE_FORCE_BITS) -> None:
    if params.n_bits > limit:
        raise ValueError(f"{params.n_bits}-bit state is too large for exhaustive checks "
                         f"(limit {limit})")


def cycle_outputs(params: XorshiftParams, seed: int = 1) -> np.ndarray:
    """Outputs over one full cycle of the state sequence starting at ``seed``."""
    _check_small(params)
    state = EngineState.from_int(seed, params.t, params.w)
    start = state.to_vector(params.w)
    out = []
    for _ in range(1 << params.n_bits):
        out.append(next_output(state, params))
        if state.to_vector(params.w) == start:
            break
    return np.array(out, dtype=np.uint64)


def equidist_small(params: XorshiftParams, t_tuple: int | None = None) -> bool:
    """True iff over ``2**n - 1`` steps every nonzero ``t_tuple``-tuple of
    consecutive outputs occurs exactly once and the zero tuple never does."""
    _check_small(params)
    t_tuple = params.t if t_tuple is None else t_tuple
    if t_tuple * params.w > MAX_BRUTE_FORCE_BITS:
        raise ValueError("tuple space too large")
    return tuples_equidistributed(cycle_outputs(params), params.w, t_tuple, params.n_bits)


def tuples_equidistributed(outputs: np.ndarray, w: int, t_tuple: int, n_bits: int) -> bool:
    """Exact tuple-count check on one full cycle of ``w``-bit outputs.

    Tuples wrap around the end of the cycle.  With ``n_bits`` of state each
    nonzero tuple must occur ``2**(n_bits - w*t_tuple)`` times, the zero tuple
    once fewer.
    """
    length = (1 << n_bits) - 1
    out = np.asarray(outputs, dtype=np.int64)
    if len(out) != length:
        return False
    codes = np.zeros(length, dtype=np.int64)
    for j in range(t_tuple):
        codes |= np.roll(out, -j) << (w * j)
    counts = np.bincount(codes, minlength=1 << (w * t_tuple))
    expected_each = 1 << (n_bits - w * t_tuple)
    return counts[0] == expected_each - 1 and bool(np.all(counts[1:] == expected_each))


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p in _prime_divisors(n):
        e, m = 0, n
        while m % p == 0:
            m //= p
            e += 1
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def sequence_period(seq: np.ndarray) -> int:
    """Smallest cyclic period of a sequence viewed as one full cycle."""
    n = len(seq)
    for d in _divisors(n):
        if np.array_equal(seq, np.roll(seq, d)):
            return d
    return n


def bit_periods(outputs: np.ndarray, w: int) -> list[int]:
    outputs = np.asarray(outputs, dtype=np.uint64)
    return [sequence_period((outputs >> np.uint64(k)) & np.uint64(1)) for k in range(w)]


def bit_period_small(params: XorshiftParams) -> bool:
    """True iff every output bit has period ``2**n - 1``."""
    _check_small(params, 20)
    full = (1 << params.n_bits) - 1
    return all(p == full for p in bit_periods(cycle_outputs(params), params.w))


# --- failure scoring ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScoreRecord:
    generator: str
    seed: int
    test: str
    p: float
    stream: str = "S"  # "S" forward, "R" bit-reversed

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p-value {self.p} outside [0, 1]")
        if self.stream not in ("S", "R"):
            raise ValueError(f"stream must be 'S' or 'R', not {self.stream!r}")

    @property
    def failed(self) -> bool:
        return self.p < FAIL_LOW or self.p > FAIL_HIGH


@dataclass
class GeneratorScore:
    generator: str
    failures: dict[str, int] = field(default_factory=lambda: {"S": 0, "R": 0})
    per_test: dict[tuple[str, str], int] = field(default_factory=dict)
    systematic: dict[str, list[str]] = field(default_factory=lambda: {"S": [], "R": []})
    seeds: dict[str, int] = field(default_factory=lambda: {"S": 0, "R": 0})

    @property
    def total(self) -> int:
        return self.failures["S"] + self.failures["R"]


class ScoreFormatError(ValueError):
    pass


def parse_score_csv(text: str) -> list[ScoreRecord]:
    """Read ``generator,seed,test,p`` rows (optional fifth column ``stream``)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header[:4]] != ["generator", "seed", "test", "p"]:
        raise ScoreFormatError("line 1: expected header 'generator,seed,test,p'")
    records = []
    errors = []
    for lineno, row in enumerate(reader, start=2):
        if not row or not "".join(row).strip():
            continue
        try:
            if len(row) not in (4, 5):
                raise ValueError(f"expected 4 or 5 fields, got {len(row)}")
            stream = row[4].strip() if len(row) == 5 else "S"
            records.append(ScoreRecord(row[0].strip(), int(row[1]), row[2].strip(),
                                       float(row[3]), stream))
        except ValueError as exc:
            errors.append(f"line {lineno}: {exc}")
    if errors:
        raise ScoreFormatError("; ".join(errors))
    return records


def read_score_csv(path: str | Path) -> list[ScoreRecord]:
    return parse_score_csv(Path(path).read_text())


def aggregate_scores(records: Iterable[ScoreRecord]) -> dict[str, GeneratorScore]:
    """Failure counts per generator and stream, per-test counts, systematic failures.

    A failure is a p-value outside [0.001, 0.999]; a test fails systematically
    when it fails at every seed present for that generator and stream.
    """
    seeds: dict[tuple[str, str], set[int]] = defaultdict(set)
    failed_at: dict[tuple[str, str, str], set[int]] = defaultdict(set)
    scores: dict[str, GeneratorScore] = {}
    for r in records:
        score = scores.setdefault(r.generator, GeneratorScore(r.generator))
        seeds[r.generator, r.stream].add(r.seed)
        if r.failed:
            score.failures[r.stream] += 1
            key = (r.stream, r.test)
            score.per_test[key] = score.per_test.get(key, 0) + 1
            failed_at[r.generator, r.stream, r.test].add(r.seed)
    for (gen, stream, test), where in failed_at.items():
        if where == seeds[gen, stream]:
            scores[gen].systematic[stream].append(test)
    for (gen, stream), s in seeds.items():
        scores[gen].seeds[stream] = len(s)
    for score in scores.values():
        for lst in score.systematic.values():
            lst.sort()
        score.per_test = dict(sorted(score.per_test.items()))
    return dict(sorted(scores.items()))


def format_score_table(scores: dict[str, GeneratorScore]) -> str:
    """Plain-text table: generator, S, R, combined failures, systematic tests."""
    name_w = max([9] + [len(g) for g in scores])
    lines = [f"{'Algorithm':<{name_w}} | {'S':>6} {'R':>6} | {'+':>6} | Systematic"]
    lines.append("-" * len(lines[0]) + "-" * 10)
    for gen, sc in sorted(scores.items(), key=lambda kv: (kv[1].total, kv[0])):
        syst = sorted(set(sc.systematic["S"]) | set(sc.systematic["R"]))
        lines.append(f"{gen:<{name_w}} | {sc.failures['S']:>6} {sc.failures['R']:>6} | "
                     f"{sc.total:>6} | {', '.join(syst) or '---'}")
    return "\n".join(lines) + "\n"


def format_escape_table(rows: Sequence[tuple[str, EscapeCurve]]) -> str:
    lines = [f"{'Algorithm':<24} | {'Mean':>7} {'Std dev':>8}"]
    for name, curve in rows:
        lines.append(f"{name:<24} | {curve.mean:7.4f} {curve.stddev:8.4f}")
    return "\n".join(lines) + "\n"
