"""Compiled inner loops for bulk output generation.

Only 64-bit words are handled here; scaled engines go through the pure
Python step functions in :mod:`xorshiftstar.engines`.
"""

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def popcount64(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@njit(cache=True, inline="always")
def _step_single(x, lefts, shifts):
    for k in range(3):
        if lefts[k]:
            x ^= x << shifts[k]
        else:
            x ^= x >> shifts[k]
    return x


@njit(cache=True, inline="always")
def _step_hd(s, p, t, a, b, c):
    s0 = s[p]
    p = p + 1
    if p == t:
        p = 0
    s1 = s[p]
    s1 ^= s1 << a
    s[p] = s1 ^ s0 ^ (s1 >> b) ^ (s0 >> c)
    return p


@njit(cache=True)
def fill_single(x, lefts, shifts, mult, out):
    """Advance a one-word engine ``len(out)`` times; return the final state."""
    for i in range(out.shape[0]):
        x = _step_single(x, lefts, shifts)
        out[i] = x * mult
    return x


@njit(cache=True)
def fill_hd(s, p, a, b, c, mult, out):
    """Advance a multi-word engine in place; return the final index ``p``."""
    t = s.shape[0]
    for i in range(out.shape[0]):
        p = _step_hd(s, p, t, a, b, c)
        out[i] = s[p] * mult
    return p


@njit(cache=True)
def checksum_single(x, lefts, shifts, mult, count):
    acc = np.uint64(0)
    for _ in range(count):
        x = _step_single(x, lefts, shifts)
        acc += x * mult
    return acc, x


@njit(cache=True)
def checksum_hd(s, p, a, b, c, mult, count):
    t = s.shape[0]
    acc = np.uint64(0)
    for _ in range(count):
        p = _step_hd(s, p, t, a, b, c)
        acc += s[p] * mult
    return acc, p


@njit(cache=True)
def popcount_sums_single(seeds, lefts, shifts, mult, count):
    """Sum over seeds of popcount(output_k), for k < count."""
    sums = np.zeros(count, dtype=np.int64)
    for i in range(seeds.shape[0]):
        x = seeds[i]
        for k in range(count):
            x = _step_single(x, lefts, shifts)
            sums[k] += popcount64(x * mult)
    return sums


@njit(cache=True)
def popcount_sums_hd(states, a, b, c, mult, count):
    sums = np.zeros(count, dtype=np.int64)
    t = states.shape[1]
    s = np.empty(t, dtype=np.uint64)
    for i in range(states.shape[0]):
        s[:] = states[i]
        p = 0
        for k in range(count):
            p = _step_hd(s, p, t, a, b, c)
            sums[k] += popcount64(s[p] * mult)
    return sums


@njit(cache=True)
def rank_rows(rows):
    """GF(2) rank of up to 64 rows packed into uint64 words."""
    work = rows.copy()
    n = work.shape[0]
    rank = 0
    for col in range(63, -1, -1):
        bit = np.uint64(1) << np.uint64(col)
        pivot = -1
        for r in range(rank, n):
            if work[r] & bit:
                pivot = r
                break
        if pivot < 0:
            continue
        tmp = work[pivot]
        work[pivot] = work[rank]
        work[rank] = tmp
        for r in range(n):
            if r != rank and work[r] & bit:
                work[r] ^= tmp
        rank += 1
        if rank == n:
            break
    return rank


@njit(cache=True)
def batch_ranks(matrices):
    out = np.empty(matrices.shape[0], dtype=np.int64)
    for i in range(matrices.shape[0]):
        out[i] = rank_rows(matrices[i])
    return out
