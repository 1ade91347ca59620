import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from xorshiftstar import (
    M2, M8, M32, SHIPPED, X64_STAR, X1024_STAR, X4096_STAR, Engine, EngineState,
    OutputMode, Variant, XorshiftParams, emit, next64, next_highdim, next_scrambled,
    seed_schedule,
)
from xorshiftstar.engines import encode, next_linear, reverse_bits64

MASK = (1 << 64) - 1
seeds64 = st.integers(min_value=1, max_value=MASK)


# --- parameters ----------------------------------------------------------------

def test_multipliers_are_odd_and_one_mod_four():
    for m in (M32, M8, M2):
        assert m % 4 == 1


@pytest.mark.parametrize("kwargs", [
    dict(variant="A0", a=0, b=1, c=1),
    dict(variant="A0", a=64, b=1, c=1),
    dict(variant="A0", a=1, b=1, c=1, multiplier=2),
    dict(variant="A0", a=1, b=1, c=1, multiplier=1 << 64 | 1),
    dict(variant="HD", a=1, b=1, c=1, t=1),
    dict(variant="A1", a=1, b=1, c=1, t=2),
    dict(variant="A9", a=1, b=1, c=1),
    dict(variant="A0", a=4, b=1, c=1, w=4),
])
def test_invalid_parameters_rejected(kwargs):
    with pytest.raises(ValueError):
        XorshiftParams(**kwargs)


def test_exchangeable_variants_are_normalized():
    p = XorshiftParams.single("A4", 30, 7, 5)
    assert (p.a, p.b, p.c) == (5, 7, 30) and p.reordered
    assert p == XorshiftParams.single("A4", 5, 7, 30)
    assert not XorshiftParams.single("A0", 30, 7, 5).reordered
    # the swap keeps the same program: a and c are adjacent same-direction shifts
    q = XorshiftParams.single("A4", 5, 7, 30)
    for v in (1, 0xDEADBEEF, MASK):
        s1, s2 = EngineState([v]), EngineState([v])
        assert next64(s1, p) == next64(s2, XorshiftParams.single("A4", 30, 7, 5)) == next64(
            EngineState([v]), q)


def test_identifiers():
    assert X64_STAR.linear_id == "A1(12,25,27)"
    assert str(X64_STAR).endswith("*M32")
    assert X1024_STAR.linear_id == "HD(31,11,30):t=16"
    assert X1024_STAR.n_bits == 1024 and X4096_STAR.n_bits == 4096
    assert set(SHIPPED) == {"x64star", "x1024star", "x4096star"}


# --- states --------------------------------------------------------------------

def test_zero_seed_rejected():
    with pytest.raises(ValueError):
        EngineState.seeded([0, 0])
    with pytest.raises(ValueError):
        Engine(X64_STAR, 0)
    with pytest.raises(ValueError):
        EngineState.from_int(1 << 64, 1)


def test_state_serialization_round_trip():
    st_ = EngineState([1, 2, 3, MASK], 2)
    assert EngineState.loads(st_.dumps()) == st_
    assert EngineState.loads(st_.dumps(hex=False)) == st_


def test_vector_logical_order():
    s = EngineState([10, 20, 30], 1)
    v = s.to_vector()
    assert [(v >> (64 * j)) & MASK for j in range(3)] == [20, 30, 10]
    assert EngineState.from_vector(v, 3, p=1) == s


# --- one-word engines ----------------------------------------------------------

def test_shipped_64_against_transcription():
    expected, _ = oracles.xorshift64star_a1(1, 12, 25, 27, M32, 1000)
    assert Engine(X64_STAR, 1).take(1000) == expected


def test_scrambled_is_linear_times_multiplier():
    lin, star = EngineState([1]), EngineState([1])
    for _ in range(1000):
        assert next_scrambled(star, X64_STAR) == next64(lin, X64_STAR) * M32 & MASK
    assert lin == star


def test_multiplier_one_is_identity():
    p1 = XorshiftParams.single("A1", 12, 25, 27, multiplier=1)
    assert Engine(p1, 7).take(100) == Engine(p1.unscrambled(), 7).take(100)


def test_next_scrambled_requires_multiplier():
    with pytest.raises(ValueError):
        next_scrambled(EngineState([1]), X64_STAR.unscrambled())


@given(seeds64, st.sampled_from(list(SHIPPED.values())))
@settings(max_examples=20, deadline=None)
def test_low_two_bits_unscrambled(seed, params):
    star = Engine(params, seed).fill(2000)
    raw = Engine(params.unscrambled(), seed).fill(2000)
    assert np.array_equal(star & np.uint64(3), raw & np.uint64(3))


@pytest.mark.parametrize("variant", [v for v in Variant if v is not Variant.HD])
def test_compiled_fill_matches_python(variant):
    params = XorshiftParams.single(variant, 11, 31, 18, multiplier=M32)
    fast, slow = Engine(params, 12345), Engine(params, 12345)
    assert fast.fill(500).tolist() == slow.take(500)
    assert fast.state == slow.state


# --- multi-word engines --------------------------------------------------------

def test_highdim_against_transcription():
    words = [1] + [0] * 15
    ref = oracles.Xorshift1024Star(words)
    eng = Engine(X1024_STAR, words)
    assert eng.take(2000) == [ref.next() for _ in range(2000)]
    assert eng.state.p == ref.p and eng.state.words == ref.s


@pytest.mark.parametrize("params", [X1024_STAR, X4096_STAR], ids=str)
def test_compiled_highdim_matches_python(params):
    fast, slow = Engine(params, 99), Engine(params, 99)
    assert fast.fill(3 * params.t + 5).tolist() == slow.take(3 * params.t + 5)
    assert fast.state == slow.state
    assert fast.checksum(1000) == sum(slow.take(1000)) & MASK


@pytest.mark.parametrize("params", [X1024_STAR.unscrambled(), X4096_STAR.unscrambled()], ids=str)
def test_last_t_outputs_are_the_state(params):
    state = EngineState.from_int(0x1234567, params.t)
    outs = [next_highdim(state, params) for _ in range(params.t + 3)]
    assert sorted(outs[-params.t:]) == sorted(state.words)
    # in circular order the most recent output sits at p
    assert state.words[state.p] == outs[-1]


def test_highdim_requires_two_words():
    with pytest.raises(ValueError):
        next_highdim(EngineState([1]), X64_STAR)


def test_4096_long_run_round_trip():
    eng = Engine(X4096_STAR, 1)
    eng.fill(10**6)
    clone = Engine(X4096_STAR, EngineState.loads(eng.state.dumps()))
    assert eng.fill(1000).tolist() == clone.fill(1000).tolist()


# --- seed schedule ---------------------------------------------------------------

def test_seed_schedule_big_integer_oracle():
    s64 = seed_schedule(64)
    assert len(s64) == 100
    assert s64[0].words == [1]
    assert s64[1].words == [1 + (1 << 64) // 100]
    s1024 = seed_schedule(1024)
    value = 1 + 99 * ((1 << 1024) // 100)
    assert s1024[99].words[0] == value & MASK
    assert s1024[99].words[15] == value >> 960
    assert s1024[99].to_vector() == value and s1024[99].p == 0


# --- output framing -------------------------------------------------------------

def _raw(params, seed, count):
    return emit(EngineState.from_int(seed, params.t), params, OutputMode.RAW64, count)


def test_interleaved_reassembles_raw():
    raw = np.frombuffer(_raw(X64_STAR, 3, 256), dtype="<u8")
    halves = np.frombuffer(emit(EngineState([3]), X64_STAR, OutputMode.INTERLEAVED32, 256),
                           dtype="<u4").astype(np.uint64)
    assert np.array_equal((halves[1::2] << np.uint64(32)) | halves[0::2], raw)


def test_reversed_is_involution():
    raw = np.frombuffer(_raw(X1024_STAR, 5, 300), dtype="<u8")
    rev = np.frombuffer(encode(raw, OutputMode.REVERSED64), dtype="<u8")
    assert encode(rev, OutputMode.REVERSED64) == raw.tobytes()
    assert int(rev[0]) == int(f"{int(raw[0]):064b}"[::-1], 2)


def test_unit_interval():
    assert struct.unpack("<d", encode(np.array([0], dtype=np.uint64), OutputMode.UNIT_INTERVAL)) \
        == (0.0,)
    vals = np.frombuffer(encode(np.array([MASK, 1 << 63], dtype=np.uint64),
                                OutputMode.UNIT_INTERVAL), dtype="<f8")
    assert vals[0] < 1.0 and vals[1] == 0.5


def test_emit_advances_state_and_is_deterministic():
    a, b = EngineState([9]), EngineState([9])
    first = emit(a, X64_STAR, OutputMode.RAW64, 10) + emit(a, X64_STAR, OutputMode.RAW64, 10)
    assert first == emit(b, X64_STAR, OutputMode.RAW64, 20)
    assert emit(EngineState([9]), X64_STAR, OutputMode.RAW64, 0) == b""


def test_reverse_bits_vectorized():
    words = np.array([1, 2, MASK, 0x8000000000000000], dtype=np.uint64)
    assert reverse_bits64(words).tolist() == [1 << 63, 1 << 62, MASK, 1]


def test_next_linear_dispatch():
    s = EngineState([1])
    assert next_linear(s, X64_STAR) == oracles.xorshift64star_a1(1, 12, 25, 27, 1, 1)[1]


def test_docstring_examples():
    import doctest

    from xorshiftstar import engines
    assert doctest.testmod(engines).failed == 0
