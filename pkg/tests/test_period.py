import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from xorshiftstar import GF2Poly, XorshiftParams
from xorshiftstar.gf2 import min_poly, transform_of
from xorshiftstar.period import (
    FactorTable, FactorTableError, brute_force_period, candidates_highdim, candidates_single,
    certify, characteristic_poly, enumerate_64, enumerate_highdim, factor_table,
    has_small_factor, is_irreducible, is_primitive, is_probable_prime, min_poly_of,
)

FULL16 = (1 << 16) - 1


def _trial_division_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# --- primality and factor tables ---------------------------------------------------

@given(st.integers(0, 200_000))
def test_miller_rabin_matches_trial_division(n):
    assert is_probable_prime(n) == _trial_division_prime(n)


@pytest.mark.parametrize("p", [61, 89, 107, 127, 521, 607])
def test_mersenne_exponents(p):
    assert is_probable_prime((1 << p) - 1)
    assert not is_probable_prime((1 << p) + 1)


def test_carmichael_and_strong_pseudoprimes_rejected():
    for n in (561, 1105, 1729, 2047, 3215031751, 3825123056546413051):
        assert not is_probable_prime(n)


@pytest.mark.parametrize("n", [64, 1024, 4096])
def test_shipped_tables_verify(n):
    table = factor_table(n)
    assert table.n == n
    product = 1
    for p, m in zip(table.primes, table.multiplicities):
        product *= p ** m
    assert product == (1 << n) - 1


@pytest.mark.parametrize("n", [2, 4, 8, 16, 32, 128, 256, 512, 2048])
def test_derived_tables(n):
    assert factor_table(n).modulus == (1 << n) - 1


def test_missing_table_names_exponent():
    with pytest.raises(FactorTableError, match="2\\^96-1"):
        factor_table(96)


def test_bad_tables_rejected(tmp_path):
    with pytest.raises(FactorTableError, match="not prime"):
        FactorTable.parse("n=4\n15\n").verify()
    with pytest.raises(FactorTableError, match="does not divide"):
        FactorTable.parse("n=4\n3\n5\n7\n").verify()
    with pytest.raises(FactorTableError, match="multiply back"):
        FactorTable.parse("n=4\n3\n").verify()
    with pytest.raises(FactorTableError, match="line"):
        FactorTable.parse("n=4\nthree\n")
    with pytest.raises(FactorTableError):
        FactorTable.parse("3\n5\n")
    path = tmp_path / "f.txt"
    path.write_text("n=4\n3\n5\n")
    with pytest.raises(FactorTableError, match="n=4"):
        factor_table(8, path)
    assert factor_table(4, path).primes == (3, 5)


def test_table_round_trip_with_multiplicity():
    table = FactorTable.parse("n=6\n3^2\n7\n").verify()
    assert table.multiplicities == (2, 1)
    assert FactorTable.parse(table.dumps()) == table


# --- irreducibility and primitivity -------------------------------------------------

def test_smallest_primitive():
    assert is_primitive(GF2Poly.from_exponents([2, 1, 0]), FactorTable(2, (3,), (1,)))


def test_irreducible_but_not_primitive():
    p = GF2Poly.from_exponents([4, 3, 2, 1, 0])
    assert is_irreducible(p)
    assert oracles.order_of_x(p.bits) == 5
    assert not is_primitive(p, factor_table(4))


def test_degree_mismatch_rejected():
    with pytest.raises(ValueError):
        is_primitive(GF2Poly.from_exponents([3, 1, 0]), factor_table(4))


@given(st.integers(1 << 8, (1 << 9) - 1))
def test_primitivity_matches_order_oracle(bits):
    p = GF2Poly(bits)
    expected = bits & 1 == 1 and is_irreducible(p) and oracles.order_of_x(bits) == 255
    assert is_primitive(p, factor_table(8)) == expected


@given(st.integers(1 << 10, (1 << 11) - 1))
def test_irreducible_matches_factor_search(bits):
    # irreducible iff no factor of degree 1..5 divides
    p = GF2Poly(bits)
    has_factor = any((p % GF2Poly(d)).bits == 0 for d in range(2, 1 << 6))
    assert is_irreducible(p) == (not has_factor)


def test_small_factor_prefilter():
    p = GF2Poly.from_exponents([127, 1, 0])  # primitive trinomial
    assert not has_small_factor(p, 32)
    q = p * GF2Poly.from_exponents([5, 2, 0])
    assert has_small_factor(q, 8)
    assert has_small_factor(GF2Poly.from_exponents([6, 1]), 8)  # divisible by x


# --- characteristic polynomials of engines --------------------------------------------

def test_marsaglia_triple_is_full_period():
    cert = certify(XorshiftParams.single("A0", 13, 7, 17))
    assert cert.primitive and cert.poly.degree == 64


@pytest.mark.parametrize("variant", ["A0", "A1", "A2", "A3", "A4", "A5", "A6", "A7"])
def test_variants_share_characteristic_polynomial(variant):
    base = characteristic_poly(XorshiftParams.single("A0", 11, 31, 18))
    assert characteristic_poly(XorshiftParams.single(variant, 11, 31, 18)) == base
    assert characteristic_poly(XorshiftParams.single(variant, 18, 31, 11)) == base


def test_engine_poly_matches_matrix_poly():
    params = XorshiftParams.single("A1", 12, 25, 27)
    assert min_poly_of(params) == min_poly(transform_of(params))


def test_shortfall_is_reported():
    # a == c with A0 is never full period
    cert = certify(XorshiftParams.single("A0", 5, 7, 5))
    assert not cert.primitive


def test_candidate_counts():
    assert len(candidates_single(64)) == 63 * 63 * 64 // 2
    hd = candidates_highdim(64)
    assert all(a + b <= 64 for a, b, _ in hd)
    assert (31, 11, 30) in hd and (25, 3, 49) in hd


# --- scaled engines: certification vs brute force -------------------------------------

@pytest.fixture(scope="module")
def certified16():
    return enumerate_64(w=16)


def test_certified_w16_have_full_period(certified16):
    assert certified16
    for a, b, c, _ in certified16:
        assert brute_force_period(XorshiftParams.single("A0", a, b, c, w=16)) == FULL16


@given(st.integers(1, 15), st.integers(1, 15), st.integers(1, 15))
@settings(max_examples=40, deadline=None)
def test_certification_agrees_with_iteration_w16(a, b, c):
    params = XorshiftParams.single("A0", a, b, c, w=16)
    assert certify(params).primitive == (brute_force_period(params) == FULL16)


def test_known_non_primitive_w16():
    params = XorshiftParams.single("A0", 1, 1, 1, w=16)
    assert not certify(params).primitive
    assert brute_force_period(params) < FULL16


def test_highdim_w8_t2():
    found = enumerate_highdim(2, w=8)
    assert found
    for a, b, c, _ in found:
        assert brute_force_period(XorshiftParams.highdim(a, b, c, 2, w=8)) == FULL16


def test_highdim_w8_t2_rejections_are_short():
    accepted = {(a, b, c) for a, b, c, _ in enumerate_highdim(2, w=8)}
    rng = random.Random(3)
    rejected = [t for t in candidates_highdim(8) if t not in accepted]
    for a, b, c in rng.sample(rejected, 10):
        assert brute_force_period(XorshiftParams.highdim(a, b, c, 2, w=8)) < FULL16


def test_brute_force_limit():
    with pytest.raises(ValueError):
        brute_force_period(XorshiftParams.single("A0", 13, 7, 17))


def test_enumeration_needs_table():
    with pytest.raises(FactorTableError):
        enumerate_highdim(3, w=32)
    with pytest.raises(ValueError):
        enumerate_highdim(1)
