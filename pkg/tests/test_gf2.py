import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entroq.gf2 import (IRREDUCIBLE, DeltaBiasedSet, GFField, XorUniversalFamily, aghp_construct, aghp_degree,
                        aghp_set, clmul, gf_mul, is_irreducible, measure_bias, measure_bias_direct,
                        xor_universal_counts, xu_eval)


def long_division_remainder(num: list[int], den: list[int]) -> list[int]:
    # coefficient lists, highest degree first; schoolbook division over GF(2)
    num = list(num)
    while len(num) >= len(den):
        if num[0]:
            for i, c in enumerate(den):
                num[i] ^= c
        num.pop(0)
    return num


def as_coeffs(x: int, width: int) -> list[int]:
    return [int(c) for c in format(x, f"0{width}b")]


def from_coeffs(c: list[int]) -> int:
    return int("".join(map(str, c)) or "0", 2)


def test_gf8_worked_example():
    f = GFField(3)
    assert f.modulus == 0b1011
    assert gf_mul(f, 0b010, 0b100) == 0b011


@pytest.mark.parametrize("m", [2, 3, 4])
def test_multiplication_matches_long_division(m):
    f = GFField(m)
    for x in range(f.order):
        for y in range(f.order):
            prod = as_coeffs(clmul(x, y), 2 * m)
            rem = long_division_remainder(prod, as_coeffs(f.modulus, m + 1))
            assert gf_mul(f, x, y) == from_coeffs(rem)


@pytest.mark.parametrize("m", sorted(IRREDUCIBLE))
def test_table_entries_are_irreducible(m):
    poly = IRREDUCIBLE[m]
    assert poly.bit_length() - 1 == m
    assert is_irreducible(poly)


def test_reducible_detected():
    assert not is_irreducible(0b101)  # x^2+1 = (x+1)^2
    assert not is_irreducible(0b10001)  # x^4+1


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_field_axioms(m):
    f = GFField(m)
    for x in range(1, f.order):
        assert any(f.mul(x, y) == 1 for y in range(1, f.order))  # inverse exists
        assert f.pow(x, f.order - 1) == 1


def test_gf_mul_rejects_out_of_range():
    with pytest.raises(ValueError):
        gf_mul(GFField(3), 8, 1)


@pytest.mark.parametrize("n,m", [(2, 2), (4, 3), (8, 4), (3, 5)])
def test_aghp_bias_within_bound(n, m):
    s = aghp_set(n, m)
    assert len(s) == 4 ** m
    assert s.delta_bound == pytest.approx((n - 1) / 2 ** m)
    assert measure_bias(s.strings, n) <= s.delta_bound + 1e-12


@pytest.mark.parametrize("n,m", [(2, 2), (4, 3), (5, 2)])
def test_bias_transform_matches_direct(n, m):
    s = aghp_set(n, m)
    assert measure_bias(s.strings, n) == pytest.approx(measure_bias_direct(s.strings, n), abs=1e-12)


def test_bias_of_special_sets():
    assert measure_bias(list(range(16)), 4) == 0.0
    assert measure_bias([0], 3) == 1.0


def test_aghp_degree():
    assert aghp_degree(1, 0.3) == 1
    assert aghp_degree(8, 7 / 16) == 4
    assert aghp_degree(8, 0.4) == 5
    with pytest.raises(ValueError):
        aghp_degree(4, 0.0)
    s = aghp_construct(6, 0.5)
    assert s.delta_bound <= 0.5


def test_aghp_rejects_huge_sets():
    with pytest.raises(ValueError):
        aghp_set(4, 17)


def test_hex_round_trip(tmp_path):
    s = aghp_set(5, 2)
    p = tmp_path / "set.hex"
    s.save(p)
    back = DeltaBiasedSet.load(p, 5)
    assert back.strings == s.strings
    assert back.delta_bound == pytest.approx(measure_bias(s.strings, 5))
    with pytest.raises(ValueError):
        DeltaBiasedSet.from_hex_lines("ff\n", 4)


@pytest.mark.parametrize("w", [1, 2, 3, 4])
def test_xor_universal_exhaustive(w):
    fam = XorUniversalFamily(w)
    q = 1 << w
    for x in range(q):
        for y in range(q):
            if x != y:
                c = xor_universal_counts(fam, x, y)
                assert np.all(c * q == len(fam))


@pytest.mark.slow
@pytest.mark.parametrize("w", [6, 8])
def test_xor_universal_exhaustive_wide(w):
    fam = XorUniversalFamily(w)
    q = 1 << w
    rng = np.random.default_rng(w)
    for _ in range(20):
        x, y = rng.choice(q, 2, replace=False)
        assert np.all(xor_universal_counts(fam, int(x), int(y)) * q == len(fam))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.data())
def test_nested_sets_monotone_bias(n, data):
    m = data.draw(st.integers(1, 3))
    base = aghp_set(n, m).strings
    k = data.draw(st.integers(1, len(base)))
    sub = base[:k]
    # superset with the whole cube added can only pull bias towards 0 proportionally
    full = sub + list(range(1 << n)) * 4
    assert measure_bias(full, n) <= measure_bias(sub, n) * len(sub) / len(full) + 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.data())
def test_xu_linear_in_key(w, data):
    fam = XorUniversalFamily(w)
    i, k1, k2 = (data.draw(st.integers(0, (1 << w) - 1)) for _ in range(3))
    assert xu_eval(fam, i, k1 ^ k2) == xu_eval(fam, i, k1) ^ xu_eval(fam, i, k2)
    assert math.log2(len(fam)) == w
