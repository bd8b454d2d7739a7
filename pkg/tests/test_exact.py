from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from siegel_sturm.errors import InvalidInput, NotPIntegral, RamifiedPrime
from siegel_sturm.exact import (
    CyclotomicInteger,
    cyclotomic_factor_mod_p,
    cyclotomic_polynomial,
    euler_phi,
    format_rational,
    is_p_integral,
    is_prime,
    mod_p,
    multiplicative_order,
    parse_rational,
    reduce_mod_ideal,
    root_of_unity,
    vanishes_mod,
)

X = sympy.Symbol("x")
ORDERS = [1, 2, 3, 4, 5, 6, 8, 9, 12, 18, 50]


def sympy_poly(coeffs):
    return sum(sympy.Rational(c.numerator, c.denominator) * X**i for i, c in enumerate(coeffs))


def cyclotomic(M, draw_coeffs):
    n = euler_phi(M)
    return CyclotomicInteger(M, tuple(Fraction(c) for c in draw_coeffs[:n]) + (Fraction(0),) * max(0, n - len(draw_coeffs)))


small_ints = st.lists(st.integers(-20, 20), min_size=0, max_size=20)


def test_rational_helpers():
    assert format_rational(Fraction(-3, 6)) == "-1/2"
    assert format_rational(4) == "4/1"
    assert parse_rational(" 6/4 ") == Fraction(3, 2)
    assert parse_rational("-7") == -7
    with pytest.raises(InvalidInput):
        parse_rational("1/0")
    with pytest.raises(InvalidInput):
        parse_rational("0.5.1")
    assert is_p_integral(Fraction(1, 6), 5)
    assert not is_p_integral(Fraction(1, 10), 5)
    assert mod_p(Fraction(1, 2), 7) == 4
    with pytest.raises(NotPIntegral):
        mod_p(Fraction(3, 7), 7, where="here")


def test_number_theory_helpers():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert [euler_phi(n) for n in range(1, 13)] == [int(sympy.totient(n)) for n in range(1, 13)]
    assert multiplicative_order(2, 7) == 3
    assert multiplicative_order(5, 18) == int(sympy.n_order(5, 18))


@pytest.mark.parametrize("M", [1, 2, 3, 4, 6, 9, 12, 15, 18, 20, 36, 50])
def test_cyclotomic_polynomial_matches_sympy(M):
    expected = sympy.Poly(sympy.cyclotomic_poly(M, X), X).all_coeffs()[::-1]
    assert list(cyclotomic_polynomial(M)) == [int(c) for c in expected]


def test_small_identities():
    z3 = root_of_unity(1, 3)
    assert z3 + z3 * z3 == CyclotomicInteger.from_int(-1, 3)
    assert (z3 - 1).norm() == 3
    assert root_of_unity(7, 5) == root_of_unity(2, 5)
    assert root_of_unity(1, 4) ** 2 == CyclotomicInteger.from_int(-1, 4)
    assert root_of_unity(1, 12) ** 12 == CyclotomicInteger.from_int(1, 12)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ORDERS), small_ints, small_ints, small_ints)
def test_ring_axioms(M, a, b, c):
    x, y, z = cyclotomic(M, a), cyclotomic(M, b), cyclotomic(M, c)
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x - x == CyclotomicInteger.zero(M)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ORDERS), small_ints, small_ints)
def test_multiplication_matches_sympy_remainder(M, a, b):
    x, y = cyclotomic(M, a), cyclotomic(M, b)
    phi = sympy.cyclotomic_poly(M, X)
    expected = sympy.Poly(sympy.rem(sympy.expand(sympy_poly(x.coeffs) * sympy_poly(y.coeffs)), phi, X), X)
    got = sympy.Poly(sympy_poly((x * y).coeffs) + 0 * X, X)
    assert sympy.expand(got.as_expr() - expected.as_expr()) == 0


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 4, 5, 7, 8, 9, 12]), small_ints)
def test_norm_matches_resultant(M, a):
    x = cyclotomic(M, a)
    oracle = sympy.resultant(sympy.cyclotomic_poly(M, X), sympy_poly(x.coeffs) + 0 * X, X)
    assert x.norm() == Fraction(int(sympy.numer(oracle)), int(sympy.denom(oracle)))


def test_json_round_trip():
    x = CyclotomicInteger(6, (Fraction(1, 2), Fraction(-3)))
    assert x.to_json() == {"order": 6, "coeffs": ["1/2", "-3"]}
    assert CyclotomicInteger.from_json(x.to_json()) == x
    assert not x.is_integral()


def _brute_irreducible(f, p):
    """f monic, low-first; no monic factor of degree 1..deg/2."""
    f = [c % p for c in f]
    n = len(f) - 1
    for d in range(1, n // 2 + 1):
        for tail in product(range(p), repeat=d):
            g = list(tail) + [1]
            r = list(f)
            for i in range(n, d - 1, -1):
                c = r[i]
                if c:
                    for j in range(d + 1):
                        r[i - d + j] = (r[i - d + j] - c * g[j]) % p
            if not any(r[:d]):
                return False
    return True


@pytest.mark.parametrize("M,p", [(4, 5), (12, 5), (5, 2), (5, 3), (7, 2), (9, 2), (8, 3), (18, 5), (18, 7), (15, 2)])
def test_factor_is_irreducible_divisor_of_expected_degree(M, p):
    f = cyclotomic_factor_mod_p(M, p)
    assert f[-1] == 1 and len(f) - 1 == multiplicative_order(p, M)
    assert _brute_irreducible(f, p)
    phi = sympy.Poly(list(reversed(cyclotomic_polynomial(M))), X, modulus=p)
    assert phi.rem(sympy.Poly(list(reversed(f)), X, modulus=p)).is_zero


def test_factor_examples():
    assert cyclotomic_factor_mod_p(4, 5) == (2, 1)
    assert cyclotomic_factor_mod_p(12, 5) == (4, 2, 1)
    with pytest.raises(RamifiedPrime):
        cyclotomic_factor_mod_p(6, 3)


def test_factor_is_lexicographically_least():
    # all monic linear factors of Phi_4 mod 13: roots 5 and 8
    assert cyclotomic_factor_mod_p(4, 13) == (5, 1)


def test_reduction_examples():
    assert reduce_mod_ideal(CyclotomicInteger.from_int(3, 5) * root_of_unity(1, 5), 3).is_zero()
    assert not reduce_mod_ideal(root_of_unity(1, 5) - 1, 11).is_zero()
    assert reduce_mod_ideal(Fraction(1, 2), 7, order=4).value == (4, 0)
    with pytest.raises(NotPIntegral):
        reduce_mod_ideal(CyclotomicInteger(3, (Fraction(1, 7), Fraction(0))), 7)
    assert vanishes_mod(Fraction(14, 3), 7)
    assert not vanishes_mod(root_of_unity(2, 9), 5)


@settings(max_examples=40, deadline=None)
@given(st.integers(-500, 500), st.sampled_from([2, 3, 5, 7, 11, 13]), st.sampled_from([1, 4, 9, 20]))
def test_rational_integer_vanishes_iff_divisible(n, p, M):
    if M % p == 0:
        return
    assert reduce_mod_ideal(n, p, order=M).is_zero() == (n % p == 0)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(4, 5), (9, 2), (12, 7), (18, 5), (15, 2), (8, 3)]), small_ints, small_ints)
def test_reduction_is_ring_homomorphism(Mp, a, b):
    M, p = Mp
    x, y = cyclotomic(M, a), cyclotomic(M, b)
    rx, ry = reduce_mod_ideal(x, p), reduce_mod_ideal(y, p)
    assert reduce_mod_ideal(x + y, p) == rx + ry
    assert reduce_mod_ideal(x * y, p) == rx * ry


def test_norm_divisible_by_p_when_residue_vanishes():
    # zeta_5 - 3 lies in the prime above 11 generated by (11, zeta_5 - 3) iff 3 is a root
    root = next(r for r in range(11) if pow(r, 5, 11) == 1 and r != 1)
    x = root_of_unity(1, 5) - root
    f = cyclotomic_factor_mod_p(5, 11)
    assert x.norm() % 11 == 0
    assert reduce_mod_ideal(x, 11).is_zero() == (f == (-root % 11, 1))
