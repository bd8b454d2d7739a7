import json
from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from siegel_sturm.errors import IncompleteData, InvalidInput, ShapeMismatch
from siegel_sturm.exact import root_of_unity
from siegel_sturm.expansions import (
    IndexMatrix,
    SiegelExpansion,
    bareiss_det,
    enumerate_indices,
    index_keys,
    is_signed_permutation,
    linear_combine,
    max_diag,
    pointwise_multiply,
    psd_check,
    unimodular_transform,
)
from siegel_sturm.generators import classical_degree1


def sym_matrices(n, lo=-6, hi=6):
    return st.lists(st.integers(lo, hi), min_size=n * (n + 1) // 2, max_size=n * (n + 1) // 2).map(
        lambda xs: _fill(n, xs)
    )


def _fill(n, xs):
    S = [[0] * n for _ in range(n)]
    it = iter(xs)
    for i in range(n):
        for j in range(i, n):
            S[i][j] = S[j][i] = next(it)
    return S


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_bareiss_matches_sympy(rows):
    assert bareiss_det(rows) == sympy.Matrix(rows).det()


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4).flatmap(sym_matrices))
def test_psd_matches_eigen_free_oracle(S):
    # oracle: LDL-style test via sympy's exact positive semidefinite predicate
    assert psd_check(S) == bool(sympy.Matrix(S).is_positive_semidefinite)


def test_psd_rational_input():
    assert psd_check([[Fraction(1, 2), Fraction(1, 3)], [Fraction(1, 3), Fraction(1, 4)]])
    assert not psd_check([[Fraction(1, 2), 1], [1, Fraction(1, 2)]])
    with pytest.raises(InvalidInput):
        psd_check([[1, 2], [0, 1]])


def test_index_matrix():
    T = IndexMatrix.from_T([[1, Fraction(1, 2)], [Fraction(1, 2), 1]])
    assert T.S == ((2, 1), (1, 2))
    assert T.max_diagonal() == 1
    assert T.T[0][1] == Fraction(1, 2)
    with pytest.raises(InvalidInput):
        IndexMatrix.from_T([[Fraction(1, 3)]])
    quarter = IndexMatrix.from_T([[Fraction(1, 4)]], denominator=4)
    assert quarter.S == ((2,),) and quarter.diagonal == (Fraction(1, 4),)
    assert max_diag(((6, 0), (0, 2)), 4) == Fraction(3, 4)


def _brute_keys(g, D):
    out = []
    n_off = g * (g - 1) // 2
    for diag in product(range(0, 2 * D + 1, 2), repeat=g):
        for off in product(range(-2 * D, 2 * D + 1), repeat=n_off):
            S = [[0] * g for _ in range(g)]
            it = iter(off)
            for i in range(g):
                S[i][i] = diag[i]
                for j in range(i + 1, g):
                    S[i][j] = S[j][i] = next(it)
            if sympy.Matrix(S).is_positive_semidefinite:
                out.append(tuple(map(tuple, S)))
    return sorted(out)


@pytest.mark.parametrize("g,D", [(1, 4), (2, 0), (2, 1), (2, 2), (3, 1)])
def test_index_enumeration_matches_brute_force(g, D):
    assert list(index_keys(g, D)) == _brute_keys(g, D)


def test_index_enumeration_small_counts():
    assert len(index_keys(1, 5)) == 6
    assert len(index_keys(2, 1)) == 8
    assert [T.S for T in enumerate_indices(2, 0)] == [((0, 0), (0, 0))]


def _f(degree, weight, D, coeffs, **kw):
    return SiegelExpansion(degree, weight, D, True, coeffs, **kw)


def test_validation():
    with pytest.raises(InvalidInput):
        _f(2, 4, 1, {((2, 3), (3, 2)): 1})  # not PSD
    with pytest.raises(InvalidInput):
        _f(1, 4, 1, {((4,),): 1})  # outside truncation
    with pytest.raises(InvalidInput):
        _f(1, 4, 2, {((1,),): 1})  # odd diagonal, denominator 1
    with pytest.raises(InvalidInput):
        _f(2, 4, 1, {((2, 1), (0, 2)): 1})  # not symmetric
    F = _f(1, 4, 2, {((4,),): 2, ((0,),): 1, ((2,),): 0})
    assert list(F.coefficients) == [((0,),), ((4,),)]  # sorted, zeros dropped


def test_coefficient_access():
    F = _f(2, 4, 1, {((2, 1), (1, 2)): 7})
    assert F[((2, 1), (1, 2))] == 7
    assert F.coefficient([[1, Fraction(1, 2)], [Fraction(1, 2), 1]]) == 7
    assert F[IndexMatrix(((0, 0), (0, 0)))] == 0


def test_json_round_trip_and_order():
    F = _f(2, 4, 1, {((2, -1), (-1, 2)): Fraction(-3, 2), ((0, 0), (0, 0)): 1, ((2, 0), (0, 0)): 5})
    obj = json.loads(F.dumps())
    assert [e["S"] for e in obj["coefficients"]] == [[[0, 0], [0, 0]], [[2, -1], [-1, 2]], [[2, 0], [0, 0]]]
    assert obj["coefficients"][1]["value"] == "-3/2"
    assert SiegelExpansion.from_json(obj) == F
    M = 6
    G = _f(1, 4, 1, {((2,),): root_of_unity(1, M) + 2}, denominator=4, cyclotomic_order=M)
    assert SiegelExpansion.from_json(json.loads(G.dumps())) == G


def test_json_rejects_bad_input():
    obj = json.loads(_f(1, 4, 1, {((2,),): 1}).dumps())
    obj["coefficients"][0]["S"] = [[4]]
    with pytest.raises(InvalidInput):
        SiegelExpansion.from_json(obj)
    obj["coefficients"][0]["S"] = [[-2]]
    with pytest.raises(InvalidInput):
        SiegelExpansion.from_json(obj)
    with pytest.raises(InvalidInput):
        SiegelExpansion.from_json({"kind": "jacobi"})


def _series(F):
    return [F[((2 * n,),)] for n in range(F.truncation + 1)]


def _q_mul(a, b):
    return [sum(a[i] * b[n - i] for i in range(n + 1)) for n in range(min(len(a), len(b)))]


def test_product_matches_q_series_oracle():
    E4, E6 = classical_degree1("E4", 8), classical_degree1("E6", 8)
    P = pointwise_multiply(E4, E6)
    assert P.weight == 10
    assert _series(P) == _q_mul(_series(E4), _series(E6))
    # E4^2 = E8 = 1 + 480 sum sigma_7(n) q^n
    E8 = pointwise_multiply(E4, E4)
    assert _series(E8) == [1] + [480 * sum(d**7 for d in range(1, n + 1) if n % d == 0) for n in range(1, 9)]


def test_product_degree_two_oracle():
    F = _f(2, 2, 2, {((0, 0), (0, 0)): 1, ((2, 1), (1, 2)): 3, ((2, 0), (0, 0)): 2})
    P = pointwise_multiply(F, F)
    assert P[((4, 2), (2, 4))] == 9
    assert P[((4, 1), (1, 2))] == 12
    assert P[((2, 1), (1, 2))] == 6


def test_product_needs_complete():
    F = SiegelExpansion(1, 4, 2, False, {((0,),): 1})
    with pytest.raises(IncompleteData):
        pointwise_multiply(F, F)


def test_linear_combine():
    E4 = classical_degree1("E4", 5)
    F = linear_combine([(2, E4), (-1, E4), (-1, E4)])
    assert F.is_zero() and F.complete
    G = linear_combine([(1, E4), (Fraction(1, 2), classical_degree1("E4", 3))])
    assert G.truncation == 3 and G[((2,),)] == 360
    with pytest.raises(ShapeMismatch):
        linear_combine([(1, E4), (1, classical_degree1("E6", 5))])


def test_unimodular_transform_round_trip():
    F = _f(2, 2, 2, {((0, 0), (0, 0)): 1, ((2, 1), (1, 2)): 3, ((4, 1), (1, 0 + 2)): 5})
    U = [[0, 1], [-1, 0]]
    assert is_signed_permutation(U)
    G = unimodular_transform(F, U)
    assert G.complete
    assert unimodular_transform(G, [[0, -1], [1, 0]]) == F
    # G(T) = F(U^t T U)
    assert G[((2, -1), (-1, 2))] == 3
    H = unimodular_transform(F, [[1, 1], [0, 1]])
    assert not H.complete
    with pytest.raises(InvalidInput):
        unimodular_transform(F, [[2, 0], [0, 1]])
