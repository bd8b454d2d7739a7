"""Truncated Fourier expansions of scalar-valued Siegel modular forms.

An index T is stored as the integer symmetric matrix S = 2 d T, where d is a
denominator shared by the whole expansion (d = 1 for half-integral T, which
is all that level-one forms need). Keys are tuples of row tuples, so Python's
tuple ordering is the lexicographic order on the row-major flattening.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import gcd, isqrt
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import IncompleteData, InvalidInput, ShapeMismatch
from .exact import CyclotomicInteger, format_rational, parse_rational

Key = tuple[tuple[int, ...], ...]


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


@lru_cache(maxsize=1 << 16)
def _is_psd_key(S: Key) -> bool:
    n = len(S)
    for size in range(1, n + 1):
        for idx in combinations(range(n), size):
            if bareiss_det([[S[i][j] for j in idx] for i in idx]) < 0:
                return False
    return True


def as_key(matrix) -> Key:
    return tuple(tuple(int(x) for x in row) for row in matrix)


def is_symmetric(S) -> bool:
    n = len(S)
    return all(len(row) == n for row in S) and all(
        S[i][j] == S[j][i] for i in range(n) for j in range(i)
    )


@dataclass(frozen=True, order=True)
class IndexMatrix:
    """Rational symmetric T = S / (2 * denominator)."""

    S: Key
    denominator: int = 1

    def __post_init__(self):
        object.__setattr__(self, "S", as_key(self.S))
        if not is_symmetric(self.S):
            raise InvalidInput(f"index matrix is not symmetric: {self.S}")
        if self.denominator < 1:
            raise InvalidInput("index denominator must be positive")

    @classmethod
    def from_T(cls, T, denominator: int = 1) -> "IndexMatrix":
        S = [[Fraction(x) * 2 * denominator for x in row] for row in T]
        if any(x.denominator != 1 for row in S for x in row):
            raise InvalidInput(f"{T} is not on the lattice with denominator {denominator}")
        return cls(as_key(S), denominator)

    @property
    def degree(self) -> int:
        return len(self.S)

    @property
    def T(self) -> tuple[tuple[Fraction, ...], ...]:
        d2 = 2 * self.denominator
        return tuple(tuple(Fraction(x, d2) for x in row) for row in self.S)

    @property
    def diagonal(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(self.S[i][i], 2 * self.denominator) for i in range(self.degree))

    def max_diagonal(self) -> Fraction:
        return max(self.diagonal, default=Fraction(0))


def psd_check(T) -> bool:
    """Exact positive semi-definiteness via all principal minors.

    Accepts an IndexMatrix, an integer key, or any square matrix of rationals.
    """
    if isinstance(T, IndexMatrix):
        return _is_psd_key(T.S)
    rows = [[Fraction(x) for x in row] for row in T]
    if not is_symmetric(rows):
        raise InvalidInput("psd_check needs a symmetric matrix")
    den = 1
    for row in rows:
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
    return _is_psd_key(as_key([[x * den for x in row] for row in rows]))


def max_diag(S: Key, denominator: int = 1) -> Fraction:
    return Fraction(max((S[i][i] for i in range(len(S))), default=0), 2 * denominator)


@lru_cache(maxsize=64)
def index_keys(g: int, D: int) -> tuple[Key, ...]:
    """Keys S = 2T of all half-integral PSD T with integer diagonal in [0, D]."""
    if g < 1 or D < 0:
        raise InvalidInput(f"need g >= 1 and D >= 0, got g={g}, D={D}")
    out = []
    pairs = [(i, j) for i in range(g) for j in range(i + 1, g)]
    for diag in product(range(0, 2 * D + 1, 2), repeat=g):
        ranges = []
        for i, j in pairs:
            # Cauchy-Schwarz: s_ij^2 <= s_ii s_jj
            bound = isqrt(diag[i] * diag[j])
            ranges.append(range(-bound, bound + 1))
        for offdiag in product(*ranges):
            S = [[0] * g for _ in range(g)]
            for i in range(g):
                S[i][i] = diag[i]
            for (i, j), s in zip(pairs, offdiag):
                S[i][j] = S[j][i] = s
            key = as_key(S)
            if _is_psd_key(key):
                out.append(key)
    out.sort()
    return tuple(out)


def enumerate_indices(g: int, D: int) -> list[IndexMatrix]:
    return [IndexMatrix(S) for S in index_keys(g, D)]


def _is_zero(v) -> bool:
    return not v


@dataclass(frozen=True)
class SiegelExpansion:
    """Truncated Fourier series sum c(T) e(tr(TZ)) with all t_ii <= truncation.

    ``complete`` asserts that every nonzero coefficient inside the truncation
    is present; it is never inferred. ``cyclotomic_order`` is None for
    rational coefficients and M for coefficients in Q(zeta_M).
    """

    degree: int
    weight: int
    truncation: int
    complete: bool
    coefficients: Mapping[Key, object] = field(default_factory=dict)
    denominator: int = 1
    cyclotomic_order: int | None = None

    def __post_init__(self):
        if self.degree < 1:
            raise InvalidInput(f"degree must be >= 1, got {self.degree}")
        if self.truncation < 0:
            raise InvalidInput(f"truncation must be >= 0, got {self.truncation}")
        if self.denominator < 1:
            raise InvalidInput("denominator must be positive")
        limit = 2 * self.denominator * self.truncation
        clean = {}
        for S, value in self.coefficients.items():
            S = as_key(S)
            if len(S) != self.degree or not is_symmetric(S):
                raise InvalidInput(f"index {S} is not a symmetric {self.degree}x{self.degree} matrix")
            diag = [S[i][i] for i in range(self.degree)]
            if any(x > limit for x in diag):
                raise InvalidInput(f"index {S} exceeds the diagonal truncation {self.truncation}")
            if self.denominator == 1 and any(x % 2 for x in diag):
                raise InvalidInput(f"index {S} has a non-integral diagonal")
            if not _is_psd_key(S):
                raise InvalidInput(f"index {S} is not positive semi-definite")
            value = self._coerce_value(value)
            if not _is_zero(value):
                clean[S] = value
        object.__setattr__(self, "coefficients", dict(sorted(clean.items())))

    def _coerce_value(self, value):
        if self.cyclotomic_order is None:
            if isinstance(value, CyclotomicInteger):
                raise InvalidInput("cyclotomic value in a rational expansion")
            return Fraction(value)
        if isinstance(value, CyclotomicInteger):
            if value.order != self.cyclotomic_order:
                raise InvalidInput("cyclotomic order mismatch")
            return value
        return CyclotomicInteger.from_int(value, self.cyclotomic_order)

    # -- construction helpers --

    @classmethod
    def zero(cls, degree: int, weight: int, truncation: int, **kw) -> "SiegelExpansion":
        return cls(degree, weight, truncation, True, {}, **kw)

    @classmethod
    def one(cls, degree: int, truncation: int) -> "SiegelExpansion":
        return cls(degree, 0, truncation, True, {as_key([[0] * degree] * degree): 1})

    def replace(self, **changes) -> "SiegelExpansion":
        fields = dict(
            degree=self.degree, weight=self.weight, truncation=self.truncation,
            complete=self.complete, coefficients=self.coefficients,
            denominator=self.denominator, cyclotomic_order=self.cyclotomic_order,
        )
        fields.update(changes)
        return SiegelExpansion(**fields)

    # -- access --

    @property
    def scalar_zero(self):
        if self.cyclotomic_order is None:
            return Fraction(0)
        return CyclotomicInteger.zero(self.cyclotomic_order)

    def __getitem__(self, S) -> object:
        if isinstance(S, IndexMatrix):
            if S.denominator != self.denominator:
                S = IndexMatrix.from_T(S.T, self.denominator)
            S = S.S
        return self.coefficients.get(as_key(S), self.scalar_zero)

    def coefficient(self, T) -> object:
        """Coefficient at a rational matrix T (zero if not stored)."""
        return self[IndexMatrix.from_T(T, self.denominator)]

    def items(self) -> Iterator[tuple[Key, object]]:
        return iter(self.coefficients.items())

    def __len__(self):
        return len(self.coefficients)

    def is_zero(self) -> bool:
        return not self.coefficients

    def same_shape(self, other: "SiegelExpansion", weight: bool = True):
        if self.degree != other.degree:
            raise ShapeMismatch(f"degree {self.degree} vs {other.degree}")
        if weight and self.weight != other.weight:
            raise ShapeMismatch(f"weight {self.weight} vs {other.weight}")
        if self.denominator != other.denominator:
            raise ShapeMismatch(f"index denominator {self.denominator} vs {other.denominator}")
        if self.cyclotomic_order != other.cyclotomic_order:
            raise ShapeMismatch("scalar rings differ")

    # -- serialization --

    def to_json(self) -> dict:
        ring = "rational" if self.cyclotomic_order is None else {"cyclotomic": self.cyclotomic_order}
        return {
            "kind": "siegel",
            "degree": self.degree,
            "weight": self.weight,
            "truncation": self.truncation,
            "complete": self.complete,
            "denominator": self.denominator,
            "scalar_ring": ring,
            "coefficients": [
                {"S": [list(r) for r in S], "value": value_to_json(v)}
                for S, v in self.coefficients.items()
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "SiegelExpansion":
        if obj.get("kind") != "siegel":
            raise InvalidInput(f"expected a siegel expansion, got kind={obj.get('kind')!r}")
        try:
            order = _ring_order(obj["scalar_ring"])
            coeffs = {}
            for entry in obj["coefficients"]:
                S = as_key(entry["S"])
                if S in coeffs:
                    raise InvalidInput(f"duplicate index {S}")
                coeffs[S] = value_from_json(entry["value"], order)
            return cls(
                degree=int(obj["degree"]), weight=int(obj["weight"]),
                truncation=int(obj["truncation"]), complete=bool(obj["complete"]),
                coefficients=coeffs, denominator=int(obj.get("denominator", 1)),
                cyclotomic_order=order,
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed expansion file: {exc}") from exc

    def dumps(self) -> str:
        return canonical_json(self.to_json())


def _ring_order(ring) -> int | None:
    if ring == "rational":
        return None
    if isinstance(ring, Mapping) and "cyclotomic" in ring:
        return int(ring["cyclotomic"])
    raise InvalidInput(f"unknown scalar ring {ring!r}")


def value_to_json(v):
    if isinstance(v, CyclotomicInteger):
        return v.to_json()
    return format_rational(v)


def value_from_json(v, order: int | None):
    if order is None:
        if not isinstance(v, (str, int)):
            raise InvalidInput(f"expected a rational string, got {v!r}")
        return parse_rational(v)
    if isinstance(v, Mapping):
        value = CyclotomicInteger.from_json(v)
        if value.order != order:
            raise InvalidInput("cyclotomic value order differs from the scalar ring")
        return value
    return CyclotomicInteger.from_int(parse_rational(v), order)


def canonical_json(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False) + "\n"


# -- operations -------------------------------------------------------------

def linear_combine(terms: Iterable[tuple[object, SiegelExpansion]]) -> SiegelExpansion:
    terms = list(terms)
    if not terms:
        raise InvalidInput("linear_combine needs at least one term")
    first = terms[0][1]
    for _, F in terms[1:]:
        first.same_shape(F)
    D = min(F.truncation for _, F in terms)
    limit = 2 * first.denominator * D
    acc: dict[Key, object] = {}
    for scalar, F in terms:
        scalar = scalar if isinstance(scalar, CyclotomicInteger) else Fraction(scalar)
        if not scalar:
            continue
        for S, v in F.items():
            if all(S[i][i] <= limit for i in range(F.degree)):
                acc[S] = acc[S] + scalar * v if S in acc else scalar * v
    return first.replace(
        truncation=D,
        complete=all(F.complete for _, F in terms),
        coefficients=acc,
    )


def pointwise_multiply(F: SiegelExpansion, G: SiegelExpansion) -> SiegelExpansion:
    """Product of two expansions; exact up to the smaller truncation because
    diagonals of PSD summands are nonnegative and add."""
    F.same_shape(G, weight=False)
    if not (F.complete and G.complete):
        raise IncompleteData("pointwise_multiply needs complete expansions")
    D = min(F.truncation, G.truncation)
    limit = 2 * F.denominator * D
    g = F.degree
    acc: dict[Key, object] = {}
    g_items = [(S, v) for S, v in G.items() if all(S[i][i] <= limit for i in range(g))]
    for S1, a in F.items():
        if any(S1[i][i] > limit for i in range(g)):
            continue
        for S2, b in g_items:
            if any(S1[i][i] + S2[i][i] > limit for i in range(g)):
                continue
            S = tuple(tuple(x + y for x, y in zip(r1, r2)) for r1, r2 in zip(S1, S2))
            acc[S] = acc[S] + a * b if S in acc else a * b
    return F.replace(weight=F.weight + G.weight, truncation=D, complete=True, coefficients=acc)


def _mat_mul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
            for i in range(len(A))]


def _transpose(A):
    return [list(r) for r in zip(*A)]


def _integer_inverse(U) -> list[list[int]]:
    n = len(U)
    det = bareiss_det(U)
    if det not in (1, -1):
        raise InvalidInput(f"matrix {U} is not unimodular (det {det})")
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[U[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            adj[i][j] = (-1) ** (i + j) * bareiss_det(minor)
    return [[x * det for x in row] for row in adj]


def is_signed_permutation(U) -> bool:
    return all(sorted(abs(x) for x in row) == [0] * (len(row) - 1) + [1] for row in U) and all(
        sorted(abs(x) for x in col) == [0] * (len(col) - 1) + [1] for col in zip(*U)
    )


def unimodular_transform(F: SiegelExpansion, U) -> SiegelExpansion:
    """The expansion T -> c_F(U^t T U).

    Indices whose preimage leaves the truncation are dropped; completeness
    survives only for signed permutations, which permute the diagonal.
    """
    U = [[int(x) for x in row] for row in U]
    if len(U) != F.degree or any(len(r) != F.degree for r in U):
        raise ShapeMismatch(f"U must be {F.degree}x{F.degree}")
    V = _integer_inverse(U)
    Vt = _transpose(V)
    limit = 2 * F.denominator * F.truncation
    out = {}
    for S0, v in F.items():
        S = as_key(_mat_mul(_mat_mul(Vt, S0), V))
        if all(S[i][i] <= limit for i in range(F.degree)):
            out[S] = v
    return F.replace(
        complete=F.complete and is_signed_permutation(U),
        coefficients=out,
    )
