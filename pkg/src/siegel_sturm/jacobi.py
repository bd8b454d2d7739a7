"""Fourier-Jacobi coefficients, the lambda-shift, and restriction to torsion points.

A Jacobi index pair (T, R) is stored as (S, R) with S = 2T integral. The
lambda-shift by an integer row vector lam sends

    S -> S + R lam + lam^t R^t + 2m lam^t lam,    R -> R + 2m lam^t,

and fixes c(T, R). Expansions are normally kept reduced: only pairs with
every |r_i| <= m are stored, and every other coefficient is read off its
reduced representative. Reduction never increases a diagonal entry, so the
reduced pairs with t_ii <= D determine every pair with t_ii <= D.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import floor, lcm
from typing import Iterator, Mapping

from .errors import IncompleteData, InvalidInput, TruncationInsufficient
from .exact import CyclotomicInteger, format_rational, mod_p, parse_rational
from .expansions import Key, IndexMatrix, SiegelExpansion, _is_psd_key, as_key, canonical_json, is_symmetric
from .sturm import OrderResult, order_from_witness, NotVanishing

Pair = tuple[Key, tuple[int, ...]]


def discriminant_matrix(S: Key, R, m: int) -> Key:
    """4mT - R R^t, with S = 2T."""
    g = len(S)
    return tuple(tuple(2 * m * S[i][j] - R[i] * R[j] for j in range(g)) for i in range(g))


def lambda_shift(S: Key, R, m: int, lam) -> Pair:
    g = len(S)
    S2 = tuple(
        tuple(S[i][j] + R[i] * lam[j] + lam[i] * R[j] + 2 * m * lam[i] * lam[j] for j in range(g))
        for i in range(g)
    )
    R2 = tuple(R[i] + 2 * m * lam[i] for i in range(g))
    return S2, R2


def _reduce_entry(r: int, m: int) -> int:
    # representative of r mod 2m in (-m, m]
    return -((m - r) % (2 * m)) + m


def reduce_pair(S: Key, R, m: int) -> tuple[Key, tuple[int, ...], tuple[int, ...]]:
    if m == 0:
        if any(R):
            raise InvalidInput("index 0 admits no reduction of a nonzero R")
        return S, tuple(R), (0,) * len(R)
    lam = tuple((_reduce_entry(r, m) - r) // (2 * m) for r in R)
    S2, R2 = lambda_shift(S, R, m, lam)
    return S2, R2, lam


def lambda_reduce(T, R, m: int, g: int | None = None):
    """Shift (T, R) so that every entry of R lies in (-m, m].

    ``T`` may be an IndexMatrix or a rational matrix; returns
    (IndexMatrix T', tuple R', tuple lambda).
    """
    if m < 0:
        raise InvalidInput("index must be nonnegative")
    idx = T if isinstance(T, IndexMatrix) else IndexMatrix.from_T(T)
    if idx.denominator != 1:
        raise InvalidInput("Jacobi indices are half-integral")
    R = tuple(int(r) for r in R)
    if g is not None and (idx.degree != g or len(R) != g):
        raise InvalidInput(f"expected degree {g}")
    S2, R2, lam = reduce_pair(idx.S, R, m)
    return IndexMatrix(S2), R2, lam


@dataclass(frozen=True)
class JacobiExpansion:
    """Truncated Fourier expansion sum c(T, R) e(tr(T tau) + z R) of index m."""

    degree: int
    weight: int
    index: int
    truncation: int
    complete: bool
    coefficients: Mapping[Pair, Fraction] = field(default_factory=dict)
    reduced: bool = True

    def __post_init__(self):
        g, m = self.degree, self.index
        if g < 1 or m < 0 or self.truncation < 0:
            raise InvalidInput("need degree >= 1, index >= 0 and truncation >= 0")
        limit = 2 * self.truncation
        clean = {}
        for (S, R), v in self.coefficients.items():
            S, R = as_key(S), tuple(int(r) for r in R)
            if len(S) != g or len(R) != g or not is_symmetric(S):
                raise InvalidInput(f"pair {(S, R)} does not have degree {g}")
            if any(S[i][i] > limit or S[i][i] % 2 for i in range(g)):
                raise InvalidInput(f"pair {(S, R)} is outside the truncation or not half-integral")
            if not _is_psd_key(S) or not _is_psd_key(discriminant_matrix(S, R, m)):
                raise InvalidInput(f"pair {(S, R)} violates 4mT - RR^t >= 0")
            if self.reduced and any(abs(r) > m for r in R):
                raise InvalidInput(f"pair {(S, R)} is not reduced for index {m}")
            v = Fraction(v)
            if v:
                clean[(S, R)] = v
        object.__setattr__(self, "coefficients", dict(sorted(clean.items())))

    def items(self) -> Iterator[tuple[Pair, Fraction]]:
        return iter(self.coefficients.items())

    def __len__(self):
        return len(self.coefficients)

    def lookup(self, S, R) -> Fraction:
        """c(T, R) for any pair, through its reduced representative when reduced."""
        S, R = as_key(S), tuple(int(r) for r in R)
        if self.reduced:
            S, R, _ = reduce_pair(S, R, self.index)
        if any(S[i][i] > 2 * self.truncation for i in range(self.degree)):
            raise IncompleteData(f"pair {(S, R)} lies beyond the truncation")
        return self.coefficients.get((S, R), Fraction(0))

    def to_json(self) -> dict:
        return {
            "kind": "jacobi",
            "degree": self.degree,
            "weight": self.weight,
            "index": self.index,
            "truncation": self.truncation,
            "complete": self.complete,
            "reduced": self.reduced,
            "denominator": 1,
            "scalar_ring": "rational",
            "coefficients": [
                {"S": [list(r) for r in S], "R": list(R), "value": format_rational(v)}
                for (S, R), v in self.coefficients.items()
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "JacobiExpansion":
        if obj.get("kind") != "jacobi":
            raise InvalidInput(f"expected a jacobi expansion, got kind={obj.get('kind')!r}")
        if obj.get("scalar_ring", "rational") != "rational" or obj.get("denominator", 1) != 1:
            raise InvalidInput("Jacobi expansions have rational values and half-integral T")
        try:
            coeffs = {}
            for entry in obj["coefficients"]:
                key = (as_key(entry["S"]), tuple(int(r) for r in entry["R"]))
                if key in coeffs:
                    raise InvalidInput(f"duplicate pair {key}")
                coeffs[key] = parse_rational(entry["value"])
            return cls(
                degree=int(obj["degree"]), weight=int(obj["weight"]), index=int(obj["index"]),
                truncation=int(obj["truncation"]), complete=bool(obj["complete"]),
                coefficients=coeffs, reduced=bool(obj.get("reduced", True)),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed Jacobi expansion file: {exc}") from exc

    def dumps(self) -> str:
        return canonical_json(self.to_json())


def fourier_jacobi(F: SiegelExpansion, m: int, reduced: bool = True) -> JacobiExpansion:
    """The m-th Fourier-Jacobi coefficient of a degree g+1 expansion.

    c(T, R) is the coefficient of F at [[T, R/2], [R^t/2, m]]. With
    ``reduced=False`` every pair inside the truncation is kept verbatim.
    """
    if F.degree < 2:
        raise InvalidInput("Fourier-Jacobi coefficients need degree >= 2")
    if F.cyclotomic_order is not None or F.denominator != 1:
        raise InvalidInput("Fourier-Jacobi coefficients need a rational level-one expansion")
    if not F.complete:
        raise IncompleteData("Fourier-Jacobi coefficients need a complete expansion")
    if not 0 <= m <= F.truncation:
        raise InvalidInput(f"index {m} is outside the truncation {F.truncation}")
    g = F.degree - 1
    coeffs = {}
    for S_F, v in F.items():
        if S_F[g][g] != 2 * m:
            continue
        S = tuple(row[:g] for row in S_F[:g])
        R = tuple(S_F[i][g] for i in range(g))
        if reduced and any(abs(r) > m for r in R):
            continue
        coeffs[(S, R)] = v
    return JacobiExpansion(g, F.weight, m, F.truncation, True, coeffs, reduced=reduced)


# -- torsion points -------------------------------------------------------------

@dataclass(frozen=True)
class TorsionPoint:
    """(alpha, beta) = (a / N, b / N); numerators reduced mod N^2."""

    N: int
    alpha: tuple[int, ...]
    beta: tuple[int, ...]

    def __post_init__(self):
        if self.N < 1 or len(self.alpha) != len(self.beta):
            raise InvalidInput("torsion point needs N >= 1 and vectors of equal length")
        n2 = self.N * self.N
        object.__setattr__(self, "alpha", tuple(int(a) % n2 for a in self.alpha))
        object.__setattr__(self, "beta", tuple(int(b) % n2 for b in self.beta))

    @classmethod
    def from_rationals(cls, N: int, alpha, beta) -> "TorsionPoint":
        return cls(N, _numerators(N, alpha), _numerators(N, beta))


def _numerators(N: int, values) -> tuple[int, ...]:
    out = []
    for x in values:
        x = parse_rational(x) if isinstance(x, str) else Fraction(x)
        a = x * N
        if a.denominator != 1:
            raise InvalidInput(f"{x} is not in (1/{N})Z")
        out.append(a.numerator)
    return tuple(out)


def torsion_cyclotomic_order(N: int) -> int:
    return lcm(N * N, 2 * N)


def _lambda_range(s_ii: int, r: int, a: int, m: int, N: int, limit: int) -> list[int]:
    """Integers lam with N^2 s_ii + 2 r N U + 2 m U^2 <= limit, U = N lam + a."""

    def value(lam: int) -> int:
        U = N * lam + a
        return N * N * s_ii + 2 * r * N * U + 2 * m * U * U

    # the integer nearest the vertex U = -r N / (2m) minimizes the quadratic
    start = round(Fraction(-r, 2 * m) - Fraction(a, N)) if m else 0
    out = []
    for step in (1, -1):
        lam = start if step == 1 else start - 1
        while value(lam) <= limit:
            out.append(lam)
            lam += step
    return sorted(out)


def restrict_torsion(phi: JacobiExpansion, N: int, alpha, beta) -> SiegelExpansion:
    """Component (alpha, beta) = (a/N, b/N) of phi restricted to torsion points.

    ``alpha`` and ``beta`` are integer numerator vectors (any representatives).
    The coefficient at exponent T' = T + (alpha^t R^t + R alpha)/2 + m alpha^t alpha
    collects c(T, R) e(m beta.alpha + beta.R) over all pairs of the full series;
    the output is stored with index denominator N^2 and values in Q(zeta_M),
    M = lcm(N^2, 2N), and is exact up to diagonal floor(D - m/4).
    """
    g, m = phi.degree, phi.index
    a, b = tuple(int(x) for x in alpha), tuple(int(x) for x in beta)
    if N < 1 or len(a) != g or len(b) != g:
        raise InvalidInput(f"torsion point must be two length-{g} numerator vectors, N >= 1")
    new_trunc = floor(phi.truncation - Fraction(m, 4))
    if new_trunc < 0:
        raise TruncationInsufficient(-(-m // 4), phi.truncation)
    M = torsion_cyclotomic_order(N)
    n2 = N * N
    limit = 2 * n2 * new_trunc
    ba = sum(x * y for x, y in zip(b, a))
    acc: dict[Key, dict[int, Fraction]] = {}

    for (S0, R0), c in phi.items():
        if phi.reduced and m > 0:
            if any(r == -m for r in R0):
                continue  # same orbit as the stored r_i = m pair
            ranges = [_lambda_range(S0[i][i], R0[i], a[i], m, N, limit) for i in range(g)]
            shifts = product(*ranges)
        else:
            shifts = [(0,) * g]
        for lam in shifts:
            S, R = lambda_shift(S0, R0, m, lam) if any(lam) else (S0, R0)
            Sx = tuple(
                tuple(n2 * S[i][j] + N * (R[i] * a[j] + a[i] * R[j]) + 2 * m * a[i] * a[j] for j in range(g))
                for i in range(g)
            )
            if any(Sx[i][i] > limit for i in range(g)):
                continue
            e = (m * ba * (M // n2) + sum(x * y for x, y in zip(b, R)) * (M // N)) % M
            terms = acc.setdefault(Sx, {})
            terms[e] = terms.get(e, 0) + c

    coeffs = {Sx: CyclotomicInteger.from_exponents(M, terms) for Sx, terms in acc.items()}
    return SiegelExpansion(
        degree=g,
        weight=phi.weight,
        truncation=new_trunc,
        complete=phi.complete and phi.reduced,
        coefficients=coeffs,
        denominator=n2,
        cyclotomic_order=M,
    )


def restrict_torsion_point(phi: JacobiExpansion, point: TorsionPoint) -> SiegelExpansion:
    return restrict_torsion(phi, point.N, point.alpha, point.beta)


# -- vanishing orders -------------------------------------------------------------

def jacobi_vanishing_order(phi: JacobiExpansion, p: int) -> OrderResult:
    if not phi.complete:
        raise IncompleteData("vanishing orders need a complete expansion")
    smallest = None
    for (S, R), v in phi.items():
        if mod_p(v, p, where=(S, R)) != 0:
            x = Fraction(max(S[i][i] for i in range(phi.degree)), 2)
            if smallest is None or x < smallest:
                smallest = x
    return order_from_witness(smallest, phi.truncation)


def jacobi_zero_threshold(phi: JacobiExpansion, slope: Fraction) -> Fraction:
    return Fraction(phi.index, 4) + Fraction(phi.weight) / Fraction(slope)


def jacobi_zero_prediction(phi: JacobiExpansion, p: int, slope) -> bool:
    """True when the order exceeds m/4 + k/slope, which forces phi = 0 mod p."""
    order = jacobi_vanishing_order(phi, p)
    if isinstance(order, NotVanishing):
        return False
    return order.lower() > jacobi_zero_threshold(phi, slope)
