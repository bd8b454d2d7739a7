"""Exact scalars: rationals, cyclotomic numbers and their residues modulo
unramified prime ideals.

Polynomials are tuples of coefficients, lowest degree first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Union

from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor_sqf

from .errors import InvalidInput, NotPIntegral, RamifiedPrime

Scalar = Union[int, Fraction]


# -- rationals --------------------------------------------------------------

def format_rational(r: Scalar) -> str:
    r = Fraction(r)
    return f"{r.numerator}/{r.denominator}"


def parse_rational(text: str | int) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError, AttributeError) as exc:
        raise InvalidInput(f"not an exact rational: {text!r}") from exc


def is_p_integral(r: Scalar, p: int) -> bool:
    return Fraction(r).denominator % p != 0


def mod_p(r: Scalar, p: int, where=None) -> int:
    """Image of a p-integral rational in Z/pZ."""
    r = Fraction(r)
    if r.denominator % p == 0:
        raise NotPIntegral(p, where, r)
    return r.numerator * pow(r.denominator, -1, p) % p


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def euler_phi(n: int) -> int:
    result, m, f = n, n, 2
    while f * f <= m:
        if m % f == 0:
            while m % f == 0:
                m //= f
            result -= result // f
        f += 1
    if m > 1:
        result -= result // m
    return result


def multiplicative_order(a: int, n: int) -> int:
    if n == 1:
        return 1
    if gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit mod {n}")
    k, x = 1, a % n
    while x != 1:
        x = x * a % n
        k += 1
    return k


# -- integer polynomials ----------------------------------------------------

def _trim(f: list) -> list:
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mul(f, g) -> list:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return out


def _poly_divmod_monic(f, g) -> tuple[list, list]:
    """Divide by a monic g; exact over any coefficient ring."""
    f = list(f)
    dg = len(g) - 1
    if len(f) <= dg:
        return [], _trim(f)
    q = [0] * (len(f) - dg)
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i]
        if c:
            q[i - dg] = c
            for j in range(dg + 1):
                f[i - dg + j] -= c * g[j]
    return q, _trim(f[:dg])


@lru_cache(maxsize=None)
def cyclotomic_polynomial(M: int) -> tuple[int, ...]:
    if M < 1:
        raise InvalidInput(f"cyclotomic order must be positive, got {M}")
    f = [-1] + [0] * (M - 1) + [1]
    for d in range(1, M):
        if M % d == 0:
            f, r = _poly_divmod_monic(f, cyclotomic_polynomial(d))
            assert not r
    return tuple(f)


@lru_cache(maxsize=None)
def _power_basis(M: int) -> tuple[tuple[int, ...], ...]:
    """Coefficient vectors of x^j mod Phi_M for j = 0..M-1."""
    phi = cyclotomic_polynomial(M)
    n = len(phi) - 1
    rows = []
    vec = [1] + [0] * (n - 1) if n else []
    for _ in range(M):
        rows.append(tuple(vec))
        # multiply by x and reduce the overflow term with the monic Phi_M
        top = vec[-1] if n else 0
        vec = [0] + vec[:-1]
        if top:
            vec = [v - top * c for v, c in zip(vec, phi)]
    return tuple(rows)


# -- cyclotomic numbers -----------------------------------------------------

@dataclass(frozen=True)
class CyclotomicInteger:
    """Element of Q(zeta_M) in the power basis 1, zeta, ..., zeta^(phi(M)-1).

    Coefficients are exact rationals so that p-integral Jacobi data can be
    restricted; the element lies in Z[zeta_M] exactly when ``is_integral``.
    """

    order: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        n = len(cyclotomic_polynomial(self.order)) - 1
        if len(self.coeffs) != n:
            raise InvalidInput(f"order {self.order} needs {n} coefficients, got {len(self.coeffs)}")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def zero(cls, M: int) -> "CyclotomicInteger":
        return cls(M, (0,) * euler_phi(M))

    @classmethod
    def from_int(cls, n: Scalar, M: int) -> "CyclotomicInteger":
        size = euler_phi(M)
        return cls(M, (n,) + (0,) * (size - 1))

    @classmethod
    def from_exponents(cls, M: int, terms: Mapping[int, Scalar]) -> "CyclotomicInteger":
        """Sum of c * zeta_M^e over ``terms`` = {e: c}."""
        basis = _power_basis(M)
        acc = [Fraction(0)] * euler_phi(M)
        for e, c in terms.items():
            if c:
                for i, b in enumerate(basis[e % M]):
                    if b:
                        acc[i] += c * b
        return cls(M, tuple(acc))

    @classmethod
    def from_poly(cls, M: int, poly: Iterable[Scalar]) -> "CyclotomicInteger":
        _, r = _poly_divmod_monic([Fraction(c) for c in poly], cyclotomic_polynomial(M))
        size = euler_phi(M)
        return cls(M, tuple(r) + (0,) * (size - len(r)))

    def _coerce(self, other) -> "CyclotomicInteger":
        if isinstance(other, CyclotomicInteger):
            if other.order != self.order:
                raise InvalidInput(f"cyclotomic orders differ: {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, Fraction)):
            return CyclotomicInteger.from_int(other, self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicInteger(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicInteger(self.order, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicInteger(self.order, tuple(a * other for a in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicInteger.from_poly(self.order, _poly_mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise InvalidInput("negative powers are not supported")
        result = CyclotomicInteger.from_int(1, self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return any(self.coeffs)

    def is_zero(self) -> bool:
        return not self

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def multiplication_matrix(self) -> list[list[Fraction]]:
        """Matrix of x -> self * x on the power basis (columns are images)."""
        n = len(self.coeffs)
        cols = []
        for j in range(n):
            unit = [0] * n
            unit[j] = 1
            cols.append((self * CyclotomicInteger(self.order, tuple(unit))).coeffs)
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def norm(self) -> Fraction:
        """Field norm from Q(zeta_M) down to Q."""
        return fraction_det(self.multiplication_matrix())

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [_format_coeff(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "CyclotomicInteger":
        try:
            return cls(int(obj["order"]), tuple(parse_rational(c) for c in obj["coeffs"]))
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed cyclotomic value: {obj!r}") from exc

    def __repr__(self):
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"<zeta_{self.order}: {' + '.join(terms) or '0'}>"


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else format_rational(c)


def root_of_unity(a: int, M: int) -> CyclotomicInteger:
    if M < 1:
        raise InvalidInput(f"order must be positive, got {M}")
    return CyclotomicInteger.from_exponents(M, {a % M: 1})


def fraction_det(rows) -> Fraction:
    a = [[Fraction(x) for x in row] for row in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det


# -- residues modulo a prime ideal above p ----------------------------------

def _poly_rem_mod_p(f, g, p) -> tuple[int, ...]:
    _, r = _poly_divmod_monic([c % p for c in f], list(g))
    r = [c % p for c in r]
    return tuple(r + [0] * (len(g) - 1 - len(r)))


@lru_cache(maxsize=None)
def cyclotomic_factor_mod_p(M: int, p: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible factor of Phi_M over F_p.

    Returned low degree first with a trailing 1. Every irreducible factor has
    degree ord_M(p) because Phi_M is separable mod p when p does not divide M.
    """
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    if M < 1:
        raise InvalidInput(f"order must be positive, got {M}")
    if M % p == 0:
        raise RamifiedPrime(f"{p} divides the cyclotomic order {M}")
    phi = cyclotomic_polynomial(M)
    _, factors = gf_factor_sqf([ZZ(c % p) for c in reversed(phi)], p, ZZ)
    candidates = sorted(tuple(int(c) for c in reversed(f)) for f in factors)
    best = candidates[0]
    assert len(best) - 1 == multiplicative_order(p, M)
    return best


@dataclass(frozen=True)
class PrimeIdealResidue:
    """Element of F_p[x]/(modulus), i.e. of O/P for a prime P above p."""

    p: int
    order: int
    modulus: tuple[int, ...]
    value: tuple[int, ...]

    def _check(self, other: "PrimeIdealResidue"):
        if (self.p, self.order, self.modulus) != (other.p, other.order, other.modulus):
            raise InvalidInput("residues live in different fields")

    def __add__(self, other: "PrimeIdealResidue") -> "PrimeIdealResidue":
        self._check(other)
        value = tuple((a + b) % self.p for a, b in zip(self.value, other.value))
        return PrimeIdealResidue(self.p, self.order, self.modulus, value)

    def __mul__(self, other: "PrimeIdealResidue") -> "PrimeIdealResidue":
        self._check(other)
        prod = _poly_mul(self.value, other.value)
        value = _poly_rem_mod_p(prod, self.modulus, self.p)
        return PrimeIdealResidue(self.p, self.order, self.modulus, value)

    def is_zero(self) -> bool:
        return not any(self.value)

    @property
    def field_size(self) -> int:
        return self.p ** (len(self.modulus) - 1)


def reduce_mod_ideal(c: CyclotomicInteger | Scalar, p: int, order: int | None = None,
                     where=None) -> PrimeIdealResidue:
    """Residue of ``c`` in O/P, P the prime above p fixed by
    :func:`cyclotomic_factor_mod_p`. Rational inputs need ``order``."""
    if not isinstance(c, CyclotomicInteger):
        c = CyclotomicInteger.from_int(c, order or 1)
    modulus = cyclotomic_factor_mod_p(c.order, p)
    coeffs = [mod_p(x, p, where) for x in c.coeffs]
    return PrimeIdealResidue(p, c.order, modulus, _poly_rem_mod_p(coeffs, modulus, p))


def vanishes_mod(value, p: int, where=None) -> bool:
    """True iff ``value`` lies in the prime ideal above p (p for rationals)."""
    if isinstance(value, CyclotomicInteger):
        return reduce_mod_ideal(value, p, where=where).is_zero()
    return mod_p(value, p, where) == 0
