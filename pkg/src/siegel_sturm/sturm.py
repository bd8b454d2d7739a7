"""Diagonal slope bounds, vanishing orders and congruence/integrality certificates."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, lcm
from typing import Union

from .errors import IncompleteData, InputInconsistent, InvalidInput, TruncationInsufficient
from .exact import format_rational, is_prime, mod_p, vanishes_mod
from .expansions import Key, SiegelExpansion, canonical_json, index_keys, max_diag

THREE_QUARTERS = Fraction(3, 4)


# -- slope bounds ---------------------------------------------------------------

@dataclass(frozen=True)
class SlopeBound:
    degree: int
    prime_class: str  # "generic" or "p_ge_5"
    value: Fraction

    def __post_init__(self):
        if self.value <= 0:
            raise InvalidInput("slope bounds are positive")


def prime_class(p: int) -> str:
    return "p_ge_5" if p >= 5 else "generic"


def slope_bound(g: int, p: int) -> SlopeBound:
    """12 in degree one; 16 (3/4)^g in general, improved to 10 (3/4)^(g-2)
    for p >= 5 by starting the induction from degree two."""
    if g < 1:
        raise InvalidInput(f"degree must be >= 1, got {g}")
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    if g == 1:
        return SlopeBound(1, prime_class(p), Fraction(12))
    if p >= 5:
        return SlopeBound(g, "p_ge_5", Fraction(10) * THREE_QUARTERS ** (g - 2))
    return SlopeBound(g, "generic", Fraction(16) * THREE_QUARTERS**g)


def relative_bound_step(prev: SlopeBound) -> SlopeBound:
    """A slope bound in degree g-1 gives 3/4 of it in degree g."""
    return SlopeBound(prev.degree + 1, prev.prime_class, prev.value * THREE_QUARTERS)


def sturm_diagonal_bound(g: int, k: int, p: int) -> Fraction:
    if k < 0:
        raise InvalidInput(f"weight must be >= 0, got {k}")
    return Fraction(k) / slope_bound(g, p).value


def sturm_cutoff(g: int, k: int, p: int) -> int:
    # t_ii are integers, so t_ii <= bound iff t_ii <= floor(bound)
    return floor(sturm_diagonal_bound(g, k, p))


# -- vanishing orders -------------------------------------------------------------

@dataclass(frozen=True)
class NotVanishing:
    """The constant term is nonzero mod p, so no l >= 0 qualifies."""

    def lower(self) -> Fraction:
        return Fraction(-1)


@dataclass(frozen=True)
class Exact:
    l: int

    def lower(self) -> Fraction:
        return Fraction(self.l)


@dataclass(frozen=True)
class AtLeast:
    D: int

    def lower(self) -> Fraction:
        return Fraction(self.D)


OrderResult = Union[NotVanishing, Exact, AtLeast]


def order_from_witness(smallest: Fraction | None, truncation: int) -> OrderResult:
    """Order given the least max-diagonal among nonvanishing coefficients."""
    if smallest is None:
        return AtLeast(truncation)
    if smallest == 0:
        return NotVanishing()
    return Exact(ceil(smallest) - 1)


def order_to_json(order: OrderResult) -> dict:
    if isinstance(order, Exact):
        return {"kind": "Exact", "value": order.l}
    if isinstance(order, AtLeast):
        return {"kind": "AtLeast", "value": order.D}
    return {"kind": "NotVanishing", "value": None}


def diagonal_vanishing_order(F: SiegelExpansion, p: int) -> OrderResult:
    if not F.complete:
        raise IncompleteData("vanishing orders need a complete expansion")
    smallest = None
    for S, v in F.items():
        if not vanishes_mod(v, p, where=S):
            x = max_diag(S, F.denominator)
            if smallest is None or x < smallest:
                smallest = x
    return order_from_witness(smallest, F.truncation)


# -- certificates ---------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    verdict: str  # congruent | not_congruent | integral | not_integral | inconclusive
    theorem: str
    bound: Fraction
    cutoff: int
    indices_checked: int
    witness: Key | None = None
    prime: int | None = None
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        refuted = self.verdict in ("not_congruent", "not_integral")
        if refuted != (self.witness is not None):
            raise ValueError("refutations carry a witness and confirmations never do")

    @property
    def exit_code(self) -> int:
        if self.verdict in ("congruent", "integral"):
            return 0
        if self.verdict in ("not_congruent", "not_integral"):
            return 1
        return 2

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "theorem": self.theorem,
            "prime": self.prime,
            "bound": format_rational(self.bound),
            "cutoff": self.cutoff,
            "indices_checked": self.indices_checked,
            "witness": None if self.witness is None else [list(r) for r in self.witness],
            "inputs": dict(sorted(self.inputs.items())),
        }

    def dumps(self) -> str:
        return canonical_json(self.to_json())


def digest(F: SiegelExpansion) -> str:
    return "sha256:" + hashlib.sha256(F.dumps().encode("utf-8")).hexdigest()


def _theorem(g: int) -> str:
    return "ClassicalSturm" if g == 1 else "MainTheorem"


def _require_level_one(F: SiegelExpansion):
    if F.cyclotomic_order is not None:
        raise InvalidInput("certification needs rational coefficients")
    if F.denominator != 1:
        raise InvalidInput("certification needs half-integral indices (denominator 1)")
    if not F.complete:
        raise IncompleteData("certification needs a complete expansion")


def _require_p_integral(F: SiegelExpansion, p: int):
    for S, v in F.items():
        mod_p(v, p, where=S)


def check_congruence(F: SiegelExpansion, G: SiegelExpansion, p: int) -> Certificate:
    """Decide F = G mod p from the coefficients with t_ii <= k / slope."""
    F.same_shape(G)
    _require_level_one(F)
    _require_level_one(G)
    g, k = F.degree, F.weight
    bound = sturm_diagonal_bound(g, k, p)
    cutoff = floor(bound)
    available = min(F.truncation, G.truncation)
    if available < cutoff:
        raise TruncationInsufficient(cutoff, available)
    _require_p_integral(F, p)
    _require_p_integral(G, p)
    indices = index_keys(g, cutoff)
    witness = next((S for S in indices if (F[S] - G[S]) and mod_p(F[S] - G[S], p) != 0), None)
    return Certificate(
        verdict="congruent" if witness is None else "not_congruent",
        theorem=_theorem(g),
        bound=bound,
        cutoff=cutoff,
        indices_checked=len(indices),
        witness=witness,
        prime=p,
        inputs={"lhs": digest(F), "rhs": digest(G)},
    )


def certify_integrality(F: SiegelExpansion, p: int | None = None) -> Certificate:
    """Integrality of all coefficients from those with t_ii <= (4/3)^g k / 16.

    With ``p`` set, checks and concludes p-integrality instead. Stored
    coefficients past the cutoff are cross-checked: a tail denominator means
    the data violates the bounded-denominator assumption.
    """
    _require_level_one(F)
    if p is not None and not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    g, k = F.degree, F.weight
    bound = Fraction(k) / slope_bound(g, 2).value  # generic branch, valid for every prime
    cutoff = floor(bound)
    if F.truncation < cutoff:
        raise TruncationInsufficient(cutoff, F.truncation)

    def bad(v: Fraction) -> bool:
        return v.denominator != 1 if p is None else v.denominator % p == 0

    indices = index_keys(g, cutoff)
    witness = next((S for S in indices if bad(F[S])), None)
    if g == 1:
        theorem = "ClassicalSturm"
    else:
        theorem = "Corollary" if p is None else "CorollaryPIntegral"
    cert = Certificate(
        verdict="integral" if witness is None else "not_integral",
        theorem=theorem,
        bound=bound,
        cutoff=cutoff,
        indices_checked=len(indices),
        witness=witness,
        prime=p,
        inputs={"form": digest(F)},
    )
    if witness is None:
        _cross_check_tail(F, p)
    return cert


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _cross_check_tail(F: SiegelExpansion, p: int | None):
    den = lcm(*(v.denominator for _, v in F.items())) if len(F) else 1
    primes = _prime_factors(den)
    if p is not None:
        primes = [q for q in primes if q == p]
    for q in primes:
        scaled = F.replace(coefficients={S: v * den for S, v in F.items()})
        zero = SiegelExpansion.zero(F.degree, F.weight, F.truncation)
        if check_congruence(scaled, zero, q).verdict != "congruent":
            continue
        # the theorem now forces den * c(T) = 0 mod q everywhere
        witness = next(S for S, v in scaled.items() if mod_p(v, q) != 0)
        raise InputInconsistent(q, witness)
