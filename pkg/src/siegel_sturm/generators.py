"""Sources of genuine test data: theta series of even unimodular lattices,
classical level-one forms of degree one, and the root-of-unity matrix used to
separate Fourier-Jacobi coefficients after restriction to torsion points.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import InvalidInput
from .exact import CyclotomicInteger, is_prime, root_of_unity
from .expansions import SiegelExpansion, as_key, bareiss_det, is_symmetric

BUILTIN_LATTICES = ("e8", "e8e8", "d16plus")


@dataclass(frozen=True)
class EvenLattice:
    name: str
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        gram = as_key(self.gram)
        object.__setattr__(self, "gram", gram)
        n = len(gram)
        if n == 0 or not is_symmetric(gram):
            raise InvalidInput(f"{self.name}: Gram matrix must be square and symmetric")
        if any(gram[i][i] % 2 for i in range(n)):
            raise InvalidInput(f"{self.name}: lattice is not even")
        for k in range(1, n + 1):
            if bareiss_det([row[:k] for row in gram[:k]]) <= 0:
                raise InvalidInput(f"{self.name}: Gram matrix is not positive definite")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def determinant(self) -> int:
        return bareiss_det(self.gram)

    def is_unimodular(self) -> bool:
        return self.determinant == 1

    def to_json(self) -> dict:
        return {"name": self.name, "rank": self.rank, "gram": [list(r) for r in self.gram]}

    @classmethod
    def from_json(cls, obj) -> "EvenLattice":
        try:
            lattice = cls(str(obj["name"]), as_key(obj["gram"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(f"malformed lattice fixture: {exc}") from exc
        if "rank" in obj and int(obj["rank"]) != lattice.rank:
            raise InvalidInput(f"{lattice.name}: declared rank {obj['rank']} != {lattice.rank}")
        return lattice


def load_lattice(name_or_path: str, lattice_dir: str | Path | None = None) -> EvenLattice:
    """Load a fixture by builtin name, by name inside ``lattice_dir``, or by path."""
    path = Path(name_or_path)
    if path.suffix == ".json" and path.exists():
        text = path.read_text(encoding="utf-8")
    elif lattice_dir is not None and (Path(lattice_dir) / f"{name_or_path}.json").exists():
        text = (Path(lattice_dir) / f"{name_or_path}.json").read_text(encoding="utf-8")
    elif name_or_path in BUILTIN_LATTICES:
        text = resources.files("siegel_sturm").joinpath(f"lattices/{name_or_path}.json").read_text(
            encoding="utf-8"
        )
    else:
        raise InvalidInput(f"unknown lattice {name_or_path!r}")
    lattice = EvenLattice.from_json(json.loads(text))
    if not lattice.is_unimodular():
        raise InvalidInput(f"{lattice.name}: fixture is not unimodular (det {lattice.determinant})")
    return lattice


# -- short vectors ------------------------------------------------------------

def _ldl(gram) -> list[list[Fraction]]:
    """Q with Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2."""
    n = len(gram)
    q = [[Fraction(x) for x in row] for row in gram]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def short_vectors(L: EvenLattice, max_norm: int) -> list[tuple[tuple[int, ...], int]]:
    """All x with x^t G x <= max_norm, sorted by (norm, x).

    Fincke-Pohst enumeration with exact rational bounds, so no vector is lost
    to rounding.
    """
    if max_norm < 0:
        raise InvalidInput("max_norm must be nonnegative")
    n = L.rank
    q = _ldl(L.gram)
    x = [0] * n
    found = []

    def descend(i: int, remaining: Fraction):
        center = -sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        bound = remaining / q[i][i]
        start = round(center)
        # the admissible set is an interval around the center; walk both ways
        for step in (1, -1):
            xi = start if step == 1 else start - 1
            while (xi - center) ** 2 <= bound:
                x[i] = xi
                rest = remaining - q[i][i] * (xi - center) ** 2
                if i == 0:
                    found.append(tuple(x))
                else:
                    descend(i - 1, rest)
                xi += step
        x[i] = 0

    descend(n - 1, Fraction(max_norm))
    gram = np.array(L.gram, dtype=np.int64)
    out = []
    for v in found:
        arr = np.array(v, dtype=np.int64)
        out.append((v, int(arr @ gram @ arr)))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


# -- theta series ---------------------------------------------------------------

def _gram_counts(V: np.ndarray, gram: np.ndarray, g: int, D: int, workers: int) -> dict:
    """Count g-tuples of rows of V by their Gram matrix (upper triangle)."""
    n = len(V)
    VG = V @ gram
    norms = np.einsum("ij,ij->i", VG, V)
    full = VG @ V.T if g >= 3 else None
    base = 4 * D + 1
    positions = [(a, b) for a in range(g) for b in range(a, g)]
    chunk = max(1, 4_000_000 // max(1, n ** (g - 1)))

    def work(start: int) -> dict:
        rows = np.arange(start, min(n, start + chunk))
        first = VG[rows] @ V.T
        grids = list(np.meshgrid(np.arange(len(rows)), *([np.arange(n)] * (g - 1)), indexing="ij"))
        grids[0] = rows[grids[0]]
        key = np.zeros(grids[0].shape, dtype=np.int64)
        for pos, (a, b) in enumerate(positions):
            if a == b:
                entry = norms[grids[a]]
            elif a == 0:
                entry = first[grids[0] - start, grids[b]]
            else:
                entry = full[grids[a], grids[b]]
            key += (entry + 2 * D) * base**pos
        uniq, counts = np.unique(key.ravel(), return_counts=True)
        return dict(zip(uniq.tolist(), counts.tolist()))

    starts = range(0, n, chunk)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    total: dict[int, int] = {}
    for part in parts:
        for k, c in part.items():
            total[k] = total.get(k, 0) + c

    decoded = {}
    for k, c in total.items():
        S = [[0] * g for _ in range(g)]
        for a, b in positions:
            S[a][b] = S[b][a] = k % base - 2 * D
            k //= base
        decoded[as_key(S)] = c
    return decoded


def theta_series(L: EvenLattice, g: int, D: int, workers: int = 1) -> SiegelExpansion:
    """Degree-g theta series: c(T) counts g-tuples of vectors with Gram matrix 2T."""
    if not L.is_unimodular():
        raise InvalidInput(f"{L.name} is not unimodular; its theta series is not of level one")
    if L.rank % 2:
        raise InvalidInput(f"{L.name} has odd rank")
    if g < 1 or D < 0:
        raise InvalidInput(f"need g >= 1 and D >= 0, got g={g}, D={D}")
    vecs = short_vectors(L, 2 * D)
    V = np.array([v for v, _ in vecs], dtype=np.int64)
    gram = np.array(L.gram, dtype=np.int64)
    counts = _gram_counts(V, gram, g, D, max(1, workers))
    return SiegelExpansion(g, L.rank // 2, D, True, counts)


# -- degree one -----------------------------------------------------------------

def _sigma(n: int, k: int) -> int:
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def _delta_coefficients(D: int) -> list[int]:
    # q * prod (1 - q^n)^24, truncated at q^D
    series = [1] + [0] * D
    for n in range(1, D + 1):
        for _ in range(24):
            for i in range(D, n - 1, -1):
                series[i] -= series[i - n]
    return [0] + series[:D]


def classical_degree1(name: str, D: int) -> SiegelExpansion:
    if D < 0:
        raise InvalidInput("truncation must be nonnegative")
    if name == "E4":
        weight, coeffs = 4, [1] + [240 * _sigma(n, 3) for n in range(1, D + 1)]
    elif name == "E6":
        weight, coeffs = 6, [1] + [-504 * _sigma(n, 5) for n in range(1, D + 1)]
    elif name == "Delta":
        weight, coeffs = 12, _delta_coefficients(D)
    else:
        raise InvalidInput(f"unknown classical form {name!r}")
    return SiegelExpansion(1, weight, D, True, {((2 * n,),): c for n, c in enumerate(coeffs)})


# -- the torsion separation matrix ------------------------------------------------

def torsion_matrix(N: int) -> list[list[CyclotomicInteger]]:
    """Entries zeta_N^(b r) for rows 0 <= b <= N-2 and columns (1-N)/2 < r <= (N-1)/2."""
    if N < 3 or N % 2 == 0 or not is_prime(N):
        raise InvalidInput(f"N must be an odd prime, got {N}")
    rs = range((1 - N) // 2 + 1, (N - 1) // 2 + 1)
    return [[root_of_unity(b * r, N) for r in rs] for b in range(N - 1)]


def cyclotomic_det(matrix: list[list[CyclotomicInteger]]) -> CyclotomicInteger:
    """Cofactor expansion memoized over column subsets; ring operations only."""
    n = len(matrix)
    M = matrix[0][0].order

    @lru_cache(maxsize=None)
    def minor(mask: int) -> CyclotomicInteger:
        row = bin(mask).count("1")
        if row == n:
            return CyclotomicInteger.from_int(1, M)
        total = CyclotomicInteger.zero(M)
        sign = 1
        for c in range(n):
            if mask >> c & 1:
                continue
            entry = matrix[row][c]
            if entry:
                term = entry * minor(mask | 1 << c)
                total = total + term if sign > 0 else total - term
            sign = -sign
        return total

    return minor(0)


def torsion_matrix_det(N: int) -> CyclotomicInteger:
    return cyclotomic_det(torsion_matrix(N))
