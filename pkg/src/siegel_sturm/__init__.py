"""Sturm bounds for Siegel modular forms modulo primes, with exact arithmetic."""

from .errors import (
    IncompleteData,
    InputInconsistent,
    InvalidInput,
    NotPIntegral,
    RamifiedPrime,
    ShapeMismatch,
    SiegelSturmError,
    TruncationInsufficient,
)
from .exact import CyclotomicInteger, PrimeIdealResidue, reduce_mod_ideal
from .expansions import IndexMatrix, SiegelExpansion, enumerate_indices, psd_check
from .generators import EvenLattice, classical_degree1, load_lattice, short_vectors, theta_series, torsion_matrix_det
from .jacobi import JacobiExpansion, TorsionPoint, fourier_jacobi, lambda_reduce, restrict_torsion
from .sturm import (
    AtLeast,
    Certificate,
    Exact,
    NotVanishing,
    certify_integrality,
    check_congruence,
    diagonal_vanishing_order,
    slope_bound,
    sturm_diagonal_bound,
)

__version__ = "0.1.0"
