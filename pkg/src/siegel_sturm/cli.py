"""Command-line frontend.

Exit codes: 0 congruent/integral (or success), 1 refuted, 2 inconclusive or error.
Errors are reported as one JSON object on stderr with a stable "code" field.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import InvalidInput, SiegelSturmError
from .exact import format_rational, is_prime, reduce_mod_ideal
from .expansions import SiegelExpansion, canonical_json
from .generators import load_lattice, theta_series, torsion_matrix_det
from .jacobi import JacobiExpansion, TorsionPoint, fourier_jacobi, jacobi_vanishing_order, restrict_torsion
from .sturm import (
    certify_integrality,
    check_congruence,
    diagonal_vanishing_order,
    order_to_json,
    slope_bound,
    sturm_diagonal_bound,
)


def load_expansion(path: str) -> SiegelExpansion | JacobiExpansion:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise InvalidInput(f"{path}: expected a JSON object")
    if obj.get("kind") == "jacobi":
        return JacobiExpansion.from_json(obj)
    return SiegelExpansion.from_json(obj)


def _load_siegel(path: str) -> SiegelExpansion:
    F = load_expansion(path)
    if not isinstance(F, SiegelExpansion):
        raise InvalidInput(f"{path}: expected a siegel expansion")
    return F


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _prime(text: str) -> int:
    p = int(text)
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{text} is not prime")
    return p


def _rational_vector(text: str) -> list[str]:
    return [x for x in text.split(",") if x.strip()]


# -- commands ---------------------------------------------------------------------

def cmd_bound(args) -> int:
    slope = slope_bound(args.degree, args.prime)
    report = {
        "degree": args.degree,
        "prime": args.prime,
        "prime_class": slope.prime_class,
        "slope": format_rational(slope.value),
    }
    if not args.slope_only:
        bound = sturm_diagonal_bound(args.degree, args.weight, args.prime)
        report.update(weight=args.weight, bound=format_rational(bound), cutoff=bound.numerator // bound.denominator)
    _emit(canonical_json(report), None)
    return 0


def cmd_order(args) -> int:
    F = load_expansion(args.input)
    if isinstance(F, JacobiExpansion):
        order = jacobi_vanishing_order(F, args.prime)
    else:
        order = diagonal_vanishing_order(F, args.prime)
    _emit(canonical_json({"prime": args.prime, "order": order_to_json(order)}), args.out)
    return 0


def cmd_check(args) -> int:
    cert = check_congruence(_load_siegel(args.lhs), _load_siegel(args.rhs), args.prime)
    _emit(cert.dumps(), args.out)
    return cert.exit_code


def cmd_integrality(args) -> int:
    cert = certify_integrality(_load_siegel(args.input), args.p_integral)
    _emit(cert.dumps(), args.out)
    return cert.exit_code


def cmd_theta(args) -> int:
    lattice = load_lattice(args.lattice, args.lattice_dir)
    F = theta_series(lattice, args.degree, args.diag_bound, workers=args.workers)
    _emit(F.dumps(), args.out)
    return 0


def cmd_fj(args) -> int:
    phi = fourier_jacobi(_load_siegel(args.input), args.index, reduced=not args.raw)
    _emit(phi.dumps(), args.out)
    return 0


def cmd_restrict(args) -> int:
    phi = load_expansion(args.input)
    if not isinstance(phi, JacobiExpansion):
        raise InvalidInput(f"{args.input}: expected a jacobi expansion")
    alpha = _rational_vector(args.alpha) or ["0"] * phi.degree
    beta = _rational_vector(args.beta) or ["0"] * phi.degree
    pt = TorsionPoint.from_rationals(args.N, alpha, beta)
    _emit(restrict_torsion(phi, pt.N, pt.alpha, pt.beta).dumps(), args.out)
    return 0


def cmd_det_a(args) -> int:
    det = torsion_matrix_det(args.N)
    report = {"N": args.N, "det": det.to_json(), "norm": format_rational(det.norm())}
    if args.prime is not None:
        residue = reduce_mod_ideal(det, args.prime)
        report.update(
            prime=args.prime,
            modulus=list(residue.modulus),
            residue=list(residue.value),
            nonzero=not residue.is_zero(),
        )
    _emit(canonical_json(report), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="siegel-sturm",
        description="Sturm bounds and mod-p certificates for Siegel modular forms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="slope bound, Sturm bound and index cutoff")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--weight", type=int, default=0)
    p.add_argument("--prime", type=_prime, required=True)
    p.add_argument("--slope-only", action="store_true")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("order", help="mod-p diagonal vanishing order of an expansion")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--prime", type=_prime, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("check", help="certify lhs = rhs mod p")
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    p.add_argument("--prime", type=_prime, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("integrality", help="certify integrality of all coefficients")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--p-integral", type=_prime, default=None, metavar="P")
    p.add_argument("--out")
    p.set_defaults(func=cmd_integrality)

    p = sub.add_parser("theta", help="theta series of an even unimodular lattice")
    p.add_argument("--lattice", required=True, help="builtin name (e8, e8e8, d16plus) or fixture path")
    p.add_argument("--lattice-dir", default=None)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--diag-bound", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("fj", help="Fourier-Jacobi coefficient of index m")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--raw", action="store_true", help="keep unreduced pairs")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fj)

    p = sub.add_parser("restrict", help="one component of the restriction to torsion points")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--alpha", default="", help="comma-separated entries in (1/N)Z")
    p.add_argument("--beta", default="", help="comma-separated entries in (1/N)Z")
    p.add_argument("--out")
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("det-a", help="determinant of the torsion separation matrix")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--prime", type=_prime, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_det_a)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage; keep the exit-code contract
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except SiegelSturmError as exc:
        sys.stderr.write(json.dumps(exc.to_json(), sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
