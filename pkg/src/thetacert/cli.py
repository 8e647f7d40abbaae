"""Command-line front end: theta evaluation, polynomial fitting/caching,
the identity suite, non-vanishing certificates, hypothesis-condition
reports, the formal independence test, and the elimination resultants.

Every command prints a JSON report to stdout (all numbers as decimal
strings) and exits 0 when checks pass or a certificate is conclusive,
1 when a check failed, 2 when the outcome is inconclusive, and 3 on
usage or input errors.  The polynomial cache directory comes from the
THETA_CACHE_DIR environment variable (default ./.theta-cache).
"""

import argparse
import json
import sys
from fractions import Fraction

from gmpy2 import mpq

from .certify import (
    DEFAULT_SCHEDULE,
    DEFAULT_TOL,
    SUITE_ITEMS,
    _fmt_gauss,
    certify_nonvanishing,
    check_conditions,
    collapse_resultant,
    formal_independence,
    identity_item,
    identity_suite,
    triple_form,
)
from .elimination import build_R
from .modpoly import load_or_fit
from .numerics import ball_to_json
from .numthy import GaussianRational, parse_beta
from .polyjson import poly_doc
from .thetafun import ThetaKind, parse_tau, theta_eval

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3

_STATUS_EXIT = {"pass": EXIT_OK, "fail": EXIT_FAIL,
                "inconclusive": EXIT_INCONCLUSIVE}

_KINDS = {2: ThetaKind.theta2, 3: ThetaKind.theta3, 4: ThetaKind.theta4}


class UsageError(ValueError):
    """Bad flags or unparseable input values."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(doc) -> None:
    print(json.dumps(doc, indent=2))


def _parse_tol(text) -> mpq:
    try:
        frac = Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse tolerance {text!r}") from exc
    return mpq(frac.numerator, frac.denominator)


def _parse_schedule(text):
    try:
        return tuple(int(tok) for tok in str(text).split(","))
    except ValueError as exc:
        raise UsageError(f"cannot parse schedule {text!r}") from exc


def _parse_alphas(text):
    tokens = [tok.strip() for tok in str(text).split(",")]
    if len(tokens) != 3 or not all(tokens):
        raise UsageError("--alphas needs three comma-separated values")
    return [parse_beta(tok) for tok in tokens]


def _resolve_item(name: str) -> str:
    if name in SUITE_ITEMS:
        return name
    hits = [item for item in SUITE_ITEMS if item.startswith(name)]
    if len(hits) == 1:
        return hits[0]
    if not hits:
        raise UsageError(f"unknown suite item {name!r}; "
                         f"choose from: suite, {', '.join(SUITE_ITEMS)}")
    raise UsageError(f"ambiguous item {name!r}: matches {', '.join(hits)}")


# -- commands ----------------------------------------------------------------


def cmd_theta(args) -> int:
    kind = _KINDS[args.kind]
    tau = parse_tau(args.tau)
    ball = theta_eval(kind, args.mult, tau, args.prec)
    _emit({"kind": args.kind, "mult": args.mult, "tau": args.tau,
           "prec": args.prec, "ball": ball_to_json(ball)})
    return EXIT_OK


def cmd_modpoly(args) -> int:
    poly = (load_or_fit(args.kind, args.n)
            if args.margin is None
            else load_or_fit(args.kind, args.n, order_margin=args.margin))
    doc = poly_doc(poly.terms, poly.meta)
    _emit(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    tol = _parse_tol(args.tol)
    if args.target == "suite":
        if args.tau is not None:
            raise UsageError("--tau applies to single items, not the suite")
        report = identity_suite(prec=args.prec, tol=tol)
        _emit(report.to_json())
        return _STATUS_EXIT[report.status]
    item = identity_item(_resolve_item(args.target), prec=args.prec,
                         tol=tol, tau=args.tau)
    _emit(item.to_json())
    return _STATUS_EXIT[item.status]


def cmd_certify(args) -> int:
    alphas = _parse_alphas(args.alphas)
    spec = triple_form(args.tau, alphas, args.m, args.n)
    cert = certify_nonvanishing(spec, schedule=_parse_schedule(args.schedule),
                                tol=_parse_tol(args.tol))
    _emit(cert.to_json())
    if cert.verdict in ("CertifiedNonzero", "ResidualBelowTol"):
        return EXIT_OK
    return EXIT_INCONCLUSIVE


def cmd_conditions(args) -> int:
    report = check_conditions(args.theorem, args.m, args.n,
                              parse_beta(args.beta))
    _emit(report.to_json())
    return EXIT_OK if report.applies else EXIT_FAIL


def cmd_indep(args) -> int:
    tokens = [tok.strip() for tok in args.multipliers.split(",") if tok.strip()]
    if not tokens:
        raise UsageError("--multipliers needs at least one value")
    try:
        values = [Fraction(tok) for tok in tokens]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse multipliers {args.multipliers!r}") from exc
    report = formal_independence([mpq(v.numerator, v.denominator)
                                  for v in values], args.order)
    _emit(report.to_json())
    return EXIT_OK if report.verdict == "Independent" else EXIT_INCONCLUSIVE


def cmd_resultant(args) -> int:
    alphas = _parse_alphas(args.alphas)
    if args.eta_only:
        if args.m % 2 != 0:
            raise UsageError("--eta-only needs an even first level")
        doc = collapse_resultant(args.m, args.n, alphas)
        _emit(doc)
        return EXIT_OK if doc["nonzero"] else EXIT_FAIL
    if args.m % 2 == 0 or args.n % 2 == 0:
        raise UsageError("full resultants are built for odd level pairs; "
                         "use --eta-only for an even first level")
    if not all(isinstance(a, GaussianRational) for a in alphas):
        raise UsageError("full resultants need Gaussian-rational "
                         "coefficients; use --eta-only for root forms")
    poly = build_R(args.m, args.n, [a.value for a in alphas])
    _emit({"m": args.m, "n": args.n, "degree": poly.degree(),
           "coeffs": [_fmt_gauss(c) for c in poly.coeffs],
           "nonzero": not poly.is_zero()})
    return EXIT_OK if not poly.is_zero() else EXIT_FAIL


# -- parser ------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="thetacert",
                     description="Certified arithmetic for theta constants, "
                                 "their annihilating polynomials, and "
                                 "non-vanishing of linear forms.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("theta", help="evaluate a theta constant to a ball")
    p.add_argument("--kind", type=int, choices=(2, 3, 4), required=True)
    p.add_argument("--mult", type=int, default=1,
                   help="multiplier a in theta(a*tau)")
    p.add_argument("--tau", required=True)
    p.add_argument("--prec", type=int, default=256)
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("modpoly", help="fit or load an annihilating polynomial")
    p.add_argument("kind", choices=("P", "Q"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--margin", type=int, default=None,
                   help="extra q-series orders beyond the minimum")
    p.add_argument("--out", default=None, help="also write the JSON here")
    p.set_defaults(func=cmd_modpoly)

    p = sub.add_parser("verify", help="run the identity suite or one item")
    p.add_argument("target", help='"suite" or an item name (unique prefix ok)')
    p.add_argument("--prec", type=int, default=256)
    p.add_argument("--tol", default="1e-40")
    p.add_argument("--tau", default=None,
                   help="evaluation point override for multi-point items")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("certify",
                       help="certify a three-term linear form nonzero")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alphas", required=True,
                   help='three coefficients, e.g. "1,1,2" or "1,1,sqrt(5)"')
    p.add_argument("--tau", required=True)
    p.add_argument("--schedule",
                   default=",".join(str(b) for b in DEFAULT_SCHEDULE))
    p.add_argument("--tol", default=str(DEFAULT_TOL))
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("conditions",
                       help="report which hypothesis conditions hold")
    p.add_argument("--theorem", required=True,
                   help="2.3, cor2.1, or 2.4")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", required=True)
    p.set_defaults(func=cmd_conditions)

    p = sub.add_parser("indep",
                       help="formal q-series independence rank test")
    p.add_argument("--multipliers", required=True,
                   help='comma-separated positive rationals, e.g. "1,2,3"')
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=cmd_indep)

    p = sub.add_parser("resultant",
                       help="elimination resultant, full or at the "
                            "collapse point")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alphas", required=True)
    p.add_argument("--eta-only", action="store_true",
                   help="exact scalar W at eta = -alpha0/alpha2")
    p.set_defaults(func=cmd_resultant)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ValueError as exc:
        # usage errors, unparseable inputs, unsupported shapes
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        # failed validation or an exactness guarantee that did not hold
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
