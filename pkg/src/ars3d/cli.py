"""Command-line front end.

Subcommands read a JSON document (see :mod:`ars3d.serialize`) and print a
JSON report with sorted keys.  Exit codes: 0 success, 1 demo assertion
failure, 2 domain failure, 3 rank error, 64 usage or schema error, 74 I/O
error.
"""

import argparse
import sys

import numpy as np

from .ars import ARS, Distribution, check_ars, locus_slice, write_slice_csv
from .classify import classify
from .config import DEFAULT_SEED
from .errors import ArsError, InvalidARSError, NotConjugatingError, RankError
from .fields import LinearField, rank_two
from .linalg2 import ThetaForm
from .morphisms import LinearCandidate, is_automorphism, verify_flow_conjugation, verify_isometry
from .serialize import SchemaError, dumps, load_document

EXIT_OK = 0
EXIT_DEMO = 1
EXIT_DOMAIN = 2
EXIT_RANK = 3
EXIT_USAGE = 64
EXIT_IO = 74

DEMO_TOL = 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj, out):
    out.write(dumps(obj) + "\n")


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return load_document(fh)
    except UnicodeDecodeError as exc:
        raise SchemaError(f"document is not UTF-8: {exc}") from exc


def _structure(doc):
    return ARS(doc.theta, doc.X, doc.delta)


def _target(doc, sigma):
    if doc.target is None:
        return sigma
    X, delta = doc.target
    return ARS(doc.theta, X, delta)


def cmd_validate(args, out):
    try:
        doc = _read(args.path)
    except ArsError as exc:
        _emit({"valid": False, "reasons": [str(exc)]}, out)
        return EXIT_DOMAIN
    larc_ok, nonempty_ok, reasons = check_ars(doc.theta, doc.X, doc.delta)
    if not doc.X.admissible:
        reasons.append("A does not commute with theta, so X is not a linear field")
    report = {
        "larc": larc_ok,
        "nonempty_complement": nonempty_ok,
        "rank_two": rank_two(doc.X),
        "admissible": doc.X.admissible,
        "reasons": reasons,
        "valid": not reasons,
    }
    _emit(report, out)
    return EXIT_OK if not reasons else EXIT_DOMAIN


def cmd_classify(args, out):
    doc = _read(args.path)
    sigma = _structure(doc)
    result = classify(sigma, samples=args.samples, seed=args.seed)
    _emit(result.to_dict(), out)
    return EXIT_OK


def _parse_window(text):
    try:
        window = tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise ValueError(f"window must be four numbers, got {text!r}") from exc
    if len(window) != 4:
        raise ValueError(f"window must be four numbers, got {text!r}")
    return window


def cmd_locus(args, out):
    doc = _read(args.path)
    sigma = _structure(doc)
    try:
        window = _parse_window(args.window)
        polylines = locus_slice(sigma, args.t, window, args.res)
    except ValueError as exc:
        _emit({"error": str(exc)}, out)
        return EXIT_DOMAIN
    if args.out is None:
        count = write_slice_csv(polylines, args.t, out)
        sys.stderr.write(f"{count}\n")
        return EXIT_OK
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        count = write_slice_csv(polylines, args.t, fh)
    _emit({"points": count, "polylines": len(polylines), "out": args.out}, out)
    return EXIT_OK


def _verify_report(m, sigma1, sigma2, samples, seed, box):
    iso = verify_isometry(m, sigma1, sigma2, samples=samples, seed=seed, box=box)
    try:
        fc = verify_flow_conjugation(m, sigma1, sigma2, seed=seed, box=box)
        flows = {"conjugating": True, "sign": fc.sign, "residual": fc.residual}
    except NotConjugatingError as exc:
        flows = {"conjugating": False, "residuals": {str(k): v for k, v in exc.residuals.items()}}
    return {
        "isometry": iso.passed,
        "isometry_report": iso.to_dict(),
        "automorphism": is_automorphism(m),
        "flow_conjugation": flows,
        "rank_two": rank_two(sigma2.X),
        "admissible": bool(sigma1.X.admissible and sigma2.X.admissible),
    }, iso


def cmd_verify(args, out):
    doc = _read(args.path)
    if doc.candidate_map is None:
        raise SchemaError("document has no candidate_map")
    sigma1 = _structure(doc)
    sigma2 = _target(doc, sigma1)
    report, iso = _verify_report(doc.candidate_map, sigma1, sigma2, args.samples, args.seed, args.box)
    _emit(report, out)
    return EXIT_OK if iso.passed else EXIT_DOMAIN


def counterexample(rank_two_field=False):
    """The structure and map of the counterexample.

    theta = diag(1, 0), X = (0, (v2, 0)), Delta spanned by (1, 0) and (0, e2),
    map (t, v) -> (-t, v).  ``rank_two_field`` swaps in the rank-two field
    ``A = I``, ``xi = e1`` on the same distribution.
    """
    theta = ThetaForm.diagonal(0.0)
    if rank_two_field:
        X = LinearField(theta, [1.0, 0.0], np.eye(2))
    else:
        # A does not commute with theta here; see the admissibility flag
        X = LinearField(theta, [0.0, 0.0], [[0.0, 1.0], [0.0, 0.0]], strict=False)
    sigma = ARS(theta, X, Distribution.from_rows([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]))
    return sigma, LinearCandidate(theta, -1.0, np.eye(2))


def cmd_demo(args, out):
    sigma, m = counterexample(args.rank_two_field)
    report, iso = _verify_report(m, sigma, sigma, args.samples, args.seed, args.box)
    checks = {
        "isometry": bool(iso.passed and iso.max_rel_error < DEMO_TOL),
        "automorphism": report["automorphism"],
        "rank_two": report["rank_two"],
    }
    ok = checks["isometry"] and not checks["automorphism"] and not checks["rank_two"]
    _emit({**checks, "admissible": report["admissible"], "max_rel_error": iso.max_rel_error,
           "samples_checked": iso.samples_checked, "passed": ok}, out)
    return EXIT_OK if ok else EXIT_DEMO


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--samples", type=int, default=1000, help="sampled points (default 1000)")
    common.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED, help="RNG seed (default 0x5EED)")
    common.add_argument("--box", type=float, default=2.0, help="sample |t| <= box, |v| <= box (default 2)")

    parser = _Parser(prog="ars3d", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="check a document")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", parents=[common], help="normal form of a rank-two structure")
    p.add_argument("path")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("locus", parents=[common], help="export a t-slice of the singular locus as CSV")
    p.add_argument("path")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--window", default="-2,2,-2,2", help="v1min,v1max,v2min,v2max; write --window=-1,1,-1,1 when the first bound is negative")
    p.add_argument("--res", type=int, default=101)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_locus)

    p = sub.add_parser("verify", parents=[common], help="check a candidate isometry")
    p.add_argument("path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo-counterexample", parents=[common], help="isometry that is not an automorphism")
    p.add_argument("--rank-two-field", action="store_true", help="use a rank-two field instead")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        if args.samples < 1:
            raise UsageError("--samples must be positive")
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"ars3d: {exc}\n")
        return EXIT_USAGE
    except SchemaError as exc:
        _emit({"error": str(exc)}, out)
        return EXIT_USAGE
    except RankError as exc:
        _emit({"error": str(exc)}, out)
        return EXIT_RANK
    except InvalidARSError as exc:
        _emit({"error": "invalid structure", "reasons": exc.reasons}, out)
        return EXIT_DOMAIN
    except (ArsError, ValueError) as exc:
        _emit({"error": str(exc)}, out)
        return EXIT_DOMAIN
    except OSError as exc:
        sys.stderr.write(f"ars3d: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
