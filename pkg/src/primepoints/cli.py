"""Batch command-line front end.

Every run prints a single JSON document on stdout: a manifest (command,
parameters, version, seed, timestamp, digest of the report) plus the
report itself.  Diagnostics go to stderr.  Exit codes: 0 success with all
asserted bounds holding, 2 bound violation, 1 usage or configuration
error.  The digest and byte-level determinism exclude the volatile fields
(timestamp, wall_ms).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone

from . import __version__
from .errors import PrimePointsError
from .expsum import verify_weil_pq, verify_weil_pset, verify_weil_square
from .numtheory import goldbach_pairs
from .pointsets import (
    PSetParams,
    classical_pset,
    find_equivalence_witness,
    intersect,
    parameterized_pset,
    pointset_from_json,
    pointset_to_json,
    pq_set,
    qsquare_set,
    rsquare_set,
)
from .quadrature import qmc_mean
from .sensing import (
    coherence,
    coherence_gram_oracle,
    random_sparse_poly,
    recovery_experiment,
)

import numpy as np

_VOLATILE = ("wall_ms",)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def _parse_bits(text: str) -> tuple[int, ...]:
    text = text.replace(",", "")
    if not all(ch in "01" for ch in text):
        raise argparse.ArgumentTypeError(f"bits must be 0/1, got {text!r}")
    return tuple(int(ch) for ch in text)


def _add_set_flags(sp, required=True):
    sp.add_argument(
        "--family",
        choices=("pset", "param-pset", "pq", "qsquare", "rsquare"),
        required=required,
    )
    sp.add_argument("--d", type=int, required=required)
    sp.add_argument("--p", type=int, required=required)
    sp.add_argument("--q", type=int)
    sp.add_argument("--a", type=_parse_ints)
    sp.add_argument("--eps", type=_parse_bits)
    sp.add_argument("--b", type=_parse_ints)
    sp.add_argument("--eps2", type=_parse_bits)


def _params_from_args(args, a=None, eps=None) -> PSetParams:
    d, p = args.d, args.p
    a = a if a is not None else (args.a if args.a is not None else (1,) * d)
    eps = eps if eps is not None else (
        args.eps if args.eps is not None else (0,) * (d - 1)
    )
    return PSetParams(d, p, a, eps)


def _build_set(args):
    fam = args.family
    if fam == "pset":
        return classical_pset(args.d, args.p)
    if fam == "param-pset":
        return parameterized_pset(_params_from_args(args))
    if fam == "qsquare":
        return qsquare_set(_params_from_args(args))
    if fam == "rsquare":
        return rsquare_set(_params_from_args(args))
    if fam == "pq":
        q = args.q if args.q is not None else args.p
        if q != args.p:
            return pq_set(args.d, args.p, q)
        paramsA = paramsB = None
        if args.a is not None or args.b is not None:
            paramsA = _params_from_args(args)
            paramsB = _params_from_args(args, a=args.b, eps=args.eps2 or args.eps)
        return pq_set(args.d, args.p, q, paramsA, paramsB)
    raise PrimePointsError(f"unknown family {fam}")


def _strip_volatile(doc):
    if isinstance(doc, dict):
        return {k: _strip_volatile(v) for k, v in doc.items() if k not in _VOLATILE}
    if isinstance(doc, list):
        return [_strip_volatile(v) for v in doc]
    return doc


def _digest(report: dict) -> str:
    payload = json.dumps(
        _strip_volatile(report), sort_keys=True, separators=(",", ":")
    ).encode()
    return "sha256:" + hashlib.sha256(payload).hexdigest()


def _emit(command: str, args, report: dict, seed=None) -> None:
    skip = {"func", "from_file", "command"}
    params = {
        k: (list(v) if isinstance(v, tuple) else v)
        for k, v in sorted(vars(args).items())
        if k not in skip and v is not None and k != "threads"
    }
    doc = {
        "manifest": {
            "command": command,
            "parameters": params,
            "version": __version__,
            "seed": seed,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "output_digest": _digest(report),
        },
        "report": report,
    }
    print(json.dumps(doc, indent=2, sort_keys=True))


def _cmd_gen(args) -> int:
    ps = _build_set(args)
    _emit("gen", args, pointset_to_json(ps))
    return 0


def _cmd_check_weil(args) -> int:
    if args.from_file:
        with open(args.from_file) as fh:
            doc = json.load(fh)
        ps = pointset_from_json(doc.get("report", doc))
    elif args.family is None or args.d is None or args.p is None:
        raise PrimePointsError("provide --from-file or --family/--d/--p")
    else:
        ps = _build_set(args)
    fam = ps.provenance.family
    kwargs = {"threads": args.threads}
    if fam in ("pset", "param-pset"):
        report = verify_weil_pset(ps, **kwargs)
    elif fam == "pq":
        report = verify_weil_pq(ps, **kwargs)
    else:
        report = verify_weil_square(ps, **kwargs)
    _emit("check-weil", args, report.to_json())
    if report.violations:
        for v in report.violations:
            print(
                f"bound violated at k={list(v.k)}: |S|={v.abs_sum} > {v.bound}",
                file=sys.stderr,
            )
        return 2
    return 0


def _cmd_equal(args) -> int:
    paramsA = PSetParams(args.d, args.p, args.a, args.eps)
    paramsB = PSetParams(args.d, args.p, args.b, args.eps2 or args.eps)
    w = find_equivalence_witness(paramsA, paramsB)
    report = {
        "equivalent": w is not None,
        "witness": None if w is None else w.c,
        "exhaustive": bool(w is not None and w.exhaustive),
    }
    if args.oracle:
        A = parameterized_pset(paramsA)
        B = parameterized_pset(paramsB)
        brute = A.key_set == B.key_set
        inter = intersect(A, B)
        report["oracle"] = {
            "sets_equal": brute,
            "intersection_size": inter.cardinality,
            "agrees": brute == (w is not None),
        }
        if not report["oracle"]["agrees"]:
            _emit("equal", args, report)
            print("witness verdict disagrees with exhaustive oracle", file=sys.stderr)
            return 2
    _emit("equal", args, report)
    return 0


def _cmd_coherence(args) -> int:
    ps = _build_set(args)
    rep = coherence(ps, args.s)
    report = rep.to_json()
    if args.oracle:
        oracle = coherence_gram_oracle(ps, args.s)
        report["oracle"] = {
            "mu": oracle.mu,
            "agrees": abs(oracle.mu - rep.mu) <= 1e-9,
        }
    _emit("coherence", args, report)
    if rep.certified_bound is not None and rep.mu > rep.certified_bound * (1 + 1e-9):
        print(
            f"incoherence {rep.mu} exceeds certified bound {rep.certified_bound}",
            file=sys.stderr,
        )
        return 2
    if args.oracle and not report["oracle"]["agrees"]:
        print("incoherence oracle disagrees", file=sys.stderr)
        return 2
    return 0


def _cmd_recover(args) -> int:
    ps = _build_set(args)
    summary = recovery_experiment(
        ps,
        args.s,
        args.M,
        args.trials,
        args.seed,
        unit_magnitude=not args.random_magnitudes,
    )
    _emit("recover", args, summary.to_json(), seed=args.seed)
    if summary.guarantee_satisfied and summary.successes < summary.trials:
        print(
            "recovery guarantee violated: "
            f"{summary.successes}/{summary.trials} successes",
            file=sys.stderr,
        )
        return 2
    return 0


def _cmd_goldbach(args) -> int:
    pairs = goldbach_pairs(args.m)
    report = {
        "m": args.m,
        "pairs": [[int(gp.p), int(gp.q)] for gp in pairs],
        "count": len(pairs),
    }
    _emit("goldbach", args, report)
    return 0


def _cmd_integrate(args) -> int:
    ps = _build_set(args)
    rng = np.random.default_rng([args.seed, 0])
    f = random_sparse_poly(ps.d, args.s, args.M, rng)
    est = qmc_mean(f, ps)
    err = abs(est.mean - f.c0)
    report = {
        "integrand": {
            "s": args.s,
            "M": args.M,
            "support": [list(k) for k in f.support],
            "coeffs": [[f.coeffs[k].real, f.coeffs[k].imag] for k in f.support],
        },
        "mean": [est.mean.real, est.mean.imag],
        "c0": [f.c0.real, f.c0.imag],
        "n": est.n,
        "abs_error": err,
        "error_bound": est.error_bound,
    }
    _emit("integrate", args, report, seed=args.seed)
    if est.error_bound is not None and err > est.error_bound * (1 + 1e-9) + 1e-9:
        print(
            f"certificate violated: error {err} > bound {est.error_bound}",
            file=sys.stderr,
        )
        return 2
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="primepoints")
    parser.add_argument("--threads", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", help="construct a point set")
    _add_set_flags(sp)
    sp.set_defaults(func=_cmd_gen)

    sp = sub.add_parser("check-weil", help="verify the exponential-sum bound")
    sp.add_argument("--from-file", dest="from_file")
    _add_set_flags(sp, required=False)
    sp.set_defaults(func=_cmd_check_weil)

    sp = sub.add_parser("equal", help="decide set equality of two bundles")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--a", type=_parse_ints, required=True)
    sp.add_argument("--eps", type=_parse_bits, required=True)
    sp.add_argument("--b", type=_parse_ints, required=True)
    sp.add_argument("--eps2", type=_parse_bits)
    sp.add_argument("--oracle", action="store_true")
    sp.set_defaults(func=_cmd_equal)

    sp = sub.add_parser("coherence", help="mutual incoherence report")
    _add_set_flags(sp)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--oracle", action="store_true")
    sp.set_defaults(func=_cmd_coherence)

    sp = sub.add_parser("recover", help="seeded random recovery experiment")
    _add_set_flags(sp)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--random-magnitudes", action="store_true")
    sp.set_defaults(func=_cmd_recover)

    sp = sub.add_parser("goldbach", help="prime pairs summing to m")
    sp.add_argument("--m", type=int, required=True)
    sp.set_defaults(func=_cmd_goldbach)

    sp = sub.add_parser("integrate", help="QMC mean of a random sparse integrand")
    _add_set_flags(sp)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--M", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=_cmd_integrate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PrimePointsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
