"""Command-line front end.

Exit codes: 0 success, 1 malformed input or usage error, 2 precondition or
domain error, 3 optimizer did not converge, 4 a verification case failed.
"""

import argparse
import json
import sys

from .config import OptConfig
from .errors import DomainError, InternalInconsistencyError, PreconditionError, SchemaError, StructuralError
from .io import element_to_json, encode_matrix, grid_from_json, map_from_json, element_from_json
from .map_norms import amplified_norm, op_norm, s1_map_norm
from .s1_solver import s1_norm, s1_norm_opt
from .schatten import lp_norm
from .yeadon import NotSeparating, extract_triple
from .verify import SUITES, run_suite

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_NOT_CONVERGED, EXIT_VERIFY_FAILED = 0, 1, 2, 3, 4


def _read_json(path):
    try:
        if path in (None, "-"):
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON ({exc.msg} at line {exc.lineno} column {exc.colno})") from exc
    except OSError as exc:
        raise SchemaError("$", f"cannot read input: {exc}") from exc


def _config(args):
    kw = dict(seed=args.seed, restarts=args.restarts, iters=args.iters, rel_tol=args.rel_tol, max_m=args.max_m)
    return OptConfig(**kw)


def _p(args):
    return float("inf") if str(args.p).lower() in ("inf", "infinity") else float(args.p)


def cmd_norm(args, config):
    x = element_from_json(_read_json(args.input))
    return {"value": lp_norm(x, _p(args)), "p": _p(args)}, EXIT_OK


def cmd_s1norm(args, config):
    X = grid_from_json(_read_json(args.input))
    if X.n > config.max_m:
        raise PreconditionError(f"inner dimension n={X.n} exceeds --max-m {config.max_m}")
    p = _p(args)
    res = s1_norm_opt(X, p, config) if args.optimizer else s1_norm(X, p, config)
    out = {"upper": res.upper, "lower": res.lower, "oracle": res.oracle, "oracle_value": res.oracle_value,
           "status": res.status, "m": res.factorization.m}
    return out, EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_opnorm(args, config):
    T = map_from_json(_read_json(args.input))
    p = _p(args)
    if args.n:
        res = s1_map_norm(T, p, args.n, config)
        kind = f"s1_{args.n}"
    elif args.m and args.m > 1:
        res = amplified_norm(T, p, args.m, config)
        kind = f"amplified_{args.m}"
    else:
        res = op_norm(T, p, config)
        kind = "op"
    witness = res.witness
    wj = element_to_json(witness) if hasattr(witness, "blocks") else {"n": witness.n, "blocks": [encode_matrix(b) for b in witness.big]}
    return {"lower": res.value, "norm": kind, "witness": wj}, EXIT_OK


def cmd_separating(args, config):
    T = map_from_json(_read_json(args.input))
    tr = extract_triple(T, None, config)
    if isinstance(tr, NotSeparating):
        wit = None if tr.witness is None else [element_to_json(x) for x in tr.witness]
        return {"separating": False, "failed": tr.failed, "witness": wit}, EXIT_OK
    return {"separating": True}, EXIT_OK


def _triple_json(tr):
    return {"w": element_to_json(tr.w), "B": element_to_json(tr.B), "J": encode_matrix(tr.J.matrix),
            "e": element_to_json(tr.e), "f": element_to_json(tr.f)}


def cmd_yeadon(args, config):
    T = map_from_json(_read_json(args.input))
    tr = extract_triple(T, _p(args), config)
    if isinstance(tr, NotSeparating):
        raise PreconditionError(f"map is not separating: {tr.failed}")
    return {"verdict": tr.verdict, "triple": _triple_json(tr), "checks": tr.checks}, EXIT_OK


def cmd_classify(args, config):
    T = map_from_json(_read_json(args.input))
    tr = extract_triple(T, _p(args), config)
    return {"verdict": tr.verdict}, EXIT_OK


def cmd_verify(args, config):
    report = run_suite(args.suite, config, p=args.p_opt, n=args.n, m=args.m, count=args.count)
    return report.to_json(timing=not args.no_timing), EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def build_parser():
    parser = argparse.ArgumentParser(prog="nclp", description="Noncommutative Lp norm toolkit.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--restarts", type=int, default=8)
    common.add_argument("--iters", type=int, default=400)
    common.add_argument("--rel-tol", type=float, default=1e-3)
    common.add_argument("--max-m", type=int, default=64)
    common.add_argument("--out", default=None, help="write JSON here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, with_input=True, with_p=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if with_input:
            sp.add_argument("input", nargs="?", default="-", help="JSON file, or - for stdin")
        if with_p:
            sp.add_argument("--p", default="2")
        sp.set_defaults(fn=fn)
        return sp

    add("norm", cmd_norm, "weighted Schatten norm of an element")
    sp = add("s1norm", cmd_s1norm, "S^1-valued norm of a grid")
    sp.add_argument("--optimizer", action="store_true", help="skip exact oracles")
    sp = add("opnorm", cmd_opnorm, "lower bound on a map norm")
    sp.add_argument("--m", type=int, default=1, help="amplification level")
    sp.add_argument("--n", type=int, default=0, help="S^1_n grid size (S^1 map norm)")
    add("separating", cmd_separating, "test whether a map is separating", with_p=False)
    add("yeadon", cmd_yeadon, "extract the Yeadon triple")
    add("classify", cmd_classify, "direct / anti-direct / mixed / not-separating")
    sp = add("verify", cmd_verify, "run a verification suite", with_input=False, with_p=False)
    sp.add_argument("--suite", choices=SUITES, default="all")
    sp.add_argument("--p", dest="p_opt", type=float, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--count", type=int, default=20, help="random CP maps in the CP suite")
    sp.add_argument("--no-timing", action="store_true", help="omit wall-clock for byte-identical reruns")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        config = _config(args)
        out, code = args.fn(args, config)
    except SchemaError as exc:
        print(f"error: malformed input at {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StructuralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PreconditionError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InternalInconsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = json.dumps(out, indent=2, default=float)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
