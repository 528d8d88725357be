"""Command-line interface: ``jbtriple <command> [options]``.

Exit codes: 0 success, 1 failed checks or internal error, 2 invalid input,
3 optimizer non-convergence under ``--strict``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from threadpoolctl import threadpool_limits

from .calculus import range_tripotent
from .core import DEFAULT_TOL, build_space, is_commutative, peirce
from .exceptions import InputError, JBTripleError
from .ideals import commutativity_report
from .numrange import (
    DEFAULT_STARTS, DEFAULT_STEPS, INDEX_STARTS, INDEX_STEPS, numerical_index_estimate,
    numerical_radius, numerical_range_sample, operator_norm,
)
from .serialize import (
    complex_to_json, dumps, load_spec, operator_from_json, spec_to_json,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NONCONVERGED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be nonnegative")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="random seed (default 0)")
    common.add_argument("--budget", type=_positive_int, default=None,
                        help="optimizer starts per operator")
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL,
                        help="algebraic tolerance (default 1e-8)")
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--strict", action="store_true",
                        help="exit 3 if the optimizer did not converge")
    spec = argparse.ArgumentParser(add_help=False)
    spec.add_argument("--spec", required=True, help="path to a space-spec JSON file")

    parser = _Parser(prog="jbtriple", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("describe", parents=[common, spec], help="dimension, basis, tripotents")
    sub.add_parser("verify-paper", parents=[common], help="run the verification battery")
    radius = sub.add_parser("radius", parents=[common, spec], help="numerical radius and norm")
    radius.add_argument("--op", required=True,
                        help="operator description as JSON text or @path")
    index = sub.add_parser("index", parents=[common, spec], help="numerical index estimate")
    index.add_argument("--samples", type=_positive_int, default=20)
    sub.add_parser("report", parents=[common, spec], help="commutativity report")
    sample = sub.add_parser("sample", parents=[common, spec], help="points of V(T)")
    sample.add_argument("--op", required=True)
    sample.add_argument("--points", type=_positive_int, default=200)
    return parser


def _load_json_arg(text):
    if text.startswith("@"):
        try:
            with open(text[1:]) as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {text[1:]}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc


def _space(args):
    return build_space(load_spec(args.spec), args.tol)


def _matrix_json(mat):
    return [[complex_to_json(z) for z in row] for row in mat]


def cmd_describe(args):
    space = _space(args)
    inventory = []
    for k, b in enumerate(space.basis_elements()):
        e = range_tripotent(b)
        ranks = peirce(e).ranks
        inventory.append({
            "basis_index": k,
            "peirce_ranks": list(ranks),
            "minimal": ranks[0] == 1,
            "complete": ranks[2] == 0,
            "unitary": ranks[0] == space.dim,
        })
    return {
        "dim": space.dim,
        "shape": list(space.shape),
        "spec": spec_to_json(space.spec),
        "basis": [_matrix_json(m) for m in space.basis],
        "commutative": is_commutative(space),
        "tripotents": inventory,
    }, True


def cmd_verify_paper(args):
    from .verify import run_all

    results = run_all(args.seed, args.budget)
    checks = []
    for k, items in results.items():
        for c in items:
            checks.append(dict(c.to_dict(), criterion=k))
    passed = all(c["pass"] for c in checks)
    return {"seed": args.seed, "checks": checks, "passed": passed}, passed


def cmd_radius(args):
    space = _space(args)
    T, anchors = operator_from_json(space, _load_json_arg(args.op))
    starts = args.budget or DEFAULT_STARTS
    nrm = operator_norm(T, starts, DEFAULT_STEPS, args.seed, anchors)
    out = {"operator": _load_json_arg(args.op), "norm": nrm.to_dict(), "budget": starts}
    converged = nrm.converged
    if T.is_complex_linear():
        rad = numerical_radius(T, starts, DEFAULT_STEPS, args.seed, anchors)
        out["radius"] = rad.to_dict()
        out["ratio"] = rad.value / nrm.value if nrm.value > 0 else None
        converged = converged and rad.converged
    return out, converged


def cmd_index(args):
    space = _space(args)
    starts = args.budget or INDEX_STARTS
    est = numerical_index_estimate(space, args.samples, args.seed, starts, INDEX_STEPS)
    return dict(est.to_dict(), budget=starts), True


def cmd_report(args):
    space = _space(args)
    rep = commutativity_report(space, args.tol, args.seed)
    return rep.to_dict(), True


def cmd_sample(args):
    space = _space(args)
    T, _ = operator_from_json(space, _load_json_arg(args.op))
    pts = numerical_range_sample(T, args.points, args.seed)
    return {"points": [complex_to_json(z) for z in pts]}, True


COMMANDS = {
    "describe": cmd_describe,
    "verify-paper": cmd_verify_paper,
    "radius": cmd_radius,
    "index": cmd_index,
    "report": cmd_report,
    "sample": cmd_sample,
}


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and all(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}.{i}")
    else:
        yield prefix, json.dumps(obj) if isinstance(obj, list) else obj


def _to_csv(command, payload):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if command == "sample":
        writer.writerow(["re", "im"])
        for re, im in payload["points"]:
            writer.writerow([repr(re), repr(im)])
    elif command == "verify-paper":
        writer.writerow(["criterion", "name", "expected", "got", "tol", "pass"])
        for c in payload["checks"]:
            writer.writerow([c["criterion"], c["name"], c["expected"], c["got"], c["tol"], c["pass"]])
    else:
        writer.writerow(["key", "value"])
        for key, value in _flatten(payload):
            writer.writerow([key, value])
    return buf.getvalue()


def _threads():
    raw = os.environ.get("JBT_THREADS")
    if raw is None or raw == "":
        return None
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"JBT_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError("JBT_THREADS must be a positive integer")
    return n


def run(argv=None):
    """Run the CLI; returns ``(exit_code, output_text, wrote_file)``."""
    args = build_parser().parse_args(argv)
    with threadpool_limits(limits=_threads()):
        payload, ok = COMMANDS[args.command](args)
    if args.format == "csv":
        text = _to_csv(args.command, payload)
    else:
        payload = dict(payload, schema_version=SCHEMA_VERSION, command=args.command)
        text = dumps(payload)
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc}") from exc
    if args.command == "verify-paper":
        code = EXIT_OK if ok else EXIT_FAIL
    elif args.strict and not ok:
        code = EXIT_NONCONVERGED
    else:
        code = EXIT_OK
    return code, text, bool(args.out)


def main(argv=None):
    try:
        code, text, wrote = run(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except JBTripleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if not wrote:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
