"""Command-line entry point: ``pgmfunctor {moralise,triangulate,joint,verify,dot}``.

Exit codes: 0 success, 1 usage error, 2 parse or validation failure
(including a failed verification), 3 degenerate network.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from pathlib import Path
from typing import Sequence, TextIO

from . import fileformat
from .errors import DegenerateNetworkError, LimitExceededError, PGMError
from .graphs import to_dot
from .network import BayesianNetwork, MarkovNetwork, bn_joint, mn_joint
from .semantics import DEGENERATE
from .transform import moralise_bn, triangulate_mn

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_DEGENERATE = 0, 1, 2, 3
DEFAULT_MAX_STATES = 2**20


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(f"{self.prog}: {message}")


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _check_size(net, max_states: int) -> None:
    n = math.prod(len(s) for s in net.tau.values())
    if n > max_states:
        raise LimitExceededError(f"joint has {n} states, more than --max-states {max_states}")


def _write(text: str, path, out: TextIO) -> None:
    if path in (None, "-"):
        out.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _joint_of(net):
    """``(Z, distribution)``; Z is 1 for Bayesian networks."""
    if isinstance(net, BayesianNetwork):
        return 1.0, bn_joint(net)
    z, dist = mn_joint(net)
    if dist is DEGENERATE:
        raise DegenerateNetworkError("Markov network is degenerate (Z = 0)")
    return z, dist


def _verdict(dev: float, tol: float) -> tuple[str, bool]:
    ok = dev <= tol
    return (f"max deviation {dev:.3e} <= {tol:g}, PASS" if ok else f"max deviation {dev:.3e} > {tol:g}, FAIL"), ok


def cmd_moralise(args, out: TextIO) -> int:
    bn = fileformat.load(args.input)
    if not isinstance(bn, BayesianNetwork):
        raise PGMError("moralise expects a bayesian network file")
    _check_size(bn, args.max_states)
    mn = moralise_bn(bn)
    _write(fileformat.dumps(mn), args.output, out)
    z, dist = mn_joint(mn)
    line, ok = _verdict(dist.max_deviation(bn_joint(bn)), args.tolerance)
    info = sys.stderr if args.output in (None, "-") else out
    print(f"Z = {_fmt(z)}", file=info)
    print(f"joint preserved: {line}", file=info)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_triangulate(args, out: TextIO) -> int:
    mn = fileformat.load(args.input)
    if not isinstance(mn, MarkovNetwork):
        raise PGMError("triangulate expects a markov network file")
    _check_size(mn, args.max_states)
    res = triangulate_mn(mn)
    _write(fileformat.dumps(res.bn), args.output, out)
    info = sys.stderr if args.output in (None, "-") else out
    if args.dump_unnormalized:
        doc = {
            "Z": res.z,
            "unnormalized": [fileformat.tensor_document(v, res.unnormalized[v]) for v in res.bn.dag.labels],
            "lambda": [fileformat.tensor_document(v, res.lambdas[v]) for v in res.bn.dag.labels],
        }
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        if args.output in (None, "-"):
            info.write(text)
        else:
            path = Path(args.output).with_suffix(".unnormalized.json")
            path.write_text(text, encoding="utf-8")
            print(f"unnormalized family written to {path}", file=info)
    print(f"Z = {_fmt(res.z)}", file=info)
    return EXIT_OK


def cmd_joint(args, out: TextIO) -> int:
    net = fileformat.load(args.input)
    _check_size(net, args.max_states)
    z, dist = _joint_of(net)
    if isinstance(net, MarkovNetwork):
        print(f"Z: {_fmt(z)}", file=out)
    sets = dist.codomain
    for idx in itertools.product(*(range(len(s)) for s in sets)):
        key = ",".join(f"{s.name}={s.elements[i]}" for s, i in zip(sets, idx))
        print(f"{key}: {_fmt(float(dist.entries[idx]))}", file=out)
    return EXIT_OK


def cmd_verify(args, out: TextIO) -> int:
    src = fileformat.load(args.src)
    _check_size(src, args.max_states)
    direction = args.direction or ("moralise" if isinstance(src, BayesianNetwork) else "triangulate")
    if direction == "moralise":
        if not isinstance(src, BayesianNetwork):
            raise PGMError("moralise direction needs a bayesian source")
        result = moralise_bn(src)
    else:
        if not isinstance(src, MarkovNetwork):
            raise PGMError("triangulate direction needs a markov source")
        result = triangulate_mn(src).bn
    reference = fileformat.load(args.dst) if args.dst else src
    if reference.graph.labels != result.graph.labels:
        raise PGMError("the networks do not share their variables")
    _, want = _joint_of(reference)
    _, got = _joint_of(result)
    dev = got.max_deviation(want)
    if args.dst and reference.graph != result.graph:
        print("note: reference graph differs from the transformed graph", file=out)
    line, ok = _verdict(dev, args.tolerance)
    print(line, file=out)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_dot(args, out: TextIO) -> int:
    net = fileformat.load(args.input)
    out.write(to_dot(net.graph, name=Path(args.input).stem or "G"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tolerance", type=float, default=1e-9, help="comparison tolerance (default 1e-9)")
    common.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES, help="cap on the joint state space")

    p = _Parser(prog="pgmfunctor", description="Moralise and triangulate discrete graphical models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("moralise", parents=[common], help="Bayesian network file -> Markov network file")
    s.add_argument("input")
    s.add_argument("output", nargs="?", default="-")
    s.set_defaults(func=cmd_moralise)

    s = sub.add_parser("triangulate", parents=[common], help="Markov network file -> Bayesian network file")
    s.add_argument("input")
    s.add_argument("output", nargs="?", default="-")
    s.add_argument("--dump-unnormalized", action="store_true", help="also write the unnormalised tables and lambdas")
    s.set_defaults(func=cmd_triangulate)

    s = sub.add_parser("joint", parents=[common], help="print the joint distribution")
    s.add_argument("input")
    s.set_defaults(func=cmd_joint)

    s = sub.add_parser("verify", parents=[common], help="transform a network and compare joints")
    s.add_argument("src")
    s.add_argument("dst", nargs="?")
    s.add_argument("--direction", choices=["moralise", "triangulate"])
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("dot", parents=[common], help="print the graph in Graphviz DOT")
    s.add_argument("input")
    s.set_defaults(func=cmd_dot)
    return p


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except DegenerateNetworkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (PGMError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
