"""Command-line entry point: ``ctrlscape <command> [flags]``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

from .domains import Domain
from .hessian import DEFAULT_H, DEFAULT_ZERO_TOL
from .optimizer import AscentConfig
from . import suites

DOMAINS = ("sym", "sympl", "full")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _seed(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--domain", choices=DOMAINS, default="sym",
                        help="sym: symmetric unitary, sympl: self-dual unitary (size 2N), "
                             "full: U(N) baseline")
    common.add_argument("--dim", type=_positive_int, default=3, help="N (block count)")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--csv-dir", help="write one CSV per table into this directory")
    common.add_argument("--quiet", action="store_true", help="suppress the stdout summary")

    parser = argparse.ArgumentParser(prog="ctrlscape", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gradcheck", parents=[common], help="analytic vs finite-difference gradient")
    p.add_argument("--samples", type=_positive_int, default=100)

    sub.add_parser("critvals", parents=[common], help="critical values and gradient norms")

    p = sub.add_parser("signatures", parents=[common], help="Hessian signatures per orbit")
    p.add_argument("--rotations", type=_positive_int, default=3, help="random rotations per n")
    p.add_argument("--h", type=float, default=DEFAULT_H)
    p.add_argument("--zero-tol", type=float, default=DEFAULT_ZERO_TOL)

    p = sub.add_parser("trials", parents=[common], help="batch of gradient-ascent trials")
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--jobs", type=_positive_int, default=1, help="parallel trial workers")
    p.add_argument("--config", help="JSON file with ascent configuration keys")
    for f in fields(AscentConfig):
        flag = "--" + f.name.replace("_", "-")
        p.add_argument(flag, dest=f"cfg_{f.name}", type=type(f.default), default=None)

    p = sub.add_parser("target-invariance", parents=[common],
                       help="transported critical points of J(., W)")
    p.add_argument("--samples", type=_positive_int, default=20)
    p.add_argument("--h", type=float, default=DEFAULT_H)
    p.add_argument("--zero-tol", type=float, default=DEFAULT_ZERO_TOL)
    return parser


def _ascent_config(args, parser) -> AscentConfig:
    overrides = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            overrides.update(json.load(fh))
    for f in fields(AscentConfig):
        v = getattr(args, f"cfg_{f.name}")
        if v is not None:
            overrides[f.name] = v
    try:
        return AscentConfig().replace(**overrides)
    except (TypeError, ValueError) as exc:
        parser.error(f"bad ascent configuration: {exc}")


def run(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    domain = Domain(args.domain, args.dim)
    recorded = ["ctrlscape", *argv]

    if args.command == "gradcheck":
        doc = suites.cmd_gradcheck(domain, args.samples, args.seed, argv=recorded)
    elif args.command == "critvals":
        doc = suites.cmd_critvals(domain, args.seed, argv=recorded)
    elif args.command == "signatures":
        doc = suites.cmd_signatures(domain, args.rotations, args.seed, args.h, args.zero_tol,
                                    argv=recorded)
    elif args.command == "trials":
        config = _ascent_config(args, parser)
        doc = suites.cmd_trials(domain, args.trials, args.seed, config, args.jobs, argv=recorded)
    else:
        doc = suites.cmd_target_invariance(domain, args.samples, args.seed, args.h,
                                           args.zero_tol, argv=recorded)

    if args.out:
        doc.write_json(args.out)
    if args.csv_dir:
        doc.write_csv(args.csv_dir)
    if not args.quiet:
        print(doc.summary())
    return 0 if doc.passed else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
