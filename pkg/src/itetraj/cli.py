"""
Command line entry point.

    itetraj list-presets
    itetraj run --preset fig1 --out results/
    itetraj verify --config my.json --out results/ --tolerance angle=0.03
"""

import argparse
import json
import logging
import sys
import time

from . import __version__
from .experiments import DEFAULT_TOLERANCES, list_presets, load_config, run, verify


def _tolerance(text):
    key, sep, value = text.partition("=")
    if not sep or key not in DEFAULT_TOLERANCES:
        raise argparse.ArgumentTypeError(
            f"expected KEY=VAL with KEY one of {', '.join(sorted(DEFAULT_TOLERANCES))}")
    try:
        return key, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {key} needs a number, got {value!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="itetraj", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"itetraj {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("list-presets", help="show the built-in presets")
    for verb, text in (("run", "compute trajectories and write record files"),
                       ("verify", "check the structural properties on computed or stored records")):
        p = sub.add_parser(verb, help=text)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", metavar="PATH")
        src.add_argument("--preset", metavar="NAME")
        p.add_argument("--out", metavar="DIR", default=None if verb == "verify" else "itetraj-out")
        p.add_argument("--threads", metavar="N", type=int, default=1)
        p.add_argument("--tolerance", metavar="KEY=VAL", type=_tolerance, action="append", default=[])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.verb == "list-presets":
        for name, text in list_presets():
            print(f"{name}\t{text}")
        return 0
    try:
        cfg = load_config(args.config, args.preset)
    except (OSError, ValueError) as exc:
        print(f"itetraj: {exc}", file=sys.stderr)
        return 2
    cfg.setdefault("tolerances", {}).update(dict(args.tolerance))
    start = time.time()
    if args.verb == "run":
        records = run(cfg, args.out, args.threads)
        failed = [r for r in records if not r.ok]
        for r in records:
            print(f"{r.filename}\t{len(r.trajectory)} points\t{r.status}")
        print(f"# {len(records)} files in {args.out} ({time.time() - start:.1f} s)")
        return 1 if failed else 0
    report = verify(cfg, args.out, args.threads)
    json.dump(report.as_dict(), sys.stdout, indent=1)
    print()
    return 0 if report.passed else 1
