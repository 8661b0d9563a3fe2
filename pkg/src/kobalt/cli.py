"""``kobalt`` command line: run an experiment, print or write its report.

Exit status: 0 when every check passes, 1 on a failed check or a numerical
error, 2 on a usage or schema error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import InvalidInputError, KobaltError
from .experiments import RUNNERS, ExperimentConfig, run
from .report import dumps

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kobalt", description="Kobayashi-metric geometry experiments.")
    parser.add_argument("subcommand", choices=sorted(RUNNERS))
    parser.add_argument("--input", help="JSON payload file")
    parser.add_argument("--out", help="directory for the JSON report and CSV tables")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--grid", type=int, help="override the experiment's grid size")
    parser.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    return parser


def _load_payload(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path} is not valid JSON: {exc}") from exc


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        config = ExperimentConfig(args.subcommand, _load_payload(args.input), args.grid, args.seed, args.out)
        doc = run(config)
    except InvalidInputError as exc:
        print(f"kobalt {args.subcommand}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KobaltError as exc:
        print(f"kobalt {args.subcommand}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        doc.write(args.out)
    if args.json:
        print(dumps(doc.to_json()))
    else:
        print("\n".join(doc.summary_lines()))
    return EXIT_OK if doc.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
