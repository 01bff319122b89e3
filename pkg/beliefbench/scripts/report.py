#!/usr/bin/env python
import sys
import argparse
from .._pipeline import cmd_report
from .._utils import setup_logging, LOGGER_ID


def _run(args):
    setup_logging(verbosity=args.verbosity, logger_id=LOGGER_ID)
    return cmd_report(summary=args.summary,
                      out_dir=args.out_dir)


def _parse_args():
    description = ("Draw one boxplot per belief (SVG) from a summary.json "
                   "and list the beliefs whose rank among developers differs "
                   "from their rank in the data.")
    formatter = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(description=description,
                                     add_help=False,
                                     formatter_class=formatter)
    parser_group = parser.add_argument_group("Arguments")
    parser_group.add_argument("-s", "--summary", default="./out/summary.json",
                              help=("Summary written by beliefbench-analyze, "
                                    "or its directory. "
                                    "Default: ./out/summary.json"))
    parser_group.add_argument("-o", "--out", dest="out_dir", default=None,
                              help=("Output directory. Default: the "
                                    "directory of the summary."))
    parser_group.add_argument("-v", "--verbosity", action="count", default=0,
                              help="Increase verbosity")
    parser_group.add_argument("-h", "--help", action="help",
                              help="Show this help text")
    parser_group.set_defaults(func=_run)
    return parser.parse_args()


def main():
    args = _parse_args()
    sys.exit(args.func(args))


if __name__ == "__main__":
    main()
