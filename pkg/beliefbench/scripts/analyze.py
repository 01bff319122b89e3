#!/usr/bin/env python
import sys
import argparse
from .._pipeline import cmd_analyze, default_cache_dir, CACHE_ENV_VAR
from .._utils import setup_logging, LOGGER_ID


def _run(args):
    setup_logging(verbosity=args.verbosity, logger_id=LOGGER_ID)
    return cmd_analyze(cache_dir=args.cache,
                       config=args.config,
                       out_dir=args.out_dir,
                       jobs=args.jobs,
                       show_progress=not args.no_progress)


def _parse_args():
    description = ("Correlate the eight belief metrics with defect proneness "
                   "for every cached extract. Writes results.csv, "
                   "summary.json and per-file metrics (files/*.csv).")
    formatter = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(description=description,
                                     add_help=False,
                                     formatter_class=formatter)
    parser_group = parser.add_argument_group("Arguments")
    parser_group.add_argument("-c", "--cache", default=default_cache_dir(),
                              help=("Directory with the extracts (*.jsonl). "
                                    "Default: $%s or ./cache" % CACHE_ENV_VAR))
    parser_group.add_argument("-o", "--out", dest="out_dir", default="./out",
                              help="Output directory. Default: ./out")
    parser_group.add_argument("--config", default=None,
                              help="Run configuration (.yaml). Optional.")
    parser_group.add_argument("-j", "--jobs", type=int, default=1,
                              help="Number of worker processes. Default: 1")
    parser_group.add_argument("--no-progress", action="store_true",
                              help="Hide the progress bar.")
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
