#!/usr/bin/env python
import sys
import argparse
from .._pipeline import cmd_extract, default_cache_dir, CACHE_ENV_VAR
from .._utils import setup_logging, LOGGER_ID


def _run(args):
    setup_logging(verbosity=args.verbosity, logger_id=LOGGER_ID)
    return cmd_extract(manifest=args.manifest,
                       cache_dir=args.cache,
                       until=args.until,
                       jobs=args.jobs,
                       refresh=args.refresh,
                       offline=args.offline,
                       show_progress=not args.no_progress)


def _parse_args():
    description = ("Clone the projects of a manifest and extract their "
                   "first-parent commit history (with per-file line deltas) "
                   "into a cache of JSON Lines files. Prints a verification "
                   "table that compares commit counts with the manifest.")
    formatter = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(description=description,
                                     add_help=False,
                                     formatter_class=formatter)
    parser_group = parser.add_argument_group("Arguments")
    parser_group.add_argument("-m", "--manifest", default=None,
                              help=("Project manifest (.csv). Default: the "
                                    "46-project manifest of the package."))
    parser_group.add_argument("-c", "--cache", default=default_cache_dir(),
                              help=("Cache directory for clones and extracts. "
                                    "Default: $%s or ./cache" % CACHE_ENV_VAR))
    parser_group.add_argument("-u", "--until", default=None,
                              help=("Ignore commits authored after this ISO "
                                    "date or timestamp. Overrides the pins "
                                    "of the manifest."))
    parser_group.add_argument("-j", "--jobs", type=int, default=4,
                              help="Number of parallel clones. Default: 4")
    parser_group.add_argument("--refresh", action="store_true",
                              help="Re-extract even if a cached extract exists.")
    parser_group.add_argument("--offline", action="store_true",
                              help="Never clone; use cached repositories only.")
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
