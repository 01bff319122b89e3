#!/usr/bin/env python
import sys
import logging
import argparse
from .._errors import BeliefBenchError
from .._labeler import FileCategory
from .._metrics import Belief
from .._pipeline import default_cache_dir, CACHE_ENV_VAR
from .._synth import SynthSpec, write_synthetic
from .._utils import setup_logging, LOGGER_ID

_logger = logging.getLogger(LOGGER_ID)


def _key_value(text):
    key, sep, value = text.partition("=")
    if not sep or not key or not value:
        raise argparse.ArgumentTypeError("Expected KEY=VALUE, got: %r" % text)
    return key.strip(), value.strip()


def _file_count(text):
    key, value = _key_value(text)
    try:
        return FileCategory.parse(key), int(value)
    except ValueError as ex:
        raise argparse.ArgumentTypeError(str(ex))


def _plant(text):
    key, value = _key_value(text)
    try:
        return Belief(key.upper()), float(value)
    except ValueError as ex:
        raise argparse.ArgumentTypeError(str(ex))


def _run(args):
    setup_logging(verbosity=args.verbosity+1, logger_id=LOGGER_ID)
    try:
        kwargs = dict(seed=args.seed,
                      n_commits=args.commits,
                      bugfix_rate=args.bugfix_rate,
                      author_pool=args.authors,
                      target_rho=dict(args.plant or []))
        if args.files:
            kwargs["n_files"] = dict(args.files)
        spec = SynthSpec(**kwargs)
        write_synthetic(spec, cache_dir=args.cache, slug=args.name)
    except (BeliefBenchError, ValueError) as ex:
        _logger.error(str(ex))
        return 1
    return 0


def _parse_args():
    description = ("Generate a synthetic commit history with optionally "
                   "planted belief/defect correlation and store it as an "
                   "extract, so the analysis can run offline.\n\n"
                   "Example:\n"
                   "  beliefbench-synth --seed 1 --files S=500 --plant B6=0.8")
    formatter = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(description=description,
                                     add_help=False,
                                     formatter_class=formatter)
    parser_group = parser.add_argument_group("Arguments")
    parser_group.add_argument("-c", "--cache", default=default_cache_dir(),
                              help=("Directory to write the extract to. "
                                    "Default: $%s or ./cache" % CACHE_ENV_VAR))
    parser_group.add_argument("--name", default="synth/seed-0",
                              help="Project slug (owner/name). "
                                   "Default: synth/seed-0")
    parser_group.add_argument("--seed", type=int, default=0,
                              help="Random seed. Default: 0")
    parser_group.add_argument("--commits", type=int, default=100,
                              help="Number of (background) commits. "
                                   "Default: 100")
    parser_group.add_argument("--files", type=_file_count, nargs="+",
                              default=None, metavar="CAT=N",
                              help=("Files per category, e.g. S=20 T=8 C=4 "
                                    "-=2. Default: S=20 T=8 C=4 -=2"))
    parser_group.add_argument("--bugfix-rate", type=float, default=0.3,
                              help="Share of bug-fixing commits. Default: 0.3")
    parser_group.add_argument("--authors", type=int, default=10,
                              help="Size of the author pool. Default: 10")
    parser_group.add_argument("--plant", type=_plant, nargs="+", default=None,
                              metavar="BELIEF=RHO",
                              help="Plant a correlation, e.g. B6=0.8")
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
