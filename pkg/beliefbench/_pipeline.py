import os
import logging
import pandas as pd
from pathlib import Path
from concurrent.futures import (ThreadPoolExecutor,
                                ProcessPoolExecutor,
                                as_completed)
from ._config import RunConfig, load_config
from ._corpus import (EXTRACT_SUFFIX,
                      load_manifest,
                      extract_project,
                      slug_from_cache_name,
                      verify_corpus)
from ._errors import BeliefBenchError, InputError
from ._gitlog import CommitRecord, read_extract
from ._labeler import ANALYZED_CATEGORIES, bugfix_fraction
from ._metrics import (Belief,
                       build_histories,
                       assemble_samples,
                       little_set_size,
                       metrics_frame)
from ._report import (ProjectReport,
                      SUMMARY_FILE,
                      DISCREPANCY_FILE,
                      OptionalPrinter,
                      emit_tables,
                      emit_boxplots,
                      load_summary,
                      discrepancy_table,
                      print_discrepancies)
from ._stats import correlate, summarize_all
from ._utils import (LOGGER_ID,
                     TimestampLike,
                     check_in_dir,
                     ensure_out_dir,
                     parse_until,
                     create_progress_bar)

_logger = logging.getLogger(LOGGER_ID)

from typing import Dict, List, Optional, Tuple, Union
PathLike = Union[str, Path]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ALL_FAILED = 2
CACHE_ENV_VAR = "BELIEFBENCH_CACHE"
DEFAULT_CACHE_DIR = "./cache"


def default_cache_dir() -> str:
    return os.environ.get(CACHE_ENV_VAR) or DEFAULT_CACHE_DIR


###############################################################################
# Extract
###############################################################################

def cmd_extract(manifest: Optional[PathLike]=None,
                cache_dir: Optional[PathLike]=None,
                until: TimestampLike=None,
                jobs: int=1,
                refresh: bool=False,
                offline: bool=False,
                show_progress: bool=True,
                printer: OptionalPrinter=None) -> int:
    """
    Acquire and extract every manifest project into the cache. Failing
    projects are logged and skipped. Returns 0 if at least one project was
    extracted, 2 if all failed, 1 on fatal input errors.
    """
    cache_dir = Path(cache_dir or default_cache_dir())
    try:
        until = parse_until(until)
    except ValueError as ex:
        _logger.error(str(ex))
        return EXIT_INPUT
    try:
        entries = load_manifest(manifest)
    except InputError as ex:
        _logger.error(str(ex))
        return EXIT_INPUT
    if not entries:
        _logger.error("Manifest lists no projects.")
        return EXIT_INPUT
    if not ensure_out_dir(cache_dir):
        return EXIT_INPUT

    extracts: Dict[str, List[CommitRecord]] = {}
    failures: Dict[str, str] = {}
    _logger.info("Extracting %d projects into %s...", len(entries), cache_dir)
    progress = create_progress_bar(size=len(entries),
                                   label="WORK",
                                   threaded=True,
                                   enabled=show_progress)
    progress.start()
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        futures = {executor.submit(extract_project, entry, cache_dir,
                                   until=until, refresh=refresh,
                                   offline=offline): entry
                   for entry in entries}
        for i, future in enumerate(as_completed(futures)):
            entry = futures[future]
            try:
                extracts[entry.slug] = future.result()
            except BeliefBenchError as ex:
                _logger.error("%s: %s", entry.slug, ex)
                failures[entry.slug] = str(ex)
            progress.update(i+1)
    progress.finish()

    if not extracts:
        _logger.error("All %d projects failed.", len(entries))
        return EXIT_ALL_FAILED
    report = verify_corpus(entries, extracts, failures)
    if printer is None:
        printer = print
    printer(report.to_frame().to_string(index=False))
    printer("Totals: " + ", ".join("%s=%s" % kv for kv in report.totals.items()))
    for slug in sorted(failures):
        printer("FAILED %s: %s" % (slug, failures[slug]))
    _logger.info("Extracted %d of %d projects.", len(extracts), len(entries))
    return EXIT_OK


###############################################################################
# Analyze
###############################################################################

def find_extracts(cache_dir: PathLike) -> List[Path]:
    return sorted(p for p in Path(cache_dir).glob("*" + EXTRACT_SUFFIX)
                  if p.is_file())


def analyze_records(project_id: str,
                    records: List[CommitRecord],
                    config: RunConfig) -> Tuple[ProjectReport, pd.DataFrame]:
    """
    Correlation cells and per-file metrics of one project. Returns the
    project report and the per-file metrics table.
    """
    keywords = config.keyword_set()
    histories = build_histories(records, keywords, config.category_rules())
    results = []
    for belief in Belief:
        for category in ANALYZED_CATEGORIES:
            sample = assemble_samples(histories, belief, category,
                                      exclude_little_set=config.exclude_little_set,
                                      minor_threshold_pct=config.minor_threshold_pct)
            results.append(correlate(project_id, sample,
                                     config.strong_threshold))
    files = {c: sum(1 for h in histories.values() if h.category is c)
             for c in ANALYZED_CATEGORIES}
    little = {c: little_set_size(histories, c) for c in ANALYZED_CATEGORIES}
    report = ProjectReport(project_id=project_id,
                           results=tuple(results),
                           little_sets=little,
                           files=files,
                           bugfix_fraction=(bugfix_fraction(records, keywords)
                                            if records else None),
                           commits=len(records))
    return report, metrics_frame(histories, config.minor_threshold_pct)


def analyze_extract(path: PathLike, config: RunConfig):
    path = Path(path)
    project_id = slug_from_cache_name(path.name[:-len(EXTRACT_SUFFIX)])
    records = read_extract(path)
    return analyze_records(project_id, records, config)


def cmd_analyze(cache_dir: Optional[PathLike]=None,
                config: Optional[PathLike]=None,
                out_dir: PathLike="./out",
                jobs: int=1,
                show_progress: bool=True) -> int:
    """
    Compute the belief x category correlation matrix of every cached
    extract and write results.csv, summary.json and files/<project>.csv.
    """
    cache_dir = Path(cache_dir or default_cache_dir())
    out_dir = Path(out_dir)
    try:
        run_config = load_config(config)
    except InputError as ex:
        _logger.error(str(ex))
        return EXIT_INPUT
    if not check_in_dir(cache_dir):
        return EXIT_INPUT
    paths = find_extracts(cache_dir)
    if not paths:
        _logger.error("No extracts found in: %s", cache_dir)
        return EXIT_INPUT
    files_dir = out_dir / "files"
    if not ensure_out_dir(files_dir):
        return EXIT_INPUT

    _logger.info("Analyzing %d extracts...", len(paths))
    analyzed = {}
    progress = create_progress_bar(size=len(paths),
                                   label="WORK",
                                   enabled=show_progress)
    progress.start()
    try:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                futures = {executor.submit(analyze_extract, p, run_config): p
                           for p in paths}
                for i, future in enumerate(as_completed(futures)):
                    analyzed[futures[future]] = future.result()
                    progress.update(i+1)
        else:
            for i, p in enumerate(paths):
                analyzed[p] = analyze_extract(p, run_config)
                progress.update(i+1)
    except BeliefBenchError as ex:
        progress.finish()
        _logger.error(str(ex))
        return EXIT_INPUT
    progress.finish()

    # Serial aggregation in path order keeps the outputs deterministic.
    reports = []
    for p in paths:
        report, frame = analyzed[p]
        frame.to_csv(files_dir / (p.name[:-len(EXTRACT_SUFFIX)] + ".csv"),
                     index=False, lineterminator="\n")
        reports.append(report)
    results = [r for rep in reports for r in rep.results]
    summaries = summarize_all(results, method=run_config.quartiles)
    try:
        emit_tables(reports, summaries, out_dir,
                    config_hash=run_config.config_hash(),
                    config=run_config.to_dict())
    except InputError as ex:
        _logger.error(str(ex))
        return EXIT_INPUT
    return EXIT_OK


###############################################################################
# Report
###############################################################################

def cmd_report(summary: PathLike,
               out_dir: Optional[PathLike]=None,
               printer: OptionalPrinter=None) -> int:
    """
    Draw the boxplots and the belief/evidence discrepancy table from a
    summary.json written by cmd_analyze.
    """
    summary = Path(summary)
    if summary.is_dir():
        summary = summary / SUMMARY_FILE
    out_dir = Path(out_dir) if out_dir is not None else summary.parent
    try:
        document = load_summary(summary)
        config = RunConfig(**{k: v for k, v in document.config.items()
                              if k in RunConfig.__dataclass_fields__})
        emit_boxplots(document.summaries, out_dir,
                      config_hash=document.config_hash,
                      threshold=config.strong_threshold)
    except BeliefBenchError as ex:
        _logger.error(str(ex))
        return EXIT_INPUT
    table = discrepancy_table(document.summaries,
                              threshold=config.discrepancy_threshold)
    table.to_csv(out_dir / DISCREPANCY_FILE, index=False, lineterminator="\n")
    if printer is None:
        printer = print
    print_discrepancies(table, printer=printer)
    return EXIT_OK
