import io
import shutil
import logging
import git # Package: GitPython
import pandas as pd
from pathlib import Path
from dataclasses import dataclass, field
from ._errors import InputError, AcquisitionError
from ._gitlog import (CommitRecord,
                      extract_history,
                      read_extract,
                      write_extract)
from ._labeler import KeywordSet, DEFAULT_KEYWORDS, bugfix_fraction
from ._utils import LOGGER_ID, ensure_out_dir, parse_until, TimestampLike

_logger = logging.getLogger(LOGGER_ID)

from typing import List, Mapping, Optional, Sequence, Tuple, Union
PathLike = Union[str, Path]

DEFAULT_MANIFEST = Path(__file__).parent / "data" / "manifest.csv"
EXTRACT_SUFFIX = ".jsonl"
_MANIFEST_COLUMNS = ["slug", "url", "pin", "commits", "languages"]


@dataclass(frozen=True)
class ProjectEntry:
    slug: str
    clone_url: str
    pin_until: Optional[int] = None
    expected_commits: Optional[int] = None
    languages: Tuple[str, ...] = ()

    def __post_init__(self):
        owner, _, name = self.slug.partition("/")
        if not owner or not name or "/" in name:
            raise ValueError("Slug must have the form owner/name: %r"
                             % self.slug)
        if "__" in owner:
            raise ValueError("Owner must not contain '__': %r" % self.slug)
        if not self.clone_url:
            raise ValueError("Missing clone url for %s" % self.slug)
        if self.expected_commits is not None and self.expected_commits <= 0:
            raise ValueError("Expected commits must be positive for %s"
                             % self.slug)

    @property
    def cache_name(self) -> str:
        return self.slug.replace("/", "__")


def slug_from_cache_name(name: str) -> str:
    return name.replace("__", "/", 1)


def extract_path(cache_dir: PathLike, entry: ProjectEntry) -> Path:
    return Path(cache_dir) / (entry.cache_name + EXTRACT_SUFFIX)


def load_manifest(path: Optional[PathLike]=None) -> List[ProjectEntry]:
    """
    Read a project manifest: a .csv with the columns slug, url and the
    optional columns pin (ISO date), commits and languages (space
    separated). Lines starting with # are comments. Without a path, the
    46-project default manifest is loaded.
    """
    path = DEFAULT_MANIFEST if path is None else Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fid:
            lines = [l for l in fid if not l.lstrip().startswith("#")]
    except OSError as ex:
        raise InputError("Cannot read manifest %s: %s" % (path, ex))
    try:
        df = pd.read_csv(io.StringIO("".join(lines)),
                         dtype=str,
                         keep_default_na=False,
                         skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as ex:
        raise InputError("Malformed manifest %s: %s" % (path, ex))
    missing = [c for c in ["slug", "url"] if c not in df]
    if missing:
        raise InputError("Manifest %s misses the column(s): %s"
                         % (path, ", ".join(missing)))
    for col in _MANIFEST_COLUMNS:
        if col not in df:
            df[col] = ""

    entries = []
    seen = set()
    for i, row in enumerate(df.itertuples(index=False)):
        try:
            commits = row.commits.strip()
            entry = ProjectEntry(
                slug=row.slug.strip(),
                clone_url=row.url.strip(),
                pin_until=parse_until(row.pin.strip() or None),
                expected_commits=int(commits) if commits else None,
                languages=tuple(row.languages.split()))
        except ValueError as ex:
            raise InputError("Manifest %s, entry %d: %s" % (path, i, ex))
        if entry.slug in seen:
            raise InputError("Manifest %s, entry %d: duplicate slug %s"
                             % (path, i, entry.slug))
        seen.add(entry.slug)
        entries.append(entry)
    _logger.debug("Loaded %d manifest entries from %s", len(entries), path)
    return entries


def _is_repository(path: Path) -> bool:
    try:
        git.Repo(path)
        return True
    except (git.InvalidGitRepositoryError, git.NoSuchPathError):
        return False


def acquire(entry: ProjectEntry,
            cache_dir: PathLike,
            offline: bool=False) -> Path:
    """
    Make sure a clone of the project exists under cache_dir/owner__name.
    Idempotent: an existing clone is returned as is, without network access.
    """
    cache_dir = Path(cache_dir)
    target = cache_dir / entry.cache_name
    if _is_repository(target):
        _logger.debug("Using cached repository: %s", target)
        return target
    if offline:
        raise AcquisitionError("%s: not cached and running offline"
                               % entry.slug)
    if target.exists():
        raise AcquisitionError("%s: cache path exists but is not a "
                               "repository: %s" % (entry.slug, target))
    ensure_out_dir(cache_dir, raise_error=True)
    # Clone next to the target and rename once complete, so the cache
    # holds either a full clone or nothing.
    partial = target.with_name(target.name + ".partial")
    if partial.exists():
        shutil.rmtree(partial)
    _logger.info("Cloning %s...", entry.slug)
    try:
        git.Repo.clone_from(entry.clone_url, partial, no_checkout=True)
    except git.GitCommandError as ex:
        shutil.rmtree(partial, ignore_errors=True)
        stderr = ex.stderr.strip() if isinstance(ex.stderr, str) else ""
        raise AcquisitionError("%s: clone failed: %s"
                               % (entry.slug, stderr or ex))
    partial.rename(target)
    return target


def extract_project(entry: ProjectEntry,
                    cache_dir: PathLike,
                    until: TimestampLike=None,
                    refresh: bool=False,
                    offline: bool=False) -> List[CommitRecord]:
    """
    Return the project's commit records, from the extract cache if present
    (unless refresh), else by acquiring and extracting the repository.
    until overrides the entry's pin.
    """
    path = extract_path(cache_dir, entry)
    if path.is_file() and not refresh:
        _logger.debug("Using cached extract: %s", path)
        return read_extract(path)
    bound = parse_until(until) if until is not None else entry.pin_until
    try:
        repo_path = acquire(entry, cache_dir, offline=offline)
        records = extract_history(repo_path, until=bound)
        write_extract(records, path)
    except (OSError, git.GitCommandError) as ex:
        raise AcquisitionError("%s: %s" % (entry.slug, ex))
    _logger.info("%s: extracted %d commits", entry.slug, len(records))
    return records


###############################################################################
# Corpus verification
###############################################################################

@dataclass(frozen=True)
class ProjectStats:
    slug: str
    commits: int
    expected_commits: Optional[int]
    insertions: int
    deletions: int
    authors: int
    file_entries: int
    bugfix_fraction: Optional[float]

    @property
    def drift_pct(self) -> Optional[float]:
        if not self.expected_commits:
            return None
        return 100.0 * (self.commits - self.expected_commits) / self.expected_commits


@dataclass(frozen=True)
class CorpusReport:
    projects: Tuple[ProjectStats, ...]
    totals: Mapping[str, int]
    failures: Mapping[str, str] = field(default_factory=dict)

    def within_tolerance(self, pct: float) -> bool:
        drifts = [p.drift_pct for p in self.projects if p.drift_pct is not None]
        return all(abs(d) <= pct for d in drifts)

    def to_frame(self) -> pd.DataFrame:
        rows = [dict(project=p.slug,
                     commits=p.commits,
                     expected=p.expected_commits,
                     drift_pct=p.drift_pct,
                     insertions=p.insertions,
                     deletions=p.deletions,
                     authors=p.authors,
                     file_entries=p.file_entries,
                     bugfix_fraction=p.bugfix_fraction) for p in self.projects]
        columns = ["project", "commits", "expected", "drift_pct", "insertions",
                   "deletions", "authors", "file_entries", "bugfix_fraction"]
        data = pd.DataFrame(rows, columns=columns)
        data["expected"] = data["expected"].astype("Int64")
        return data


def verify_corpus(entries: Sequence[ProjectEntry],
                  extracts: Mapping[str, Sequence[CommitRecord]],
                  failures: Optional[Mapping[str, str]]=None,
                  keywords: KeywordSet=DEFAULT_KEYWORDS) -> CorpusReport:
    """
    Compare per-project commit counts with the manifest's expectations and
    compute corpus totals. extracts maps slugs to their records.
    """
    if not extracts:
        raise InputError("Corpus verification needs at least one extract")
    expected = {e.slug: e.expected_commits for e in entries}
    projects = []
    all_authors = set()
    for slug in sorted(extracts):
        records = extracts[slug]
        authors = {r.author_id for r in records}
        all_authors.update(authors)
        projects.append(ProjectStats(
            slug=slug,
            commits=len(records),
            expected_commits=expected.get(slug),
            insertions=sum(c.lines_added for r in records for c in r.changes),
            deletions=sum(c.lines_deleted for r in records for c in r.changes),
            authors=len(authors),
            file_entries=sum(len(r.changes) for r in records),
            bugfix_fraction=(bugfix_fraction(records, keywords)
                             if records else None)))
    totals = dict(projects=len(projects),
                  commits=sum(p.commits for p in projects),
                  insertions=sum(p.insertions for p in projects),
                  deletions=sum(p.deletions for p in projects),
                  authors=len(all_authors),
                  file_entries=sum(p.file_entries for p in projects),
                  failures=len(failures or {}))
    return CorpusReport(projects=tuple(projects),
                        totals=totals,
                        failures=dict(failures or {}))
