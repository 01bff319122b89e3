"""
Synthetic commit histories with planted metric/defect relationships, and
a brute-force recomputation of all per-file metrics for cross-checking.

The oracle below shares no code with the metrics module.
"""
import hashlib
import logging
import numpy as np
from fractions import Fraction
from pathlib import Path
from dataclasses import dataclass, field
from ._errors import GenerationError
from ._corpus import EXTRACT_SUFFIX
from ._gitlog import CommitRecord, FileChange, write_extract
from ._labeler import (FileCategory,
                       KeywordSet,
                       CategoryRules,
                       DEFAULT_KEYWORDS,
                       DEFAULT_RULES,
                       classify_commit,
                       categorize_file)
from ._metrics import Belief
from ._utils import LOGGER_ID, ensure_out_dir

_logger = logging.getLogger(LOGGER_ID)

from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union
PathLike = Union[str, Path]

PLANTABLE_BELIEFS = (Belief.B1, Belief.B2, Belief.B4, Belief.B6, Belief.B7)
_BASE_TIMESTAMP = 1262304000   # 2010-01-01T00:00:00Z
_STEP_SECONDS = 3600

# None of these contains a bug-fix stem (checked in the tests).
_PLAIN_MESSAGES = (
    "Add feature toggle",
    "Update documentation",
    "Rename helper",
    "Implement new endpoint",
    "Tweak styles",
    "Bump version",
    "Add example",
    "Refactor module layout",
)
_FIX_MESSAGES = (
    "Fix crash on startup",
    "Fix bug in parser",
    "Resolve issue with login",
    "Patch memory leak",
    "Correct error handling",
)
_SOURCE_EXTENSIONS = (".py", ".c", ".java", ".rb", ".js")


@dataclass(frozen=True)
class SynthSpec:
    seed: int = 0
    n_files: Mapping[FileCategory, int] = field(default_factory=lambda: {
        FileCategory.SOURCE: 20,
        FileCategory.TEST: 8,
        FileCategory.CONFIG: 4,
        FileCategory.STATIC: 2,
    })
    n_commits: int = 100
    target_rho: Mapping[Belief, float] = field(default_factory=dict)
    bugfix_rate: float = 0.3
    author_pool: int = 10
    planted_category: FileCategory = FileCategory.SOURCE

    def __post_init__(self):
        if self.n_commits < 1:
            raise ValueError("n_commits must be at least 1")
        if not 0.0 <= self.bugfix_rate <= 1.0:
            raise ValueError("bugfix_rate must be within [0, 1]")
        if self.author_pool < 1:
            raise ValueError("author_pool must be at least 1")
        if any(n < 0 for n in self.n_files.values()):
            raise ValueError("File counts must be non-negative")
        if sum(self.n_files.values()) < 1:
            raise ValueError("At least one file is required")


def _file_paths(spec: SynthSpec) -> Dict[FileCategory, List[str]]:
    paths: Dict[FileCategory, List[str]] = {}
    for category in FileCategory:
        n = spec.n_files.get(category, 0)
        if category is FileCategory.SOURCE:
            names = ["src/module_%04d%s" % (i, _SOURCE_EXTENSIONS[i % 5])
                     for i in range(n)]
        elif category is FileCategory.TEST:
            names = ["tests/test_module_%04d.py" % i for i in range(n)]
        elif category is FileCategory.CONFIG:
            names = ["config/settings_%04d.yml" % i for i in range(n)]
        else:
            names = ["assets/image_%04d.png" % i for i in range(n)]
        paths[category] = names
    return paths


def _author(index: int) -> str:
    return "dev%03d@example.com" % index


def _commit_id(seed: int, index: int) -> str:
    return hashlib.sha1(("%d:%d" % (seed, index)).encode("ascii")).hexdigest()


def _random_change(rng: np.random.Generator,
                   path: str,
                   category: FileCategory) -> FileChange:
    if category is FileCategory.STATIC:
        return FileChange(path=path, lines_added=0, lines_deleted=0,
                          is_binary=True)
    if rng.random() < 0.1:
        # Zero-delta touches (mode changes, empty edits).
        return FileChange(path=path, lines_added=0, lines_deleted=0)
    return FileChange(path=path,
                      lines_added=int(rng.integers(0, 40)),
                      lines_deleted=int(rng.integers(0, 20)))


def _check_plant(spec: SynthSpec) -> Optional[Tuple[Belief, float]]:
    if not spec.target_rho:
        return None
    if len(spec.target_rho) > 1:
        raise GenerationError("Only one belief can be planted at a time, "
                              "got: %s" % ", ".join(sorted(b.value for b in
                                                           spec.target_rho)))
    belief, rho = next(iter(spec.target_rho.items()))
    if belief not in PLANTABLE_BELIEFS:
        raise GenerationError("Cannot plant a correlation for %s; supported: "
                              "%s" % (belief.value, ", ".join(
                                  b.value for b in PLANTABLE_BELIEFS)))
    if not -1.0 < rho < 1.0:
        raise GenerationError("Target correlation must be within (-1, 1)")
    if spec.bugfix_rate <= 0.0:
        raise GenerationError("A planted correlation needs defect fixes, "
                              "but bugfix_rate is 0")
    if spec.planted_category is FileCategory.STATIC:
        raise GenerationError("Static files are never analyzed")
    if spec.n_files.get(spec.planted_category, 0) < 2:
        raise GenerationError("A planted correlation needs at least two "
                              "%s files" % spec.planted_category.value)
    if belief is Belief.B1 and spec.author_pool < 10:
        raise GenerationError("Planting B1 needs an author pool of at "
                              "least 10")
    return belief, rho


def _spread(rng: np.random.Generator, total: int, n: int) -> List[int]:
    """Split a non-negative total into n random non-negative parts."""
    return [int(v) for v in rng.multinomial(total, [1.0 / n] * n)]


def _planted_events(spec: SynthSpec,
                    rng: np.random.Generator,
                    belief: Belief,
                    rho: float,
                    paths: Sequence[str]) -> List[Tuple[str, bool, int, int, int]]:
    """
    Per-file events (path, is_fix, author, added, deleted) whose metric and
    defect count follow a bivariate normal with correlation rho, rounded
    to counts. Monotone, near-linear transforms keep the realized Pearson
    correlation close to rho.
    """
    n = len(paths)
    cov = [[1.0, rho], [rho, 1.0]]
    z = rng.multivariate_normal([0.0, 0.0], cov, size=n)
    mu_c, sd_c = 20.0, 6.0
    mu_d = max(2.0, spec.bugfix_rate * mu_c)
    sd_d = max(1.5, mu_d / 3.0)
    events = []
    for i, path in enumerate(paths):
        z_metric, z_defect = z[i]
        n_fix = max(1, int(round(mu_d + sd_d * z_defect)))
        if belief is Belief.B6:
            n_events = max(2, int(round(mu_c + sd_c * z_metric)))
        else:
            n_events = n_fix + int(rng.integers(1, 12))
        n_fix = min(n_fix, n_events)

        if belief is Belief.B1:
            mu_a, sd_a = spec.author_pool / 2.0, spec.author_pool / 6.0
            n_authors = int(round(mu_a + sd_a * z_metric))
            n_authors = min(spec.author_pool, max(1, n_authors))
            n_events = max(n_events, n_authors)
            pool = [int(a) for a in rng.choice(spec.author_pool, size=n_authors,
                                               replace=False)]
            # Every chosen developer appears at least once.
            authors = pool + [int(a) for a in rng.choice(pool, size=n_events
                                                         - n_authors)]
            rng.shuffle(authors)
        else:
            authors = [int(a) for a in rng.integers(0, spec.author_pool,
                                                    size=n_events)]

        added = [int(v) for v in rng.integers(1, 30, size=n_events)]
        deleted = [int(v) for v in rng.integers(0, 15, size=n_events)]
        if belief in (Belief.B2, Belief.B4, Belief.B7):
            amount = max(0, int(round(300.0 + 90.0 * z_metric)))
            if belief is Belief.B2:
                added = _spread(rng, amount, n_events)
            elif belief is Belief.B7:
                deleted = _spread(rng, amount, n_events)
            else:
                n_added = int(rng.binomial(amount, 0.6))
                added = _spread(rng, n_added, n_events)
                deleted = _spread(rng, amount - n_added, n_events)
        if belief is Belief.B1:
            # Touches by a developer must change something to count.
            added = [max(a, 1) for a in added]

        is_fix = [True] * n_fix + [False] * (n_events - n_fix)
        rng.shuffle(is_fix)
        for k in range(n_events):
            events.append((path, bool(is_fix[k]), authors[k],
                           added[k], deleted[k]))
    return events


def generate(spec: SynthSpec) -> List[CommitRecord]:
    """
    Generate a deterministic, schema-valid extract from spec. Without a
    planted correlation, exactly spec.n_commits commits touch 1-4 random
    files each. With one, every planted event gets a dedicated commit and
    spec.n_commits further commits touch the remaining categories.
    """
    plant = _check_plant(spec)
    rng = np.random.default_rng(spec.seed)
    paths = _file_paths(spec)

    # (paths, is_fix, author) per commit; line deltas drawn per path.
    commits: List[Tuple[List[Tuple[str, int, int]], bool, int]] = []
    if plant is not None:
        belief, rho = plant
        planted = paths[spec.planted_category]
        for path, is_fix, author, add, dele in _planted_events(
                spec, rng, belief, rho, planted):
            commits.append(([(path, add, dele)], is_fix, author))
        background = [p for c, ps in paths.items()
                      if c is not spec.planted_category for p in ps]
    else:
        background = [p for ps in paths.values() for p in ps]

    n_background = spec.n_commits if background else 0
    if plant is None and not background:
        raise GenerationError("No files to commit to")
    categories = {p: c for c, ps in paths.items() for p in ps}
    for _ in range(n_background):
        k = int(rng.integers(1, min(4, len(background)) + 1))
        chosen = sorted(int(i) for i in rng.choice(len(background), size=k,
                                                   replace=False))
        changes = []
        for i in chosen:
            change = _random_change(rng, background[i],
                                    categories[background[i]])
            changes.append((change.path, change.lines_added,
                            change.lines_deleted))
        is_fix = bool(rng.random() < spec.bugfix_rate)
        author = int(rng.integers(0, spec.author_pool))
        commits.append((changes, is_fix, author))

    order = rng.permutation(len(commits))
    records = []
    for index, position in enumerate(order):
        changes, is_fix, author = commits[int(position)]
        messages = _FIX_MESSAGES if is_fix else _PLAIN_MESSAGES
        message = messages[int(rng.integers(0, len(messages)))]
        file_changes = tuple(
            FileChange(path=p, lines_added=0, lines_deleted=0, is_binary=True)
            if categories[p] is FileCategory.STATIC else
            FileChange(path=p, lines_added=a, lines_deleted=d)
            for p, a, d in changes)
        records.append(CommitRecord(
            commit_id=_commit_id(spec.seed, index),
            author_id=_author(author),
            timestamp=_BASE_TIMESTAMP + index * _STEP_SECONDS,
            message=message,
            changes=file_changes))
    _logger.debug("Generated %d synthetic commits (seed %d)",
                  len(records), spec.seed)
    return records


###############################################################################
# Brute-force oracle
###############################################################################

def oracle_metrics(records: Sequence[CommitRecord],
                   keywords: KeywordSet=DEFAULT_KEYWORDS,
                   rules: CategoryRules=DEFAULT_RULES,
                   minor_threshold_pct: float=5.0) -> Dict[str, Dict[str, Any]]:
    """
    Recompute D and the inputs of all eight beliefs per non-static file by
    scanning the full record list once per file and metric.
    """
    ordered = sorted(records, key=lambda r: (r.timestamp, r.commit_id))
    all_paths = sorted({c.path for r in ordered for c in r.changes})
    out: Dict[str, Dict[str, Any]] = {}
    for path in all_paths:
        if categorize_file(path, rules) is FileCategory.STATIC:
            continue
        touches = []
        for r in ordered:
            for c in r.changes:
                if c.path == path:
                    touches.append((r.timestamp, r.author_id, c.lines_added,
                                    c.lines_deleted,
                                    classify_commit(r.message, keywords)))

        d = 0
        for t in touches:
            if t[4]:
                d += 1

        active = set()
        for t in touches:
            if t[2] != 0 or t[3] != 0:
                active.add(t[1])

        added = 0
        deleted = 0
        for t in touches:
            added += t[2]
            deleted += t[3]

        fix_times = [t[0] for t in touches if t[4]]
        created = touches[0][0]
        if not fix_times:
            b3 = None
        elif len(fix_times) == 1:
            b3 = (float(created), float(fix_times[0] - created))
        else:
            b3 = (float(created), float(fix_times[-1] - fix_times[-2]))

        if len(touches) < 2:
            b5 = None
        else:
            cut = len(touches) // 2
            first = len([t for t in touches[:cut] if t[4]])
            second = len([t for t in touches[cut:] if t[4]])
            b5 = (float(first), float(second))

        if added == 0:
            b8 = None
        else:
            everyone = sorted({t[1] for t in touches})
            limit = Fraction(minor_threshold_pct) / 100
            minor = 0
            for author in everyone:
                own = sum(t[2] for t in touches if t[1] == author)
                if Fraction(own, added) < limit:
                    minor += 1
            b8 = 100.0 * minor / len(everyone)

        out[path] = dict(category=categorize_file(path, rules),
                         d=d, b1=len(active), b2=added, b3=b3,
                         b4=added + deleted, b5=b5, b6=len(touches),
                         b7=deleted, b8=b8)
    return out


def write_synthetic(spec: SynthSpec,
                    cache_dir: PathLike,
                    slug: str="synth/seed-0") -> Path:
    """
    Generate an extract and store it in cache_dir under the cache name of
    slug, where the analyze step picks it up like a mined project.
    """
    owner, _, name = slug.partition("/")
    if not owner or not name or "/" in name or "__" in owner:
        raise GenerationError("Slug must have the form owner/name: %r" % slug)
    records = generate(spec)
    ensure_out_dir(cache_dir, raise_error=True)
    path = Path(cache_dir) / (slug.replace("/", "__") + EXTRACT_SUFFIX)
    write_extract(records, path)
    _logger.info("Wrote %d synthetic commits to: %s", len(records), path)
    return path
