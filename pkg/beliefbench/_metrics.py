import logging
import pandas as pd
from enum import Enum
from collections import defaultdict
from dataclasses import dataclass, field
from ._gitlog import CommitRecord
from ._labeler import (FileCategory,
                       KeywordSet,
                       CategoryRules,
                       DEFAULT_KEYWORDS,
                       DEFAULT_RULES,
                       categorize_file)
from ._utils import LOGGER_ID

_logger = logging.getLogger(LOGGER_ID)

from typing import Dict, List, Mapping, Optional, Sequence, Tuple
Pair = Tuple[float, float]

# Minor contributors wrote strictly less than this share of a file's lines.
DEFAULT_MINOR_THRESHOLD_PCT = 5.0


class Belief(Enum):
    B1 = "B1"   # More developers
    B2 = "B2"   # Added lines
    B3 = "B3"   # Recently created
    B4 = "B4"   # LOC (churn)
    B5 = "B5"   # More bug fixes
    B6 = "B6"   # More commits
    B7 = "B7"   # Removed lines
    B8 = "B8"   # Ownership

    @property
    def is_paired(self) -> bool:
        """B3 and B5 correlate two quantities of their own, not metric vs D."""
        return self in (Belief.B3, Belief.B5)


@dataclass(frozen=True)
class FileEvent:
    timestamp: int
    author_id: str
    lines_added: int
    lines_deleted: int
    is_bugfix: bool


@dataclass(frozen=True)
class FileHistory:
    path: str
    category: FileCategory
    events: Tuple[FileEvent, ...]
    per_author_added: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.events:
            raise ValueError("FileHistory needs at least one event: %s"
                             % self.path)

    @property
    def created_at(self) -> int:
        return self.events[0].timestamp


@dataclass(frozen=True)
class BeliefSample:
    belief: Belief
    category: FileCategory
    xs: Tuple[float, ...] = ()
    ys: Tuple[float, ...] = ()
    paths: Tuple[str, ...] = ()
    little_set: int = 0
    not_applicable: int = 0

    def __post_init__(self):
        if not (len(self.xs) == len(self.ys) == len(self.paths)):
            raise ValueError("Sample vectors differ in length")

    @property
    def n(self) -> int:
        return len(self.xs)


def build_histories(records: Sequence[CommitRecord],
                    keywords: KeywordSet=DEFAULT_KEYWORDS,
                    rules: CategoryRules=DEFAULT_RULES) -> Dict[str, FileHistory]:
    """
    Fold commit records (sorted oldest first) into one history per
    analyzable path. Static paths are dropped. The returned dict is ordered
    by path.
    """
    events = defaultdict(list)
    categories: Dict[str, FileCategory] = {}
    n_static = 0
    for record in records:
        is_bugfix = keywords.matches(record.message)
        for change in record.changes:
            category = categories.get(change.path)
            if category is None:
                category = categorize_file(change.path, rules)
                categories[change.path] = category
            if category is FileCategory.STATIC:
                n_static += 1
                continue
            events[change.path].append(FileEvent(timestamp=record.timestamp,
                                                 author_id=record.author_id,
                                                 lines_added=change.lines_added,
                                                 lines_deleted=change.lines_deleted,
                                                 is_bugfix=is_bugfix))
    histories = {}
    for path in sorted(events):
        file_events = events[path]
        per_author: Dict[str, int] = {}
        for event in file_events:
            per_author[event.author_id] = (per_author.get(event.author_id, 0)
                                           + event.lines_added)
        histories[path] = FileHistory(path=path,
                                      category=categories[path],
                                      events=tuple(file_events),
                                      per_author_added=per_author)
    _logger.debug("Built %d file histories (%d static file changes skipped)",
                  len(histories), n_static)
    return histories


###############################################################################
# Defect proneness and belief metrics
###############################################################################

def defect_proneness(h: FileHistory) -> int:
    """D: the number of bug-fixing commits that touched the file."""
    return sum(1 for e in h.events if e.is_bugfix)


def b1_developers(h: FileHistory) -> int:
    return len({e.author_id for e in h.events
                if e.lines_added + e.lines_deleted > 0})


def b2_added(h: FileHistory) -> int:
    return sum(e.lines_added for e in h.events)


def b3_pair(h: FileHistory) -> Optional[Pair]:
    """
    (creation time, interval to a defect fix). With one fix, the interval
    runs from creation to that fix; with more, it is the gap between the
    two most recent fixes.
    """
    fixes = [e.timestamp for e in h.events if e.is_bugfix]
    if not fixes:
        return None
    if len(fixes) == 1:
        interval = fixes[0] - h.created_at
    else:
        interval = fixes[-1] - fixes[-2]
    return (float(h.created_at), float(interval))


def b4_loc(h: FileHistory) -> int:
    return sum(e.lines_added + e.lines_deleted for e in h.events)


def b5_pair(h: FileHistory) -> Optional[Pair]:
    """
    Bug fixes in the first and in the second half of the history. For an
    odd number of events the first half is the smaller one.
    """
    n = len(h.events)
    if n < 2:
        return None
    half = n // 2
    first = sum(1 for e in h.events[:half] if e.is_bugfix)
    second = sum(1 for e in h.events[half:] if e.is_bugfix)
    return (float(first), float(second))


def b6_commits(h: FileHistory) -> int:
    return len(h.events)


def b7_deleted(h: FileHistory) -> int:
    return sum(e.lines_deleted for e in h.events)


def b8_minor_pct(h: FileHistory,
                 threshold_pct: float=DEFAULT_MINOR_THRESHOLD_PCT) -> Optional[float]:
    """
    Percentage of the file's developers who added strictly less than
    threshold_pct percent of its lines. None if no lines were ever added.
    """
    total = sum(h.per_author_added.values())
    if total <= 0:
        return None
    authors = {e.author_id for e in h.events}
    # a/total < pct/100, kept in exact arithmetic for integer inputs
    n_minor = sum(1 for a in authors
                  if h.per_author_added.get(a, 0) * 100 < threshold_pct * total)
    return 100.0 * n_minor / len(authors)


_SCALAR_METRICS = {
    Belief.B1: b1_developers,
    Belief.B2: b2_added,
    Belief.B4: b4_loc,
    Belief.B6: b6_commits,
    Belief.B7: b7_deleted,
}


def belief_value(h: FileHistory,
                 belief: Belief,
                 minor_threshold_pct: float=DEFAULT_MINOR_THRESHOLD_PCT
                 ) -> Optional[Pair]:
    """
    The (x, y) observation a file contributes to a belief's sample, or None
    if the belief is not applicable to the file.
    """
    if belief is Belief.B3:
        return b3_pair(h)
    if belief is Belief.B5:
        return b5_pair(h)
    if belief is Belief.B8:
        value = b8_minor_pct(h, minor_threshold_pct)
    else:
        value = _SCALAR_METRICS[belief](h)
    if value is None:
        return None
    return (float(value), float(defect_proneness(h)))


def assemble_samples(histories: Mapping[str, FileHistory],
                     belief: Belief,
                     category: FileCategory,
                     exclude_little_set: bool=True,
                     minor_threshold_pct: float=DEFAULT_MINOR_THRESHOLD_PCT
                     ) -> BeliefSample:
    """
    Collect the paired observations of one belief over the files of one
    category, in path order. Files without any defect fix (the little set)
    are diverted and counted; they are always diverted for B3, which has
    no value without a fix.
    """
    xs: List[float] = []
    ys: List[float] = []
    paths: List[str] = []
    little_set = 0
    not_applicable = 0
    for path in sorted(histories):
        h = histories[path]
        if h.category is not category:
            continue
        if defect_proneness(h) == 0 and (exclude_little_set
                                         or belief is Belief.B3):
            little_set += 1
            continue
        pair = belief_value(h, belief, minor_threshold_pct)
        if pair is None:
            not_applicable += 1
            continue
        xs.append(pair[0])
        ys.append(pair[1])
        paths.append(path)
    return BeliefSample(belief=belief,
                        category=category,
                        xs=tuple(xs),
                        ys=tuple(ys),
                        paths=tuple(paths),
                        little_set=little_set,
                        not_applicable=not_applicable)


def little_set_size(histories: Mapping[str, FileHistory],
                    category: FileCategory) -> int:
    return sum(1 for h in histories.values()
               if h.category is category and defect_proneness(h) == 0)


def metrics_frame(histories: Mapping[str, FileHistory],
                  minor_threshold_pct: float=DEFAULT_MINOR_THRESHOLD_PCT
                  ) -> pd.DataFrame:
    """One row per file with D and the raw inputs of all eight beliefs."""
    columns = ["path", "category", "d", "b1", "b2", "b3_created",
               "b3_interval", "b4", "b5_first", "b5_second", "b6", "b7", "b8"]
    rows = []
    for path in sorted(histories):
        h = histories[path]
        b3 = b3_pair(h)
        b5 = b5_pair(h)
        rows.append(dict(path=path,
                         category=h.category.value,
                         d=defect_proneness(h),
                         b1=b1_developers(h),
                         b2=b2_added(h),
                         b3_created=None if b3 is None else int(b3[0]),
                         b3_interval=None if b3 is None else int(b3[1]),
                         b4=b4_loc(h),
                         b5_first=None if b5 is None else int(b5[0]),
                         b5_second=None if b5 is None else int(b5[1]),
                         b6=b6_commits(h),
                         b7=b7_deleted(h),
                         b8=b8_minor_pct(h, minor_threshold_pct)))
    data = pd.DataFrame(rows, columns=columns)
    # Nullable integers keep "missing" distinct from 0 in the CSV.
    for col in ["b3_created", "b3_interval", "b5_first", "b5_second"]:
        data[col] = data[col].astype("Int64")
    return data
