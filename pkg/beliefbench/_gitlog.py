import json
import codecs
import logging
import git # Package: GitPython
from pathlib import Path
from dataclasses import dataclass
from ._errors import InputError, ParseError
from ._utils import LOGGER_ID, parse_until, TimestampLike

_logger = logging.getLogger(LOGGER_ID)

from typing import Iterable, List, Optional, Tuple, Union
PathLike = Union[str, Path]

# Record and unit separators of the custom log format. Messages are free
# text; the ASCII RS/US control characters are assumed absent from them.
_RS = "\x1e"
_US = "\x1f"
_LOG_FORMAT = "%x1e" + "%x1f".join(["%H", "%P", "%ae", "%an", "%at", "%B"]) + "%x1f"


@dataclass(frozen=True)
class FileChange:
    path: str
    lines_added: int
    lines_deleted: int
    is_binary: bool = False

    def __post_init__(self):
        if not self.path:
            raise ValueError("FileChange path must not be empty")
        if self.lines_added < 0 or self.lines_deleted < 0:
            raise ValueError("Negative line delta for %s" % self.path)
        if self.is_binary and (self.lines_added or self.lines_deleted):
            raise ValueError("Binary change with line deltas: %s" % self.path)


@dataclass(frozen=True)
class CommitRecord:
    commit_id: str
    author_id: str
    timestamp: int
    message: str
    changes: Tuple[FileChange, ...] = ()
    is_merge: bool = False

    def __post_init__(self):
        if not self.commit_id:
            raise ValueError("CommitRecord needs a commit id")
        if self.timestamp <= 0:
            raise ValueError("Non-positive timestamp in commit %s"
                             % self.commit_id)
        object.__setattr__(self, "changes", tuple(self.changes))

    @property
    def sort_key(self) -> Tuple[int, str]:
        return (self.timestamp, self.commit_id)


def normalize_author(email: Optional[str], name: Optional[str]=None) -> str:
    email = (email or "").strip().lower()
    if email:
        return email
    name = (name or "").strip().lower()
    return name if name else "unknown"


def _unquote_path(path: str) -> str:
    # git quotes unusual path names C-style, with octal escapes for
    # non-ASCII bytes: "dir/na\303\257ve.c"
    if len(path) >= 2 and path.startswith('"') and path.endswith('"'):
        raw = codecs.escape_decode(path[1:-1].encode("ascii", "backslashreplace"))[0]
        return raw.decode("utf-8", errors="replace")
    return path


def _parse_numstat_line(line: str, commit_id: str) -> Optional[FileChange]:
    parts = line.split("\t", 2)
    if len(parts) != 3 or not parts[2]:
        _logger.warning("Commit %s: unparsable numstat line dropped: %r",
                        commit_id, line)
        return None
    added, deleted, path = parts
    path = _unquote_path(path)
    if added == "-" and deleted == "-":
        return FileChange(path=path, lines_added=0, lines_deleted=0,
                          is_binary=True)
    if not (added.isdigit() and deleted.isdigit()):
        _logger.warning("Commit %s: unparsable numstat line dropped: %r",
                        commit_id, line)
        return None
    return FileChange(path=path,
                      lines_added=int(added),
                      lines_deleted=int(deleted))


def parse_log(text: str) -> List[CommitRecord]:
    """
    Parse the output of `git log --numstat` run with the package's custom
    format into commit records, in the order of the log. Merge commits are
    kept and flagged; callers decide whether to drop them.
    """
    records = []
    for chunk in text.split(_RS):
        if not chunk.strip():
            continue
        fields = chunk.split(_US)
        if len(fields) < 7:
            _logger.warning("Skipping truncated log entry: %r", chunk[:80])
            continue
        commit_id, parents, email, name, ts, message = fields[:6]
        numstat = _US.join(fields[6:])
        commit_id = commit_id.strip()
        try:
            timestamp = int(ts)
        except ValueError:
            _logger.warning("Commit %s: invalid timestamp %r, skipped",
                            commit_id, ts)
            continue
        if timestamp <= 0:
            _logger.warning("Commit %s: non-positive timestamp, skipped",
                            commit_id)
            continue
        changes = []
        for line in numstat.splitlines():
            if not line.strip():
                continue
            change = _parse_numstat_line(line, commit_id)
            if change is not None:
                changes.append(change)
        records.append(CommitRecord(commit_id=commit_id,
                                    author_id=normalize_author(email, name),
                                    timestamp=timestamp,
                                    message=message.rstrip("\n"),
                                    changes=tuple(changes),
                                    is_merge=len(parents.split()) > 1))
    return records


def open_repository(repo_path: PathLike) -> git.Repo:
    repo_path = Path(repo_path)
    try:
        return git.Repo(repo_path)
    except git.NoSuchPathError:
        raise InputError("Repository path does not exist: %s" % repo_path)
    except git.InvalidGitRepositoryError:
        raise InputError("Not a git repository: %s" % repo_path)


def extract_history(repo_path: PathLike,
                    until: TimestampLike=None) -> List[CommitRecord]:
    """
    Extract the first-parent, non-merge history of the default branch
    (HEAD), oldest first. Ties on the timestamp are ordered by commit id,
    so repeated runs on the same repository state give identical output.

    until: optional bound (seconds since epoch or ISO date) on the author
           timestamp, inclusive.
    """
    until = parse_until(until)
    repo = open_repository(repo_path)
    if not repo.head.is_valid():
        _logger.info("Repository has no commits: %s", repo_path)
        return []
    try:
        text = repo.git.log("HEAD",
                            "--first-parent",
                            "--numstat",
                            "--no-renames",
                            "--no-color",
                            "--format=" + _LOG_FORMAT)
    except git.GitCommandError as ex:
        raise InputError("Cannot read history of %s: %s"
                         % (repo_path, ex.stderr.strip() or ex))

    records = parse_log(text)
    n_merges = sum(1 for r in records if r.is_merge)
    records = [r for r in records if not r.is_merge]
    if until is not None:
        records = [r for r in records if r.timestamp <= until]
    records.sort(key=lambda r: r.sort_key)
    _logger.debug("Extracted %d commits (%d merges dropped) from %s",
                  len(records), n_merges, repo_path)
    return records


###############################################################################
# Extract cache (JSON Lines)
###############################################################################

def _record_to_dict(record: CommitRecord) -> dict:
    # Field order is part of the on-disk format.
    return {"id": record.commit_id,
            "author": record.author_id,
            "ts": record.timestamp,
            "msg": record.message,
            "merge": record.is_merge,
            "files": [{"path": c.path,
                       "add": c.lines_added,
                       "del": c.lines_deleted,
                       "bin": c.is_binary} for c in record.changes]}


def _record_from_dict(data: dict) -> CommitRecord:
    changes = tuple(FileChange(path=f["path"],
                               lines_added=int(f["add"]),
                               lines_deleted=int(f["del"]),
                               is_binary=bool(f["bin"]))
                    for f in data["files"])
    return CommitRecord(commit_id=data["id"],
                        author_id=data["author"],
                        timestamp=int(data["ts"]),
                        message=data["msg"],
                        changes=changes,
                        is_merge=bool(data["merge"]))


def write_extract(records: Iterable[CommitRecord], path: PathLike) -> Path:
    path = Path(path)
    # Write-then-rename, a reader never sees a half-written extract.
    tmp_path = path.with_name(path.name + ".tmp")
    try:
        with open(tmp_path, "w", encoding="utf-8", newline="\n") as fid:
            for record in records:
                line = json.dumps(_record_to_dict(record),
                                  ensure_ascii=False,
                                  separators=(",", ":"))
                fid.write(line + "\n")
        tmp_path.replace(path)
    except Exception:
        if tmp_path.exists():
            tmp_path.unlink()
        raise
    return path


def read_extract(path: PathLike) -> List[CommitRecord]:
    path = Path(path)
    records = []
    try:
        with open(path, "rb") as fid:
            for line_number, raw in enumerate(fid, start=1):
                try:
                    line = raw.decode("utf-8")
                except UnicodeDecodeError as ex:
                    raise ParseError("Invalid UTF-8 (%s)" % ex,
                                     path=path, line_number=line_number)
                if not line.strip():
                    continue
                try:
                    data = json.loads(line)
                    records.append(_record_from_dict(data))
                except (ValueError, KeyError, TypeError) as ex:
                    raise ParseError("Malformed extract record (%s)" % ex,
                                     path=path, line_number=line_number)
    except OSError as ex:
        raise InputError("Cannot read extract %s: %s" % (path, ex))
    return records
