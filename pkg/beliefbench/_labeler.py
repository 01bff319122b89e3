import logging
from enum import Enum
from pathlib import PurePosixPath
from dataclasses import dataclass
from ._errors import InputError
from ._utils import LOGGER_ID

_logger = logging.getLogger(LOGGER_ID)

from typing import Sequence, Tuple, TYPE_CHECKING
if TYPE_CHECKING:
    from ._gitlog import CommitRecord


# Stemmed words whose presence marks a commit as bug-fixing. Frozen: the
# order is irrelevant for classification but kept for stable config hashes.
DEFAULT_STEMS: Tuple[str, ...] = (
    "bug", "fix", "issu", "error", "correct", "proper", "deprecat", "broke",
    "optimize", "patch", "solve", "slow", "obsolete", "vulnerab", "debug",
    "perf", "memory", "minor", "wart", "better", "complex", "break",
    "investigat", "compile", "defect", "inconsist", "crash", "problem",
    "resol",
)

DEFAULT_TEST_MARKER = "test"

DEFAULT_CONFIG_EXTENSIONS: Tuple[str, ...] = (
    ".yml", ".yaml", ".pom", ".xml", ".json", ".toml", ".ini", ".cfg",
    ".properties", ".conf", ".lock",
)

DEFAULT_SOURCE_EXTENSIONS: Tuple[str, ...] = (
    ".c", ".h",                                       # C
    ".cs",                                            # C#
    ".cpp", ".cc", ".cxx", ".hpp", ".hh", ".hxx",     # C++
    ".java",                                          # Java
    ".js", ".jsx", ".mjs", ".cjs",                    # JavaScript
    ".php",                                           # PHP
    ".py",                                            # Python
    ".rb", ".rake", ".erb",                           # Ruby
    ".sh", ".bash", ".zsh",                           # Shell
    ".html", ".htm",                                  # HTML
    ".css", ".scss", ".sass", ".less",                # CSS
)


class FileCategory(Enum):
    SOURCE = "Source"
    TEST = "Test"
    CONFIG = "Config"
    STATIC = "Static"

    @property
    def code(self) -> str:
        return _CATEGORY_CODES[self]

    @classmethod
    def parse(cls, value: str) -> "FileCategory":
        """Accept the enum value ("Source") or the one-letter code ("S")."""
        for category in cls:
            if value in (category.value, category.code):
                return category
        raise ValueError("Unknown file category: %r" % value)


_CATEGORY_CODES = {
    FileCategory.SOURCE: "S",
    FileCategory.TEST: "T",
    FileCategory.CONFIG: "C",
    FileCategory.STATIC: "-",
}

# Categories that take part in the belief analyses, in figure order.
ANALYZED_CATEGORIES: Tuple[FileCategory, ...] = (FileCategory.CONFIG,
                                                 FileCategory.TEST,
                                                 FileCategory.SOURCE)


@dataclass(frozen=True)
class KeywordSet:
    stems: Tuple[str, ...] = DEFAULT_STEMS

    def __post_init__(self):
        stems = tuple(self.stems)
        if not stems:
            raise ValueError("Keyword set must not be empty")
        for stem in stems:
            if not isinstance(stem, str) or not stem:
                raise ValueError("Invalid keyword stem: %r" % (stem,))
            if stem != stem.lower() or any(c.isspace() for c in stem):
                raise ValueError("Keyword stems must be lowercase and "
                                 "whitespace-free: %r" % stem)
        object.__setattr__(self, "stems", stems)

    def matches(self, message: str) -> bool:
        if not message:
            return False
        text = message.lower()
        return any(stem in text for stem in self.stems)


@dataclass(frozen=True)
class CategoryRules:
    test_marker: str = DEFAULT_TEST_MARKER
    config_extensions: Tuple[str, ...] = DEFAULT_CONFIG_EXTENSIONS
    source_extensions: Tuple[str, ...] = DEFAULT_SOURCE_EXTENSIONS

    def __post_init__(self):
        if not self.test_marker:
            raise ValueError("Test marker must not be empty")
        object.__setattr__(self, "test_marker", self.test_marker.lower())
        for name in ("config_extensions", "source_extensions"):
            exts = tuple(_normalize_extension(e) for e in getattr(self, name))
            object.__setattr__(self, name, exts)


def _normalize_extension(ext: str) -> str:
    ext = ext.strip().lower()
    if not ext:
        raise ValueError("Empty file extension")
    return ext if ext.startswith(".") else "." + ext


DEFAULT_KEYWORDS = KeywordSet()
DEFAULT_RULES = CategoryRules()


def classify_commit(message: str,
                    keywords: KeywordSet=DEFAULT_KEYWORDS) -> bool:
    """
    True if the commit message contains any of the stems as a substring,
    ignoring case. Derivatives are matched by containment, so "performance"
    matches "perf" and also "minority" matches "minor".
    """
    return keywords.matches(message)


def categorize_file(path: str,
                    rules: CategoryRules=DEFAULT_RULES) -> FileCategory:
    """
    Map a repository-relative path to exactly one category.

    Precedence: Test > Config > Source > Static.
    """
    if not path:
        raise ValueError("Path must not be empty")
    lowered = path.lower()
    if rules.test_marker in lowered:
        return FileCategory.TEST
    suffix = PurePosixPath(lowered).suffix
    if suffix in rules.config_extensions:
        return FileCategory.CONFIG
    if suffix in rules.source_extensions:
        return FileCategory.SOURCE
    return FileCategory.STATIC


def bugfix_fraction(records: Sequence["CommitRecord"],
                    keywords: KeywordSet=DEFAULT_KEYWORDS) -> float:
    if not records:
        raise InputError("Bug-fix fraction is undefined for zero commits")
    n_fixes = sum(1 for r in records if keywords.matches(r.message))
    return n_fixes / len(records)
