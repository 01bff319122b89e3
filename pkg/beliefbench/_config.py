import json
import hashlib
import logging
import yaml
from pathlib import Path
from dataclasses import dataclass, asdict, fields
from ._errors import InputError
from ._labeler import (KeywordSet,
                       CategoryRules,
                       DEFAULT_STEMS,
                       DEFAULT_TEST_MARKER,
                       DEFAULT_CONFIG_EXTENSIONS,
                       DEFAULT_SOURCE_EXTENSIONS)
from ._metrics import DEFAULT_MINOR_THRESHOLD_PCT
from ._report import DEFAULT_DISCREPANCY_THRESHOLD
from ._stats import DEFAULT_STRONG_THRESHOLD, QUARTILE_METHODS
from ._utils import LOGGER_ID, parse_until

_logger = logging.getLogger(LOGGER_ID)

from typing import Any, Dict, Optional, Tuple, Union
PathLike = Union[str, Path]

DEFAULT_PIN_UNTIL = "2019-06-30"


@dataclass(frozen=True)
class RunConfig:
    """
    Effective settings of an analysis run. The defaults are frozen; a
    different value for any field changes the config hash embedded in the
    reports.
    """
    keywords: Tuple[str, ...] = DEFAULT_STEMS
    test_marker: str = DEFAULT_TEST_MARKER
    config_extensions: Tuple[str, ...] = DEFAULT_CONFIG_EXTENSIONS
    source_extensions: Tuple[str, ...] = DEFAULT_SOURCE_EXTENSIONS
    strong_threshold: float = DEFAULT_STRONG_THRESHOLD
    minor_threshold_pct: float = DEFAULT_MINOR_THRESHOLD_PCT
    quartiles: str = "tukey"
    exclude_little_set: bool = True
    discrepancy_threshold: int = DEFAULT_DISCREPANCY_THRESHOLD
    pin_until: Optional[str] = DEFAULT_PIN_UNTIL

    def __post_init__(self):
        for name in ("keywords", "config_extensions", "source_extensions"):
            value = getattr(self, name)
            if isinstance(value, str) or not isinstance(value, (list, tuple)):
                raise InputError("Config field '%s' must be a list" % name)
            object.__setattr__(self, name, tuple(value))
        if self.quartiles not in QUARTILE_METHODS:
            raise InputError("Config field 'quartiles' must be one of %s"
                             % ", ".join(QUARTILE_METHODS))
        if not isinstance(self.exclude_little_set, bool):
            raise InputError("Config field 'exclude_little_set' must be "
                             "true or false")
        try:
            if not -1.0 <= float(self.strong_threshold) <= 1.0:
                raise ValueError("'strong_threshold' must be within [-1, 1]")
            if not 0.0 < float(self.minor_threshold_pct) <= 100.0:
                raise ValueError("'minor_threshold_pct' must be within "
                                 "(0, 100]")
            if int(self.discrepancy_threshold) < 1:
                raise ValueError("'discrepancy_threshold' must be positive")
            parse_until(self.pin_until)
            # Validates stems and extensions.
            self.keyword_set()
            self.category_rules()
        except (TypeError, ValueError) as ex:
            raise InputError("Invalid configuration: %s" % ex)

    def keyword_set(self) -> KeywordSet:
        return KeywordSet(stems=self.keywords)

    def category_rules(self) -> CategoryRules:
        return CategoryRules(test_marker=self.test_marker,
                             config_extensions=self.config_extensions,
                             source_extensions=self.source_extensions)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, tuple):
                data[key] = list(value)
        return data

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True,
                               separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def load_config(path: Optional[PathLike]=None) -> RunConfig:
    """
    Read a run configuration from a YAML file. Keys not given keep their
    defaults; unknown keys are an error so that typos do not silently fall
    back to defaults.
    """
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fid:
            data = yaml.safe_load(fid)
    except OSError as ex:
        raise InputError("Cannot read config file %s: %s" % (path, ex))
    except yaml.YAMLError as ex:
        raise InputError("Malformed config file %s: %s" % (path, ex))
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise InputError("Config file must contain a mapping: %s" % path)
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise InputError("Unknown config keys in %s: %s"
                         % (path, ", ".join(map(str, unknown))))
    if "pin_until" in data and data["pin_until"] is not None:
        # YAML reads unquoted dates as datetime.date
        data["pin_until"] = str(data["pin_until"])
    config = RunConfig(**data)
    _logger.info("Loaded config %s (hash %s)", path, config.config_hash())
    return config
