import json
import math
import logging
import pandas as pd
from pathlib import Path
from dataclasses import dataclass, field
from ._errors import InputError, ParseError
from ._labeler import FileCategory, ANALYZED_CATEGORIES
from ._metrics import Belief
from ._stats import (CorrelationResult,
                     DistributionSummary,
                     Strength,
                     DEFAULT_STRONG_THRESHOLD,
                     order_beliefs,
                     pooled_summaries)
from ._utils import LOGGER_ID, ensure_out_dir

_logger = logging.getLogger(LOGGER_ID)

# Run static type checking with the following command:
# mypy beliefbench --ignore-missing-imports --allow-redefinition
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union
from typing_extensions import Protocol
PathLike = Union[str, Path]
class CallablePrinter(Protocol):
    def __call__(self, msg: Optional[str]=None) -> None: ...
OptionalPrinter = Optional[CallablePrinter]

RESULTS_FILE = "results.csv"
SUMMARY_FILE = "summary.json"
DISCREPANCY_FILE = "discrepancy.csv"
FIGURE_FILE = "figure.svg"
RESULTS_COLUMNS = ["project", "belief", "category", "n", "rho", "strength"]
DEFAULT_DISCREPANCY_THRESHOLD = 4


@dataclass(frozen=True)
class BeliefMeta:
    belief: Belief
    statement: str
    agree_pct: int

    def __post_init__(self):
        if not 0 <= self.agree_pct <= 100:
            raise ValueError("Agreement must be a percentage: %r"
                             % self.agree_pct)


# Developer survey statements and the share of developers who agreed.
BELIEF_META: Tuple[BeliefMeta, ...] = (
    BeliefMeta(Belief.B1, "Files changed by more developers are more buggy.", 64),
    BeliefMeta(Belief.B2, "A file with more added lines is more bug-prone.", 61),
    BeliefMeta(Belief.B3, "Recently created files tend to be buggy.", 52),
    BeliefMeta(Belief.B4, "A file with more lines of code (LOC) is more bug-prone.", 48),
    BeliefMeta(Belief.B5, "Files with more fixed bugs are more bug-prone.", 48),
    BeliefMeta(Belief.B6, "A file with more commits is more bug-prone.", 46),
    BeliefMeta(Belief.B7, "A file with more removed lines is more bug-prone.", 35),
    BeliefMeta(Belief.B8, "Files with fewer lines contributed by their owners "
                          "(who contribute most changes) are more bug-prone.", 30),
)


@dataclass(frozen=True)
class ProjectReport:
    project_id: str
    results: Tuple[CorrelationResult, ...]
    little_sets: Mapping[FileCategory, int] = field(default_factory=dict)
    files: Mapping[FileCategory, int] = field(default_factory=dict)
    bugfix_fraction: Optional[float] = None
    commits: int = 0

    def __post_init__(self):
        if len(self.results) > len(Belief) * len(ANALYZED_CATEGORIES):
            raise ValueError("Too many result cells for %s" % self.project_id)
        if any(n < 0 for n in self.little_sets.values()):
            raise ValueError("Negative little set size for %s"
                             % self.project_id)


@dataclass(frozen=True)
class SummaryDocument:
    summaries: Tuple[DistributionSummary, ...]
    config_hash: str = ""
    config: Mapping[str, Any] = field(default_factory=dict)


###############################################################################
# Tables
###############################################################################

def _sort_results(results: Sequence[CorrelationResult]) -> List[CorrelationResult]:
    belief_order = {b: i for i, b in enumerate(Belief)}
    category_order = {c: i for i, c in enumerate(ANALYZED_CATEGORIES)}
    return sorted(results, key=lambda r: (r.project_id,
                                          belief_order[r.belief],
                                          category_order.get(r.category, 99)))


def results_frame(reports: Sequence[ProjectReport]) -> pd.DataFrame:
    results = _sort_results([r for rep in reports for r in rep.results])
    rows = [dict(project=r.project_id,
                 belief=r.belief.value,
                 category=r.category.value,
                 n=r.n,
                 rho=r.rho,
                 strength=r.strength.value) for r in results]
    data = pd.DataFrame(rows, columns=RESULTS_COLUMNS)
    data["rho"] = data["rho"].astype(float)
    return data


def read_results(path: PathLike) -> List[CorrelationResult]:
    path = Path(path)
    try:
        data = pd.read_csv(path,
                           dtype={"project": str, "belief": str,
                                  "category": str, "strength": str},
                           float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as ex:
        raise ParseError("Cannot read results table (%s)" % ex, path=path)
    if list(data.columns) != RESULTS_COLUMNS:
        raise ParseError("Unexpected header: %s" % ",".join(data.columns),
                         path=path, line_number=1)
    results = []
    for i, row in enumerate(data.itertuples(index=False)):
        try:
            rho = None if pd.isna(row.rho) else float(row.rho)
            results.append(CorrelationResult(
                project_id=row.project,
                belief=Belief(row.belief),
                category=FileCategory.parse(row.category),
                rho=rho,
                n=int(row.n),
                strength=Strength(row.strength)))
        except ValueError as ex:
            raise ParseError(str(ex), path=path, line_number=i+2)
    return results


def _summary_to_dict(s: DistributionSummary) -> Dict[str, Any]:
    return dict(count=s.count,
                undefined_count=s.undefined_count,
                strong_count=s.strong_count,
                min=s.min, q1=s.q1, median=s.median, q3=s.q3, max=s.max)


def _summary_from_dict(data: Mapping[str, Any],
                       belief: Belief,
                       category: Optional[FileCategory]) -> DistributionSummary:
    def _opt(key):
        value = data.get(key)
        return None if value is None else float(value)
    return DistributionSummary(belief=belief,
                               category=category,
                               count=int(data["count"]),
                               undefined_count=int(data["undefined_count"]),
                               strong_count=int(data.get("strong_count", 0)),
                               min=_opt("min"), q1=_opt("q1"),
                               median=_opt("median"), q3=_opt("q3"),
                               max=_opt("max"))


def summary_document(reports: Sequence[ProjectReport],
                     summaries: Sequence[DistributionSummary],
                     config_hash: str="",
                     config: Optional[Mapping[str, Any]]=None) -> Dict[str, Any]:
    by_key = {(s.belief, s.category): s for s in summaries}
    ranking = order_beliefs(summaries)
    beliefs = []
    for meta in BELIEF_META:
        entry: Dict[str, Any] = dict(id=meta.belief.value,
                                     statement=meta.statement,
                                     agree_pct=meta.agree_pct,
                                     median_rank=ranking.index(meta.belief) + 1)
        pooled = by_key.get((meta.belief, None))
        entry["pooled"] = None if pooled is None else _summary_to_dict(pooled)
        entry["categories"] = {
            c.value: _summary_to_dict(by_key[(meta.belief, c)])
            for c in ANALYZED_CATEGORIES if (meta.belief, c) in by_key}
        beliefs.append(entry)

    reports = sorted(reports, key=lambda r: r.project_id)
    files = {c.value: sum(r.files.get(c, 0) for r in reports)
             for c in ANALYZED_CATEGORIES}
    little = {c.value: sum(r.little_sets.get(c, 0) for r in reports)
              for c in ANALYZED_CATEGORIES}
    n_files = sum(files.values())
    cells = [res for r in reports for res in r.results]
    totals = dict(projects=len(reports),
                  commits=sum(r.commits for r in reports),
                  files=files,
                  little_set=little,
                  little_set_share=(sum(little.values()) / n_files
                                    if n_files else None),
                  cells=len(cells),
                  defined_cells=sum(1 for c in cells if c.rho is not None),
                  strong_cells=sum(1 for c in cells
                                   if c.strength is Strength.STRONG))
    little_sets = {r.project_id: {c.value: r.little_sets.get(c, 0)
                                  for c in ANALYZED_CATEGORIES}
                   for r in reports}
    bugfix = {r.project_id: r.bugfix_fraction for r in reports}
    return dict(config_hash=config_hash,
                config=dict(config or {}),
                beliefs=beliefs,
                totals=totals,
                little_sets=little_sets,
                bugfix_fractions=bugfix)


def emit_tables(reports: Sequence[ProjectReport],
                summaries: Sequence[DistributionSummary],
                out_dir: PathLike,
                config_hash: str="",
                config: Optional[Mapping[str, Any]]=None) -> List[Path]:
    """
    Write results.csv (one row per project, belief and category) and
    summary.json (distribution summaries, totals, belief metadata).
    """
    if not reports:
        raise InputError("No project reports to write")
    out_dir = Path(out_dir)
    if not ensure_out_dir(out_dir):
        raise InputError("Cannot write to output directory: %s" % out_dir)
    results_path = out_dir / RESULTS_FILE
    data = results_frame(reports)
    data.to_csv(results_path, index=False, lineterminator="\n")
    summary_path = out_dir / SUMMARY_FILE
    document = summary_document(reports, summaries, config_hash, config)
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fid:
        json.dump(document, fid, indent=2, ensure_ascii=False)
        fid.write("\n")
    _logger.info("Wrote %d result rows to: %s", len(data), results_path)
    _logger.info("Wrote summary to: %s", summary_path)
    return [results_path, summary_path]


def load_summary(path: PathLike) -> SummaryDocument:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fid:
            data = json.load(fid)
    except OSError as ex:
        raise InputError("Cannot read summary %s: %s" % (path, ex))
    except ValueError as ex:
        raise ParseError("Malformed JSON (%s)" % ex, path=path)
    try:
        summaries = []
        for entry in data["beliefs"]:
            belief = Belief(entry["id"])
            if entry.get("pooled") is not None:
                summaries.append(_summary_from_dict(entry["pooled"],
                                                    belief, None))
            for key, values in entry.get("categories", {}).items():
                summaries.append(_summary_from_dict(values, belief,
                                                    FileCategory.parse(key)))
        return SummaryDocument(summaries=tuple(summaries),
                               config_hash=str(data.get("config_hash", "")),
                               config=dict(data.get("config") or {}))
    except (KeyError, TypeError, ValueError, AttributeError) as ex:
        raise ParseError("Malformed summary (%s: %s)"
                         % (type(ex).__name__, ex), path=path)


###############################################################################
# Boxplots (plain SVG, byte-deterministic)
###############################################################################

_PANEL_W = 240
_PANEL_H = 270
_PLOT_LEFT = 48
_PLOT_RIGHT = 228
_PLOT_TOP = 44
_PLOT_BOTTOM = 224
_BOX_W = 30
_COLORS = {FileCategory.CONFIG: "#e67e22",
           FileCategory.TEST: "#3498db",
           FileCategory.SOURCE: "#2ecc71"}


def _escape_xml(text: str) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _y(rho: float) -> float:
    # rho in [-1, 1] maps onto the plot from bottom to top.
    rho = min(1.0, max(-1.0, rho))
    return _PLOT_BOTTOM - (rho + 1.0) / 2.0 * (_PLOT_BOTTOM - _PLOT_TOP)


def _fmt(value: float) -> str:
    return "%.2f" % value


def _panel_svg(belief: Belief,
               rank: int,
               summaries: Mapping[Tuple[Belief, Optional[FileCategory]],
                                  DistributionSummary],
               threshold: float) -> List[str]:
    meta = {m.belief: m for m in BELIEF_META}[belief]
    pooled = summaries.get((belief, None))
    median = "n/a" if pooled is None or pooled.median is None \
             else "%.2f" % pooled.median
    parts = ['<title>%s: %s</title>' % (belief.value,
                                        _escape_xml(meta.statement)),
             '<rect width="%d" height="%d" fill="white"/>'
             % (_PANEL_W, _PANEL_H),
             '<text x="%s" y="20" text-anchor="middle" font-size="14" '
             'font-weight="bold">%s (#%d)</text>'
             % (_fmt(_PANEL_W / 2), belief.value, rank),
             '<text x="%s" y="34" text-anchor="middle" font-size="10" '
             'fill="#555">median rho %s, agree %d%%</text>'
             % (_fmt(_PANEL_W / 2), median, meta.agree_pct)]

    # Axis, grid and scale labels.
    for tick in (-1.0, -0.5, 0.0, 0.5, 1.0):
        y = _fmt(_y(tick))
        parts.append('<line x1="%d" y1="%s" x2="%d" y2="%s" stroke="#ecf0f1"/>'
                     % (_PLOT_LEFT, y, _PLOT_RIGHT, y))
        parts.append('<text x="%d" y="%s" text-anchor="end" font-size="9">'
                     '%.1f</text>' % (_PLOT_LEFT - 4, _fmt(_y(tick) + 3), tick))
    parts.append('<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="#7f8c8d"/>'
                 % (_PLOT_LEFT, _PLOT_TOP, _PLOT_LEFT, _PLOT_BOTTOM))
    y_thr = _fmt(_y(threshold))
    parts.append('<line x1="%d" y1="%s" x2="%d" y2="%s" stroke="#c0392b" '
                 'stroke-dasharray="4 3"/>'
                 % (_PLOT_LEFT, y_thr, _PLOT_RIGHT, y_thr))

    slot = (_PLOT_RIGHT - _PLOT_LEFT) / len(ANALYZED_CATEGORIES)
    for i, category in enumerate(ANALYZED_CATEGORIES):
        cx = _PLOT_LEFT + slot * (i + 0.5)
        s = summaries.get((belief, category))
        color = _COLORS[category]
        parts.append('<text x="%s" y="%d" text-anchor="middle" font-size="11">'
                     '%s</text>' % (_fmt(cx), _PLOT_BOTTOM + 16, category.code))
        n = 0 if s is None else s.count
        parts.append('<text x="%s" y="%d" text-anchor="middle" font-size="9" '
                     'fill="#555">n=%d</text>' % (_fmt(cx), _PLOT_BOTTOM + 30, n))
        if s is None or s.is_empty:
            parts.append('<text x="%s" y="%s" text-anchor="middle" '
                         'font-size="10" fill="#999">n=0</text>'
                         % (_fmt(cx), _fmt(_y(0.0) - 4)))
            continue
        left, right = _fmt(cx - _BOX_W / 2), _fmt(cx + _BOX_W / 2)
        cap_l, cap_r = _fmt(cx - _BOX_W / 4), _fmt(cx + _BOX_W / 4)
        parts.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="%s"/>'
                     % (_fmt(cx), _fmt(_y(s.max)), _fmt(cx), _fmt(_y(s.min)),
                        color))
        for v in (s.min, s.max):
            parts.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="%s"/>'
                         % (cap_l, _fmt(_y(v)), cap_r, _fmt(_y(v)), color))
        top, bottom = _y(s.q3), _y(s.q1)
        parts.append('<rect x="%s" y="%s" width="%d" height="%s" fill="%s" '
                     'fill-opacity="0.35" stroke="%s"/>'
                     % (left, _fmt(top), _BOX_W, _fmt(bottom - top), color,
                        color))
        parts.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="#2c3e50" '
                     'stroke-width="2"/>'
                     % (left, _fmt(_y(s.median)), right, _fmt(_y(s.median))))
    return parts


def _svg_document(width: int, height: int, body: List[str],
                  config_hash: str) -> str:
    head = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
            'viewBox="0 0 %d %d" font-family="Arial,sans-serif">'
            % (width, height, width, height),
            '<desc>beliefbench config %s</desc>'
            % _escape_xml(config_hash or "unknown")]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def emit_boxplots(summaries: Sequence[DistributionSummary],
                  out_dir: PathLike,
                  config_hash: str="",
                  threshold: float=DEFAULT_STRONG_THRESHOLD) -> List[Path]:
    """
    Write one SVG per belief (belief_<id>.svg) with the Config, Test and
    Source distributions, plus figure.svg with all panels. Returns the
    per-belief files in descending order of the pooled median.
    """
    if not summaries:
        raise InputError("No summaries to plot")
    out_dir = Path(out_dir)
    if not ensure_out_dir(out_dir):
        raise InputError("Cannot write to output directory: %s" % out_dir)
    by_key = {(s.belief, s.category): s for s in summaries}
    ordering = order_beliefs(summaries)
    paths = []
    figure = []
    n_cols = 4
    for rank, belief in enumerate(ordering, start=1):
        panel = _panel_svg(belief, rank, by_key, threshold)
        path = out_dir / ("belief_%s.svg" % belief.value)
        with open(path, "w", encoding="utf-8", newline="\n") as fid:
            fid.write(_svg_document(_PANEL_W, _PANEL_H, panel, config_hash))
        paths.append(path)
        col, row = (rank - 1) % n_cols, (rank - 1) // n_cols
        figure.append('<g transform="translate(%d,%d)">'
                      % (col * _PANEL_W, row * _PANEL_H))
        figure.extend(panel)
        figure.append('</g>')
    n_rows = math.ceil(len(ordering) / n_cols)
    with open(out_dir / FIGURE_FILE, "w", encoding="utf-8", newline="\n") as fid:
        fid.write(_svg_document(n_cols * _PANEL_W, n_rows * _PANEL_H,
                                figure, config_hash))
    _logger.info("Wrote %d boxplots to: %s", len(paths), out_dir)
    return paths


###############################################################################
# Beliefs vs. evidence
###############################################################################

def discrepancy_table(summaries: Sequence[DistributionSummary],
                      meta: Sequence[BeliefMeta]=BELIEF_META,
                      threshold: int=DEFAULT_DISCREPANCY_THRESHOLD
                      ) -> pd.DataFrame:
    """
    Compare each belief's agreement rank (by % of developers who agreed)
    with its empirical rank (by pooled median correlation). A belief is
    flagged when the two ranks differ by at least threshold places.
    Beliefs without a defined median are listed as incomparable.
    """
    agree_order = sorted(meta, key=lambda m: (-m.agree_pct, m.belief.value))
    agree_rank = {m.belief: i for i, m in enumerate(agree_order, start=1)}
    pooled = pooled_summaries(summaries)
    medians = {b: s.median for b, s in pooled.items() if s.median is not None}
    empirical = sorted(medians, key=lambda b: (-medians[b], b.value))
    empirical_rank = {b: i for i, b in enumerate(empirical, start=1)}

    rows = []
    for m in agree_order:
        comparable = m.belief in empirical_rank
        diff = (abs(agree_rank[m.belief] - empirical_rank[m.belief])
                if comparable else None)
        rows.append(dict(belief=m.belief.value,
                         agree_pct=m.agree_pct,
                         agree_rank=agree_rank[m.belief],
                         median_rho=medians.get(m.belief),
                         empirical_rank=empirical_rank.get(m.belief),
                         rank_diff=diff,
                         flagged=bool(comparable and diff >= threshold),
                         comparable=comparable))
    columns = ["belief", "agree_pct", "agree_rank", "median_rho",
               "empirical_rank", "rank_diff", "flagged", "comparable"]
    data = pd.DataFrame(rows, columns=columns)
    data["median_rho"] = data["median_rho"].astype(float)
    for col in ["empirical_rank", "rank_diff"]:
        data[col] = data[col].astype("Int64")
    return data


def print_discrepancies(table: pd.DataFrame,
                        printer: OptionalPrinter=None) -> None:
    def default_printer(msg: Optional[str]=None) -> None:
        msg = "" if msg is None else msg
        _logger.info(msg)
    printer = default_printer if printer is None else printer

    printer("Belief  Agree  Rank(agree)  Median rho  Rank(data)  Flag")
    for row in table.itertuples(index=False):
        if row.comparable:
            median = "%10.3f" % row.median_rho
            rank = "%10d" % row.empirical_rank
            flag = "<-- discrepancy" if row.flagged else ""
        else:
            median = "%10s" % "n/a"
            rank = "%10s" % "-"
            flag = "incomparable"
        printer("%-6s  %4d%%  %11d  %s  %s  %s"
                % (row.belief, row.agree_pct, row.agree_rank, median, rank,
                   flag))
