import math
import logging
import numpy as np
from enum import Enum
from collections import defaultdict
from dataclasses import dataclass
from ._labeler import FileCategory, ANALYZED_CATEGORIES
from ._metrics import Belief, BeliefSample
from ._utils import LOGGER_ID

_logger = logging.getLogger(LOGGER_ID)

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

DEFAULT_STRONG_THRESHOLD = 0.7
QUARTILE_METHODS = ("tukey", "linear")


class Strength(Enum):
    STRONG = "Strong"
    NOT_STRONG = "NotStrong"
    UNDEFINED = "Undefined"


@dataclass(frozen=True)
class CorrelationResult:
    project_id: str
    belief: Belief
    category: FileCategory
    rho: Optional[float]
    n: int
    strength: Strength

    def __post_init__(self):
        if self.rho is not None and not -1.0 <= self.rho <= 1.0:
            raise ValueError("Correlation out of range: %r" % self.rho)
        if (self.rho is None) != (self.strength is Strength.UNDEFINED):
            raise ValueError("Strength %s inconsistent with rho %r"
                             % (self.strength.value, self.rho))


@dataclass(frozen=True)
class DistributionSummary:
    """
    Five-number summary of the defined correlations of one belief, either
    for one category or pooled over all categories (category None).
    """
    belief: Belief
    category: Optional[FileCategory]
    count: int
    undefined_count: int
    min: Optional[float] = None
    q1: Optional[float] = None
    median: Optional[float] = None
    q3: Optional[float] = None
    max: Optional[float] = None
    strong_count: int = 0

    @property
    def is_empty(self) -> bool:
        return self.count == 0


def pearson(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """
    Pearson's product-moment correlation, two-pass:

        rho = sum((x-mx)(y-my)) / sqrt(sum((x-mx)^2) * sum((y-my)^2))

    Returns None (undefined) for fewer than two points or if either vector
    is constant.
    """
    n = len(xs)
    if n != len(ys):
        raise ValueError("Vectors differ in length: %d vs %d" % (n, len(ys)))
    if n < 2:
        return None
    if all(x == xs[0] for x in xs) or all(y == ys[0] for y in ys):
        return None
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    dx = [x - mx for x in xs]
    dy = [y - my for y in ys]
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    sxx = math.fsum(a * a for a in dx)
    syy = math.fsum(b * b for b in dy)
    if sxx == 0.0 or syy == 0.0:
        return None
    rho = sxy / (math.sqrt(sxx) * math.sqrt(syy))
    # Clamp in case of floating-point error.
    return min(1.0, max(-1.0, rho))


def classify_strength(rho: Optional[float],
                      threshold: float=DEFAULT_STRONG_THRESHOLD) -> Strength:
    if rho is None:
        return Strength.UNDEFINED
    return Strength.STRONG if rho > threshold else Strength.NOT_STRONG


def correlate(project_id: str,
              sample: BeliefSample,
              threshold: float=DEFAULT_STRONG_THRESHOLD) -> CorrelationResult:
    rho = pearson(sample.xs, sample.ys)
    return CorrelationResult(project_id=project_id,
                             belief=sample.belief,
                             category=sample.category,
                             rho=rho,
                             n=sample.n,
                             strength=classify_strength(rho, threshold))


def _median(values: Sequence[float]) -> float:
    n = len(values)
    mid = n // 2
    if n % 2:
        return values[mid]
    return (values[mid-1] + values[mid]) / 2


def quartiles(values: Iterable[float],
              method: str="tukey") -> Tuple[float, float, float]:
    """
    (q1, median, q3) of a non-empty collection.

    tukey:  hinges, i.e. medians of the lower and upper half, where the
            median belongs to both halves for an odd count.
    linear: linear interpolation between order statistics (numpy default).
    """
    ordered = sorted(values)
    if not ordered:
        raise ValueError("Quartiles of an empty collection")
    if method == "tukey":
        n = len(ordered)
        lower = ordered[:(n+1)//2]
        upper = ordered[n//2:]
        return _median(lower), _median(ordered), _median(upper)
    elif method == "linear":
        q1, q2, q3 = np.percentile(np.asarray(ordered, dtype=float),
                                   [25, 50, 75])
        return float(q1), float(q2), float(q3)
    raise ValueError("Unknown quartile method: %r" % method)


def summarize(results: Sequence[CorrelationResult],
              belief: Optional[Belief]=None,
              category: Optional[FileCategory]=None,
              pooled: bool=False,
              method: str="tukey") -> DistributionSummary:
    """
    Summarize the correlations of one (belief, category) group. With
    pooled=True the results may span categories and the summary carries no
    category. belief/category default to those of the results, so they are
    only required for an empty group.
    """
    if belief is None:
        if not results:
            raise ValueError("Cannot infer the belief of an empty group")
        belief = results[0].belief
    if category is None and not pooled:
        if not results:
            raise ValueError("Cannot infer the category of an empty group")
        category = results[0].category
    for r in results:
        if r.belief is not belief or (not pooled and r.category is not category):
            raise ValueError("Results of mixed groups: %s/%s vs %s/%s"
                             % (r.belief.value, r.category.value, belief.value,
                                "pooled" if pooled else category.value))
    defined = sorted(r.rho for r in results if r.rho is not None)
    n_undefined = len(results) - len(defined)
    n_strong = sum(1 for r in results if r.strength is Strength.STRONG)
    out_category = None if pooled else category
    if not defined:
        return DistributionSummary(belief=belief,
                                   category=out_category,
                                   count=0,
                                   undefined_count=n_undefined)
    q1, median, q3 = quartiles(defined, method=method)
    return DistributionSummary(belief=belief,
                               category=out_category,
                               count=len(defined),
                               undefined_count=n_undefined,
                               min=defined[0],
                               q1=q1,
                               median=median,
                               q3=q3,
                               max=defined[-1],
                               strong_count=n_strong)


def summarize_all(results: Iterable[CorrelationResult],
                  method: str="tukey") -> List[DistributionSummary]:
    """
    One summary per belief and analyzed category plus one pooled summary
    per belief, in belief order (pooled first, then figure order).
    """
    groups: Dict[Tuple[Belief, FileCategory], List[CorrelationResult]]
    groups = defaultdict(list)
    for r in results:
        groups[(r.belief, r.category)].append(r)
    summaries = []
    for belief in Belief:
        pooled = [r for c in ANALYZED_CATEGORIES for r in groups[(belief, c)]]
        summaries.append(summarize(pooled, belief=belief,
                                   pooled=True, method=method))
        for category in ANALYZED_CATEGORIES:
            summaries.append(summarize(groups[(belief, category)],
                                       belief=belief,
                                       category=category,
                                       method=method))
    return summaries


def pooled_summaries(summaries: Iterable[DistributionSummary]
                     ) -> Dict[Belief, DistributionSummary]:
    return {s.belief: s for s in summaries if s.category is None}


def order_beliefs(summaries: Iterable[DistributionSummary]) -> List[Belief]:
    """
    Beliefs sorted by descending pooled median correlation. Ties are broken
    by belief id; beliefs without a defined median come last.
    """
    pooled = pooled_summaries(summaries)
    def _key(belief: Belief) -> Tuple[int, float, str]:
        s = pooled.get(belief)
        if s is None or s.median is None:
            return (1, 0.0, belief.value)
        return (0, -s.median, belief.value)
    return sorted(Belief, key=_key)
