"""Reliability and correlation statistics used by the usage analyses."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence

from scipy.stats import t as t_dist


class AnalyticsError(Exception):
    pass


class ZeroVarianceError(AnalyticsError):
    """A metric or activity has no variance across users."""

    def __init__(self, name: str):
        super().__init__(f"zero variance in {name!r}; cannot standardize")
        self.name = name


class UndefinedStatisticError(AnalyticsError):
    pass


def sample_sd(values: Sequence[float]) -> float:
    """Sample (n-1) standard deviation."""
    n = len(values)
    if n < 2:
        raise UndefinedStatisticError("sample SD needs at least 2 values")
    mean = sum(values) / n
    return math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))


def _centered_ss(values: Sequence[float]) -> float:
    mean = sum(values) / len(values)
    return sum((v - mean) ** 2 for v in values)


def zscores(values: Sequence[float], name: str = "values") -> list[float]:
    """Standardize with the sample SD; zero variance is an error.

    Degeneracy is detected on the raw values (all identical), not on the
    computed SD, which can wobble a few ulps above zero for constant input.
    """
    if min(values) == max(values):
        raise ZeroVarianceError(name)
    sd = sample_sd(values)
    mean = sum(values) / len(values)
    return [(v - mean) / sd for v in values]


def cronbach_alpha(items: Sequence[Sequence[float]]) -> float:
    """Internal consistency of K items measured across the same users.

    ``items`` is a users x items matrix.  alpha = K/(K-1) * (1 - sum of item
    variances / variance of per-user totals), all sample variances.  The
    (n-1) factors cancel, so the computation is a single division of
    centered sums of squares: K identical items come out exactly 1.
    """
    n_users = len(items)
    if n_users < 3:
        raise UndefinedStatisticError("cronbach_alpha needs at least 3 users")
    k = len(items[0])
    if k < 2:
        raise UndefinedStatisticError("cronbach_alpha needs at least 2 items")
    if any(len(row) != k for row in items):
        raise UndefinedStatisticError("ragged item matrix")
    item_ss = sum(
        _centered_ss([row[j] for row in items]) for j in range(k)
    )
    totals = [sum(row) for row in items]
    if min(totals) == max(totals):
        raise ZeroVarianceError("per-user totals")
    total_ss = _centered_ss(totals)
    return k * (total_ss - item_ss) / ((k - 1) * total_ss)


def cohen_kappa(a: Sequence[Hashable], b: Sequence[Hashable]) -> float:
    """Chance-corrected agreement between two raters' label vectors.

    kappa = (p_o - p_e) / (1 - p_e), evaluated in integer arithmetic
    (n * agreements - sum of marginal products over n^2 - same) so exact
    rationals come out exact.
    """
    if len(a) != len(b):
        raise UndefinedStatisticError("label vectors differ in length")
    n = len(a)
    if n < 2:
        raise UndefinedStatisticError("cohen_kappa needs at least 2 observations")
    agreements = sum(x == y for x, y in zip(a, b))
    categories = set(a) | set(b)
    counts_a = {c: 0 for c in categories}
    counts_b = {c: 0 for c in categories}
    for x in a:
        counts_a[x] += 1
    for y in b:
        counts_b[y] += 1
    marginal = sum(counts_a[c] * counts_b[c] for c in categories)
    denominator = n * n - marginal
    if denominator == 0:
        raise UndefinedStatisticError(
            "both raters assigned a single identical label; kappa undefined"
        )
    return (n * agreements - marginal) / denominator


def binary_kappa(
    a: Sequence[Hashable], b: Sequence[Hashable], positive: Hashable
) -> float:
    """Kappa for one category collapsed to member / non-member."""
    return cohen_kappa(
        [x == positive for x in a],
        [y == positive for y in b],
    )


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p_two_tailed: float
    n: int
    excluded_users: tuple[str, ...] = field(default_factory=tuple)


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Sample Pearson r with a two-tailed t-test p-value (n-2 df)."""
    if len(x) != len(y):
        raise UndefinedStatisticError("inputs differ in length")
    n = len(x)
    if n < 3:
        raise UndefinedStatisticError("pearson needs at least 3 points")
    if min(x) == max(x) or min(y) == max(y):
        raise UndefinedStatisticError(
            "correlation undefined for a constant input"
        )
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    dx = [v - mean_x for v in x]
    dy = [v - mean_y for v in y]
    ssx = sum(v * v for v in dx)
    ssy = sum(v * v for v in dy)
    r = sum(a * b for a, b in zip(dx, dy)) / math.sqrt(ssx * ssy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t_stat = r * math.sqrt((n - 2) / (1 - r * r))
        p = 2 * float(t_dist.sf(abs(t_stat), n - 2))
    return CorrelationResult(r=r, p_two_tailed=p, n=n)
