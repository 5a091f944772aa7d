"""Nonparametric trend tests and agreement/correlation statistics.

The Mann-Kendall test follows the classic two-sided formulation with
tie-corrected variance and the +/-1 continuity correction. The partial
variant conditions the score on a covariate via the rank-based
covariance of the two scores and standardises the conditional score the
same way, so it reduces exactly to the plain test when the covariance
vanishes.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata

from . import _kernels
from .errors import DegenerateCovariateError, UndefinedMetricError, UsageError

INCREASING = "increasing"
DECREASING = "decreasing"
NO_TREND = "no_trend"

DEFAULT_ALPHA = 0.05
MIN_SERIES_LENGTH = 3


@dataclass(frozen=True)
class TrendResult:
    direction: str
    s: float
    var_s: float
    z: float
    p: float
    n: int


@dataclass(frozen=True)
class LabelSeries:
    """Trend labels over an ordered list of test cases.

    A label is one of INCREASING / DECREASING / NO_TREND, or None when
    the rater (parser) cannot produce the underlying metric at all.
    """

    labels: tuple
    case_ids: tuple

    def __post_init__(self):
        if len(self.labels) != len(self.case_ids):
            raise UsageError("labels and case ids differ in length")

    def __len__(self):
        return len(self.labels)


def _tie_corrected_variance(x):
    n = len(x)
    _, counts = np.unique(x, return_counts=True)
    ties = counts[counts > 1].astype(float)
    correction = float(np.sum(ties * (ties - 1) * (2 * ties + 5)))
    return (n * (n - 1) * (2 * n + 5) - correction) / 18.0


def _standardize(s, var_s):
    # continuity correction; the magnitude clamp only matters for the
    # fractional conditional scores of the partial test (plain MK scores
    # are integers, so max(|s|-1, 0) reproduces the textbook formula)
    if s == 0:
        return 0.0
    magnitude = max(abs(s) - 1.0, 0.0) / np.sqrt(var_s)
    return magnitude if s > 0 else -magnitude


def _finish(s, var_s, n, alpha):
    if var_s <= 0:
        return TrendResult(NO_TREND, s=s, var_s=0.0, z=0.0, p=1.0, n=n)
    z = float(_standardize(s, var_s))
    p = float(2 * norm.sf(abs(z)))
    if p < alpha and z > 0:
        direction = INCREASING
    elif p < alpha and z < 0:
        direction = DECREASING
    else:
        direction = NO_TREND
    return TrendResult(direction, s=s, var_s=float(var_s), z=z, p=p, n=n)


def mann_kendall(series, alpha=DEFAULT_ALPHA, min_n=MIN_SERIES_LENGTH):
    """Two-sided Mann-Kendall trend test over a temporally ordered series.

    S sums sign(x_l - x_k) over pairs k < l; its variance gets the tie
    correction; z carries the continuity correction and p is the
    two-sided normal tail. An all-tied series (zero variance) is
    reported as NO_TREND with z = 0, p = 1.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or len(x) < min_n:
        raise UsageError(f"need a 1-d series of at least {min_n} values")
    s = _kernels.mk_s_score(x)
    var_s = _tie_corrected_variance(x)
    return _finish(s, var_s, len(x), alpha)


def _pairwise_k(x, y):
    k = 0
    n = len(x)
    for i in range(n - 1):
        k += int(np.sum(np.sign((x[i + 1:] - x[i]) * (y[i + 1:] - y[i]))))
    return k


def _conditional_ranks(x):
    n = len(x)
    # (n + 1 + sum of sign(x_j - x_i)) / 2 gives mid-ranks on ties
    signs = np.sign(x[:, None] - x[None, :]).sum(axis=1)
    return (n + 1 + signs) / 2.0


def partial_mann_kendall(series, covariate, alpha=DEFAULT_ALPHA,
                         min_n=MIN_SERIES_LENGTH):
    """Mann-Kendall test conditioned on a covariate series.

    Computes both MK scores, their tie-corrected variances and the
    rank-based score covariance, then standardises the conditional
    score S_x - (cov/var_y) S_y by the conditional variance
    var_x - cov^2/var_y. A constant covariate or one perfectly
    collinear with the series is rejected; a marginally negative
    conditional variance (numerical noise) clamps to NO_TREND.
    """
    x = np.asarray(series, dtype=float)
    y = np.asarray(covariate, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise UsageError("series and covariate must be 1-d and equal length")
    n = len(x)
    if n < min_n:
        raise UsageError(f"need at least {min_n} values")

    s_x = _kernels.mk_s_score(x)
    s_y = _kernels.mk_s_score(y)
    var_x = _tie_corrected_variance(x)
    var_y = _tie_corrected_variance(y)
    if var_y <= 0:
        raise DegenerateCovariateError("covariate is constant (zero variance)")
    if var_x <= 0:
        return TrendResult(NO_TREND, s=0.0, var_s=0.0, z=0.0, p=1.0, n=n)

    k = _pairwise_k(x, y)
    r_x = _conditional_ranks(x)
    r_y = _conditional_ranks(y)
    cov = (k + 4 * float(np.sum(r_x * r_y)) - n * (n + 1) ** 2) / 3.0

    s_cond = s_x - (cov / var_y) * s_y
    var_cond = var_x - cov * cov / var_y
    if var_cond <= 1e-9 * var_x:
        if abs(s_cond) <= 1e-9 * max(1.0, abs(s_x)):
            raise DegenerateCovariateError(
                "covariate is collinear with the series; conditional "
                "statistic is degenerate")
        var_cond = 0.0
    return _finish(s_cond, var_cond, n, alpha)


def spearman_rho(x, y):
    """Pearson correlation of mid-ranks (average ranks on ties)."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise UsageError("need two equal-length 1-d vectors with n >= 2")
    ra = rankdata(a)
    rb = rankdata(b)
    if np.ptp(ra) == 0 or np.ptp(rb) == 0:
        raise UndefinedMetricError("rank vector has zero variance")
    rho = float(np.corrcoef(ra, rb)[0, 1])
    return max(-1.0, min(1.0, rho))


def cohen_kappa(a, b):
    """Chance-corrected agreement between two aligned label series.

    Case pairs where either label is None (rater cannot produce the
    metric) are skipped. When both raters are constant and identical the
    kappa is 1 by convention.
    """
    if a.case_ids != b.case_ids:
        raise UsageError("label series are not aligned on the same cases")
    pairs = [(la, lb) for la, lb in zip(a.labels, b.labels)
             if la is not None and lb is not None]
    if not pairs:
        raise UndefinedMetricError("no jointly labelled cases")
    n = len(pairs)
    p_o = sum(1 for la, lb in pairs if la == lb) / n
    categories = {label for pair in pairs for label in pair}
    p_e = 0.0
    for cat in categories:
        p_e += (sum(1 for la, _ in pairs if la == cat) / n) \
            * (sum(1 for _, lb in pairs if lb == cat) / n)
    if p_e >= 1.0:
        if p_o == 1.0:
            return 1.0
        raise UndefinedMetricError("degenerate marginals with disagreement")
    return (p_o - p_e) / (1 - p_e)


def fleiss_kappa(counts, raters_per_item):
    """Fleiss' kappa from an items x categories count matrix."""
    table = np.asarray(counts, dtype=float)
    if table.ndim != 2 or table.shape[0] < 1:
        raise UsageError("need an items x categories count matrix")
    if raters_per_item < 2:
        raise UsageError("need at least 2 raters per item")
    if not np.all(table.sum(axis=1) == raters_per_item):
        raise UsageError("every row must sum to the rater count")
    r = raters_per_item
    p_i = (np.sum(table * table, axis=1) - r) / (r * (r - 1))
    p_bar = float(p_i.mean())
    proportions = table.sum(axis=0) / table.sum()
    p_e = float(np.sum(proportions ** 2))
    if p_e >= 1.0:
        if p_bar == 1.0:
            return 1.0
        raise UndefinedMetricError("degenerate category proportions")
    return (p_bar - p_e) / (1 - p_e)
