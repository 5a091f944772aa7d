"""Orchestration of the trend analysis over per-sentence metric tables.

An ObservationTable holds one row per (parser, sentence) with the
sentence's period key, its length-anchor assignment and the metric
values. From it the pipeline builds per-(metric, length) time series,
runs the trend tests over the fixed 15 x 9 case grid, majority-votes
stable trends across parsers, and computes agreement and
noise-sensitivity reports.

Case enumeration is canonical everywhere: metrics in their definition
order (metrics.METRIC_NAMES), then length anchors ascending.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import stats
from .errors import DegenerateCovariateError, DomainError, UndefinedMetricError, UsageError
from .metrics import METRIC_NAMES
from .sampling import DEFAULT_ANCHORS, DEFAULT_OFFSET, anchor_for_length, period_for_year
from .stats import DECREASING, INCREASING, NO_TREND, LabelSeries

log = logging.getLogger(__name__)

PERIOD_MEAN = "period_mean"
POOLED = "pooled"

#: Metric whose majority vote uses the relaxed threshold (some parsers
#: cannot produce non-projective parses at all).
CROSSING_METRIC = "crossings"

CATEGORIES = (INCREASING, DECREASING, NO_TREND)


def case_id(metric, anchor):
    return f"{metric}@{anchor}"


def split_case_id(case):
    metric, _, anchor = case.rpartition("@")
    return metric, int(anchor)


@dataclass(frozen=True)
class ObservationRow:
    parser: str
    sent_id: str
    period: int
    length: int
    anchor: object            # int or None when the length fits no bin
    values: dict              # metric name -> float or None


class ObservationTable:
    def __init__(self, rows):
        self.rows = list(rows)
        seen = set()
        for row in self.rows:
            key = (row.parser, row.sent_id)
            if key in seen:
                raise UsageError(f"duplicate (parser, sent_id) row: {key}")
            seen.add(key)

    def __len__(self):
        return len(self.rows)

    def parsers(self):
        return sorted({row.parser for row in self.rows})

    def filter_parser(self, parser):
        return ObservationTable([r for r in self.rows if r.parser == parser])


def observation_table(dict_rows, anchors=DEFAULT_ANCHORS, offset=DEFAULT_OFFSET,
                      period_groups=None):
    """Build an ObservationTable from plain row mappings.

    Each mapping needs sent_id, parser, period and length keys plus the
    metric columns (missing or empty values become None). When
    period_groups is given, raw periods (years/decades) are folded into
    their group's start year; rows outside every group are dropped with
    a warning.
    """
    rows = []
    dropped = 0
    for raw in dict_rows:
        period = int(raw["period"])
        if period_groups is not None:
            grouped = period_for_year(period, period_groups)
            if grouped is None:
                dropped += 1
                continue
            period = grouped
        length = int(raw["length"])
        values = {}
        for name in METRIC_NAMES:
            value = raw.get(name)
            if value is None or value == "":
                values[name] = None
            else:
                values[name] = float(value)
        rows.append(ObservationRow(
            parser=str(raw["parser"]), sent_id=str(raw["sent_id"]),
            period=period, length=length,
            anchor=anchor_for_length(length, anchors, offset), values=values))
    if dropped:
        log.warning("%d rows fell outside all period groups", dropped)
    return ObservationTable(rows)


def _series_values(row, metric):
    if metric == "length":
        return float(row.length)
    return row.values.get(metric)


def build_series(table, metric, anchor, mode=PERIOD_MEAN):
    """Chronological series for one metric in one length bin.

    PERIOD_MEAN yields one mean per period (missing metric values are
    skipped); POOLED yields the per-sentence values ordered by period,
    keeping input order within a period. The pseudo-metric "length"
    reads the sentence length column. A period where every value is
    missing is an error naming the period.
    """
    rows = [r for r in table.rows if r.anchor == anchor]
    by_period = {}
    for row in rows:
        by_period.setdefault(row.period, []).append(_series_values(row, metric))
    periods = sorted(by_period)
    if len(periods) < 2:
        raise UsageError(
            f"need >= 2 periods for ({metric}, {anchor}); found {len(periods)}")
    out = []
    for period in periods:
        defined = [v for v in by_period[period] if v is not None]
        if not defined:
            raise DomainError(
                f"period {period} has no defined {metric} values "
                f"in length bin {anchor}")
        if mode == PERIOD_MEAN:
            out.append(float(np.mean(defined)))
        elif mode == POOLED:
            out.extend(defined)
        else:
            raise UsageError(f"unknown series mode {mode!r}")
    return np.asarray(out, dtype=float)


@dataclass(frozen=True)
class TrendCase:
    metric: str
    anchor: int
    result: object            # TrendResult, or None when the metric is absent

    @property
    def case_id(self):
        return case_id(self.metric, self.anchor)

    @property
    def label(self):
        return None if self.result is None else self.result.direction


@dataclass(frozen=True)
class TrendTable:
    parser: str
    cases: tuple

    def label_series(self):
        return LabelSeries(labels=tuple(c.label for c in self.cases),
                           case_ids=tuple(c.case_id for c in self.cases))


def trend_table(table, parser, alpha=stats.DEFAULT_ALPHA, mode=PERIOD_MEAN,
                anchors=DEFAULT_ANCHORS, metric_names=METRIC_NAMES,
                partial_with_length=False):
    """Run the trend test over the full metric x length-anchor grid.

    Length bins without any rows are an error (listing every absent
    cell). A metric whose values are missing in every row of a bin
    yields an absent label: the parser cannot produce it. With
    partial_with_length the test conditions on the sentence-length
    series; cells where the covariate degenerates fall back to the
    plain test (logged).
    """
    sub = table.filter_parser(parser)
    if not len(sub):
        raise UsageError(f"no rows for parser {parser!r}")
    empty_anchors = [a for a in anchors
                     if not any(r.anchor == a for r in sub.rows)]
    if empty_anchors:
        cells = ", ".join(case_id(m, a) for a in empty_anchors
                          for m in metric_names)
        raise UsageError(f"no sentences in length bins; absent cells: {cells}")

    cases = []
    for metric in metric_names:
        for anchor in anchors:
            rows = [r for r in sub.rows if r.anchor == anchor]
            if all(_series_values(r, metric) is None for r in rows):
                cases.append(TrendCase(metric, anchor, None))
                continue
            series = build_series(sub, metric, anchor, mode=mode)
            if partial_with_length:
                covariate = build_series(sub, "length", anchor, mode=mode)
                try:
                    result = stats.partial_mann_kendall(series, covariate,
                                                        alpha=alpha)
                except DegenerateCovariateError as exc:
                    log.warning("case %s: %s; falling back to plain test",
                                case_id(metric, anchor), exc)
                    result = stats.mann_kendall(series, alpha=alpha)
            else:
                result = stats.mann_kendall(series, alpha=alpha)
            cases.append(TrendCase(metric, anchor, result))
    return TrendTable(parser=parser, cases=tuple(cases))


def _check_aligned(series_by_parser):
    if len(series_by_parser) < 2:
        raise UsageError("need at least two parser tables")
    ids = None
    for parser, series in series_by_parser.items():
        if ids is None:
            ids = series.case_ids
        elif series.case_ids != ids:
            raise UsageError(f"case ids of parser {parser!r} do not match")
    return ids


@dataclass(frozen=True)
class StableTrend:
    metric: str
    anchor: int
    direction: object         # INCREASING / DECREASING / None
    support: int


@dataclass(frozen=True)
class StableTrendTable:
    entries: tuple

    def by_case(self):
        return {case_id(e.metric, e.anchor): e for e in self.entries}


def majority_vote(series_by_parser, threshold=3, crossing_threshold=2):
    """Keep directions supported by enough parsers.

    A direction is emitted for a case when at least ``threshold``
    parsers agree on it (``crossing_threshold`` for the crossing
    metric); when both directions qualify the better-supported one
    wins and an exact tie emits nothing. Absent labels do not vote.
    """
    ids = _check_aligned(series_by_parser)
    entries = []
    for pos, case in enumerate(ids):
        metric, anchor = split_case_id(case)
        votes = [series.labels[pos] for series in series_by_parser.values()]
        need = crossing_threshold if metric == CROSSING_METRIC else threshold
        counts = {INCREASING: votes.count(INCREASING),
                  DECREASING: votes.count(DECREASING)}
        qualified = {d: c for d, c in counts.items() if c >= need}
        direction, support = None, 0
        if len(qualified) == 1:
            (direction, support), = qualified.items()
        elif len(qualified) == 2:
            if counts[INCREASING] != counts[DECREASING]:
                direction = max(counts, key=counts.get)
                support = counts[direction]
        entries.append(StableTrend(metric, anchor, direction, support))
    return StableTrendTable(tuple(entries))


@dataclass(frozen=True)
class AgreementReport:
    parsers: tuple
    matrix: tuple             # kappa per parser pair; None where undefined
    averages: dict            # parser -> mean kappa over its pairs

    def kappa(self, a, b):
        return self.matrix[self.parsers.index(a)][self.parsers.index(b)]


def parser_agreement(series_by_parser):
    """Pairwise Cohen's kappa over the trend labels, plus row averages."""
    _check_aligned(series_by_parser)
    parsers = tuple(series_by_parser)
    size = len(parsers)
    matrix = [[1.0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            try:
                kappa = stats.cohen_kappa(series_by_parser[parsers[i]],
                                          series_by_parser[parsers[j]])
            except UndefinedMetricError:
                kappa = None
            matrix[i][j] = matrix[j][i] = kappa
    averages = {}
    for i, parser in enumerate(parsers):
        defined = [matrix[i][j] for j in range(size)
                   if j != i and matrix[i][j] is not None]
        averages[parser] = float(np.mean(defined)) if defined else None
    return AgreementReport(parsers=parsers,
                           matrix=tuple(tuple(row) for row in matrix),
                           averages=averages)


def per_metric_fleiss(series_by_parser):
    """Fleiss' kappa per metric, treating parsers as raters.

    Items are the length anchors of the metric; parsers with absent
    labels drop out as raters, and the kappa is undefined (None) unless
    every item of the metric keeps the same rater count >= 2.
    """
    ids = _check_aligned(series_by_parser)
    by_metric = {}
    for pos, case in enumerate(ids):
        metric, _ = split_case_id(case)
        by_metric.setdefault(metric, []).append(pos)
    out = {}
    for metric, positions in by_metric.items():
        counts = []
        raters = set()
        for pos in positions:
            labels = [series.labels[pos] for series in series_by_parser.values()
                      if series.labels[pos] is not None]
            raters.add(len(labels))
            counts.append([labels.count(cat) for cat in CATEGORIES])
        if len(raters) != 1 or min(raters) < 2:
            out[metric] = None
            continue
        try:
            out[metric] = stats.fleiss_kappa(counts, raters.pop())
        except UndefinedMetricError:
            out[metric] = None
    return out


@dataclass(frozen=True)
class SensitivityReport:
    parsers: tuple
    metrics: tuple
    cells: dict               # (metric, parser) -> rho or None
    metric_averages: dict     # metric -> mean over parsers
    parser_averages: dict     # parser -> mean over metrics
    overall: object           # mean of the metric averages

    def cell(self, metric, parser):
        return self.cells.get((metric, parser))


def sensitivity_report(original, corrected, metric_names=METRIC_NAMES):
    """Spearman's rho between two runs of the same sentences.

    Values are paired by (parser, sent_id); pairs where either side is
    missing a metric are skipped, and a correlation over constant ranks
    is reported as None. The overall figure averages over parsers per
    metric first, then over metrics.
    """
    orig_keys = {(r.parser, r.sent_id): r for r in original.rows}
    corr_keys = {(r.parser, r.sent_id): r for r in corrected.rows}
    if set(orig_keys) != set(corr_keys):
        orphans = sorted(set(orig_keys) ^ set(corr_keys))
        raise UsageError(f"tables do not share the same (parser, sent_id) "
                         f"keys; first orphans: {orphans[:5]}")

    parsers = tuple(original.parsers())
    cells = {}
    for parser in parsers:
        keys = sorted(k for k in orig_keys if k[0] == parser)
        for metric in metric_names:
            pairs = []
            for key in keys:
                a = orig_keys[key].values.get(metric)
                b = corr_keys[key].values.get(metric)
                if a is not None and b is not None:
                    pairs.append((a, b))
            if len(pairs) < 2:
                cells[(metric, parser)] = None
                continue
            xs, ys = zip(*pairs)
            try:
                cells[(metric, parser)] = stats.spearman_rho(xs, ys)
            except UndefinedMetricError:
                cells[(metric, parser)] = None

    def mean_of(values):
        defined = [v for v in values if v is not None]
        return float(np.mean(defined)) if defined else None

    metric_averages = {m: mean_of(cells[(m, p)] for p in parsers)
                       for m in metric_names}
    parser_averages = {p: mean_of(cells[(m, p)] for m in metric_names)
                       for p in parsers}
    overall = mean_of(metric_averages.values())
    return SensitivityReport(parsers=parsers, metrics=tuple(metric_names),
                             cells=cells, metric_averages=metric_averages,
                             parser_averages=parser_averages, overall=overall)
