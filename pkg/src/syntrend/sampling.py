"""Sentence-candidate filtering and length/period-balanced sampling.

The filter applies five surface rules to an annotated sentence; the
sampler buckets sentences into (length anchor, period group) cells and
draws a fixed number per cell, deterministically for a given seed and
independently of input order.
"""

import logging
from dataclasses import dataclass

from .errors import DomainError, UsageError
from .seeding import derive_rng

log = logging.getLogger(__name__)

RULE_CAPITALIZATION = "Capitalization"
RULE_TERMINAL_PUNCT = "TerminalPunct"
RULE_HAS_VERB = "HasVerb"
RULE_QUOTE_PARITY = "QuoteParity"
RULE_BRACKET_BALANCE = "BracketBalance"
ALL_RULES = (RULE_CAPITALIZATION, RULE_TERMINAL_PUNCT, RULE_HAS_VERB,
             RULE_QUOTE_PARITY, RULE_BRACKET_BALANCE)

TERMINAL_FORMS = {".", "?", "!"}
VERB_TAGS = {"VERB", "AUX"}
QUOTE_CHARS = set('"“”„«»')  # " “ ” „ « »
BRACKET_PAIRS = (("(", ")"), ("[", "]"), ("{", "}"))

DEFAULT_ANCHORS = (5, 10, 15, 20, 30, 40, 50, 60, 70)
DEFAULT_OFFSET = 2
#: Two decades per group, three for the last one.
DEFAULT_PERIOD_GROUPS = (
    (1860, 1879), (1880, 1899), (1900, 1919), (1920, 1939),
    (1940, 1959), (1960, 1979), (1980, 1999), (2000, 2029),
)
DEFAULT_PER_CELL = 450


@dataclass(frozen=True)
class FilterVerdict:
    keep: bool
    failed: tuple

    def __post_init__(self):
        assert self.keep == (not self.failed)


def filter_sentence(record):
    """Check the five sentence-quality rules; keep iff all pass."""
    tokens = record.tokens
    if not tokens:
        return FilterVerdict(False, ALL_RULES)
    failed = []
    if not tokens[0].form[:1].isupper():
        failed.append(RULE_CAPITALIZATION)
    if tokens[-1].form not in TERMINAL_FORMS:
        failed.append(RULE_TERMINAL_PUNCT)
    if not any(tok.upos in VERB_TAGS for tok in tokens):
        failed.append(RULE_HAS_VERB)
    text = "".join(tok.form for tok in tokens)
    if sum(1 for ch in text if ch in QUOTE_CHARS) % 2 != 0:
        failed.append(RULE_QUOTE_PARITY)
    if any(text.count(left) != text.count(right) for left, right in BRACKET_PAIRS):
        failed.append(RULE_BRACKET_BALANCE)
    return FilterVerdict(not failed, tuple(failed))


@dataclass(frozen=True)
class SamplingPlan:
    anchors: tuple = DEFAULT_ANCHORS
    offset: int = DEFAULT_OFFSET
    period_groups: tuple = DEFAULT_PERIOD_GROUPS
    per_cell: int = DEFAULT_PER_CELL
    seed: int = 0

    def __post_init__(self):
        anchors = tuple(self.anchors)
        groups = tuple(tuple(g) for g in self.period_groups)
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "period_groups", groups)
        if self.per_cell < 1:
            raise UsageError("per-cell count must be >= 1")
        if self.offset < 0:
            raise UsageError("length offset must be >= 0")
        if list(anchors) != sorted(set(anchors)):
            raise UsageError("length anchors must be strictly increasing")
        for low, high in zip(anchors, anchors[1:]):
            if low + self.offset >= high:
                raise UsageError(
                    f"length bins overlap: [{low},{low + self.offset}] and "
                    f"[{high},{high + self.offset}]")
        for start, end in groups:
            if start > end:
                raise UsageError(f"period group ({start},{end}) is inverted")
        ordered = sorted(groups)
        for (s1, e1), (s2, e2) in zip(ordered, ordered[1:]):
            if s2 <= e1:
                raise UsageError(
                    f"period groups ({s1},{e1}) and ({s2},{e2}) overlap")


def anchor_for_length(length, anchors=DEFAULT_ANCHORS, offset=DEFAULT_OFFSET):
    """Anchor L whose bin [L, L+offset] contains the length, else None."""
    for anchor in anchors:
        if anchor <= length <= anchor + offset:
            return anchor
    return None


def period_for_year(year, groups=DEFAULT_PERIOD_GROUPS):
    """Start year of the period group containing the year, else None."""
    for start, end in groups:
        if start <= year <= end:
            return start
    return None


def assign_cells(records, plan):
    """Bucket (sent_id, length, year) records into sampling cells.

    Returns (cells, unassigned): a dict mapping (anchor, period start)
    to the list of sentence ids, and the ids that fit no cell.
    """
    cells = {}
    unassigned = []
    for sent_id, length, year in records:
        anchor = anchor_for_length(length, plan.anchors, plan.offset)
        period = period_for_year(year, plan.period_groups)
        if anchor is None or period is None:
            unassigned.append(sent_id)
            continue
        cells.setdefault((anchor, period), []).append(sent_id)
    return cells, unassigned


def balanced_sample(cells, plan, strict=True):
    """Draw per_cell ids from every cell, without replacement.

    Selection is keyed on the sorted ids of a cell and a generator
    derived from (seed, cell), so it does not depend on record order.
    Underfull cells raise in strict mode and degrade with a warning in
    lenient mode. Returns (anchor, period start, sent_id) rows in
    canonical sorted order.
    """
    manifest = []
    for (anchor, period) in sorted(cells):
        ids = sorted(cells[(anchor, period)])
        if len(ids) < plan.per_cell:
            if strict:
                raise DomainError(
                    f"cell (anchor={anchor}, period={period}) has "
                    f"{len(ids)} sentences, {plan.per_cell - len(ids)} "
                    f"short of {plan.per_cell}")
            log.warning("cell (%s, %s): only %d of %d sentences available",
                        anchor, period, len(ids), plan.per_cell)
            chosen = ids
        else:
            rng = derive_rng(plan.seed, "cell", anchor, period)
            picks = rng.permutation(len(ids))[:plan.per_cell]
            chosen = [ids[i] for i in picks]
        manifest.extend((anchor, period, sid) for sid in chosen)
    manifest.sort()
    return manifest
