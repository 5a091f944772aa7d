"""Attachment scoring against gold treebanks for raw-text parses.

Gold and system tokenizations of the same sentence need not agree, so
tokens are aligned by the character spans they cover once all
whitespace is stripped: two tokens align iff their half-open intervals
in the concatenated string are equal. UAS/LAS then become the harmonic
mean (F1) of precision (over system tokens) and recall (over gold
tokens). Relation labels are compared as full strings, subtypes
included, and punctuation is scored like any other token.
"""

from dataclasses import dataclass

from .errors import RawTextMismatch, UsageError


@dataclass(frozen=True)
class TokenAlignment:
    pairs: tuple          # (gold id, system id), both 1-based
    gold_unaligned: int
    system_unaligned: int


@dataclass(frozen=True)
class AttachmentScore:
    uas_precision: float
    uas_recall: float
    uas_f1: float
    las_precision: float
    las_recall: float
    las_f1: float
    uas_correct: int
    las_correct: int
    gold_tokens: int
    system_tokens: int


def _spans(tokens):
    text = []
    spans = []
    offset = 0
    for tok in tokens:
        stripped = "".join(tok.form.split())
        spans.append((offset, offset + len(stripped)))
        text.append(stripped)
        offset += len(stripped)
    return "".join(text), spans


def _first_divergence(a, b):
    for i, (ca, cb) in enumerate(zip(a, b)):
        if ca != cb:
            return i
    return min(len(a), len(b))


def align_tokens(gold, system, on_mismatch="error"):
    """Align two tokenizations of one sentence by character spans.

    When the whitespace-free character strings differ, behaviour
    follows ``on_mismatch``: "error" raises RawTextMismatch with the
    first divergent offset, "prefix" aligns over the common prefix and
    counts everything beyond it as unaligned.
    """
    gold_text, gold_spans = _spans(gold.tokens)
    sys_text, sys_spans = _spans(system.tokens)
    limit = None
    if gold_text != sys_text:
        offset = _first_divergence(gold_text, sys_text)
        if on_mismatch == "error":
            raise RawTextMismatch(
                f"sentences diverge at character offset {offset}: "
                f"{gold_text[offset:offset + 10]!r} vs "
                f"{sys_text[offset:offset + 10]!r}", offset=offset)
        if on_mismatch != "prefix":
            raise UsageError(f"unknown mismatch policy {on_mismatch!r}")
        limit = offset

    def eligible(span):
        return limit is None or span[1] <= limit

    by_span = {span: i + 1 for i, span in enumerate(gold_spans) if eligible(span)}
    pairs = []
    for j, span in enumerate(sys_spans, start=1):
        if eligible(span) and span in by_span:
            pairs.append((by_span[span], j))
    return TokenAlignment(
        pairs=tuple(pairs),
        gold_unaligned=len(gold.tokens) - len(pairs),
        system_unaligned=len(system.tokens) - len(pairs),
    )


def _f1(precision, recall):
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def score(gold, system, on_mismatch="error"):
    """UAS/LAS over a pair of treebanks with order-paired sentences."""
    if len(gold) != len(system):
        raise UsageError(
            f"sentence counts differ: {len(gold)} gold vs {len(system)} system")
    gold_total = 0
    sys_total = 0
    uas_correct = 0
    las_correct = 0
    for gold_rec, sys_rec in zip(gold, system):
        gold_total += len(gold_rec.tokens)
        sys_total += len(sys_rec.tokens)
        alignment = align_tokens(gold_rec, sys_rec, on_mismatch=on_mismatch)
        sys_to_gold = {s: g for g, s in alignment.pairs}
        for g, s in alignment.pairs:
            gold_head = gold_rec.tokens[g - 1].head
            sys_head = sys_rec.tokens[s - 1].head
            if gold_head == 0:
                attached = sys_head == 0
            else:
                attached = sys_head != 0 and sys_to_gold.get(sys_head) == gold_head
            if attached:
                uas_correct += 1
                if gold_rec.tokens[g - 1].deprel == sys_rec.tokens[s - 1].deprel:
                    las_correct += 1

    def pct(num, den):
        return 100.0 * num / den if den else 0.0

    uas_p, uas_r = pct(uas_correct, sys_total), pct(uas_correct, gold_total)
    las_p, las_r = pct(las_correct, sys_total), pct(las_correct, gold_total)
    return AttachmentScore(
        uas_precision=uas_p, uas_recall=uas_r, uas_f1=_f1(uas_p, uas_r),
        las_precision=las_p, las_recall=las_r, las_f1=_f1(las_p, las_r),
        uas_correct=uas_correct, las_correct=las_correct,
        gold_tokens=gold_total, system_tokens=sys_total,
    )
