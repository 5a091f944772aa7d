"""Validated rooted dependency trees over sentence tokens.

A tree records, besides the parent structure, everything the metric
functions need: the punctuation mask (UPOS == PUNCT exactly), the count
of non-punctuation tokens, and the dependent/head position pairs with
the root edge and punctuation-dependent edges removed. A punctuation
token that heads non-punctuation dependents keeps its structural role;
only edges whose *dependent* is punctuation are dropped from the pairs.

Parses that violate the single-root/acyclicity invariants come back as
TreeDefect values rather than exceptions, so batch runs can count and
skip them (some parsers emit multi-root or cyclic analyses).
"""

from dataclasses import dataclass

from .errors import UsageError

PUNCT_TAG = "PUNCT"

NO_ROOT = "NoRoot"
MULTIPLE_ROOTS = "MultipleRoots"
HEAD_OUT_OF_RANGE = "HeadOutOfRange"
CYCLE = "Cycle"


@dataclass(frozen=True)
class TreeDefect:
    kind: str
    detail: tuple

    def __str__(self):
        positions = ",".join(str(p) for p in self.detail)
        return f"{self.kind}(positions {positions})"


@dataclass
class DepTree:
    tokens: list
    root_index: int                 # 1-based position of the head-0 word
    children: tuple                 # children[i] = dependents of node i, ascending; [0] unused
    punct_mask: tuple               # punct_mask[i] for node i; [0] unused
    content_length: int             # non-punctuation token count
    pairs: tuple                    # (dependent, head) pairs, root edge and punct dependents excluded
    depths: tuple                   # depths[i] for node i, root word at 0; [0] unused

    def __len__(self):
        return len(self.tokens)

    def depth_of(self, pos):
        """Edge count from node at ``pos`` up to the root word (root -> 0)."""
        if not 1 <= pos <= len(self.tokens):
            raise UsageError(f"position {pos} outside 1..{len(self.tokens)}")
        return self.depths[pos]

    def is_punct(self, pos):
        return self.punct_mask[pos]

    def content_positions(self):
        return [i for i in range(1, len(self.tokens) + 1) if not self.punct_mask[i]]


def build_tree(record):
    """Build a DepTree from a SentenceRecord, or report the first defect.

    Invariants are checked in the order NoRoot, MultipleRoots,
    HeadOutOfRange, Cycle.
    """
    tokens = record.tokens
    n = len(tokens)
    heads = [0] * (n + 1)
    for tok in tokens:
        heads[tok.id] = tok.head

    roots = [tok.id for tok in tokens if tok.head == 0]
    if not roots:
        return TreeDefect(NO_ROOT, tuple())
    if len(roots) > 1:
        return TreeDefect(MULTIPLE_ROOTS, tuple(roots))
    bad = tuple(tok.id for tok in tokens if not 0 <= tok.head <= n)
    if bad:
        return TreeDefect(HEAD_OUT_OF_RANGE, bad)

    root = roots[0]
    depths = [-1] * (n + 1)
    depths[root] = 0
    for start in range(1, n + 1):
        if depths[start] >= 0:
            continue
        chain = []
        pos = start
        while depths[pos] < 0 and pos not in chain:
            chain.append(pos)
            pos = heads[pos]
        if depths[pos] < 0:
            # walked back onto the chain itself: a cycle
            cycle = chain[chain.index(pos):]
            return TreeDefect(CYCLE, tuple(cycle))
        base = depths[pos]
        for off, node in enumerate(reversed(chain), start=1):
            depths[node] = base + off

    children = [[] for _ in range(n + 1)]
    for tok in tokens:
        if tok.head != 0:
            children[tok.head].append(tok.id)

    punct = [False] * (n + 1)
    for tok in tokens:
        punct[tok.id] = tok.upos == PUNCT_TAG

    pairs = tuple((tok.id, tok.head) for tok in tokens
                  if tok.head != 0 and not punct[tok.id])
    content_length = sum(1 for tok in tokens if not punct[tok.id])

    return DepTree(
        tokens=tokens,
        root_index=root,
        children=tuple(tuple(c) for c in children),
        punct_mask=tuple(punct),
        content_length=content_length,
        pairs=pairs,
        depths=tuple(depths),
    )
