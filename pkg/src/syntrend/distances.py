"""Sequence and tree edit distances plus the linearization/generation helpers.

Levenshtein works on token sequences compared by exact (case-sensitive)
string equality. Tree edit distance is the Zhang-Shasha ordered-tree
algorithm with unit insert/delete costs and relabel cost 0/1. Random
trees follow the uniform-attachment law (random recursive tree): node 1
is the root and node k attaches to a parent drawn uniformly from
1..k-1, so results are reproducible from the generator seed.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import UsageError


def levenshtein(a, b):
    """Minimal number of token insertions, deletions and substitutions."""
    coding = {}
    def encode(seq):
        out = np.empty(len(seq), dtype=np.int64)
        for i, item in enumerate(seq):
            out[i] = coding.setdefault(item, len(coding))
        return out
    return _kernels.levenshtein_codes(encode(a), encode(b))


def head_final_linearize(tree):
    """Reorder a sentence so every head follows all of its dependents.

    Returns the permutation as a list of 1-based token positions: the
    post-order layout L(v) = L(c1) ++ ... ++ L(ck) ++ [v] with children
    in ascending original position. Siblings keep their relative order
    and punctuation participates like any other token.
    """
    order = []
    stack = [(tree.root_index, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        stack.append((node, True))
        for child in reversed(tree.children[node]):
            stack.append((child, False))
    return order


@dataclass
class LabeledOrderedTree:
    """Rooted tree with ordered children and per-node labels.

    Node indices are 0-based; children are kept in ascending node index,
    which encodes ascending original position for trees derived from
    sentences and ascending label for generated trees.
    """

    labels: list
    parent: list                       # parent index per node, None for the root
    root: int = field(init=False)
    children: list = field(init=False)

    def __post_init__(self):
        n = len(self.labels)
        if n == 0:
            raise UsageError("tree must have at least one node")
        if len(self.parent) != n:
            raise UsageError("labels and parent lists differ in length")
        roots = [i for i, p in enumerate(self.parent) if p is None]
        if len(roots) != 1:
            raise UsageError(f"expected exactly one root, found {len(roots)}")
        self.root = roots[0]
        self.children = [[] for _ in range(n)]
        for i, p in enumerate(self.parent):
            if p is not None:
                self.children[p].append(i)
        for kids in self.children:
            kids.sort()
        # acyclicity: every node must reach the root
        for start in range(n):
            seen = set()
            pos = start
            while pos is not None:
                if pos in seen:
                    raise UsageError("parent relation contains a cycle")
                seen.add(pos)
                pos = self.parent[pos]

    def __len__(self):
        return len(self.labels)


def _postorder_arrays(tree, coding):
    """Postorder label codes, leftmost-leaf-descendant map and keyroots."""
    n = len(tree)
    order = []
    stack = [(tree.root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        stack.append((node, True))
        for child in reversed(tree.children[node]):
            stack.append((child, False))
    postnum = {node: i + 1 for i, node in enumerate(order)}

    lld = np.zeros(n + 1, dtype=np.int64)
    lab = np.zeros(n + 1, dtype=np.int64)
    for node in order:
        i = postnum[node]
        lab[i] = coding.setdefault(tree.labels[node], len(coding))
        if tree.children[node]:
            lld[i] = lld[postnum[tree.children[node][0]]]
        else:
            lld[i] = i
    # keyroots: for each leftmost leaf, the highest postorder node sharing it
    highest = {}
    for i in range(1, n + 1):
        highest[lld[i]] = i
    kr = np.array(sorted(highest.values()), dtype=np.int64)
    return lld, lab, kr


def tree_edit_distance(a, b):
    """Zhang-Shasha edit distance between two labeled ordered trees."""
    coding = {}
    lld1, lab1, kr1 = _postorder_arrays(a, coding)
    lld2, lab2, kr2 = _postorder_arrays(b, coding)
    return _kernels.ted_core(lld1, lab1, kr1, lld2, lab2, kr2)


def random_tree(n, rng):
    """Uniform-attachment random tree over labels 1..n.

    Node 1 is the root; node k (k >= 2) picks its parent uniformly from
    nodes 1..k-1. Children stay in ascending label order.
    """
    if n < 1:
        raise UsageError("node count must be >= 1")
    parent = [None]
    for k in range(2, n + 1):
        parent.append(int(rng.integers(1, k)) - 1)
    return LabeledOrderedTree(labels=list(range(1, n + 1)), parent=parent)


def content_tree(tree):
    """Reduce a DepTree to its non-punctuation nodes for edit distances.

    Each kept node attaches to its nearest kept ancestor. Labels are the
    1..m ranks of the kept nodes in sentence order, so a generated tree
    over the same node count shares the label alphabet. A punctuation
    root is kept (the reduced tree still needs an anchor).
    """
    n = len(tree)
    keep = [False] * (n + 1)
    for pos in range(1, n + 1):
        keep[pos] = not tree.punct_mask[pos] or pos == tree.root_index
    kept = [pos for pos in range(1, n + 1) if keep[pos]]
    rank = {pos: i for i, pos in enumerate(kept)}

    heads = {tok.id: tok.head for tok in tree.tokens}
    parent = []
    for pos in kept:
        anc = heads[pos]
        while anc != 0 and not keep[anc]:
            anc = heads[anc]
        parent.append(None if anc == 0 else rank[anc])
    return LabeledOrderedTree(labels=list(range(1, len(kept) + 1)), parent=parent)
