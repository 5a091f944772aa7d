"""The 15 per-sentence dependency-tree metrics.

Conventions shared by all metrics:

- Positions are raw 1-based token indices, punctuation included.
- Punctuation tokens (UPOS == PUNCT) are excluded from node statistics
  (depths, degrees, leaves, head-direction ratios), and edges whose
  dependent is punctuation are excluded from distance sums and crossing
  counts. The head-final permutation keeps punctuation in place.
- The pseudo-root edge counts for the path metrics: it weighs the root
  word's position, and tree height is the edge count from the pseudo
  root down to the deepest non-punctuation node.
- Mean/variance fields are population statistics (divide by the node
  count, not n-1).

Metrics that are undefined for a sentence (a one-word sentence has no
dependency pairs) surface as None in the assembled vector and as
UndefinedMetricError from the individual functions.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .distances import content_tree, head_final_linearize, levenshtein, random_tree, tree_edit_distance
from .errors import UndefinedMetricError

#: Canonical metric order; trend-case enumeration and file columns follow it.
METRIC_NAMES = (
    "mdd",
    "ndd",
    "root_distance",
    "crossings",
    "tree_height",
    "depth_mean",
    "depth_var",
    "tree_degree",
    "degree_mean",
    "degree_var",
    "leaves",
    "head_final_ratio",
    "head_final_distance",
    "longest_path_distance",
    "random_tree_distance",
)


@dataclass
class MetricVector:
    mdd: float
    ndd: float
    root_distance: int
    crossings: int
    tree_height: int
    depth_mean: float
    depth_var: float
    tree_degree: int
    degree_mean: float
    degree_var: float
    leaves: int
    head_final_ratio: float
    head_final_distance: int
    longest_path_distance: int
    random_tree_distance: int
    sentence_length: int
    content_length: int
    meta: dict = field(default_factory=dict)

    def as_dict(self):
        out = {name: getattr(self, name) for name in METRIC_NAMES}
        out["sentence_length"] = self.sentence_length
        out["content_length"] = self.content_length
        return out


def mdd(tree):
    """Mean absolute position difference over dependent-head pairs."""
    if not tree.pairs:
        raise UndefinedMetricError("no dependency pairs (one-word sentence?)")
    total = sum(abs(i - j) for i, j in tree.pairs)
    return total / len(tree.pairs)


def ndd(tree):
    """|ln(mdd / sqrt(root position x non-punctuation length))|."""
    value = mdd(tree)
    d_root = tree.root_index
    length = tree.content_length
    if length < 1:
        raise UndefinedMetricError("no non-punctuation tokens")
    return abs(math.log(value / math.sqrt(d_root * length)))


def root_distance(tree):
    """Raw 1-based position of the word attached to the pseudo root."""
    return tree.root_index


def crossings(tree):
    """Number of interleaving pairs of edges (root and punct edges excluded)."""
    if len(tree.pairs) < 2:
        return 0
    lo = np.array([min(i, j) for i, j in tree.pairs], dtype=np.int64)
    hi = np.array([max(i, j) for i, j in tree.pairs], dtype=np.int64)
    return _kernels.count_crossings(lo, hi)


def _content_depths(tree):
    return [tree.depths[p] for p in tree.content_positions()]


def tree_height(tree):
    """Edge count of the longest pseudo-root-to-node path, punct excluded.

    The pseudo-root edge contributes 1, so a one-word sentence has
    height 1 and the deepest non-punctuation node sits at depth
    height - 1.
    """
    depths = _content_depths(tree) or [tree.depths[tree.root_index]]
    return 1 + max(depths)


def depth_stats(tree):
    """Population mean and variance of non-punctuation node depths."""
    depths = _content_depths(tree)
    if not depths:
        raise UndefinedMetricError("no non-punctuation tokens")
    arr = np.asarray(depths, dtype=float)
    return float(arr.mean()), float(arr.var())


def _content_degrees(tree):
    degrees = []
    for pos in tree.content_positions():
        degrees.append(sum(1 for c in tree.children[pos] if not tree.punct_mask[c]))
    return degrees


def degree_stats(tree):
    """(max degree, population mean, population variance) over non-punct nodes.

    The degree of a node is its number of non-punctuation children.
    """
    degrees = _content_degrees(tree)
    if not degrees:
        raise UndefinedMetricError("no non-punctuation tokens")
    arr = np.asarray(degrees, dtype=float)
    return int(arr.max()), float(arr.mean()), float(arr.var())


def leaves(tree):
    """Count of non-punctuation nodes without non-punctuation children."""
    return sum(1 for d in _content_degrees(tree) if d == 0)


def head_final_ratio(tree):
    """Mean over heads of the fraction of their dependents standing left.

    A head here is a non-punctuation node with at least one
    non-punctuation child; punctuation dependents do not enter the
    per-head fractions.
    """
    fractions = []
    for pos in tree.content_positions():
        deps = [c for c in tree.children[pos] if not tree.punct_mask[c]]
        if deps:
            fractions.append(sum(1 for c in deps if c < pos) / len(deps))
    if not fractions:
        raise UndefinedMetricError("no head with non-punctuation dependents")
    return sum(fractions) / len(fractions)


def head_final_distance(tree):
    """Token-level edit distance to the fully head-final permutation."""
    original = [tok.form for tok in tree.tokens]
    permuted = [tree.tokens[p - 1].form for p in head_final_linearize(tree)]
    return levenshtein(original, permuted)


def longest_path_distance(tree):
    """Heaviest root-to-leaf path, edges weighted by dependency distance.

    The pseudo-root edge weighs the root word's position; descent only
    passes through non-punctuation children.
    """
    best = 0
    stack = [(tree.root_index, 0)]
    while stack:
        node, acc = stack.pop()
        if acc > best:
            best = acc
        for child in tree.children[node]:
            if not tree.punct_mask[child]:
                stack.append((child, acc + abs(child - node)))
    return tree.root_index + best


def random_tree_distance(tree, rng):
    """Edit distance between the punctuation-free tree and a random tree.

    The comparison tree is drawn from the uniform-attachment law over
    the same node count, so the value is deterministic given the
    generator state.
    """
    reduced = content_tree(tree)
    drawn = random_tree(len(reduced), rng)
    return tree_edit_distance(reduced, drawn)


def compute_all(tree, rng, meta=None):
    """Assemble the full metric vector; undefined metrics become None."""
    def attempt(fn, *args):
        try:
            return fn(*args)
        except UndefinedMetricError:
            return None

    mdd_value = attempt(mdd, tree)
    ndd_value = attempt(ndd, tree) if mdd_value is not None else None
    depth_mean, depth_var = attempt(depth_stats, tree) or (None, None)
    tree_degree, degree_mean, degree_var = attempt(degree_stats, tree) or (None, None, None)
    return MetricVector(
        mdd=mdd_value,
        ndd=ndd_value,
        root_distance=root_distance(tree),
        crossings=crossings(tree),
        tree_height=tree_height(tree),
        depth_mean=depth_mean,
        depth_var=depth_var,
        tree_degree=tree_degree,
        degree_mean=degree_mean,
        degree_var=degree_var,
        leaves=leaves(tree),
        head_final_ratio=attempt(head_final_ratio, tree),
        head_final_distance=head_final_distance(tree),
        longest_path_distance=longest_path_distance(tree),
        random_tree_distance=random_tree_distance(tree, rng),
        sentence_length=len(tree.tokens),
        content_length=tree.content_length,
        meta=dict(meta or {}),
    )
