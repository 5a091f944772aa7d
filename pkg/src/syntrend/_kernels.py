"""Hot numeric kernels with optional numba acceleration.

Every kernel has a pure numpy/Python implementation (``*_py``) and, when
numba is importable, an ``@njit``-compiled twin. The compiled versions are
used by default; set the environment variable ``SYNTREND_NO_NUMBA=1`` to
force the fallback path (useful for debugging and for the benchmark in
``benchmarks/bench_kernels.py``).

All kernels operate on integer-coded arrays; callers do the encoding.
"""

import os

import numpy as np

_TRUTHY = {"1", "true", "yes", "on"}


def _numba_disabled():
    return os.environ.get("SYNTREND_NO_NUMBA", "").strip().lower() in _TRUTHY


def levenshtein_codes_py(a, b):
    """Unit-cost edit distance between two int arrays.

    Row-sweep DP; the sequential dependency on insertions is resolved with
    the running-minimum trick so each row is a vectorised numpy pass.
    """
    n, m = a.shape[0], b.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n
    idx = np.arange(m + 1)
    prev = idx.copy()
    for i in range(1, n + 1):
        sub = prev[:-1] + (b != a[i - 1])
        cand = np.minimum(prev[1:] + 1, sub)
        row = np.concatenate(([i], cand))
        # row[j] = min over k<=j of cand[k] + (j - k)
        prev = np.minimum.accumulate(row - idx) + idx
    return int(prev[m])


def count_crossings_py(lo, hi):
    """Number of interleaving pairs among edges given as sorted endpoints.

    Edges e, f cross iff lo_e < lo_f < hi_e < hi_f (in either order).
    """
    if lo.shape[0] < 2:
        return 0
    a, b = lo[:, None], hi[:, None]
    c, d = lo[None, :], hi[None, :]
    cross = (a < c) & (c < b) & (b < d)
    return int(np.count_nonzero(np.triu(cross | cross.T, k=1)))


def mk_s_score_py(x):
    """Mann-Kendall S statistic: sum of sign(x_l - x_k) over pairs k < l."""
    s = 0
    n = x.shape[0]
    for k in range(n - 1):
        tail = x[k + 1:]
        s += int(np.count_nonzero(tail > x[k])) - int(np.count_nonzero(tail < x[k]))
    return s


def ted_core_py(lld1, lab1, kr1, lld2, lab2, kr2):
    """Zhang-Shasha ordered tree edit distance, unit costs.

    Nodes are numbered 1..n in left-to-right postorder. ``lld`` maps each
    node to its leftmost leaf descendant (index 0 unused), ``lab`` carries
    integer label codes, ``kr`` lists keyroot nodes in increasing order.
    Relabel cost is 0 on equal labels, 1 otherwise.
    """
    n1 = lld1.shape[0] - 1
    n2 = lld2.shape[0] - 1
    td = np.zeros((n1 + 1, n2 + 1), dtype=np.int64)
    fd = np.zeros((n1 + 2, n2 + 2), dtype=np.int64)
    for i_kr in kr1:
        li = lld1[i_kr]
        for j_kr in kr2:
            lj = lld2[j_kr]
            m = i_kr - li + 2
            n = j_kr - lj + 2
            ioff = li - 1
            joff = lj - 1
            fd[0, 0] = 0
            for x in range(1, m):
                fd[x, 0] = fd[x - 1, 0] + 1
            for y in range(1, n):
                fd[0, y] = fd[0, y - 1] + 1
            for x in range(1, m):
                for y in range(1, n):
                    if lld1[x + ioff] == li and lld2[y + joff] == lj:
                        cost = 0 if lab1[x + ioff] == lab2[y + joff] else 1
                        best = fd[x - 1, y - 1] + cost
                        if fd[x - 1, y] + 1 < best:
                            best = fd[x - 1, y] + 1
                        if fd[x, y - 1] + 1 < best:
                            best = fd[x, y - 1] + 1
                        fd[x, y] = best
                        td[x + ioff, y + joff] = best
                    else:
                        p = lld1[x + ioff] - 1 - ioff
                        q = lld2[y + joff] - 1 - joff
                        best = fd[p, q] + td[x + ioff, y + joff]
                        if fd[x - 1, y] + 1 < best:
                            best = fd[x - 1, y] + 1
                        if fd[x, y - 1] + 1 < best:
                            best = fd[x, y - 1] + 1
                        fd[x, y] = best
    return int(td[n1, n2])


USING_NUMBA = False

if not _numba_disabled():
    try:
        from numba import njit
    except ImportError:
        njit = None
    if njit is not None:

        @njit(cache=True)
        def _levenshtein_nb(a, b):
            n, m = a.shape[0], b.shape[0]
            if n == 0:
                return m
            if m == 0:
                return n
            prev = np.arange(m + 1)
            cur = np.empty(m + 1, dtype=np.int64)
            for i in range(1, n + 1):
                cur[0] = i
                ai = a[i - 1]
                for j in range(1, m + 1):
                    c = prev[j - 1] + (0 if b[j - 1] == ai else 1)
                    if prev[j] + 1 < c:
                        c = prev[j] + 1
                    if cur[j - 1] + 1 < c:
                        c = cur[j - 1] + 1
                    cur[j] = c
                prev, cur = cur, prev
            return prev[m]

        @njit(cache=True)
        def _crossings_nb(lo, hi):
            count = 0
            n = lo.shape[0]
            for e in range(n - 1):
                for f in range(e + 1, n):
                    if lo[e] < lo[f]:
                        if lo[f] < hi[e] and hi[e] < hi[f]:
                            count += 1
                    elif lo[f] < lo[e]:
                        if lo[e] < hi[f] and hi[f] < hi[e]:
                            count += 1
            return count

        @njit(cache=True)
        def _mk_s_nb(x):
            s = 0
            n = x.shape[0]
            for k in range(n - 1):
                for l in range(k + 1, n):
                    if x[l] > x[k]:
                        s += 1
                    elif x[l] < x[k]:
                        s -= 1
            return s

        @njit(cache=True)
        def _ted_nb(lld1, lab1, kr1, lld2, lab2, kr2):
            n1 = lld1.shape[0] - 1
            n2 = lld2.shape[0] - 1
            td = np.zeros((n1 + 1, n2 + 1), dtype=np.int64)
            fd = np.zeros((n1 + 2, n2 + 2), dtype=np.int64)
            for ii in range(kr1.shape[0]):
                i_kr = kr1[ii]
                li = lld1[i_kr]
                for jj in range(kr2.shape[0]):
                    j_kr = kr2[jj]
                    lj = lld2[j_kr]
                    m = i_kr - li + 2
                    n = j_kr - lj + 2
                    ioff = li - 1
                    joff = lj - 1
                    fd[0, 0] = 0
                    for x in range(1, m):
                        fd[x, 0] = fd[x - 1, 0] + 1
                    for y in range(1, n):
                        fd[0, y] = fd[0, y - 1] + 1
                    for x in range(1, m):
                        for y in range(1, n):
                            if lld1[x + ioff] == li and lld2[y + joff] == lj:
                                cost = 0 if lab1[x + ioff] == lab2[y + joff] else 1
                                best = fd[x - 1, y - 1] + cost
                                if fd[x - 1, y] + 1 < best:
                                    best = fd[x - 1, y] + 1
                                if fd[x, y - 1] + 1 < best:
                                    best = fd[x, y - 1] + 1
                                fd[x, y] = best
                                td[x + ioff, y + joff] = best
                            else:
                                p = lld1[x + ioff] - 1 - ioff
                                q = lld2[y + joff] - 1 - joff
                                best = fd[p, q] + td[x + ioff, y + joff]
                                if fd[x - 1, y] + 1 < best:
                                    best = fd[x - 1, y] + 1
                                if fd[x, y - 1] + 1 < best:
                                    best = fd[x, y - 1] + 1
                                fd[x, y] = best
            return td[n1, n2]

        def levenshtein_codes(a, b):
            return int(_levenshtein_nb(a, b))

        def count_crossings(lo, hi):
            return int(_crossings_nb(lo, hi))

        def mk_s_score(x):
            return int(_mk_s_nb(x))

        def ted_core(lld1, lab1, kr1, lld2, lab2, kr2):
            return int(_ted_nb(lld1, lab1, kr1, lld2, lab2, kr2))

        USING_NUMBA = True

if not USING_NUMBA:
    levenshtein_codes = levenshtein_codes_py
    count_crossings = count_crossings_py
    mk_s_score = mk_s_score_py
    ted_core = ted_core_py


def warmup():
    """Trigger JIT compilation of all kernels on tiny inputs."""
    one = np.array([1], dtype=np.int64)
    two = np.array([1, 2], dtype=np.int64)
    levenshtein_codes(one, two)
    count_crossings(two, two + 2)
    mk_s_score(np.array([0.0, 1.0]))
    lld = np.array([0, 1], dtype=np.int64)  # single-node tree, index 0 unused
    lab = np.array([0, 7], dtype=np.int64)
    kr = np.array([1], dtype=np.int64)
    ted_core(lld, lab, kr, lld.copy(), lab.copy(), kr.copy())
