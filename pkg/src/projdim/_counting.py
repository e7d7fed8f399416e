"""Exact census of matrix words by l1 operator norm.

The counting state is tiny: column sums compose as colsums(P @ N) =
N^T colsums(P), so a word's norm (max column sum) is determined by a
(d+1)-vector of integers and the whole tree can be walked without
materializing any matrix.  For the Rauzy generators the walk is folded
six-fold through the relabeling symmetry and jitted, which is what makes
norm caps around 1e5 (hundreds of billions of words) tractable.
"""
from __future__ import annotations

import numpy as np

from .system import IfsSystem, rauzy_system
from .words import GeneratorMatrix

# column sums stay below 2**31 only while cap + cap fits in int32
_MAX_FAST_CAP = 1 << 30

_HIST_CACHE: dict = {}
_RAUZY_FP = None


def norm_histogram_reference(generators, cap: int) -> np.ndarray:
    """hist[v] = #{words i : ||N_i|| == v}, v <= cap, by direct tree walk.

    Pure Python on arbitrary-size ints; termination requires that every
    sufficiently long word exceeds the cap (true for the systems in scope,
    where no generator is a permutation matrix).
    """
    if cap < 1:
        raise ValueError("norm cap must be >= 1")
    cols = []
    for g in generators:
        rows = g.entries if isinstance(g, GeneratorMatrix) else g
        size = len(rows)
        cols.append(tuple(tuple(rows[i][k] for i in range(size)) for k in range(size)))
    size = len(cols[0])
    hist = np.zeros(cap + 1, dtype=np.int64)
    stack = [(1,) * size]
    while stack:
        s = stack.pop()
        hist[max(s)] += 1
        for col in cols:
            child = tuple(sum(c[i] * s[i] for i in range(size)) for c in col)
            if max(child) <= cap:
                stack.append(child)
    return hist


def _rauzy_kernel():
    import numba

    @numba.njit(cache=True)
    def canon_hist(T):
        # Walk only S3-canonical words (letters appear in first-occurrence
        # order) and weight by orbit size: 3 while one letter is in play,
        # 6 once a second letter has appeared.  State per node is the
        # column-sum triple (a, b, c) plus the count k of distinct letters.
        hist = np.zeros(T + 1, dtype=np.int64)
        hist[1] = 1
        if T < 2:
            return hist
        cap = 2 * T + 8
        st = np.empty((cap, 4), dtype=np.int32)
        top = 0
        a = np.int32(1)
        b = np.int32(2)
        c = np.int32(2)
        k = np.int32(1)
        alive = True
        while alive:
            m = b if b > a else a
            if c > m:
                m = c
            hist[m] += 3 if k == 1 else 6
            ab = a + b
            ac = a + c
            bc = b + c
            n1 = ab if ab > ac else ac
            n2 = ab if ab > bc else bc
            n3 = ac if ac > bc else bc
            if k == 3:
                if n3 <= T:
                    st[top, 0] = ac
                    st[top, 1] = bc
                    st[top, 2] = c
                    st[top, 3] = 3
                    top += 1
                if n2 <= T:
                    st[top, 0] = ab
                    st[top, 1] = b
                    st[top, 2] = bc
                    st[top, 3] = 3
                    top += 1
                if n1 <= T:
                    b = ab
                    c = ac
                    continue
            elif k == 2:
                if n3 <= T:
                    st[top, 0] = ac
                    st[top, 1] = bc
                    st[top, 2] = c
                    st[top, 3] = 3
                    top += 1
                if n2 <= T:
                    st[top, 0] = ab
                    st[top, 1] = b
                    st[top, 2] = bc
                    st[top, 3] = 2
                    top += 1
                if n1 <= T:
                    b = ab
                    c = ac
                    continue
            else:
                if n2 <= T:
                    st[top, 0] = ab
                    st[top, 1] = b
                    st[top, 2] = bc
                    st[top, 3] = 2
                    top += 1
                if n1 <= T:
                    b = ab
                    c = ac
                    continue
            if top == 0:
                alive = False
            else:
                top -= 1
                a = st[top, 0]
                b = st[top, 1]
                c = st[top, 2]
                k = st[top, 3]
        return hist

    return canon_hist


def _is_rauzy(system: IfsSystem) -> bool:
    global _RAUZY_FP
    if _RAUZY_FP is None:
        _RAUZY_FP = frozenset(g.entries for g in rauzy_system().generators)
    return len(system.generators) == 3 and frozenset(
        g.entries for g in system.generators
    ) == _RAUZY_FP


def norm_histogram(system: IfsSystem, cap: int) -> np.ndarray:
    """Cached histogram of word norms up to cap; fast path for Rauzy."""
    cap = int(cap)
    if cap < 1:
        raise ValueError("norm cap must be >= 1")
    key = system.fingerprint()
    cached = _HIST_CACHE.get(key)
    if cached is not None and len(cached) > cap:
        return cached[: cap + 1]
    if _is_rauzy(system) and cap <= _MAX_FAST_CAP:
        hist = _rauzy_kernel()(cap)
    else:
        hist = norm_histogram_reference(system.generators, cap)
    _HIST_CACHE[key] = hist
    return hist


def word_count(system: IfsSystem, cap: int) -> int:
    """#{words i : ||N_i|| <= cap}, the counting function of the semigroup."""
    return int(norm_histogram(system, cap).sum())
