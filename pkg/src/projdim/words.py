"""Exact matrix algebra over the generator semigroup and word-tree enumeration.

Generator products are kept as tuples of Python ints, so arithmetic is exact at
any depth (Python ints are arbitrary precision; no overflow checks needed).
Floating point enters only through singular values and projective images.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

Rows = tuple  # tuple of row tuples, entries int (generators) or float (hole matrices)


def _as_rows(entries) -> Rows:
    return tuple(tuple(row) for row in entries)


def _det(rows: Rows):
    """Determinant by fraction-free Gaussian elimination (Bareiss).

    Exact for integer input; for float input accurate enough for the
    1e-12 unimodularity tolerance on hole matrices.
    """
    n = len(rows)
    a = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j])
                if isinstance(prev, int) and prev != 1 and isinstance(a[i][j], int):
                    a[i][j] //= prev
                elif prev != 1:
                    a[i][j] /= prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _matmul(a: Rows, b: Rows) -> Rows:
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def _column_sums(rows: Rows) -> tuple:
    n = len(rows)
    return tuple(sum(rows[i][j] for i in range(n)) for j in range(n))


@dataclass(frozen=True)
class GeneratorMatrix:
    """A non-negative unimodular integer matrix N_j.

    Column sums must all be >= 1; that is what makes norm-cap pruning of the
    word tree exact (appending such a generator cannot shrink any column sum).
    """

    entries: Rows
    det_sign: int = field(init=False)

    def __post_init__(self):
        rows = _as_rows(self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("generator matrix must be square")
        if any(not isinstance(v, int) for r in rows for v in r):
            raise ValueError("generator entries must be integers")
        if any(v < 0 for r in rows for v in r):
            raise ValueError("generator entries must be non-negative")
        d = _det(rows)
        if d not in (1, -1):
            raise ValueError("unimodularity violated: |det| = %r" % (abs(d),))
        if any(s < 1 for s in _column_sums(rows)):
            raise ValueError("generator has a zero column sum; exact pruning impossible")
        object.__setattr__(self, "det_sign", 1 if d > 0 else -1)

    @property
    def size(self) -> int:
        return len(self.entries)

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.float64)


@dataclass(frozen=True)
class HoleMatrix:
    """A non-negative matrix with |det| = 1 mapping the simplex onto a hole.

    Entries may be irrational (the Rauzy hole matrix is alpha * (J - I) with
    alpha = 2^(-1/3)), so they are stored as floats and unimodularity is
    checked to 1e-12 only.
    """

    entries: Rows

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("hole matrix must be square")
        if any(v < 0 for r in rows for v in r):
            raise ValueError("hole matrix entries must be non-negative")
        d = abs(_det(rows))
        if abs(d - 1.0) > 1e-12:
            raise ValueError("hole matrix not unimodular: |det| = %r" % (d,))

    @property
    def size(self) -> int:
        return len(self.entries)

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.float64)


@dataclass(frozen=True)
class Word:
    """A finite word over the generator alphabet {1..m}; may be empty."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(l) for l in self.letters))
        if any(l < 1 for l in self.letters):
            raise ValueError("letters are 1-based generator indices")

    def __len__(self) -> int:
        return len(self.letters)

    def extended(self, letter: int) -> "Word":
        return Word(self.letters + (letter,))


@dataclass(frozen=True)
class ExtendedWord:
    """A word together with a terminating hole index k in {1..K}."""

    word: Word
    hole_index: int = 1

    def __post_init__(self):
        if self.hole_index < 1:
            raise ValueError("hole index is 1-based")

    def __len__(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class MatrixProduct:
    """N_word = N_{i1} * ... * N_{in}, exactly; identity for the empty word."""

    entries: Rows
    word: Word

    @staticmethod
    def identity(size: int) -> "MatrixProduct":
        rows = tuple(tuple(1 if i == j else 0 for j in range(size)) for i in range(size))
        return MatrixProduct(rows, Word())

    @property
    def size(self) -> int:
        return len(self.entries)

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.float64)

    def determinant(self) -> int:
        return _det(self.entries)


def compose(prefix: MatrixProduct, letter: int, generators: Sequence[GeneratorMatrix]) -> MatrixProduct:
    """Extend a product by one letter: exact integer multiply on the right."""
    if not 1 <= letter <= len(generators):
        raise ValueError("letter %d outside alphabet 1..%d" % (letter, len(generators)))
    g = generators[letter - 1]
    return MatrixProduct(_matmul(prefix.entries, g.entries), prefix.word.extended(letter))


def projectivize(matrix, x) -> np.ndarray:
    """T(x) = N x / |N x|_1 for x on the unit simplex."""
    if isinstance(matrix, (MatrixProduct, GeneratorMatrix, HoleMatrix)):
        n = matrix.as_array()
    else:
        n = np.asarray(matrix, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < -1e-12):
        raise ValueError("input point has a negative coordinate")
    if abs(x.sum() - 1.0) > 1e-9:
        raise ValueError("input point is not on the unit simplex (|x|_1 != 1)")
    y = n @ x
    s = y.sum()
    if s <= 0:
        raise ValueError("image has non-positive l1 norm")
    return y / s


def l1_operator_norm(matrix) -> int:
    """Max column sum; equals the l1 -> l1 operator norm for non-negative matrices."""
    if isinstance(matrix, (MatrixProduct, GeneratorMatrix)):
        return max(_column_sums(matrix.entries))
    rows = _as_rows(matrix)
    return max(_column_sums(rows))


def singular_values(matrix, escalate: bool = True) -> tuple[float, ...]:
    """Singular values in descending order.

    Computed by LAPACK on a float copy.  When the smallest value drops below
    1e-12 of the largest the float answer is untrustworthy, so it is
    recomputed at 50-digit precision with mpmath (on the exact integer
    entries when available).
    """
    if isinstance(matrix, (MatrixProduct, GeneratorMatrix, HoleMatrix)):
        rows = matrix.entries
        arr = matrix.as_array()
    else:
        rows = _as_rows(matrix)
        arr = np.asarray(matrix, dtype=np.float64)
    try:
        sv = np.linalg.svd(arr, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("SVD failed to converge") from exc
    if escalate and sv[-1] < 1e-12 * sv[0]:
        import mpmath

        with mpmath.workdps(50):
            m = mpmath.matrix([[mpmath.mpf(v) if not isinstance(v, int) else v for v in row] for row in rows])
            vals = mpmath.svd_r(m, compute_uv=False)
            sv = np.array(sorted((float(v) for v in vals), reverse=True))
    return tuple(float(v) for v in sv)


class PruningPolicy:
    """Base class for word-tree truncation policies."""


@dataclass(frozen=True)
class MaxDepth(PruningPolicy):
    depth: int

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be >= 0")


@dataclass(frozen=True)
class NormCap(PruningPolicy):
    """Visit exactly the words with l1 operator norm <= cap."""

    cap: int

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError("norm cap must be >= 1")


@dataclass(frozen=True)
class VolumeFloor(PruningPolicy):
    """Prune subtrees whose simplex-image volume falls below the floor.

    Sound because image volumes only shrink along a branch; callers must only
    use it for monotone accumulations over such volumes.
    """

    floor: float

    def __post_init__(self):
        if not self.floor > 0:
            raise ValueError("volume floor must be > 0")


@dataclass
class TraversalSummary:
    visited: int = 0
    counts_per_depth: dict = field(default_factory=dict)
    max_entry: int = 0

    def record(self, depth: int, max_entry: int):
        self.visited += 1
        self.counts_per_depth[depth] = self.counts_per_depth.get(depth, 0) + 1
        if max_entry > self.max_entry:
            self.max_entry = max_entry


def enumerate_words(
    generators: Sequence[GeneratorMatrix],
    policy: PruningPolicy,
    visitor: Callable[[Word, MatrixProduct], None] | None = None,
    volume_of: Callable[[MatrixProduct], float] | None = None,
) -> TraversalSummary:
    """Depth-first walk of the word tree under a truncation policy.

    Yields every (word, product) pair to the visitor, including the empty
    word.  With NormCap the visit set is exactly {i : ||N_i|| <= cap}: every
    generator has all column sums >= 1, so extending a word can only grow
    column sums, and a subtree can be cut as soon as its root exceeds the cap.
    """
    m = len(generators)
    if m < 1:
        raise ValueError("need at least one generator")
    size = generators[0].size
    if isinstance(policy, VolumeFloor) and volume_of is None:
        raise ValueError("volume-floor policy needs a volume_of callback")

    summary = TraversalSummary()
    root = MatrixProduct.identity(size)
    stack = [root]
    while stack:
        prod = stack.pop()
        summary.record(len(prod.word), max(max(r) for r in prod.entries))
        if visitor is not None:
            visitor(prod.word, prod)
        if isinstance(policy, MaxDepth) and len(prod.word) >= policy.depth:
            continue
        for letter in range(m, 0, -1):  # reversed push => lexicographic pop order
            child = compose(prod, letter, generators)
            if isinstance(policy, NormCap) and l1_operator_norm(child) > policy.cap:
                continue
            if isinstance(policy, VolumeFloor) and volume_of(child) < policy.floor:
                continue
            stack.append(child)
    return summary
